#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ftlab/circuit.hpp"
#include "ftlab/pauli.hpp"

namespace ftlab {

// One located fault, applied right after the step it belongs to.
struct FaultSite {
    enum class Type { Gate, MeasurementFlip, PrepFlip, Idle };
    static constexpr std::size_t kNoOp = std::numeric_limits<std::size_t>::max();

    Type type = Type::Gate;
    std::size_t layer = 0;
    std::size_t op = kNoOp;  // index inside the layer; kNoOp for idle faults
    std::vector<Site> sites;  // support
    PauliOperator pauli{0};   // on `sites`; unused for measurement flips
    int record = -1;          // flipped record
};

struct FaultOptions {
    bool idle = false;  // also fault every untouched computational site in every step
};

// 15 Paulis per two-site operation, 3 per single-site operation, one flip per
// readout, an X after a bare preparation.
std::vector<FaultSite> enumerate_single_faults(const Circuit& c, FaultOptions opt = {});
std::string describe(const FaultSite& f, const Circuit& c);

struct Propagation {
    PauliOperator residual{0};        // over all sites at the end of the circuit
    std::vector<std::uint8_t> flips;  // by record id
};

// Pushes the fault through the rest of the circuit; recovery points are ignored.
// Throws UnsupportedOperation for T gates and for flipped classically controlled S.
Propagation propagate_pauli(const Circuit& c, const FaultSite& f);

// Errors on the 7-qubit code: x and z bit masks in code order.
struct BlockError {
    std::uint8_t x = 0;
    std::uint8_t z = 0;
    bool operator==(const BlockError&) const = default;
    BlockError operator*(BlockError o) const { return {std::uint8_t(x ^ o.x), std::uint8_t(z ^ o.z)}; }
};

// Smallest weight of e times any of the 64 code stabilizers; with logical_zero the
// block is known to hold |0_L> and logical Z joins the stabilizer.
int weight_mod_stabilizer(BlockError e, bool logical_zero = false);
int plain_weight(BlockError e);
PauliOperator to_pauli(BlockError e);
BlockError from_pauli(const PauliOperator& p);

struct Inconsistency {
    unsigned pattern = 0;
    std::string first;
    std::string second;
};

// Decode outcome pattern (bit j = flip of record j of the stage) -> recovery.
struct RecoveryTable {
    ExtractionKind kind = ExtractionKind::X;
    bool fresh = false;
    std::map<unsigned, BlockError> entries;
    std::vector<Inconsistency> inconsistencies;
    std::size_t cases = 0;  // fault and input cases folded into the table

    bool consistent() const { return inconsistencies.empty(); }
    std::optional<BlockError> lookup(unsigned pattern) const;
};

// Exhaustive table for a standalone extraction gadget with one recovery point.
// The no-fault case and input errors of the detected type must be undone
// exactly (up to stabilizer); every other case may leave at most one error.
// Fresh stages compare modulo the stabilizer of |0_L>.
RecoveryTable build_recovery_table(const Circuit& gadget, FaultOptions opt = {true});
// Tables for the physical-level extraction stage, built once.
const RecoveryTable& standard_recovery_table(ExtractionKind kind, bool fresh);

struct FaultFailure {
    std::string fault;
    std::string block;
    int weight = 0;
    std::string reason;
};

struct FaultRecord {
    std::size_t step = 0;
    std::string sites;
    std::string label;
    int weight = 0;  // worst output block; -1 when recovery had no entry
    bool passed = true;
};

struct FaultReport {
    std::string component;
    std::size_t faults = 0;
    int max_weight = 0;
    std::vector<FaultRecord> records;  // one per enumerated fault, in enumeration order
    std::vector<FaultFailure> failures;
    std::vector<Inconsistency> inconsistencies;
    std::vector<std::string> notes;

    bool passed() const { return failures.empty() && inconsistencies.empty(); }
};

// Every single fault, with the standard recovery applied at each recovery point;
// PASS iff each output block ends with weight <= 1 (modulo the code stabilizer
// for encoded blocks).
FaultReport verify_single_fault_tolerance(const Circuit& c, FaultOptions opt = {true});

std::string report_to_json(const FaultReport& r);

}  // namespace ftlab
