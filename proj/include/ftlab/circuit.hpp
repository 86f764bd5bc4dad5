#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftlab/census.hpp"

namespace ftlab {

struct Site {
    int row = 0;
    int col = 0;
    auto operator<=>(const Site&) const = default;
};

bool adjacent(Site a, Site b);
std::string to_string(Site s);

enum class GateKind {
    Identity,
    PrepZero,
    H,
    X,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    CNOT,
    SWAP,
    SingleErrorSwap,  // logical-level macro, expanded by lower_to_physical
    MeasureZ,
    CondX,
    CondZ,
    CondS,
};

std::string_view to_string(GateKind k);
bool is_two_qubit(GateKind k);
bool is_conditional(GateKind k);

// One primitive gate inside an operation; a and b index the operation's sites.
struct Gate {
    GateKind kind = GateKind::Identity;
    std::uint8_t a = 0;
    std::uint8_t b = 0;           // CNOT target, SWAP partner
    int record = -1;              // MeasureZ output record
    std::vector<int> condition;   // Cond*: parity of these records
};

// A located (possibly compound) operation on one or two sites.
struct Operation {
    std::vector<Site> sites;
    std::vector<Gate> gates;

    bool has(GateKind k) const;
    bool transport_only() const;  // nothing but SWAP / SingleErrorSwap
};

enum class Timing { Gate, Readout, TGate };

struct Layer {
    std::vector<Operation> ops;
    bool padding = false;          // deliberate idle layer
    Timing pad_timing = Timing::Gate;
};

enum class Role : std::uint8_t { Placeholder, Computational };

enum class ExtractionKind { X, Z };  // X: detects Z errors on data; Z: detects X errors

// Where a syndrome-extraction stage hands its outcomes to the classical decoder.
struct RecoveryPoint {
    std::size_t after_layer = 0;
    ExtractionKind kind = ExtractionKind::X;
    std::vector<Site> data;    // data qubits in code order at that time
    std::vector<int> records;  // decode outcomes, ancilla order
    bool fresh = false;        // data lines were prepared inside this stage
};

// A register whose final error content is judged by the verifier.
struct OutputBlock {
    std::string name;
    std::vector<Site> sites;  // code order, final positions
    bool encoded = true;      // compare modulo the 7-qubit code stabilizer
    bool logical_zero = false;  // holds a freshly prepared |0_L>, so logical Z is harmless
};

enum class CircuitLevel { Physical, Logical };

class LayoutError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct Circuit {
    int width = 0;
    int rows = 1;
    CircuitLevel level = CircuitLevel::Logical;
    std::vector<Role> initial_roles;  // rows*width, row-major
    std::vector<Layer> layers;
    int num_records = 0;
    std::vector<RecoveryPoint> recoveries;
    std::vector<OutputBlock> outputs;
    std::size_t leading_layers = 0;  // leading EC of an exRec; excluded from the rectangle depth

    Circuit() = default;
    Circuit(int width, int rows, CircuitLevel level);

    int num_sites() const { return rows * width; }
    int index(Site s) const { return s.row * width + s.col; }
    Site site(int i) const { return {i / width, i % width}; }
    bool contains(Site s) const { return s.row >= 0 && s.row < rows && s.col >= 0 && s.col < width; }
    Role initial_role(Site s) const { return initial_roles[static_cast<std::size_t>(index(s))]; }
    void set_initial_role(Site s, Role r) { initial_roles[static_cast<std::size_t>(index(s))] = r; }
    std::size_t depth() const { return layers.size(); }
};

// Applies an operation's role effects (prep, swap, measure) to a role map.
void apply_roles(const Circuit& c, const Operation& op, std::vector<Role>& roles);
std::vector<Role> final_roles(const Circuit& c);

struct LayoutViolation {
    std::size_t step = 0;
    Site site{};
    std::string rule;
};
std::vector<LayoutViolation> check_layout(const Circuit& c);
std::string describe(const LayoutViolation& v);
// Throws LayoutError naming the first violation.
void require_legal(const Circuit& c);

// One line per layer, operations ordered by their first site.
std::string export_text(const Circuit& c);

// Incremental construction with live role tracking.
class CircuitBuilder {
   public:
    CircuitBuilder(int width, int rows, CircuitLevel level);
    explicit CircuitBuilder(Circuit base);

    void set_role(Site s, Role r);
    Role role(Site s) const { return roles_[static_cast<std::size_t>(c_.index(s))]; }
    const std::vector<Role>& roles() const { return roles_; }

    // Starts a new layer; operations go to the newest layer.
    void layer();
    void add(Operation op);
    void pad(std::size_t count, Timing t = Timing::Gate);

    void gate1(GateKind k, Site s);
    void cnot(Site control, Site target);
    void swap(Site a, Site b);
    void se_swap(Site a, Site b);
    // SWAP for computational/placeholder pairs, single-error SWAP otherwise.
    void transport(Site a, Site b);
    int measure(Site s);
    int reserve_record() { return c_.num_records++; }

    std::size_t depth() const { return c_.layers.size(); }
    Circuit& circuit() { return c_; }
    Circuit build() &&;

   private:
    Circuit c_;
    std::vector<Role> roles_;
};

Operation make_op1(GateKind k, Site s);
Operation make_op2(Site s0, Site s1, std::vector<Gate> gates);

// Appends src after dst's last layer, shifting columns and renumbering records.
void append(Circuit& dst, const Circuit& src, int col_offset = 0);
// Merges src into dst layer by layer from start_layer; sites must be disjoint.
void overlay(Circuit& dst, const Circuit& src, int col_offset, std::size_t start_layer);

// Expands single-error SWAPs on a one-row logical circuit into physical
// placeholder-mediated SWAP chains on a two-row lattice.
Circuit lower_to_physical(const Circuit& logical);

// Level-n durations in memory-rectangle units; level 1 is affine in t_r.
// The census depth covers the layers after Circuit::leading_layers.
enum class CensusLevel { Physical, Logical };
ExRecCensus extract_census(const Circuit& c, CensusLevel level, Gadget gadget = Gadget::Memory);
AffineCount layer_duration(const Layer& l, CensusLevel level);
Timing layer_timing(const Layer& l);

}  // namespace ftlab
