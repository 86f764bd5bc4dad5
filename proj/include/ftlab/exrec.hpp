#pragma once

#include "ftlab/builders.hpp"
#include "ftlab/census.hpp"
#include "ftlab/circuit.hpp"

namespace ftlab {

enum class ExRecKind { Memory, Swap, Readout, TSkeleton };

inline constexpr std::array<ExRecKind, 4> kExRecKinds{ExRecKind::Memory, ExRecKind::Swap, ExRecKind::Readout,
                                                      ExRecKind::TSkeleton};

Gadget gadget_of(ExRecKind k);
ExRecKind exrec_of(Gadget g);
std::string_view to_string(ExRecKind k);

// Columns per logical qubit slot: 3 + 4 data around a 7-line ancilla region, plus 7 spare.
inline constexpr int kSlotWidth = 21;
// The T skeleton keeps its cat region inside the second block's ancilla window.
inline constexpr int kTSkeletonWidth = 28;

// Natural (unpadded) logical circuit of an exRec.
Circuit build_exrec_body(ExRecKind k);

// Synchronization multiple of each gadget relative to the memory exRec: 1, 1, 2 or 5.
int sync_multiple(ExRecKind k);
// Common duration unit after synchronization at the given level.
AffineCount sync_unit(CensusLevel level);

// Full exRec padded to the synchronization ratios. Physical level lowers every
// single-error SWAP first.
Circuit assemble_exrec(ExRecKind k, CircuitLevel level = CircuitLevel::Logical);

CensusLevel census_level(CircuitLevel level);
// Census of every gadget built by this library, at both levels.
CensusSet extracted_census();

}  // namespace ftlab
