#pragma once

#include <array>
#include <utility>
#include <vector>

#include "ftlab/circuit.hpp"

namespace ftlab {

// Parity-check columns of the 7-qubit code in the layout produced by build_encode:
// X- and Z-type generators share the supports below.
inline constexpr std::array<std::array<int, 4>, 3> kCodeSupports{{{0, 3, 4, 6}, {1, 3, 5, 6}, {2, 3, 4, 5}}};

// Exchanges the computational qubits at c1 and c2 using only SWAPs with
// placeholders; other computational qubits stay put.
Circuit build_single_error_swap(int width, int rows, const std::vector<Role>& roles, Site c1, Site c2);
// Two computational qubits on row 0 with free placeholders beneath them.
Circuit build_single_error_swap_demo();
// Negative control: one bare SWAP between two computational qubits.
Circuit build_naive_swap();

// Seven-line logical circuits; fresh ancilla lines are prepared inside their first gate.
Circuit build_encode();
Circuit build_decode();  // ends with seven MeasureZ, records 0..6 in line order

// Interleaves d1..dk,a1..ak into d1,a1,...,dk,ak. The physical variant parks the
// ancilla on the second row while the data spreads out.
Circuit build_mesh(int k, CircuitLevel level = CircuitLevel::Logical);
Circuit build_unmesh(int k, CircuitLevel level = CircuitLevel::Logical);

// Data (3 left, 4 right) around a fresh 7-line ancilla region: 14 columns.
// With fresh_data the data lines start empty and are prepared by the stage.
Circuit build_syndrome_extraction(ExtractionKind kind, bool fresh_data = false);

// Layers of adjacent transpositions sorting `target` (target[i] = destination of
// the item now at position i) by odd-even transposition.
std::vector<std::vector<int>> transposition_layers(const std::vector<int>& target);

// Steps used by exRec assembly. Positions are row-0 columns of a logical circuit.
struct BlockLayout {
    int start = 0;  // first column of the left data group

    Site data(int k) const { return {0, k < 3 ? start + k : start + 10 + (k - 3)}; }
    Site ancilla(int k) const { return {0, start + 3 + k}; }
    std::vector<Site> data_sites() const;
};

void emit_encode(CircuitBuilder& b, int first_col);
void emit_decode(CircuitBuilder& b, int first_col, std::array<int, 7>& records);
// One extraction stage; fresh_data re-prepares the data lines inside the transversal gate.
void emit_extraction(CircuitBuilder& b, const BlockLayout& block, ExtractionKind kind, bool fresh_data = false);
// Moves row-0 items to new columns; items absent from `moves` are placeholders
// and keep their relative order.
void emit_route(CircuitBuilder& b, const std::vector<std::pair<int, int>>& moves, int lo, int hi);

}  // namespace ftlab
