#include "ftlab/exrec.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace ftlab {

namespace {

Site row0(int col) { return {0, col}; }

void set_block_roles(CircuitBuilder& b, const BlockLayout& block) {
    for (auto s : block.data_sites()) b.set_role(s, Role::Computational);
}

void emit_ec(CircuitBuilder& b, const BlockLayout& block) {
    emit_extraction(b, block, ExtractionKind::X);
    emit_extraction(b, block, ExtractionKind::Z);
}

Circuit memory_body() {
    CircuitBuilder b(14, 1, CircuitLevel::Logical);
    BlockLayout block{0};
    set_block_roles(b, block);
    emit_ec(b, block);
    std::size_t leading = b.depth();
    emit_ec(b, block);
    Circuit c = std::move(b).build();
    c.leading_layers = leading;
    c.outputs.push_back({"data", block.data_sites(), true});
    return c;
}

Circuit readout_body() {
    CircuitBuilder b(14, 1, CircuitLevel::Logical);
    BlockLayout block{0};
    set_block_roles(b, block);
    emit_ec(b, block);
    std::size_t leading = b.depth();
    // Transversal readout, then the block is prepared again inside an X stage.
    b.layer();
    for (auto s : block.data_sites()) b.measure(s);
    emit_extraction(b, block, ExtractionKind::X, true);
    emit_ec(b, block);
    Circuit c = std::move(b).build();
    c.leading_layers = leading;
    c.outputs.push_back({"data", block.data_sites(), true, true});
    return c;
}

// Leading (or trailing) EC on both slots of the SWAP exRec, run side by side.
Circuit twin_ec(const std::vector<Role>& roles) {
    BlockLayout left{0}, right{kSlotWidth};
    CircuitBuilder a(2 * kSlotWidth, 1, CircuitLevel::Logical);
    CircuitBuilder b(2 * kSlotWidth, 1, CircuitLevel::Logical);
    for (int i = 0; i < 2 * kSlotWidth; ++i) {
        a.set_role(row0(i), roles[static_cast<std::size_t>(i)]);
        b.set_role(row0(i), roles[static_cast<std::size_t>(i)]);
    }
    emit_ec(a, left);
    emit_ec(b, right);
    Circuit out = std::move(a).build();
    overlay(out, b.circuit(), 0, 0);
    return out;
}

// Joins two circuits with a row-0 routing network. Moves may start as soon as a
// column is no longer used by `lead` and may finish inside the idle head of `trail`.
Circuit join_with_route(Circuit lead, const Circuit& trail, const std::vector<std::pair<int, int>>& moves) {
    const int w = lead.width;
    const int ld = static_cast<int>(lead.depth());
    const int td = static_cast<int>(trail.depth());
    std::vector<int> last(static_cast<std::size_t>(w), -1), first(static_cast<std::size_t>(w), td);
    for (int t = 0; t < ld; ++t)
        for (const auto& op : lead.layers[static_cast<std::size_t>(t)].ops)
            for (auto s : op.sites) last[static_cast<std::size_t>(s.col)] = t;
    for (int t = td - 1; t >= 0; --t)
        for (const auto& op : trail.layers[static_cast<std::size_t>(t)].ops)
            for (auto s : op.sites) first[static_cast<std::size_t>(s.col)] = t;

    constexpr int kPlaceholder = -1, kFixed = -2;
    std::vector<int> start(static_cast<std::size_t>(w), kPlaceholder), target;
    std::vector<Role> roles = final_roles(lead);
    for (int c = 0; c < w; ++c)
        if (roles[static_cast<std::size_t>(c)] == Role::Computational) start[static_cast<std::size_t>(c)] = kFixed;
    for (auto [from, to] : moves) {
        if (start[static_cast<std::size_t>(from)] != kFixed) throw LayoutError("route source is not a computational qubit");
        start[static_cast<std::size_t>(from)] = static_cast<int>(target.size());
        target.push_back(to);
    }

    struct Step {
        int time;
        int left;
        bool both;
    };
    for (int core = 0; core <= 4 * w; ++core) {
        auto free_at = [&](int c, int tau) {
            if (tau < 0) return last[static_cast<std::size_t>(c)] < ld + tau;
            if (tau < core) return true;
            return first[static_cast<std::size_t>(c)] > tau - core;
        };
        std::vector<int> item = start;
        std::vector<Step> steps;
        auto done = [&] {
            for (std::size_t id = 0; id < target.size(); ++id)
                if (item[static_cast<std::size_t>(target[id])] != static_cast<int>(id)) return false;
            return true;
        };
        for (int tau = -ld; tau < core + td && !done(); ++tau) {
            std::vector<bool> used(static_cast<std::size_t>(w), false);
            for (int pass = 0; pass < 2; ++pass) {
                int parity = (tau + pass) & 1;
                for (int i = (parity + 2) % 2; i + 1 < w; i += 2) {
                    int x = item[static_cast<std::size_t>(i)], y = item[static_cast<std::size_t>(i + 1)];
                    if (used[static_cast<std::size_t>(i)] || used[static_cast<std::size_t>(i + 1)]) continue;
                    if (!free_at(i, tau) || !free_at(i + 1, tau)) continue;
                    if (x == kFixed || y == kFixed) continue;
                    bool want = false;
                    if (x >= 0 && y >= 0) want = target[static_cast<std::size_t>(x)] > target[static_cast<std::size_t>(y)];
                    else if (x >= 0) want = target[static_cast<std::size_t>(x)] > i;
                    else if (y >= 0) want = target[static_cast<std::size_t>(y)] < i + 1;
                    if (!want) continue;
                    std::swap(item[static_cast<std::size_t>(i)], item[static_cast<std::size_t>(i + 1)]);
                    used[static_cast<std::size_t>(i)] = used[static_cast<std::size_t>(i + 1)] = true;
                    steps.push_back({tau, i, x >= 0 && y >= 0});
                }
            }
        }
        if (!done()) continue;

        lead.layers.resize(static_cast<std::size_t>(ld + core));
        const std::size_t lead_points = lead.recoveries.size();
        append(lead, trail);
        for (const auto& st : steps) {
            Gate g{st.both ? GateKind::SingleErrorSwap : GateKind::SWAP, 0, 1, -1, {}};
            auto layer = static_cast<std::size_t>(ld + st.time);
            lead.layers[layer].ops.push_back(make_op2(row0(st.left), row0(st.left + 1), {g}));
            // Data that leaves before its recovery point is corrected where it now sits.
            for (std::size_t i = 0; i < lead_points; ++i) {
                auto& rp = lead.recoveries[i];
                if (rp.after_layer < layer) continue;
                for (auto& site : rp.data) {
                    if (site == row0(st.left)) site = row0(st.left + 1);
                    else if (site == row0(st.left + 1)) site = row0(st.left);
                }
            }
        }
        return lead;
    }
    throw LayoutError("no routing schedule between the circuits");
}

Circuit swap_body() {
    BlockLayout left{0}, right{kSlotWidth};
    std::vector<Role> roles(2 * kSlotWidth, Role::Placeholder);
    for (auto s : left.data_sites()) roles[static_cast<std::size_t>(s.col)] = Role::Computational;
    for (auto s : right.data_sites()) roles[static_cast<std::size_t>(s.col)] = Role::Computational;

    // Each block's data moves into the other slot; placeholders fill in behind.
    std::vector<std::pair<int, int>> moves;
    for (int k = 0; k < 7; ++k) {
        moves.push_back({left.data(k).col, right.data(k).col});
        moves.push_back({right.data(k).col, left.data(k).col});
    }
    Circuit lead = twin_ec(roles);
    lead.leading_layers = lead.depth();
    Circuit c = join_with_route(std::move(lead), twin_ec(roles), moves);
    // Block "a" started in the left slot and ends in the right one.
    c.outputs.push_back({"a", right.data_sites(), true});
    c.outputs.push_back({"b", left.data_sites(), true});
    return c;
}

// Cat-state measurement of the transversal operator T X T^dag on block A.
// The cat lives in A's ancilla window.
void emit_cat(CircuitBuilder& b, const BlockLayout& a, bool tdg, bool t, std::array<int, 7>& records) {
    using K = GateKind;
    int f = a.start + 3;
    auto line = [&](int i) { return row0(f + i); };
    b.layer();
    b.add(make_op2(line(3), line(2), {Gate{K::PrepZero, 0, 0, -1, {}}, Gate{K::PrepZero, 1, 0, -1, {}},
                                      Gate{K::H, 0, 0, -1, {}}, Gate{K::CNOT, 0, 1, -1, {}}}));
    b.layer();
    b.add(make_op2(line(3), line(4), {Gate{K::PrepZero, 1, 0, -1, {}}, Gate{K::CNOT, 0, 1, -1, {}}}));
    b.add(make_op2(line(2), line(1), {Gate{K::PrepZero, 1, 0, -1, {}}, Gate{K::CNOT, 0, 1, -1, {}}}));
    b.layer();
    b.add(make_op2(line(4), line(5), {Gate{K::PrepZero, 1, 0, -1, {}}, Gate{K::CNOT, 0, 1, -1, {}}}));
    b.add(make_op2(line(1), line(0), {Gate{K::PrepZero, 1, 0, -1, {}}, Gate{K::CNOT, 0, 1, -1, {}}}));
    b.layer();
    b.add(make_op2(line(5), line(6), {Gate{K::PrepZero, 1, 0, -1, {}}, Gate{K::CNOT, 0, 1, -1, {}}}));

    // Same split mesh as an extraction stage: data k meets cat line k.
    auto mesh = transposition_layers({0, 2, 4, 1, 3, 5});
    auto right = transposition_layers({0, 2, 4, 6, 1, 3, 5, 7});
    std::vector<std::vector<int>> layers(std::max(mesh.size(), right.size()));
    for (std::size_t i = 0; i < mesh.size(); ++i)
        for (int x : mesh[i]) layers[i].push_back(x);
    for (std::size_t i = 0; i < right.size(); ++i)
        for (int x : right[i]) layers[i].push_back(x + 6);
    auto run = [&](bool reverse) {
        auto ls = layers;
        if (reverse) std::reverse(ls.begin(), ls.end());
        for (const auto& l : ls) {
            b.layer();
            for (int i : l) b.transport(row0(a.start + i), row0(a.start + i + 1));
        }
    };
    run(false);
    auto cat_of = [&](int k) { return k < 3 ? row0(a.start + 2 * k + 1) : row0(a.start + 6 + 2 * (k - 3)); };
    auto data_of = [&](int k) { return k < 3 ? row0(a.start + 2 * k) : row0(a.start + 7 + 2 * (k - 3)); };
    if (tdg) {
        b.layer();
        for (int k = 0; k < 7; ++k) b.gate1(K::Tdg, data_of(k));
    }
    b.layer();
    for (int k = 0; k < 7; ++k) b.cnot(cat_of(k), data_of(k));
    if (t) {
        b.layer();
        for (int k = 0; k < 7; ++k) b.gate1(K::T, data_of(k));
    }
    run(true);

    b.layer();
    b.cnot(line(5), line(6));
    b.layer();
    b.cnot(line(4), line(5));
    b.cnot(line(1), line(0));
    b.layer();
    b.cnot(line(3), line(4));
    b.cnot(line(2), line(1));
    b.layer();
    b.add(make_op2(line(3), line(2), {Gate{K::CNOT, 0, 1, -1, {}}, Gate{K::H, 0, 0, -1, {}}}));
    b.layer();
    for (int i = 0; i < 7; ++i) records[static_cast<std::size_t>(i)] = b.measure(line(i));
}

std::vector<int> all_records(const std::array<int, 7>& r) { return {r.begin(), r.end()}; }

Circuit t_body() {
    using K = GateKind;
    BlockLayout d{0};   // data block; its ancilla window is columns 3..9
    BlockLayout a{14};  // resource block; cat states use columns 17..23
    CircuitBuilder lead(kTSkeletonWidth, 1, CircuitLevel::Logical);
    set_block_roles(lead, d);
    std::vector<Role> roles = lead.roles();
    emit_ec(lead, d);
    Circuit c = std::move(lead).build();
    c.leading_layers = c.depth();

    // Resource state preparation runs alongside the leading EC of the data block.
    CircuitBuilder prep(kTSkeletonWidth, 1, CircuitLevel::Logical);
    for (int i = 0; i < kTSkeletonWidth; ++i) prep.set_role(row0(i), roles[static_cast<std::size_t>(i)]);
    std::array<int, 7> cat1{}, cat2{}, cat3{};
    emit_extraction(prep, a, ExtractionKind::X, true);
    emit_cat(prep, a, true, false, cat1);
    emit_cat(prep, a, false, true, cat2);
    emit_ec(prep, a);
    emit_extraction(prep, a, ExtractionKind::X, true);
    emit_cat(prep, a, true, true, cat3);
    prep.layer();
    for (auto s : a.data_sites()) {
        Operation op = make_op1(K::CondZ, s);
        op.gates[0].condition = all_records(cat3);
        prep.add(std::move(op));
    }
    overlay(c, prep.circuit(), 0, 0);

    CircuitBuilder m(std::move(c));
    // Bring the blocks together pairwise, copy D onto A, read A out.
    std::vector<std::pair<int, int>> there, back;
    for (int k = 0; k < 7; ++k) {
        there.push_back({d.data(k).col, 2 * k});
        there.push_back({a.data(k).col, 2 * k + 1});
        back.push_back({2 * k, d.data(k).col});
    }
    emit_route(m, there, 0, kTSkeletonWidth);
    m.layer();
    for (int k = 0; k < 7; ++k) m.cnot(row0(2 * k), row0(2 * k + 1));
    m.layer();
    std::vector<int> readout;
    for (int k = 0; k < 7; ++k) readout.push_back(m.measure(row0(2 * k + 1)));
    emit_route(m, back, 0, kTSkeletonWidth);

    emit_extraction(m, d, ExtractionKind::X);
    emit_extraction(m, d, ExtractionKind::Z);
    m.layer();
    for (auto s : d.data_sites()) {
        Operation op = make_op1(K::CondS, s);
        op.gates[0].condition = readout;
        m.add(std::move(op));
    }
    emit_ec(m, d);
    Circuit out = std::move(m).build();
    out.outputs.push_back({"data", d.data_sites(), true});
    return out;
}

struct Bodies {
    std::array<Circuit, 4> logical;
    std::array<Circuit, 4> physical;
    std::array<AffineCount, 4> depth_n;  // natural depths, level n
    std::array<AffineCount, 4> depth_1;  // natural depths, level 1
};

const Bodies& bodies() {
    static const Bodies all = [] {
        Bodies out;
        for (auto k : kExRecKinds) {
            auto i = static_cast<std::size_t>(k);
            out.logical[i] = build_exrec_body(k);
            out.physical[i] = lower_to_physical(out.logical[i]);
            out.depth_n[i] = extract_census(out.logical[i], CensusLevel::Logical).depth;
            out.depth_1[i] = extract_census(out.physical[i], CensusLevel::Physical).depth;
        }
        return out;
    }();
    return all;
}

double unit_component(const std::array<AffineCount, 4>& d, bool slope) {
    double u = 0;
    for (auto k : kExRecKinds) {
        const AffineCount& a = d[static_cast<std::size_t>(k)];
        u = std::max(u, std::ceil((slope ? a.slope : a.base) / sync_multiple(k)));
    }
    return u;
}

}  // namespace

Gadget gadget_of(ExRecKind k) {
    switch (k) {
        case ExRecKind::Memory: return Gadget::Memory;
        case ExRecKind::Swap: return Gadget::Swap;
        case ExRecKind::Readout: return Gadget::Readout;
        case ExRecKind::TSkeleton: return Gadget::TGate;
    }
    return Gadget::Memory;
}

ExRecKind exrec_of(Gadget g) {
    switch (g) {
        case Gadget::Memory: return ExRecKind::Memory;
        case Gadget::Swap: return ExRecKind::Swap;
        case Gadget::Readout: return ExRecKind::Readout;
        case Gadget::TGate: return ExRecKind::TSkeleton;
    }
    return ExRecKind::Memory;
}

std::string_view to_string(ExRecKind k) {
    switch (k) {
        case ExRecKind::Memory: return "memory";
        case ExRecKind::Swap: return "swap";
        case ExRecKind::Readout: return "readout";
        case ExRecKind::TSkeleton: return "t";
    }
    return "?";
}

Circuit build_exrec_body(ExRecKind k) {
    switch (k) {
        case ExRecKind::Memory: return memory_body();
        case ExRecKind::Swap: return swap_body();
        case ExRecKind::Readout: return readout_body();
        case ExRecKind::TSkeleton: return t_body();
    }
    throw std::invalid_argument("unknown exRec kind");
}

int sync_multiple(ExRecKind k) {
    switch (k) {
        case ExRecKind::Memory:
        case ExRecKind::Swap: return 1;
        case ExRecKind::Readout: return 2;
        case ExRecKind::TSkeleton: return 5;
    }
    return 1;
}

CensusLevel census_level(CircuitLevel level) {
    return level == CircuitLevel::Physical ? CensusLevel::Physical : CensusLevel::Logical;
}

AffineCount sync_unit(CensusLevel level) {
    const auto& d = level == CensusLevel::Physical ? bodies().depth_1 : bodies().depth_n;
    return {unit_component(d, false), unit_component(d, true)};
}

Circuit assemble_exrec(ExRecKind k, CircuitLevel level) {
    auto i = static_cast<std::size_t>(k);
    bool phys = level == CircuitLevel::Physical;
    Circuit c = phys ? bodies().physical[i] : bodies().logical[i];
    AffineCount natural = phys ? bodies().depth_1[i] : bodies().depth_n[i];
    AffineCount unit = sync_unit(census_level(level));
    int mult = sync_multiple(k);
    CircuitBuilder b(std::move(c));
    // Gate pads last one unit each; readout pads carry the t_r-proportional part at level 1.
    b.pad(static_cast<std::size_t>(unit.base * mult - natural.base), Timing::Gate);
    b.pad(static_cast<std::size_t>(unit.slope * mult - natural.slope), Timing::Readout);
    return std::move(b).build();
}

CensusSet extracted_census() {
    CensusSet s;
    for (auto k : kExRecKinds) {
        Gadget g = gadget_of(k);
        s.leveln[idx(g)] = extract_census(assemble_exrec(k, CircuitLevel::Logical), CensusLevel::Logical, g);
        s.level1[idx(g)] = extract_census(assemble_exrec(k, CircuitLevel::Physical), CensusLevel::Physical, g);
    }
    return s;
}

}  // namespace ftlab
