#include "ftlab/builders.hpp"

#include <algorithm>
#include <map>
#include <queue>

namespace ftlab {

namespace {

Gate g1(GateKind k, std::uint8_t a) { return Gate{k, a, 0, -1, {}}; }
Gate g2(GateKind k, std::uint8_t a, std::uint8_t b) { return Gate{k, a, b, -1, {}}; }

// Prepends PrepZero for every site of `op` that currently holds a placeholder.
Operation with_prep(const CircuitBuilder& b, Operation op) {
    std::vector<Gate> pre;
    for (std::uint8_t i = 0; i < op.sites.size(); ++i) {
        if (b.role(op.sites[i]) == Role::Placeholder) pre.push_back(g1(GateKind::PrepZero, i));
    }
    op.gates.insert(op.gates.begin(), pre.begin(), pre.end());
    return op;
}

Site row0(int col) { return {0, col}; }

void add_se_layer(CircuitBuilder& b, int base, std::initializer_list<int> lefts) {
    b.layer();
    for (int l : lefts) b.transport(row0(base + l), row0(base + l + 1));
}

// Applies precomputed transposition layers over columns starting at `base`.
void emit_layers(CircuitBuilder& b, const std::vector<std::vector<int>>& layers, int base) {
    for (const auto& l : layers) {
        b.layer();
        for (int i : l) b.transport(row0(base + i), row0(base + i + 1));
    }
}

std::vector<std::vector<int>> merge_layers(const std::vector<std::vector<int>>& a, int off_a,
                                           const std::vector<std::vector<int>>& b, int off_b) {
    std::vector<std::vector<int>> out(std::max(a.size(), b.size()));
    for (std::size_t t = 0; t < a.size(); ++t)
        for (int i : a[t]) out[t].push_back(i + off_a);
    for (std::size_t t = 0; t < b.size(); ++t)
        for (int i : b[t]) out[t].push_back(i + off_b);
    return out;
}

std::vector<int> interleave_targets(int k) {
    // Positions 0..k-1 hold the first block, k..2k-1 the second.
    std::vector<int> t(static_cast<std::size_t>(2 * k));
    for (int i = 0; i < k; ++i) {
        t[static_cast<std::size_t>(i)] = 2 * i;
        t[static_cast<std::size_t>(k + i)] = 2 * i + 1;
    }
    return t;
}

// Mesh network for the split block: left [d0 d1 d2 a0 a1 a2], right [a3..a6 d3..d6].
std::vector<std::vector<int>> split_mesh_layers() {
    std::vector<int> left = {0, 2, 4, 1, 3, 5};
    std::vector<int> right = {0, 2, 4, 6, 1, 3, 5, 7};
    return merge_layers(transposition_layers(left), 0, transposition_layers(right), 6);
}

}  // namespace

std::vector<Site> BlockLayout::data_sites() const {
    std::vector<Site> out;
    for (int k = 0; k < 7; ++k) out.push_back(data(k));
    return out;
}

std::vector<std::vector<int>> transposition_layers(const std::vector<int>& target) {
    {
        std::vector<int> sorted = target;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (sorted[i] != static_cast<int>(i)) throw LayoutError("routing targets must be a permutation");
        }
    }
    std::vector<std::vector<int>> best;
    bool have = false;
    for (int start = 0; start < 2; ++start) {
        std::vector<int> arr = target;
        std::vector<std::vector<int>> layers;
        int phase = start;
        int quiet = 0;
        while (quiet < 2) {
            std::vector<int> l;
            for (std::size_t i = static_cast<std::size_t>(phase); i + 1 < arr.size(); i += 2) {
                if (arr[i] > arr[i + 1]) {
                    std::swap(arr[i], arr[i + 1]);
                    l.push_back(static_cast<int>(i));
                }
            }
            if (l.empty()) {
                ++quiet;
            } else {
                quiet = 0;
                layers.push_back(std::move(l));
            }
            phase ^= 1;
        }
        if (!have || layers.size() < best.size()) {
            best = std::move(layers);
            have = true;
        }
    }
    return best;
}

Circuit build_single_error_swap(int width, int rows, const std::vector<Role>& roles, Site c1, Site c2) {
    CircuitBuilder b(width, rows, CircuitLevel::Physical);
    Circuit& c = b.circuit();
    if (roles.size() != static_cast<std::size_t>(c.num_sites())) throw LayoutError("role map size mismatch");
    for (int i = 0; i < c.num_sites(); ++i) b.set_role(c.site(i), roles[static_cast<std::size_t>(i)]);
    if (!c.contains(c1) || !c.contains(c2)) throw LayoutError("swap endpoints outside lattice");
    if (b.role(c1) != Role::Computational || b.role(c2) != Role::Computational)
        throw LayoutError("single-error swap endpoints must be computational");
    c.outputs.push_back({"pair", {c1, c2}, false});
    if (c1 == c2) return std::move(b).build();

    // Breadth-first search over the positions of the two travellers.
    int n = c.num_sites();
    auto key = [n](int p, int q) { return p * n + q; };
    int start = key(c.index(c1), c.index(c2));
    int goal = key(c.index(c2), c.index(c1));
    std::vector<int> prev(static_cast<std::size_t>(n * n), -1);
    std::queue<int> open;
    open.push(start);
    prev[static_cast<std::size_t>(start)] = start;
    auto neighbours = [&](int i) {
        std::vector<int> out;
        Site s = c.site(i);
        for (Site t : {Site{s.row - 1, s.col}, Site{s.row + 1, s.col}, Site{s.row, s.col - 1}, Site{s.row, s.col + 1}}) {
            if (c.contains(t)) out.push_back(c.index(t));
        }
        return out;
    };
    // Travellers may also step onto each other's original sites once vacated.
    std::vector<Role> free_roles = roles;
    free_roles[static_cast<std::size_t>(c.index(c1))] = Role::Placeholder;
    free_roles[static_cast<std::size_t>(c.index(c2))] = Role::Placeholder;
    auto open_site = [&](int i, int other) {
        return i != other && free_roles[static_cast<std::size_t>(i)] == Role::Placeholder;
    };
    while (!open.empty()) {
        int cur = open.front();
        open.pop();
        if (cur == goal) break;
        int p = cur / n, q = cur % n;
        for (int np : neighbours(p)) {
            if (!open_site(np, q)) continue;
            int k = key(np, q);
            if (prev[static_cast<std::size_t>(k)] < 0) {
                prev[static_cast<std::size_t>(k)] = cur;
                open.push(k);
            }
        }
        for (int nq : neighbours(q)) {
            if (!open_site(nq, p)) continue;
            int k = key(p, nq);
            if (prev[static_cast<std::size_t>(k)] < 0) {
                prev[static_cast<std::size_t>(k)] = cur;
                open.push(k);
            }
        }
    }
    if (prev[static_cast<std::size_t>(goal)] < 0) throw LayoutError("no placeholder path for single-error swap");
    std::vector<int> path;
    for (int k = goal; k != start; k = prev[static_cast<std::size_t>(k)]) path.push_back(k);
    path.push_back(start);
    std::reverse(path.begin(), path.end());

    // As-soon-as-possible layering of the individual moves.
    std::vector<std::size_t> last(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<std::pair<int, int>>> layers;
    for (std::size_t i = 1; i < path.size(); ++i) {
        int p0 = path[i - 1] / n, q0 = path[i - 1] % n;
        int p1 = path[i] / n, q1 = path[i] % n;
        int from = p0 != p1 ? p0 : q0;
        int to = p0 != p1 ? p1 : q1;
        std::size_t at = std::max(last[static_cast<std::size_t>(from)], last[static_cast<std::size_t>(to)]);
        if (layers.size() <= at) layers.resize(at + 1);
        layers[at].push_back({from, to});
        last[static_cast<std::size_t>(from)] = last[static_cast<std::size_t>(to)] = at + 1;
    }
    for (const auto& l : layers) {
        b.layer();
        for (auto [from, to] : l) b.swap(c.site(from), c.site(to));
    }
    Circuit out = std::move(b).build();
    out.outputs = {{"pair", {c1, c2}, false}};
    return out;
}

Circuit build_single_error_swap_demo() {
    std::vector<Role> roles(4, Role::Placeholder);
    roles[0] = roles[1] = Role::Computational;
    return build_single_error_swap(2, 2, roles, {0, 0}, {0, 1});
}

Circuit build_naive_swap() {
    CircuitBuilder b(2, 2, CircuitLevel::Physical);
    b.set_role({0, 0}, Role::Computational);
    b.set_role({0, 1}, Role::Computational);
    b.layer();
    b.swap({0, 0}, {0, 1});
    Circuit c = std::move(b).build();
    c.outputs.push_back({"pair", {{0, 0}, {0, 1}}, false});
    return c;
}

void emit_encode(CircuitBuilder& b, int f) {
    using K = GateKind;
    auto op = [&](int i, int j, std::vector<Gate> gates) { b.add(with_prep(b, make_op2(row0(f + i), row0(f + j), std::move(gates)))); };
    b.layer();
    op(2, 3, {g1(K::H, 0), g2(K::CNOT, 0, 1)});
    op(4, 5, {g1(K::H, 0), g2(K::CNOT, 0, 1)});
    b.layer();
    op(1, 2, {g2(K::CNOT, 1, 0), g2(K::SWAP, 0, 1)});
    b.transport(row0(f + 3), row0(f + 4));
    op(5, 6, {g1(K::H, 1), g2(K::CNOT, 1, 0), g2(K::SWAP, 0, 1)});
    b.layer();
    op(0, 1, {g2(K::CNOT, 1, 0), g2(K::SWAP, 0, 1)});
    op(2, 3, {g2(K::CNOT, 1, 0), g2(K::SWAP, 0, 1)});
    op(4, 5, {g2(K::CNOT, 1, 0), g2(K::SWAP, 0, 1)});
    b.layer();
    op(1, 2, {g2(K::CNOT, 1, 0)});
    op(3, 4, {g2(K::CNOT, 1, 0)});
    add_se_layer(b, f, {0, 2, 4});
    add_se_layer(b, f, {1, 3, 5});
}

void emit_decode(CircuitBuilder& b, int f, std::array<int, 7>& records) {
    using K = GateKind;
    auto op = [&](int i, int j, std::vector<Gate> gates) { b.add(make_op2(row0(f + i), row0(f + j), std::move(gates))); };
    b.layer();
    op(2, 3, {g2(K::CNOT, 0, 1)});
    op(4, 5, {g2(K::CNOT, 0, 1)});
    b.layer();
    op(1, 2, {g2(K::CNOT, 1, 0), g2(K::SWAP, 0, 1)});
    b.transport(row0(f + 3), row0(f + 4));
    op(5, 6, {g2(K::CNOT, 1, 0), g2(K::SWAP, 0, 1)});
    b.layer();
    op(0, 1, {g2(K::CNOT, 1, 0), g2(K::SWAP, 0, 1), g1(K::H, 0)});
    op(2, 3, {g2(K::CNOT, 1, 0), g2(K::SWAP, 0, 1)});
    op(4, 5, {g2(K::CNOT, 1, 0), g2(K::SWAP, 0, 1)});
    b.layer();
    op(1, 2, {g2(K::CNOT, 1, 0), g1(K::H, 1)});
    op(3, 4, {g2(K::CNOT, 1, 0), g1(K::H, 1)});
    b.layer();
    for (int i = 0; i < 7; ++i) records[static_cast<std::size_t>(i)] = b.measure(row0(f + i));
}

Circuit build_encode() {
    CircuitBuilder b(7, 1, CircuitLevel::Logical);
    emit_encode(b, 0);
    Circuit c = std::move(b).build();
    std::vector<Site> lines;
    for (int i = 0; i < 7; ++i) lines.push_back(row0(i));
    c.outputs.push_back({"ancilla", lines, true});
    return c;
}

Circuit build_decode() {
    CircuitBuilder b(7, 1, CircuitLevel::Logical);
    for (int i = 0; i < 7; ++i) b.set_role(row0(i), Role::Computational);
    std::array<int, 7> rec{};
    emit_decode(b, 0, rec);
    return std::move(b).build();
}

namespace {

std::vector<std::vector<std::pair<Site, Site>>> physical_mesh_moves(int k) {
    // Each traveller follows a fixed path; moves fire greedily when the next site is free.
    struct Traveller {
        std::vector<Site> path;
        std::size_t at = 0;
    };
    std::vector<Traveller> ts;
    for (int j = 0; j < k; ++j) {
        Traveller t;
        int col = k + j, dest = 2 * j + 1;
        t.path.push_back({0, col});
        if (col != dest) {
            t.path.push_back({1, col});
            for (int c = col - 1; c >= dest; --c) t.path.push_back({1, c});
            t.path.push_back({0, dest});
        }
        ts.push_back(t);
    }
    for (int j = k - 1; j >= 0; --j) {
        Traveller t;
        for (int c = j; c <= 2 * j; ++c) t.path.push_back({0, c});
        ts.push_back(t);
    }
    std::map<Site, bool> occupied;
    for (const auto& t : ts) occupied[t.path.front()] = true;
    std::vector<std::vector<std::pair<Site, Site>>> layers;
    for (int guard = 0; guard < 16 * k + 4; ++guard) {
        std::vector<std::pair<Site, Site>> l;
        std::map<Site, bool> touched;
        bool pending = false;
        for (auto& t : ts) {
            if (t.at + 1 >= t.path.size()) continue;
            pending = true;
            Site from = t.path[t.at], to = t.path[t.at + 1];
            if (occupied[to] || touched[from] || touched[to]) continue;
            touched[from] = touched[to] = true;
            l.push_back({from, to});
        }
        if (!pending) return layers;
        if (l.empty()) throw LayoutError("physical mesh schedule stalled");
        for (auto& [from, to] : l) {
            occupied[from] = false;
            occupied[to] = true;
            for (auto& t : ts) {
                if (t.at + 1 < t.path.size() && t.path[t.at] == from && t.path[t.at + 1] == to) {
                    ++t.at;
                    break;
                }
            }
        }
        layers.push_back(std::move(l));
    }
    throw LayoutError("physical mesh schedule did not finish");
}

Circuit mesh_circuit(int k, CircuitLevel level, bool reverse) {
    if (k < 1) throw std::domain_error("mesh size must be >= 1");
    int rows = level == CircuitLevel::Physical ? 2 : 1;
    CircuitBuilder b(2 * k, rows, level);
    for (int i = 0; i < 2 * k; ++i) b.set_role(row0(i), Role::Computational);
    std::vector<Site> blocked_d, blocked_a, split_d, split_a;
    for (int i = 0; i < k; ++i) {
        blocked_d.push_back(row0(i));
        blocked_a.push_back(row0(k + i));
        split_d.push_back(row0(2 * i));
        split_a.push_back(row0(2 * i + 1));
    }
    if (level == CircuitLevel::Physical) {
        auto layers = physical_mesh_moves(k);
        if (reverse) std::reverse(layers.begin(), layers.end());
        for (const auto& l : layers) {
            b.layer();
            for (auto [from, to] : l) b.swap(from, to);
        }
    } else {
        auto layers = transposition_layers(interleave_targets(k));
        if (reverse) std::reverse(layers.begin(), layers.end());
        emit_layers(b, layers, 0);
    }
    Circuit c = std::move(b).build();
    c.outputs.push_back({"data", reverse ? blocked_d : split_d, false});
    c.outputs.push_back({"ancilla", reverse ? blocked_a : split_a, false});
    return c;
}

}  // namespace

Circuit build_mesh(int k, CircuitLevel level) { return mesh_circuit(k, level, false); }
Circuit build_unmesh(int k, CircuitLevel level) { return mesh_circuit(k, level, true); }

void emit_extraction(CircuitBuilder& b, const BlockLayout& block, ExtractionKind kind, bool fresh_data) {
    using K = GateKind;
    int s = block.start;
    emit_encode(b, s + 3);
    auto mesh = split_mesh_layers();
    emit_layers(b, mesh, s);

    // After the mesh every data line sits next to its ancilla partner.
    b.layer();
    for (int k = 0; k < 7; ++k) {
        Site a = k < 3 ? row0(s + 2 * k + 1) : row0(s + 6 + 2 * (k - 3));
        Site d = k < 3 ? row0(s + 2 * k) : row0(s + 7 + 2 * (k - 3));
        std::vector<Gate> gates;
        if (fresh_data) gates.push_back(g1(K::PrepZero, 1));
        if (kind == ExtractionKind::X) {
            gates.push_back(g2(K::CNOT, 0, 1));
        } else {
            gates.push_back(g1(K::H, 0));
            gates.push_back(g2(K::CNOT, 1, 0));
            gates.push_back(g1(K::H, 0));
        }
        b.add(make_op2(a, d, std::move(gates)));
    }

    auto unmesh = mesh;
    std::reverse(unmesh.begin(), unmesh.end());
    emit_layers(b, unmesh, s);

    std::array<int, 7> rec{};
    emit_decode(b, s + 3, rec);
    RecoveryPoint rp;
    rp.after_layer = b.depth() - 1;
    rp.kind = kind;
    rp.data = block.data_sites();
    rp.records.assign(rec.begin(), rec.end());
    rp.fresh = fresh_data;
    b.circuit().recoveries.push_back(std::move(rp));
}

Circuit build_syndrome_extraction(ExtractionKind kind, bool fresh_data) {
    CircuitBuilder b(14, 1, CircuitLevel::Logical);
    BlockLayout block{0};
    if (!fresh_data)
        for (auto s : block.data_sites()) b.set_role(s, Role::Computational);
    emit_extraction(b, block, kind, fresh_data);
    Circuit c = std::move(b).build();
    c.outputs.push_back({"data", block.data_sites(), true});
    return c;
}

void emit_route(CircuitBuilder& b, const std::vector<std::pair<int, int>>& moves, int lo, int hi) {
    int n = hi - lo;
    std::vector<int> target(static_cast<std::size_t>(n), -1);
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    for (auto [from, to] : moves) {
        if (from < lo || from >= hi || to < lo || to >= hi) throw LayoutError("route outside window");
        if (target[static_cast<std::size_t>(from - lo)] >= 0 || taken[static_cast<std::size_t>(to - lo)])
            throw LayoutError("route is not one-to-one");
        target[static_cast<std::size_t>(from - lo)] = to - lo;
        taken[static_cast<std::size_t>(to - lo)] = true;
    }
    int next = 0;
    for (int i = 0; i < n; ++i) {
        if (target[static_cast<std::size_t>(i)] >= 0) continue;
        while (taken[static_cast<std::size_t>(next)]) ++next;
        target[static_cast<std::size_t>(i)] = next;
        taken[static_cast<std::size_t>(next)] = true;
    }
    emit_layers(b, transposition_layers(target), lo);
}

}  // namespace ftlab
