#include "ftlab/circuit.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace ftlab {

bool adjacent(Site a, Site b) {
    int dr = std::abs(a.row - b.row);
    int dc = std::abs(a.col - b.col);
    return dr + dc == 1;
}

std::string to_string(Site s) { return "r" + std::to_string(s.row) + "c" + std::to_string(s.col); }

std::string_view to_string(GateKind k) {
    switch (k) {
        case GateKind::Identity: return "I";
        case GateKind::PrepZero: return "P0";
        case GateKind::H: return "H";
        case GateKind::X: return "X";
        case GateKind::Z: return "Z";
        case GateKind::S: return "S";
        case GateKind::Sdg: return "SDG";
        case GateKind::T: return "T";
        case GateKind::Tdg: return "TDG";
        case GateKind::CNOT: return "CNOT";
        case GateKind::SWAP: return "SWAP";
        case GateKind::SingleErrorSwap: return "SESWAP";
        case GateKind::MeasureZ: return "MZ";
        case GateKind::CondX: return "CX";
        case GateKind::CondZ: return "CZ";
        case GateKind::CondS: return "CS";
    }
    return "?";
}

bool is_two_qubit(GateKind k) {
    return k == GateKind::CNOT || k == GateKind::SWAP || k == GateKind::SingleErrorSwap;
}

bool is_conditional(GateKind k) { return k == GateKind::CondX || k == GateKind::CondZ || k == GateKind::CondS; }

bool Operation::has(GateKind k) const {
    return std::any_of(gates.begin(), gates.end(), [k](const Gate& g) { return g.kind == k; });
}

bool Operation::transport_only() const {
    return !gates.empty() && std::all_of(gates.begin(), gates.end(), [](const Gate& g) {
        return g.kind == GateKind::SWAP || g.kind == GateKind::SingleErrorSwap;
    });
}

Circuit::Circuit(int w, int r, CircuitLevel lvl)
    : width(w), rows(r), level(lvl), initial_roles(static_cast<std::size_t>(w * r), Role::Placeholder) {
    if (w < 0 || r < 1 || r > 2) throw LayoutError("lattice must have 1 or 2 rows");
}

void apply_roles(const Circuit& c, const Operation& op, std::vector<Role>& roles) {
    auto at = [&](std::uint8_t i) -> Role& { return roles[static_cast<std::size_t>(c.index(op.sites[i]))]; };
    for (const auto& g : op.gates) {
        switch (g.kind) {
            case GateKind::PrepZero: at(g.a) = Role::Computational; break;
            case GateKind::SWAP:
            case GateKind::SingleErrorSwap: std::swap(at(g.a), at(g.b)); break;
            case GateKind::MeasureZ: at(g.a) = Role::Placeholder; break;
            default: break;
        }
    }
}

std::vector<Role> final_roles(const Circuit& c) {
    std::vector<Role> roles = c.initial_roles;
    for (const auto& l : c.layers) {
        for (const auto& op : l.ops) apply_roles(c, op, roles);
    }
    return roles;
}

std::vector<LayoutViolation> check_layout(const Circuit& c) {
    std::vector<LayoutViolation> out;
    std::vector<Role> roles = c.initial_roles;
    std::map<int, std::size_t> measured_at;
    bool physical = c.level == CircuitLevel::Physical;

    for (std::size_t step = 0; step < c.layers.size(); ++step) {
        std::set<Site> touched;
        for (const auto& op : c.layers[step].ops) {
            Site first = op.sites.empty() ? Site{} : op.sites.front();
            if (op.sites.empty() || op.sites.size() > 2) {
                out.push_back({step, first, "operation must act on 1 or 2 sites"});
                continue;
            }
            bool in_range = true;
            for (auto s : op.sites) {
                if (!c.contains(s)) {
                    out.push_back({step, s, "site outside lattice"});
                    in_range = false;
                }
                if (!touched.insert(s).second) out.push_back({step, s, "site touched twice in one step"});
            }
            if (!in_range) continue;
            if (op.sites.size() == 2 && !adjacent(op.sites[0], op.sites[1]))
                out.push_back({step, op.sites[0], "non-adjacent sites " + to_string(op.sites[0]) + " and " +
                                                      to_string(op.sites[1])});

            std::vector<Role> local = roles;
            auto role = [&](std::uint8_t i) -> Role& {
                return local[static_cast<std::size_t>(c.index(op.sites[i]))];
            };
            bool indices_ok = true;
            for (const auto& g : op.gates) {
                std::size_t need = is_two_qubit(g.kind) ? 2 : 1;
                if (g.a >= op.sites.size() || (need == 2 && (g.b >= op.sites.size() || g.a == g.b))) {
                    out.push_back({step, first, "gate references a site outside its operation"});
                    indices_ok = false;
                }
            }
            if (!indices_ok) continue;
            for (const auto& g : op.gates) {
                Site sa = op.sites[g.a];
                switch (g.kind) {
                    case GateKind::Identity: break;
                    case GateKind::PrepZero: role(g.a) = Role::Computational; break;
                    case GateKind::SingleErrorSwap:
                        if (physical) out.push_back({step, sa, "unexpanded single-error swap in physical circuit"});
                        std::swap(role(g.a), role(g.b));
                        break;
                    case GateKind::SWAP:
                        if (op.transport_only() && role(g.a) == Role::Computational &&
                            role(g.b) == Role::Computational)
                            out.push_back({step, sa, "direct swap of two computational qubits"});
                        std::swap(role(g.a), role(g.b));
                        break;
                    case GateKind::CNOT:
                        if (role(g.a) != Role::Computational || role(g.b) != Role::Computational)
                            out.push_back({step, sa, "gate acts on a placeholder"});
                        break;
                    case GateKind::MeasureZ:
                        if (role(g.a) != Role::Computational) out.push_back({step, sa, "measurement of a placeholder"});
                        if (g.record < 0 || measured_at.count(g.record))
                            out.push_back({step, sa, "measurement record missing or reused"});
                        else
                            measured_at[g.record] = step;
                        role(g.a) = Role::Placeholder;
                        break;
                    default:
                        if (role(g.a) != Role::Computational)
                            out.push_back({step, sa, "gate acts on a placeholder"});
                        if (is_conditional(g.kind)) {
                            if (g.condition.empty()) out.push_back({step, sa, "classical control without records"});
                            for (int r : g.condition) {
                                auto it = measured_at.find(r);
                                if (it == measured_at.end() || it->second >= step)
                                    out.push_back({step, sa, "classical control on a later measurement"});
                            }
                        }
                        break;
                }
            }
            apply_roles(c, op, roles);
        }
    }
    return out;
}

std::string describe(const LayoutViolation& v) {
    return "step " + std::to_string(v.step) + " at " + to_string(v.site) + ": " + v.rule;
}

void require_legal(const Circuit& c) {
    auto v = check_layout(c);
    if (!v.empty()) throw LayoutError(describe(v.front()));
}

namespace {

std::string gate_token(const Operation& op, const Gate& g) {
    std::string t(to_string(g.kind));
    if (op.sites.size() == 2) {
        if (g.kind == GateKind::CNOT) t += "." + std::to_string(g.a) + ">" + std::to_string(g.b);
        else if (!is_two_qubit(g.kind)) t += "." + std::to_string(g.a);
    }
    if (g.kind == GateKind::MeasureZ) t += "#" + std::to_string(g.record);
    if (is_conditional(g.kind)) {
        t += "?";
        for (std::size_t i = 0; i < g.condition.size(); ++i) t += (i ? "^" : "") + std::to_string(g.condition[i]);
    }
    return t;
}

Site shifted(Site s, int dc) { return {s.row, s.col + dc}; }

void renumber(Operation& op, int dc, int record_offset) {
    for (auto& s : op.sites) s = shifted(s, dc);
    for (auto& g : op.gates) {
        if (g.record >= 0) g.record += record_offset;
        for (auto& r : g.condition) r += record_offset;
    }
}

RecoveryPoint moved(RecoveryPoint rp, int dc, std::size_t layer_offset, int record_offset) {
    rp.after_layer += layer_offset;
    for (auto& s : rp.data) s = shifted(s, dc);
    for (auto& r : rp.records) r += record_offset;
    return rp;
}

}  // namespace

std::string export_text(const Circuit& c) {
    std::ostringstream os;
    for (const auto& l : c.layers) {
        std::vector<const Operation*> ops;
        for (const auto& op : l.ops) ops.push_back(&op);
        std::sort(ops.begin(), ops.end(), [](const Operation* a, const Operation* b) {
            return a->sites.front() < b->sites.front();
        });
        if (ops.empty()) {
            os << (l.pad_timing == Timing::Readout ? "PAD:R" : l.pad_timing == Timing::TGate ? "PAD:T" : "PAD");
        }
        for (std::size_t i = 0; i < ops.size(); ++i) {
            const Operation& op = *ops[i];
            if (i) os << ' ';
            for (std::size_t k = 0; k < op.gates.size(); ++k) os << (k ? "+" : "") << gate_token(op, op.gates[k]);
            os << '@';
            for (std::size_t k = 0; k < op.sites.size(); ++k) os << (k ? "," : "") << to_string(op.sites[k]);
        }
        os << '\n';
    }
    return os.str();
}

Operation make_op1(GateKind k, Site s) {
    Operation op;
    op.sites = {s};
    op.gates = {Gate{k, 0, 0, -1, {}}};
    return op;
}

Operation make_op2(Site s0, Site s1, std::vector<Gate> gates) {
    Operation op;
    op.sites = {s0, s1};
    op.gates = std::move(gates);
    return op;
}

CircuitBuilder::CircuitBuilder(int width, int rows, CircuitLevel level)
    : c_(width, rows, level), roles_(c_.initial_roles) {}

CircuitBuilder::CircuitBuilder(Circuit base) : c_(std::move(base)), roles_(final_roles(c_)) {}

void CircuitBuilder::set_role(Site s, Role r) {
    if (!c_.layers.empty()) throw LayoutError("initial roles must be set before the first layer");
    c_.set_initial_role(s, r);
    roles_[static_cast<std::size_t>(c_.index(s))] = r;
}

void CircuitBuilder::layer() { c_.layers.emplace_back(); }

void CircuitBuilder::add(Operation op) {
    if (c_.layers.empty()) layer();
    for (auto s : op.sites) {
        if (!c_.contains(s)) throw LayoutError("site " + to_string(s) + " outside lattice");
    }
    apply_roles(c_, op, roles_);
    c_.layers.back().ops.push_back(std::move(op));
}

void CircuitBuilder::pad(std::size_t count, Timing t) {
    for (std::size_t i = 0; i < count; ++i) {
        Layer l;
        l.padding = true;
        l.pad_timing = t;
        c_.layers.push_back(std::move(l));
    }
}

void CircuitBuilder::gate1(GateKind k, Site s) { add(make_op1(k, s)); }

void CircuitBuilder::cnot(Site control, Site target) {
    add(make_op2(control, target, {Gate{GateKind::CNOT, 0, 1, -1, {}}}));
}

void CircuitBuilder::swap(Site a, Site b) { add(make_op2(a, b, {Gate{GateKind::SWAP, 0, 1, -1, {}}})); }

void CircuitBuilder::se_swap(Site a, Site b) {
    add(make_op2(a, b, {Gate{GateKind::SingleErrorSwap, 0, 1, -1, {}}}));
}

void CircuitBuilder::transport(Site a, Site b) {
    if (role(a) == Role::Computational && role(b) == Role::Computational) se_swap(a, b);
    else swap(a, b);
}

int CircuitBuilder::measure(Site s) {
    Operation op = make_op1(GateKind::MeasureZ, s);
    int rec = c_.num_records++;
    op.gates[0].record = rec;
    add(std::move(op));
    return rec;
}

Circuit CircuitBuilder::build() && { return std::move(c_); }

void append(Circuit& dst, const Circuit& src, int col_offset) {
    overlay(dst, src, col_offset, dst.layers.size());
}

void overlay(Circuit& dst, const Circuit& src, int col_offset, std::size_t start_layer) {
    if (src.rows != dst.rows) throw LayoutError("cannot compose circuits with different row counts");
    if (src.width + col_offset > dst.width || col_offset < 0)
        throw LayoutError("composed circuit does not fit the lattice");
    int rec = dst.num_records;
    if (dst.layers.size() < start_layer + src.layers.size()) dst.layers.resize(start_layer + src.layers.size());
    for (std::size_t i = 0; i < src.layers.size(); ++i) {
        Layer& d = dst.layers[start_layer + i];
        const Layer& s = src.layers[i];
        std::set<Site> used;
        for (const auto& op : d.ops) used.insert(op.sites.begin(), op.sites.end());
        if (d.ops.empty() && !d.padding) {
            d.padding = s.padding;
            d.pad_timing = s.pad_timing;
        } else if (!s.padding) {
            d.padding = false;
        }
        if (s.padding && s.pad_timing != Timing::Gate && d.pad_timing == Timing::Gate) d.pad_timing = s.pad_timing;
        for (Operation op : s.ops) {
            renumber(op, col_offset, rec);
            for (auto site : op.sites) {
                if (!used.insert(site).second)
                    throw LayoutError("overlay collision at " + to_string(site) + " in step " +
                                      std::to_string(start_layer + i));
            }
            d.ops.push_back(std::move(op));
        }
    }
    for (const auto& rp : src.recoveries) dst.recoveries.push_back(moved(rp, col_offset, start_layer, rec));
    dst.num_records += src.num_records;
}

Circuit lower_to_physical(const Circuit& logical) {
    if (logical.level == CircuitLevel::Physical) return logical;
    if (logical.rows != 1) throw LayoutError("logical circuits must occupy a single row");
    Circuit out(logical.width, 2, CircuitLevel::Physical);
    for (int col = 0; col < logical.width; ++col) out.set_initial_role({0, col}, logical.initial_role({0, col}));
    out.num_records = logical.num_records;
    out.outputs = logical.outputs;

    std::vector<Role> roles = logical.initial_roles;
    std::vector<std::size_t> last_sub(logical.layers.size(), 0);
    for (std::size_t li = 0; li < logical.layers.size(); ++li) {
        const Layer& l = logical.layers[li];
        std::array<Layer, 3> sub{};
        bool chained = false;
        for (const auto& op : l.ops) {
            bool macro = op.has(GateKind::SingleErrorSwap);
            if (!macro) {
                sub[0].ops.push_back(op);
                continue;
            }
            if (op.gates.size() != 1) throw LayoutError("single-error swap cannot be compounded");
            Site a = op.sites[0];
            Site b = op.sites[1];
            if (a.col > b.col) std::swap(a, b);
            bool ca = roles[static_cast<std::size_t>(a.col)] == Role::Computational;
            bool cb = roles[static_cast<std::size_t>(b.col)] == Role::Computational;
            Site a1{1, a.col};
            Site b1{1, b.col};
            auto sw = [](Site x, Site y) { return make_op2(x, y, {Gate{GateKind::SWAP, 0, 1, -1, {}}}); };
            if (ca && cb) {
                // a steps down, b slides over, a climbs back up behind it.
                sub[0].ops.push_back(sw(a, a1));
                sub[1].ops.push_back(sw(b, a));
                sub[1].ops.push_back(sw(a1, b1));
                sub[2].ops.push_back(sw(b1, b));
                chained = true;
            } else {
                sub[0].ops.push_back(sw(a, b));
            }
        }
        sub[0].padding = l.padding;
        sub[0].pad_timing = l.pad_timing;
        for (const auto& op : l.ops) {
            for (const auto& g : op.gates) {
                if (g.kind == GateKind::PrepZero) roles[static_cast<std::size_t>(op.sites[g.a].col)] = Role::Computational;
                if (g.kind == GateKind::SWAP || g.kind == GateKind::SingleErrorSwap)
                    std::swap(roles[static_cast<std::size_t>(op.sites[g.a].col)],
                              roles[static_cast<std::size_t>(op.sites[g.b].col)]);
                if (g.kind == GateKind::MeasureZ) roles[static_cast<std::size_t>(op.sites[g.a].col)] = Role::Placeholder;
            }
        }
        out.layers.push_back(std::move(sub[0]));
        if (chained) {
            out.layers.push_back(std::move(sub[1]));
            out.layers.push_back(std::move(sub[2]));
        }
        last_sub[li] = out.layers.size() - 1;
    }
    if (logical.leading_layers > 0) out.leading_layers = last_sub.at(logical.leading_layers - 1) + 1;
    for (auto rp : logical.recoveries) {
        rp.after_layer = last_sub.at(rp.after_layer);
        out.recoveries.push_back(std::move(rp));
    }
    return out;
}

Timing layer_timing(const Layer& l) {
    if (l.padding && l.ops.empty()) return l.pad_timing;
    bool t = false;
    for (const auto& op : l.ops) {
        if (op.has(GateKind::MeasureZ)) return Timing::Readout;
        t = t || op.has(GateKind::T) || op.has(GateKind::Tdg);
    }
    return t ? Timing::TGate : Timing::Gate;
}

AffineCount layer_duration(const Layer& l, CensusLevel level) {
    Timing t = layer_timing(l);
    if (level == CensusLevel::Logical) {
        switch (t) {
            case Timing::Gate: return {1, 0};
            case Timing::Readout: return {2, 0};
            case Timing::TGate: return {5, 0};
        }
    }
    return t == Timing::Readout ? AffineCount{0, 1} : AffineCount{1, 0};
}

ExRecCensus extract_census(const Circuit& c, CensusLevel level, Gadget gadget) {
    KindArray<AffineCount> n{};
    AffineCount depth{};
    std::vector<Role> roles = c.initial_roles;
    auto add = [](AffineCount& a, AffineCount d) {
        a.base += d.base;
        a.slope += d.slope;
    };
    for (std::size_t li = 0; li < c.layers.size(); ++li) {
        const Layer& l = c.layers[li];
        AffineCount dur = layer_duration(l, level);
        if (li >= c.leading_layers) add(depth, dur);
        std::vector<bool> touched(static_cast<std::size_t>(c.num_sites()), false);
        for (const auto& op : l.ops) {
            for (auto s : op.sites) touched[static_cast<std::size_t>(c.index(s))] = true;
            bool measure = op.has(GateKind::MeasureZ);
            bool tgate = op.has(GateKind::T) || op.has(GateKind::Tdg);
            bool active = std::any_of(op.gates.begin(), op.gates.end(), [](const Gate& g) {
                return g.kind != GateKind::Identity && g.kind != GateKind::PrepZero;
            });
            bool idle = std::all_of(op.gates.begin(), op.gates.end(),
                                    [](const Gate& g) { return g.kind == GateKind::Identity; });
            if (measure) n[idx(LocationKind::Readout)].base += 1;
            else if (tgate && level == CensusLevel::Logical) n[idx(LocationKind::TGate)].base += 1;
            else if (active) n[idx(LocationKind::Swap)].base += 1;
            else if (idle) {
                for (auto s : op.sites) {
                    if (roles[static_cast<std::size_t>(c.index(s))] == Role::Computational)
                        add(n[idx(LocationKind::Memory)], dur);
                }
            }
        }
        for (int i = 0; i < c.num_sites(); ++i) {
            if (!touched[static_cast<std::size_t>(i)] && roles[static_cast<std::size_t>(i)] == Role::Computational)
                add(n[idx(LocationKind::Memory)], dur);
        }
        for (const auto& op : l.ops) apply_roles(c, op, roles);
    }
    ExRecCensus out;
    out.gadget = gadget;
    for (auto k : kLocationKinds) {
        if (k == LocationKind::TGate && level == CensusLevel::Physical) continue;
        out.counts[idx(k)] = n[idx(k)];
    }
    out.depth = depth;
    return out;
}

}  // namespace ftlab
