#include "ftlab/verifier.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "ftlab/builders.hpp"
#include "ftlab/tableau.hpp"

namespace ftlab {

namespace {

constexpr std::array<std::uint8_t, 3> kGenerators = [] {
    std::array<std::uint8_t, 3> g{};
    for (std::size_t i = 0; i < 3; ++i) {
        for (int q : kCodeSupports[i]) g[i] = static_cast<std::uint8_t>(g[i] | (1u << q));
    }
    return g;
}();

constexpr std::uint8_t kAll = 0x7f;

std::array<std::uint8_t, 8> stabilizer_masks() {
    std::array<std::uint8_t, 8> out{};
    for (unsigned m = 0; m < 8; ++m) {
        std::uint8_t v = 0;
        for (unsigned i = 0; i < 3; ++i)
            if (m >> i & 1u) v ^= kGenerators[i];
        out[m] = v;
    }
    return out;
}

using WeightTable = std::array<std::uint8_t, 1u << 14>;

WeightTable make_weight_table(bool logical_zero) {
    WeightTable t{};
    auto st = stabilizer_masks();
    for (unsigned e = 0; e < (1u << 14); ++e) {
        unsigned x = e & kAll, z = e >> 7;
        int best = 8;
        for (auto a : st)
            for (auto b : st) {
                best = std::min(best, std::popcount((x ^ a) | (z ^ b)));
                if (logical_zero) best = std::min(best, std::popcount((x ^ a) | (z ^ b ^ kAll)));
            }
        t[e] = static_cast<std::uint8_t>(best);
    }
    return t;
}

const WeightTable& min_weight_table(bool logical_zero) {
    static const WeightTable plain = make_weight_table(false);
    static const WeightTable zero = make_weight_table(true);
    return logical_zero ? zero : plain;
}

struct CompiledOp {
    const Operation* op;
    std::array<int, 2> q;
};

struct Compiled {
    std::vector<std::vector<CompiledOp>> layers;
    std::vector<std::vector<std::size_t>> recoveries_after;  // recovery indices by layer
};

Compiled compile(const Circuit& c) {
    Compiled out;
    out.layers.resize(c.layers.size());
    out.recoveries_after.resize(c.layers.size());
    for (std::size_t t = 0; t < c.layers.size(); ++t) {
        for (const auto& op : c.layers[t].ops) {
            CompiledOp co{&op, {0, 0}};
            for (std::size_t i = 0; i < op.sites.size() && i < 2; ++i) co.q[i] = c.index(op.sites[i]);
            out.layers[t].push_back(co);
        }
    }
    for (std::size_t i = 0; i < c.recoveries.size(); ++i) {
        auto at = c.recoveries[i].after_layer;
        if (at >= c.layers.size()) throw std::invalid_argument("recovery point after the last step");
        out.recoveries_after[at].push_back(i);
    }
    return out;
}

struct Frame {
    std::vector<std::uint8_t> x, z, flips;
    Frame(std::size_t sites, std::size_t records) : x(sites, 0), z(sites, 0), flips(records, 0) {}
};

void step(const CompiledOp& co, Frame& f) {
    for (const auto& g : co.op->gates) {
        auto a = static_cast<std::size_t>(co.q[g.a]);
        auto b = static_cast<std::size_t>(co.q[g.b]);
        auto parity = [&] {
            unsigned p = 0;
            for (int r : g.condition) p ^= f.flips[static_cast<std::size_t>(r)];
            return p;
        };
        switch (g.kind) {
            case GateKind::Identity:
            case GateKind::X:
            case GateKind::Z: break;
            case GateKind::PrepZero: f.x[a] = f.z[a] = 0; break;
            case GateKind::H: std::swap(f.x[a], f.z[a]); break;
            case GateKind::S:
            case GateKind::Sdg: f.z[a] ^= f.x[a]; break;
            case GateKind::CNOT:
                f.x[b] ^= f.x[a];
                f.z[a] ^= f.z[b];
                break;
            case GateKind::SWAP:
            case GateKind::SingleErrorSwap:
                std::swap(f.x[a], f.x[b]);
                std::swap(f.z[a], f.z[b]);
                break;
            case GateKind::MeasureZ:
                f.flips[static_cast<std::size_t>(g.record)] ^= f.x[a];
                f.x[a] = f.z[a] = 0;
                break;
            case GateKind::CondX: f.x[a] ^= static_cast<std::uint8_t>(parity()); break;
            case GateKind::CondZ: f.z[a] ^= static_cast<std::uint8_t>(parity()); break;
            case GateKind::CondS:
            case GateKind::T:
            case GateKind::Tdg: throw UnsupportedOperation("non-Pauli-frame gate in fault propagation");
        }
    }
}

void inject(const Circuit& c, const FaultSite& fault, Frame& f) {
    switch (fault.type) {
        case FaultSite::Type::MeasurementFlip: f.flips[static_cast<std::size_t>(fault.record)] ^= 1; break;
        default:
            for (std::size_t i = 0; i < fault.sites.size(); ++i) {
                auto q = static_cast<std::size_t>(c.index(fault.sites[i]));
                f.x[q] ^= static_cast<std::uint8_t>(fault.pauli.x(i));
                f.z[q] ^= static_cast<std::uint8_t>(fault.pauli.z(i));
            }
    }
}

BlockError block_error(const Circuit& c, const Frame& f, const std::vector<Site>& sites) {
    BlockError e;
    for (std::size_t k = 0; k < sites.size() && k < 7; ++k) {
        auto q = static_cast<std::size_t>(c.index(sites[k]));
        e.x = static_cast<std::uint8_t>(e.x | (f.x[q] << k));
        e.z = static_cast<std::uint8_t>(e.z | (f.z[q] << k));
    }
    return e;
}

void apply_block(const Circuit& c, Frame& f, const std::vector<Site>& sites, BlockError e) {
    for (std::size_t k = 0; k < sites.size() && k < 7; ++k) {
        auto q = static_cast<std::size_t>(c.index(sites[k]));
        f.x[q] ^= static_cast<std::uint8_t>(e.x >> k & 1u);
        f.z[q] ^= static_cast<std::uint8_t>(e.z >> k & 1u);
    }
}

unsigned pattern_of(const Frame& f, const RecoveryPoint& rp) {
    unsigned p = 0;
    for (std::size_t j = 0; j < rp.records.size(); ++j) p |= unsigned{f.flips[static_cast<std::size_t>(rp.records[j])]} << j;
    return p;
}

// Runs layers [from, end) on the frame. With `tables`, recovery points apply R(p) R(0).
// Returns false when an outcome pattern has no table entry.
bool run(const Circuit& c, const Compiled& cc, Frame& f, std::size_t from, const FaultSite* fault,
         const std::vector<const RecoveryTable*>* tables, std::string* why) {
    for (std::size_t t = from; t < cc.layers.size(); ++t) {
        for (const auto& co : cc.layers[t]) step(co, f);
        if (fault && t == fault->layer) inject(c, *fault, f);
        if (!tables) continue;
        for (auto i : cc.recoveries_after[t]) {
            const RecoveryPoint& rp = c.recoveries[i];
            const RecoveryTable& table = *(*tables)[i];
            unsigned p = pattern_of(f, rp);
            auto r = table.lookup(p);
            auto r0 = table.lookup(0);
            if (!r || !r0) {
                if (why) *why = "outcome pattern " + std::to_string(p) + " missing from recovery table";
                return false;
            }
            apply_block(c, f, rp.data, *r * *r0);
        }
    }
    return true;
}

std::string op_name(const Operation& op) {
    std::string s;
    for (std::size_t i = 0; i < op.gates.size(); ++i) s += (i ? "+" : "") + std::string(to_string(op.gates[i].kind));
    return s;
}

std::vector<PauliOperator> nontrivial_paulis(std::size_t n) {
    std::vector<PauliOperator> out;
    for (unsigned m = 1; m < (1u << (2 * n)); ++m) {
        PauliOperator p(n);
        for (std::size_t q = 0; q < n; ++q) p.set(q, m >> (2 * q) & 1u, m >> (2 * q + 1) & 1u);
        out.push_back(p);
    }
    return out;
}

// Pauli on the data block whose commutation with the six generators and `logical`
// matches `flipped` (bit i: generator i, X-type 0..2, Z-type 3..5, bit 6: logical).
BlockError error_for_syndrome(unsigned flipped, bool logical_is_x) {
    BlockError best{};
    int best_w = 99;
    for (unsigned e = 0; e < (1u << 14); ++e) {
        BlockError be{static_cast<std::uint8_t>(e & kAll), static_cast<std::uint8_t>(e >> 7)};
        unsigned s = 0;
        for (unsigned i = 0; i < 3; ++i) {
            s |= (std::popcount(unsigned(be.z & kGenerators[i])) & 1u) << i;
            s |= (std::popcount(unsigned(be.x & kGenerators[i])) & 1u) << (i + 3);
        }
        unsigned l = logical_is_x ? std::popcount(unsigned(be.z)) & 1u : std::popcount(unsigned(be.x)) & 1u;
        s |= l << 6;
        if (s == flipped && plain_weight(be) < best_w) {
            best = be;
            best_w = plain_weight(be);
        }
    }
    return best;
}

struct RandomElement {
    unsigned pattern;
    BlockError error;
    bool operator<(const RandomElement& o) const {
        return std::tie(pattern, error.x, error.z) < std::tie(o.pattern, o.error.x, o.error.z);
    }
};

std::vector<PauliOperator> block_checks(bool logical_is_x) {
    std::vector<PauliOperator> out;
    for (char kind : {'X', 'Z'}) {
        for (std::size_t i = 0; i < 3; ++i) {
            PauliOperator p(7);
            for (int q : kCodeSupports[i]) p = p * PauliOperator::single(7, static_cast<std::size_t>(q), kind);
            out.push_back(p);
        }
    }
    out.push_back(PauliOperator::parse(logical_is_x ? "XXXXXXX" : "ZZZZZZZ"));
    return out;
}

PauliOperator embed(const Circuit& c, const std::vector<Site>& sites, const PauliOperator& p) {
    PauliOperator out(static_cast<std::size_t>(c.num_sites()));
    for (std::size_t k = 0; k < sites.size(); ++k) {
        if (p.x(k) || p.z(k)) out.set(static_cast<std::size_t>(c.index(sites[k])), p.x(k), p.z(k));
    }
    return out;
}

// Syndrome signs of the data block, relative to the +1 code state.
unsigned block_signs(const StabilizerTableau& t, const Circuit& c, const std::vector<Site>& data, bool logical_is_x) {
    unsigned s = 0;
    auto checks = block_checks(logical_is_x);
    for (std::size_t i = 0; i < checks.size(); ++i) {
        int e = t.expectation(embed(c, data, checks[i]));
        if (e == 0) throw std::logic_error("data block is not left in a code state");
        if (e < 0) s |= 1u << i;
    }
    return s;
}

// Outcome differences caused by random measurement results and by the logical
// input state, together with the Pauli each one leaves on the data block.
std::vector<RandomElement> random_group(const Circuit& g, const RecoveryPoint& rp, BlockError& base) {
    std::vector<RandomElement> gens;
    std::vector<std::vector<std::uint8_t>> refs;
    for (bool plus : {false, true}) {
        if (rp.fresh && plus) break;
        StabilizerTableau in(static_cast<std::size_t>(g.num_sites()));
        if (!rp.fresh) {
            std::vector<std::size_t> q;
            for (auto s : rp.data) q.push_back(static_cast<std::size_t>(g.index(s)));
            for (std::size_t i = 0; i < 3; ++i) {
                in.h(q[i]);
                for (int k : kCodeSupports[i])
                    if (static_cast<std::size_t>(k) != i) in.cnot(q[i], q[static_cast<std::size_t>(k)]);
            }
            if (plus)
                for (auto x : q) in.h(x);
        }
        auto ref = simulate_stabilizer(g, in);
        unsigned ref_signs = block_signs(ref.state, g, rp.data, plus);
        if (ref_signs != 0 && !rp.fresh) throw std::logic_error("noiseless extraction disturbs the data block");
        refs.push_back(ref.outcomes);
        std::size_t randoms = 0;
        for (auto r : ref.random) randoms += r;
        for (std::size_t j = 0; j < randoms; ++j) {
            std::vector<std::uint8_t> forced(randoms, 0);
            forced[j] = 1;
            auto alt = simulate_stabilizer(g, in, forced);
            unsigned pat = 0;
            for (std::size_t k = 0; k < rp.records.size(); ++k) {
                auto r = static_cast<std::size_t>(rp.records[k]);
                pat |= unsigned(alt.outcomes[r] ^ ref.outcomes[r]) << k;
            }
            unsigned diff = block_signs(alt.state, g, rp.data, plus) ^ ref_signs;
            gens.push_back({pat, error_for_syndrome(diff, plus)});
        }
        if (rp.fresh) base = error_for_syndrome(ref_signs, false);
    }
    if (refs.size() == 2) {
        unsigned pat = 0;
        for (std::size_t k = 0; k < rp.records.size(); ++k) {
            auto r = static_cast<std::size_t>(rp.records[k]);
            pat |= unsigned(refs[0][r] ^ refs[1][r]) << k;
        }
        gens.push_back({pat, {}});
    }
    std::set<RandomElement> group{{0, {}}};
    for (const auto& gen : gens) {
        std::set<RandomElement> next = group;
        for (const auto& e : group) next.insert({e.pattern ^ gen.pattern, e.error * gen.error});
        group = std::move(next);
    }
    return {group.begin(), group.end()};
}

struct Case {
    unsigned pattern;
    BlockError residual;
    bool strict;
    std::string label;
};

// A fresh stage cannot see X errors on its data, so it is held to what the next
// CSS correction can undo: each of the X and Z parts separately.
int stage_weight(BlockError e, bool fresh) {
    if (!fresh) return weight_mod_stabilizer(e);
    return std::max(weight_mod_stabilizer({e.x, 0}, true), weight_mod_stabilizer({0, e.z}, true));
}

bool violates(const Case& m, BlockError r, bool fresh) {
    int w = stage_weight(m.residual * r, fresh);
    return m.strict ? w != 0 : w > 1;
}

template <class F>
void parallel_for(std::size_t n, F&& body) {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::size_t workers = std::min<std::size_t>(hw, std::max<std::size_t>(1, n / 64));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr error;
    std::mutex m;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += workers) body(i);
                } catch (...) {
                    std::lock_guard lock(m);
                    if (!error) error = std::current_exception();
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace

int weight_mod_stabilizer(BlockError e, bool logical_zero) {
    return min_weight_table(logical_zero)[static_cast<std::size_t>((e.x & kAll) | (e.z & kAll) << 7)];
}

int plain_weight(BlockError e) { return std::popcount(unsigned((e.x | e.z) & kAll)); }

PauliOperator to_pauli(BlockError e) {
    PauliOperator p(7);
    for (std::size_t k = 0; k < 7; ++k) p.set(k, e.x >> k & 1u, e.z >> k & 1u);
    return p;
}

BlockError from_pauli(const PauliOperator& p) {
    if (p.size() != 7) throw std::invalid_argument("block errors act on 7 qubits");
    BlockError e;
    for (std::size_t k = 0; k < 7; ++k) {
        e.x = static_cast<std::uint8_t>(e.x | (p.x(k) << k));
        e.z = static_cast<std::uint8_t>(e.z | (p.z(k) << k));
    }
    return e;
}

std::vector<FaultSite> enumerate_single_faults(const Circuit& c, FaultOptions opt) {
    std::vector<FaultSite> out;
    auto p1 = nontrivial_paulis(1);
    auto p2 = nontrivial_paulis(2);
    std::vector<Role> roles = c.initial_roles;
    for (std::size_t t = 0; t < c.layers.size(); ++t) {
        const Layer& l = c.layers[t];
        std::vector<bool> touched(static_cast<std::size_t>(c.num_sites()), false);
        for (std::size_t i = 0; i < l.ops.size(); ++i) {
            const Operation& op = l.ops[i];
            for (auto s : op.sites) touched[static_cast<std::size_t>(c.index(s))] = true;
            FaultSite f;
            f.layer = t;
            f.op = i;
            f.sites = op.sites;
            if (op.has(GateKind::MeasureZ)) {
                for (const auto& g : op.gates) {
                    if (g.kind != GateKind::MeasureZ) continue;
                    f.type = FaultSite::Type::MeasurementFlip;
                    f.record = g.record;
                    out.push_back(f);
                }
                continue;
            }
            bool prep_only = std::all_of(op.gates.begin(), op.gates.end(),
                                         [](const Gate& g) { return g.kind == GateKind::PrepZero; });
            if (prep_only && op.sites.size() == 1) {
                f.type = FaultSite::Type::PrepFlip;
                f.pauli = PauliOperator::single(1, 0, 'X');
                out.push_back(f);
                continue;
            }
            for (const auto& p : op.sites.size() == 2 ? p2 : p1) {
                f.type = FaultSite::Type::Gate;
                f.pauli = p;
                out.push_back(f);
            }
        }
        if (opt.idle) {
            for (int q = 0; q < c.num_sites(); ++q) {
                if (touched[static_cast<std::size_t>(q)] || roles[static_cast<std::size_t>(q)] != Role::Computational)
                    continue;
                for (const auto& p : p1) {
                    FaultSite f;
                    f.type = FaultSite::Type::Idle;
                    f.layer = t;
                    f.sites = {c.site(q)};
                    f.pauli = p;
                    out.push_back(f);
                }
            }
        }
        for (const auto& op : l.ops) apply_roles(c, op, roles);
    }
    return out;
}

std::string describe(const FaultSite& f, const Circuit& c) {
    std::string where = "step " + std::to_string(f.layer) + " ";
    if (f.op != FaultSite::kNoOp && f.layer < c.layers.size() && f.op < c.layers[f.layer].ops.size())
        where += op_name(c.layers[f.layer].ops[f.op]);
    else
        where += "idle";
    where += "@";
    for (std::size_t i = 0; i < f.sites.size(); ++i) where += (i ? "," : "") + to_string(f.sites[i]);
    switch (f.type) {
        case FaultSite::Type::MeasurementFlip: return where + " flip #" + std::to_string(f.record);
        case FaultSite::Type::PrepFlip: return where + " orthogonal prep";
        default: {
            std::string s = f.pauli.to_string();
            return where + " " + s.substr(s.find_first_not_of("+-i"));
        }
    }
}

Propagation propagate_pauli(const Circuit& c, const FaultSite& f) {
    Compiled cc = compile(c);
    Frame fr(static_cast<std::size_t>(c.num_sites()), static_cast<std::size_t>(c.num_records));
    run(c, cc, fr, f.layer, &f, nullptr, nullptr);
    Propagation out{PauliOperator(static_cast<std::size_t>(c.num_sites())), fr.flips};
    for (std::size_t q = 0; q < fr.x.size(); ++q) out.residual.set(q, fr.x[q], fr.z[q]);
    return out;
}

std::optional<BlockError> RecoveryTable::lookup(unsigned pattern) const {
    auto it = entries.find(pattern);
    if (it == entries.end()) return std::nullopt;
    return it->second;
}

RecoveryTable build_recovery_table(const Circuit& g, FaultOptions opt) {
    if (g.recoveries.size() != 1) throw std::invalid_argument("recovery tables need exactly one recovery point");
    const RecoveryPoint& rp = g.recoveries.front();
    if (rp.data.size() != 7 || rp.records.size() > 16) throw std::invalid_argument("unsupported recovery point shape");
    RecoveryTable table;
    table.kind = rp.kind;
    table.fresh = rp.fresh;

    Compiled cc = compile(g);
    std::vector<Case> cases;
    auto record = [&](const Frame& f, bool strict, std::string label) {
        cases.push_back({pattern_of(f, rp), block_error(g, f, rp.data), strict, std::move(label)});
    };
    std::size_t n = static_cast<std::size_t>(g.num_sites());
    std::size_t nr = static_cast<std::size_t>(g.num_records);
    {
        Frame f(n, nr);
        record(f, true, "no fault");
    }
    if (!rp.fresh) {
        for (std::size_t k = 0; k < 7; ++k) {
            for (char p : {'X', 'Y', 'Z'}) {
                Frame f(n, nr);
                auto q = static_cast<std::size_t>(g.index(rp.data[k]));
                f.x[q] = p != 'Z';
                f.z[q] = p != 'X';
                run(g, cc, f, 0, nullptr, nullptr, nullptr);
                bool detected = rp.kind == ExtractionKind::X ? p == 'Z' : p == 'X';
                record(f, detected, std::string("input ") + p + " on data " + std::to_string(k));
            }
        }
    }
    auto faults = enumerate_single_faults(g, opt);
    for (const auto& fault : faults) {
        Frame f(n, nr);
        run(g, cc, f, fault.layer, &fault, nullptr, nullptr);
        record(f, false, describe(fault, g));
    }

    // Every case can also come with any random outcome variation.
    // A freshly prepared block may come out of the reference run with a known Pauli frame.
    BlockError base{};
    auto group = random_group(g, rp, base);
    std::map<unsigned, std::vector<Case>> by_pattern;
    std::map<unsigned, std::set<std::tuple<int, int, bool>>> seen;
    for (const auto& c : cases) {
        for (const auto& r : group) {
            Case e{c.pattern ^ r.pattern, c.residual * r.error * base, c.strict, c.label};
            if (r.pattern || r.error.x || r.error.z) e.label += " (random outcome variant)";
            if (seen[e.pattern].insert({e.residual.x, e.residual.z, e.strict}).second)
                by_pattern[e.pattern].push_back(std::move(e));
        }
    }
    table.cases = cases.size();

    std::vector<BlockError> singles{{0, 0}};
    for (unsigned k = 0; k < 7; ++k) {
        auto b = static_cast<std::uint8_t>(1u << k);
        singles.push_back({b, 0});
        singles.push_back({0, b});
        singles.push_back({b, b});
    }
    for (const auto& [pattern, members] : by_pattern) {
        std::set<std::pair<int, int>> cand_seen;
        std::vector<BlockError> candidates;
        for (const auto& m : members)
            for (auto s : singles) {
                BlockError r = m.residual * s;
                if (cand_seen.insert({r.x, r.z}).second) candidates.push_back(r);
            }
        BlockError best{};
        std::tuple<int, int, int> best_score{1 << 30, 0, 0};
        for (auto r : candidates) {
            int viol = 0, sum = 0;
            for (const auto& m : members) {
                viol += violates(m, r, table.fresh);
                sum += stage_weight(m.residual * r, table.fresh);
            }
            std::tuple<int, int, int> score{viol, sum, plain_weight(r)};
            if (score < best_score) {
                best_score = score;
                best = r;
            }
        }
        table.entries[pattern] = best;
        if (std::get<0>(best_score) > 0) {
            const Case* bad = nullptr;
            const Case* good = nullptr;
            for (const auto& m : members) {
                if (violates(m, best, table.fresh)) {
                    if (!bad) bad = &m;
                } else if (!good) {
                    good = &m;
                }
            }
            const Case* other = good;
            if (!other)
                for (const auto& m : members)
                    if (&m != bad) {
                        other = &m;
                        break;
                    }
            table.inconsistencies.push_back({pattern, bad->label, other ? other->label : std::string("(none)")});
        }
    }
    return table;
}

const RecoveryTable& standard_recovery_table(ExtractionKind kind, bool fresh) {
    // Only X-type stages prepare fresh data (|0_L> from |0...0>).
    if (fresh && kind == ExtractionKind::Z) throw std::invalid_argument("Z-type stages never prepare fresh data");
    static std::array<std::once_flag, 3> once;
    static std::array<RecoveryTable, 3> tables;
    std::size_t i = fresh ? 2 : (kind == ExtractionKind::Z ? 1 : 0);
    std::call_once(once[i], [&] { tables[i] = build_recovery_table(lower_to_physical(build_syndrome_extraction(kind, fresh))); });
    return tables[i];
}

FaultReport verify_single_fault_tolerance(const Circuit& c, FaultOptions opt) {
    FaultReport rep;
    Compiled cc = compile(c);
    std::vector<const RecoveryTable*> tables;
    std::set<const RecoveryTable*> reported;
    for (const auto& rp : c.recoveries) {
        const RecoveryTable* t = &standard_recovery_table(rp.kind, rp.fresh);
        tables.push_back(t);
        if (reported.insert(t).second)
            rep.inconsistencies.insert(rep.inconsistencies.end(), t->inconsistencies.begin(), t->inconsistencies.end());
    }
    if (c.outputs.empty()) rep.notes.push_back("circuit declares no output blocks");

    auto faults = enumerate_single_faults(c, opt);
    rep.faults = faults.size();
    std::vector<int> worst(faults.size(), 0);
    std::vector<std::vector<FaultFailure>> failures(faults.size());
    std::size_t n = static_cast<std::size_t>(c.num_sites());
    std::size_t nr = static_cast<std::size_t>(c.num_records);
    parallel_for(faults.size(), [&](std::size_t i) {
        const FaultSite& fault = faults[i];
        Frame f(n, nr);
        std::string why;
        if (!run(c, cc, f, fault.layer, &fault, &tables, &why)) {
            failures[i].push_back({describe(fault, c), "", 0, why});
            return;
        }
        for (const auto& block : c.outputs) {
            int w = 0;
            if (block.encoded && block.sites.size() == 7) {
                w = weight_mod_stabilizer(block_error(c, f, block.sites), block.logical_zero);
            } else {
                for (auto s : block.sites) {
                    auto q = static_cast<std::size_t>(c.index(s));
                    w += (f.x[q] | f.z[q]) ? 1 : 0;
                }
            }
            worst[i] = std::max(worst[i], w);
            if (w > 1) failures[i].push_back({describe(fault, c), block.name, w, "residual weight above 1"});
        }
    });
    rep.records.reserve(faults.size());
    for (std::size_t i = 0; i < faults.size(); ++i) {
        std::string sites;
        for (auto s : faults[i].sites) sites += (sites.empty() ? "" : ",") + to_string(s);
        bool ok = failures[i].empty();
        bool stuck = !ok && failures[i].front().block.empty();
        rep.records.push_back({faults[i].layer, sites, describe(faults[i], c), stuck ? -1 : worst[i], ok});
        rep.max_weight = std::max(rep.max_weight, worst[i]);
        rep.failures.insert(rep.failures.end(), failures[i].begin(), failures[i].end());
    }
    return rep;
}

std::string report_to_json(const FaultReport& r) {
    nlohmann::json j;
    j["summary"] = {{"component", r.component},
                    {"faults", r.faults},
                    {"max_residual_weight", r.max_weight},
                    {"failing_faults", r.failures.size()},
                    {"inconsistencies", r.inconsistencies.size()},
                    {"passed", r.passed()}};
    j["faults"] = nlohmann::json::array();
    for (const auto& f : r.records)
        j["faults"].push_back(
            {{"step", f.step}, {"site", f.sites}, {"fault", f.label}, {"residual_weight", f.weight}, {"passed", f.passed}});
    j["failures"] = nlohmann::json::array();
    for (const auto& f : r.failures)
        j["failures"].push_back({{"fault", f.fault}, {"block", f.block}, {"weight", f.weight}, {"reason", f.reason}});
    j["inconsistencies"] = nlohmann::json::array();
    for (const auto& x : r.inconsistencies)
        j["inconsistencies"].push_back({{"pattern", x.pattern}, {"first", x.first}, {"second", x.second}});
    j["notes"] = r.notes;
    return j.dump(2);
}

}  // namespace ftlab
