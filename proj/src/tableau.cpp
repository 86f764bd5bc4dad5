#include "ftlab/tableau.hpp"

namespace ftlab {

StabilizerTableau::StabilizerTableau(std::size_t n) : n_(n) {
    rows_.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) rows_.push_back(PauliOperator::single(n, i, 'X'));
    for (std::size_t i = 0; i < n; ++i) rows_.push_back(PauliOperator::single(n, i, 'Z'));
}

void StabilizerTableau::h(std::size_t q) {
    for (auto& r : rows_) r.apply_h(q);
}
void StabilizerTableau::s(std::size_t q) {
    for (auto& r : rows_) r.apply_s(q);
}
void StabilizerTableau::sdg(std::size_t q) {
    for (auto& r : rows_) r.apply_sdg(q);
}
void StabilizerTableau::x(std::size_t q) {
    for (auto& r : rows_) r.apply_x(q);
}
void StabilizerTableau::z(std::size_t q) {
    for (auto& r : rows_) r.apply_z(q);
}
void StabilizerTableau::cnot(std::size_t c, std::size_t t) {
    for (auto& r : rows_) r.apply_cnot(c, t);
}
void StabilizerTableau::swap(std::size_t a, std::size_t b) {
    for (auto& r : rows_) r.apply_swap(a, b);
}

StabilizerTableau::Measurement StabilizerTableau::measure_z(std::size_t q, bool choice) {
    std::size_t p = 2 * n_;
    for (std::size_t i = n_; i < 2 * n_; ++i) {
        if (rows_[i].x(q)) {
            p = i;
            break;
        }
    }
    if (p < 2 * n_) {
        for (std::size_t i = 0; i < 2 * n_; ++i) {
            if (i != p && rows_[i].x(q)) rows_[i] *= rows_[p];
        }
        // Destabilizer rows only matter up to phase.
        rows_[p - n_] = rows_[p];
        rows_[p - n_].set_phase(rows_[p - n_].phase() & 1);
        PauliOperator zq = PauliOperator::single(n_, q, 'Z');
        if (choice) zq.set_phase(2);
        rows_[p] = zq;
        return {choice, true};
    }
    PauliOperator acc(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        if (rows_[i].x(q)) acc *= rows_[n_ + i];
    }
    return {acc.phase() == 2, false};
}

void StabilizerTableau::reset(std::size_t q) {
    if (measure_z(q, false).outcome) x(q);
}

int StabilizerTableau::expectation(const PauliOperator& p) const {
    if (p.size() != n_) throw std::invalid_argument("operator size differs from tableau");
    for (std::size_t i = 0; i < n_; ++i) {
        if (!p.commutes(rows_[n_ + i])) return 0;
    }
    PauliOperator acc(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        if (!p.commutes(rows_[i])) acc *= rows_[n_ + i];
    }
    if (!acc.same_up_to_phase(p)) throw std::logic_error("tableau is not a complete stabilizer group");
    int rel = ((p.phase() - acc.phase()) % 4 + 4) % 4;
    if (rel == 0) return 1;
    if (rel == 2) return -1;
    throw std::invalid_argument("expectation needs a Hermitian operator");
}

void apply_operation(StabilizerTableau& t, const Operation& op, const std::vector<std::size_t>& qubits,
                     std::vector<std::uint8_t>& outcomes, std::vector<std::uint8_t>& random,
                     const std::vector<std::uint8_t>& forced, std::size_t& random_count) {
    for (const auto& g : op.gates) {
        std::size_t a = qubits[g.a];
        std::size_t b = is_two_qubit(g.kind) ? qubits[g.b] : a;
        auto fires = [&] {
            unsigned parity = 0;
            for (int r : g.condition) parity ^= outcomes.at(static_cast<std::size_t>(r));
            return parity == 1;
        };
        switch (g.kind) {
            case GateKind::Identity: break;
            case GateKind::PrepZero: t.reset(a); break;
            case GateKind::H: t.h(a); break;
            case GateKind::X: t.x(a); break;
            case GateKind::Z: t.z(a); break;
            case GateKind::S: t.s(a); break;
            case GateKind::Sdg: t.sdg(a); break;
            case GateKind::CNOT: t.cnot(a, b); break;
            case GateKind::SWAP:
            case GateKind::SingleErrorSwap: t.swap(a, b); break;
            case GateKind::MeasureZ: {
                bool choice = random_count < forced.size() && forced[random_count];
                auto m = t.measure_z(a, choice);
                if (m.random) ++random_count;
                auto r = static_cast<std::size_t>(g.record);
                if (outcomes.size() <= r) {
                    outcomes.resize(r + 1, 0);
                    random.resize(r + 1, 0);
                }
                outcomes[r] = m.outcome;
                random[r] = m.random;
                break;
            }
            case GateKind::CondX:
                if (fires()) t.x(a);
                break;
            case GateKind::CondZ:
                if (fires()) t.z(a);
                break;
            case GateKind::CondS:
                if (fires()) t.s(a);
                break;
            case GateKind::T:
            case GateKind::Tdg: throw UnsupportedOperation("non-Clifford gate in stabilizer simulation");
        }
    }
}

SimulationResult simulate_stabilizer(const Circuit& c, const StabilizerTableau& input,
                                     const std::vector<std::uint8_t>& forced) {
    if (input.num_qubits() != static_cast<std::size_t>(c.num_sites()))
        throw std::invalid_argument("input tableau size differs from circuit lattice");
    SimulationResult res{input,
                         std::vector<std::uint8_t>(static_cast<std::size_t>(c.num_records), 0),
                         std::vector<std::uint8_t>(static_cast<std::size_t>(c.num_records), 0)};
    std::size_t random_count = 0;
    std::vector<std::size_t> qubits;
    for (const auto& l : c.layers) {
        for (const auto& op : l.ops) {
            qubits.clear();
            for (auto s : op.sites) qubits.push_back(static_cast<std::size_t>(c.index(s)));
            apply_operation(res.state, op, qubits, res.outcomes, res.random, forced, random_count);
        }
    }
    return res;
}

}  // namespace ftlab
