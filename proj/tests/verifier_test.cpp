#include <gtest/gtest.h>

#include <json.hpp>
#include <random>

#include "ftlab/builders.hpp"
#include "ftlab/exrec.hpp"
#include "ftlab/tableau.hpp"
#include "ftlab/verifier.hpp"

using namespace ftlab;

namespace {

Gate gate(GateKind k, std::uint8_t a = 0, std::uint8_t b = 1) { return Gate{k, a, b, -1, {}}; }

FaultSite idle_fault(std::size_t layer, Site s, char p) {
    FaultSite f;
    f.type = FaultSite::Type::Idle;
    f.layer = layer;
    f.sites = {s};
    f.pauli = PauliOperator::single(1, 0, p);
    return f;
}

unsigned pattern(const Propagation& pr, const RecoveryPoint& rp) {
    unsigned p = 0;
    for (std::size_t k = 0; k < rp.records.size(); ++k)
        p |= unsigned(pr.flips[static_cast<std::size_t>(rp.records[k])]) << k;
    return p;
}

// Layer of the transversal interaction: the first one touching a data site.
std::size_t first_data_layer(const Circuit& c) {
    const auto& data = c.recoveries.front().data;
    for (std::size_t t = 0; t < c.depth(); ++t)
        for (const auto& op : c.layers[t].ops)
            for (auto s : op.sites)
                if (std::find(data.begin(), data.end(), s) != data.end()) return t;
    return c.depth();
}

std::size_t two_site_ops(const Circuit& c) {
    std::size_t n = 0;
    for (const auto& l : c.layers)
        for (const auto& op : l.ops) n += op.sites.size() == 2;
    return n;
}

}  // namespace

TEST(Faults, OneCnotHasFifteen) {
    Circuit c(2, 1, CircuitLevel::Logical);
    c.layers.push_back(Layer{{make_op2({0, 0}, {0, 1}, {gate(GateKind::CNOT)})}});
    EXPECT_EQ(enumerate_single_faults(c).size(), 15u);
}

TEST(Faults, OneMeasurementHasOne) {
    Circuit c(1, 1, CircuitLevel::Logical);
    Operation m = make_op1(GateKind::MeasureZ, {0, 0});
    m.gates[0].record = 0;
    c.num_records = 1;
    c.layers.push_back(Layer{{m}});
    auto f = enumerate_single_faults(c);
    ASSERT_EQ(f.size(), 1u);
    EXPECT_EQ(f[0].type, FaultSite::Type::MeasurementFlip);
}

TEST(Faults, MeshCountIsFifteenPerPhysicalSwap) {
    auto c = lower_to_physical(build_mesh(3));
    std::size_t swaps = two_site_ops(c);
    ASSERT_GT(swaps, 0u);
    EXPECT_EQ(enumerate_single_faults(c).size(), 15 * swaps);
}

TEST(Propagation, CnotCopiesXToTarget) {
    Circuit c(2, 1, CircuitLevel::Logical);
    c.layers.push_back(Layer{{make_op1(GateKind::Identity, {0, 0})}});
    c.layers.push_back(Layer{{make_op2({0, 0}, {0, 1}, {gate(GateKind::CNOT)})}});
    auto pr = propagate_pauli(c, idle_fault(0, {0, 0}, 'X'));
    EXPECT_TRUE(pr.residual.same_up_to_phase(PauliOperator::parse("XX")));
}

TEST(Propagation, CommutingFaultIsTransported) {
    Circuit c(2, 1, CircuitLevel::Logical);
    c.layers.push_back(Layer{{make_op1(GateKind::Identity, {0, 1})}});
    c.layers.push_back(Layer{{make_op1(GateKind::Identity, {0, 1})}});
    auto pr = propagate_pauli(c, idle_fault(0, {0, 1}, 'Z'));
    EXPECT_TRUE(pr.residual.same_up_to_phase(PauliOperator::parse("IZ")));
}

TEST(Propagation, MeasurementConsumesTheFrame) {
    Circuit c(2, 1, CircuitLevel::Logical);
    Operation m = make_op1(GateKind::MeasureZ, {0, 1});
    m.gates[0].record = 0;
    c.num_records = 1;
    c.layers.push_back(Layer{{make_op1(GateKind::Identity, {0, 1})}});
    c.layers.push_back(Layer{{m}});
    auto z = propagate_pauli(c, idle_fault(0, {0, 1}, 'Z'));
    EXPECT_EQ(z.flips[0], 0);
    EXPECT_TRUE(z.residual.is_identity());
    auto x = propagate_pauli(c, idle_fault(0, {0, 1}, 'X'));
    EXPECT_EQ(x.flips[0], 1);
    EXPECT_TRUE(x.residual.is_identity());
}

TEST(Propagation, DataZErrorReachesTheAncilla) {
    auto g = build_syndrome_extraction(ExtractionKind::X);
    std::size_t t = first_data_layer(g);
    ASSERT_GT(t, 0u);
    const auto& rp = g.recoveries.front();
    for (int q = 0; q < 7; ++q) {
        auto pr = propagate_pauli(g, idle_fault(t - 1, rp.data[static_cast<std::size_t>(q)], 'Z'));
        EXPECT_NE(pattern(pr, rp), 0u) << q;
    }
}

TEST(Propagation, RejectsTGates) {
    Circuit c(1, 1, CircuitLevel::Logical);
    c.layers.push_back(Layer{{make_op1(GateKind::Identity, {0, 0})}});
    c.layers.push_back(Layer{{make_op1(GateKind::T, {0, 0})}});
    EXPECT_THROW(propagate_pauli(c, idle_fault(0, {0, 0}, 'X')), UnsupportedOperation);
}

// Frame propagation against full tableau evolution of the faulty circuit.
TEST(Propagation, AgreesWithTableauOnRandomCircuits) {
    std::mt19937 rng(1234);
    const GateKind singles[] = {GateKind::H, GateKind::S, GateKind::Sdg, GateKind::X, GateKind::Z, GateKind::Identity};
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 2 + static_cast<int>(rng() % 13);
        Circuit c(n, 1, CircuitLevel::Logical);
        int depth = 1 + static_cast<int>(rng() % 12);
        for (int t = 0; t < depth; ++t) {
            Layer l;
            for (int q = 0; q < n;) {
                unsigned r = rng() % 4;
                if (r == 0 && q + 1 < n) {
                    bool fwd = rng() & 1u;
                    l.ops.push_back(make_op2({0, q}, {0, q + 1}, {gate(GateKind::CNOT, fwd ? 0 : 1, fwd ? 1 : 0)}));
                    q += 2;
                } else if (r == 1 && q + 1 < n) {
                    l.ops.push_back(make_op2({0, q}, {0, q + 1}, {gate(GateKind::SWAP)}));
                    q += 2;
                } else {
                    l.ops.push_back(make_op1(singles[rng() % 6], {0, q}));
                    q += 1;
                }
            }
            c.layers.push_back(std::move(l));
        }
        FaultSite f = idle_fault(rng() % static_cast<std::size_t>(depth), {0, static_cast<int>(rng() % n)}, "XYZ"[rng() % 3]);
        auto pr = propagate_pauli(c, f);

        StabilizerTableau in(static_cast<std::size_t>(n));
        for (int k = 0; k < 3 * n; ++k) {
            std::size_t a = rng() % static_cast<std::size_t>(n);
            switch (rng() % 3) {
                case 0: in.h(a); break;
                case 1: in.s(a); break;
                default: in.cnot(a, (a + 1) % static_cast<std::size_t>(n)); break;
            }
        }
        Circuit faulty = c;
        Layer inject;
        Operation op = make_op1(GateKind::Identity, f.sites[0]);
        op.gates.clear();
        if (f.pauli.x(0)) op.gates.push_back(gate(GateKind::X, 0, 0));
        if (f.pauli.z(0)) op.gates.push_back(gate(GateKind::Z, 0, 0));
        inject.ops.push_back(op);
        faulty.layers.insert(faulty.layers.begin() + static_cast<long>(f.layer) + 1, inject);

        auto ideal = simulate_stabilizer(c, in).state;
        auto noisy = simulate_stabilizer(faulty, in).state;
        for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
            const auto& s = ideal.stabilizer(i);
            int want = s.commutes(pr.residual) ? 1 : -1;
            ASSERT_EQ(noisy.expectation(s), want) << "trial " << trial;
        }
    }
}

TEST(Weights, ModuloStabilizer) {
    EXPECT_EQ(weight_mod_stabilizer({0, 0}), 0);
    std::uint8_t g = 0;
    for (int q : kCodeSupports[0]) g = static_cast<std::uint8_t>(g | 1u << q);
    EXPECT_EQ(weight_mod_stabilizer({g, 0}), 0);
    EXPECT_EQ(weight_mod_stabilizer({0, g}), 0);
    EXPECT_EQ(weight_mod_stabilizer({static_cast<std::uint8_t>(g ^ 1u), 0}), 1);
    EXPECT_EQ(weight_mod_stabilizer({0x7f, 0}), 3);  // logical X stays a failure
    EXPECT_EQ(weight_mod_stabilizer({0, 0x7f}), 3);
    EXPECT_EQ(weight_mod_stabilizer({0, 0x7f}, true), 0);
    EXPECT_EQ(plain_weight({0x03, 0x06}), 3);
    auto p = to_pauli({0x01, 0x03});
    EXPECT_EQ(from_pauli(p), (BlockError{0x01, 0x03}));
}

TEST(RecoveryTable, StandardTablesAreConsistent) {
    for (auto kind : {ExtractionKind::X, ExtractionKind::Z}) {
        const auto& t = standard_recovery_table(kind, false);
        EXPECT_TRUE(t.consistent());
        auto r0 = t.lookup(0);
        ASSERT_TRUE(r0);
        EXPECT_EQ(plain_weight(*r0), 0);
    }
    EXPECT_TRUE(standard_recovery_table(ExtractionKind::X, true).consistent());
    EXPECT_THROW(standard_recovery_table(ExtractionKind::Z, true), std::invalid_argument);
}

TEST(RecoveryTable, InputErrorsAreUndone) {
    for (auto kind : {ExtractionKind::X, ExtractionKind::Z}) {
        auto g = lower_to_physical(build_syndrome_extraction(kind));
        const auto& table = standard_recovery_table(kind, false);
        const auto& rp = g.recoveries.front();
        char detected = kind == ExtractionKind::X ? 'Z' : 'X';
        for (int q = 0; q < 7; ++q) {
            auto f = idle_fault(0, rp.data[static_cast<std::size_t>(q)], detected);
            // Layer 0 never touches the data, so the error is present from the start.
            auto pr = propagate_pauli(g, f);
            auto r = table.lookup(pattern(pr, rp));
            ASSERT_TRUE(r) << q;
            BlockError e = detected == 'Z' ? BlockError{0, static_cast<std::uint8_t>(1u << q)}
                                           : BlockError{static_cast<std::uint8_t>(1u << q), 0};
            EXPECT_EQ(weight_mod_stabilizer(*r * e), 0) << q;
        }
    }
}

TEST(RecoveryTable, EveryFaultPatternHasAnEntry) {
    auto g = lower_to_physical(build_syndrome_extraction(ExtractionKind::Z));
    const auto& table = standard_recovery_table(ExtractionKind::Z, false);
    for (const auto& f : enumerate_single_faults(g, {true})) {
        auto pr = propagate_pauli(g, f);
        EXPECT_TRUE(table.lookup(pattern(pr, g.recoveries.front()))) << describe(f, g);
    }
}

TEST(RecoveryTable, CorruptedDecodeIsInconsistent) {
    auto g = build_syndrome_extraction(ExtractionKind::X);
    // Drop one CNOT from the decoder's last two-site layer.
    for (std::size_t t = g.depth(); t-- > 0;) {
        auto& ops = g.layers[t].ops;
        auto it = std::find_if(ops.begin(), ops.end(), [](const Operation& op) { return op.has(GateKind::CNOT); });
        if (it != ops.end()) {
            ops.erase(it);
            break;
        }
    }
    auto table = build_recovery_table(lower_to_physical(g));
    EXPECT_FALSE(table.consistent());
}

TEST(Verify, SingleErrorSwapPasses) {
    auto r = verify_single_fault_tolerance(build_single_error_swap_demo());
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.max_weight, 1);
}

TEST(Verify, NaiveSwapFailsOnDoubleErrors) {
    auto r = verify_single_fault_tolerance(build_naive_swap());
    EXPECT_FALSE(r.passed());
    EXPECT_EQ(r.max_weight, 2);
    bool xx = false;
    for (const auto& f : r.failures) xx |= f.fault.find("XX") != std::string::npos;
    EXPECT_TRUE(xx);
}

TEST(Verify, ExtractionStagesPass) {
    for (auto kind : {ExtractionKind::X, ExtractionKind::Z}) {
        auto r = verify_single_fault_tolerance(lower_to_physical(build_syndrome_extraction(kind)));
        EXPECT_TRUE(r.passed());
        EXPECT_EQ(r.max_weight, 1);
    }
}

TEST(Verify, MeshPasses) {
    EXPECT_TRUE(verify_single_fault_tolerance(build_mesh(7, CircuitLevel::Physical)).passed());
    EXPECT_TRUE(verify_single_fault_tolerance(lower_to_physical(build_mesh(7))).passed());
}

TEST(Verify, ExRecsPassWithTightBound) {
    for (auto k : {ExRecKind::Memory, ExRecKind::Swap, ExRecKind::Readout}) {
        auto r = verify_single_fault_tolerance(assemble_exrec(k, CircuitLevel::Physical));
        EXPECT_TRUE(r.passed()) << to_string(k) << ": " << r.failures.size() << " failures";
        EXPECT_EQ(r.max_weight, 1) << to_string(k);
        EXPECT_EQ(r.records.size(), r.faults);
    }
}

TEST(Verify, TSkeletonIsOutsideTheCliffordEngine) {
    EXPECT_THROW(verify_single_fault_tolerance(assemble_exrec(ExRecKind::TSkeleton, CircuitLevel::Physical)),
                 UnsupportedOperation);
}

TEST(Verify, ReportJson) {
    auto r = verify_single_fault_tolerance(build_naive_swap());
    r.component = "naive-swap";
    auto j = nlohmann::json::parse(report_to_json(r));
    EXPECT_EQ(j["summary"]["component"], "naive-swap");
    EXPECT_EQ(j["summary"]["passed"], false);
    EXPECT_EQ(j["faults"].size(), r.faults);
    EXPECT_EQ(j["failures"].size(), r.failures.size());
    EXPECT_TRUE(j["faults"][0].contains("residual_weight"));
}
