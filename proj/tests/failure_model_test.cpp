#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ftlab/census.hpp"
#include "ftlab/failure_model.hpp"

using namespace ftlab;

namespace {

// Sum over every fault subset of size >= 2 of its exact probability.
long double subset_oracle(const std::vector<double>& q) {
    const std::size_t n = q.size();
    long double total = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) < 2) continue;
        long double p = 1;
        for (std::size_t i = 0; i < n; ++i) p *= (mask >> i & 1u) ? q[i] : 1.0L - q[i];
        total += p;
    }
    return total;
}

std::vector<double> expand(const KindArray<double>& counts, const KindArray<double>& probs) {
    std::vector<double> q;
    for (std::size_t k = 0; k < 4; ++k)
        for (int i = 0; i < static_cast<int>(counts[k]); ++i) q.push_back(probs[k]);
    return q;
}

KindArray<double> kinds(double m, double s, double t, double r) { return {m, s, t, r}; }

}  // namespace

TEST(FailureModel, TwoGatesIsQSquared) {
    EXPECT_NEAR(gadget_failure(kinds(0, 2, 0, 0), kinds(0, 0.1, 0, 0)), 0.01, 1e-15);
}

TEST(FailureModel, ZeroProbabilitiesGiveZero) {
    EXPECT_EQ(gadget_failure(kinds(934, 408, 0, 40), kinds(0, 0, 0, 0)), 0.0);
}

TEST(FailureModel, SingleLocationNeverFails) {
    for (double q : {1e-9, 0.01, 0.5, 1.0}) EXPECT_EQ(gadget_failure(kinds(0, 1, 0, 0), kinds(0, q, 0, 0)), 0.0);
}

TEST(FailureModel, SmallCaseMatchesEnumeration) {
    auto counts = kinds(3, 2, 0, 0);
    auto probs = kinds(0.01, 0.02, 0, 0);
    double oracle = static_cast<double>(subset_oracle(expand(counts, probs)));
    EXPECT_NEAR(gadget_failure(counts, probs), oracle, 1e-15 * oracle + 1e-300);
}

TEST(FailureModel, RandomCasesMatchEnumeration) {
    std::mt19937_64 rng(20261019);
    std::uniform_int_distribution<int> total(2, 20);
    std::uniform_real_distribution<double> logq(std::log(1e-7), std::log(0.3));
    for (int trial = 0; trial < 200; ++trial) {
        int n = total(rng);
        KindArray<double> counts{};
        for (int i = 0; i < n; ++i) counts[static_cast<std::size_t>(rng() % 4)] += 1;
        KindArray<double> probs{};
        for (auto& p : probs) p = std::exp(logq(rng));
        double oracle = static_cast<double>(subset_oracle(expand(counts, probs)));
        double got = gadget_failure(counts, probs);
        EXPECT_LE(std::abs(got - oracle), 1e-12 * oracle) << "trial " << trial << " got " << got << " oracle " << oracle;
    }
}

TEST(FailureModel, TinyProbabilitiesKeepPrecision) {
    double q = 1e-12;
    EXPECT_NEAR(gadget_failure(kinds(0, 2, 0, 0), kinds(0, q, 0, 0)), q * q, 1e-12 * q * q);
    // Real-valued counts interpolate the integer values.
    double a = gadget_failure(kinds(0, 2, 0, 0), kinds(0, 1e-3, 0, 0));
    double b = gadget_failure(kinds(0, 3, 0, 0), kinds(0, 1e-3, 0, 0));
    double mid = gadget_failure(kinds(0, 2.5, 0, 0), kinds(0, 1e-3, 0, 0));
    EXPECT_GT(mid, a);
    EXPECT_LT(mid, b);
}

TEST(FailureModel, MonotoneInEachProbability) {
    auto census = paper_census();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 0.1);
    for (auto g : kGadgets) {
        auto counts = counts_at(census.l1(g), 10.0);
        for (int trial = 0; trial < 20; ++trial) {
            KindArray<double> p{};
            for (auto& x : p) x = u(rng) * u(rng);
            double base = gadget_failure(counts, p);
            for (std::size_t k = 0; k < 4; ++k) {
                auto hi = p;
                hi[k] = std::min(0.1, hi[k] * 1.5 + 1e-9);
                EXPECT_GE(gadget_failure(counts, hi), base);
            }
        }
    }
}

TEST(FailureModel, BoundedBySquaredMean) {
    auto census = paper_census();
    for (auto g : kGadgets) {
        auto counts = counts_at(census.l1(g), 10.0);
        for (double q : {1e-9, 1e-7, 1e-6}) {
            KindArray<double> p{0.1 * q, q, 0, q};
            double mean = 0;
            for (std::size_t k = 0; k < 4; ++k) mean += counts[k] * p[k];
            EXPECT_LE(gadget_failure(counts, p), mean * mean);
        }
    }
}

TEST(FailureModel, RejectsBadInputs) {
    EXPECT_THROW(gadget_failure(kinds(-1, 0, 0, 0), kinds(0.1, 0, 0, 0)), DomainError);
    EXPECT_THROW(gadget_failure(kinds(1, 0, 0, 0), kinds(1.5, 0, 0, 0)), DomainError);
    EXPECT_THROW(gadget_failure(kinds(1, 0, 0, 0), kinds(-0.1, 0, 0, 0)), DomainError);
    EXPECT_THROW((PhysicalSetting{1e-3, 2000, 1, 1}.check()), DomainError);
    EXPECT_THROW(level1_failures({2.0, 0.1, 1, 1}, paper_census()), DomainError);
}

TEST(FailureModel, ZeroRateGivesZeroVector) {
    auto v = level1_failures({0.0, 0.1, 1.0, 10.0}, paper_census());
    for (double x : v.probs) EXPECT_EQ(x, 0.0);
}

TEST(FailureModel, LevelOneIsTheBaseCase) {
    PhysicalSetting s{1e-6, 0.1, 1.0, 10.0};
    auto a = level1_failures(s, paper_census());
    auto b = recurse_failures(s, paper_census(), 1);
    EXPECT_EQ(a.probs, b.probs);
    EXPECT_THROW(recurse_failures(s, paper_census(), 0), DomainError);
}

TEST(FailureModel, TDominatesAtLevelOne) {
    for (double p = 1e-9; p <= 1e-3; p *= 3.0) {
        auto v = level1_failures({p, 0.1, 1.0, 10.0}, paper_census());
        EXPECT_GE(v[Gadget::TGate], v[Gadget::Swap]) << p;
        EXPECT_GE(v[Gadget::Swap], v[Gadget::Memory]) << p;
    }
}

TEST(FailureModel, DecreasingInLevelWellBelowThreshold) {
    double prev = 1.0;
    for (int n = 1; n <= 8; ++n) {
        double pt = recurse_failures({1e-7, 0.1, 1.0, 10.0}, paper_census(), n)[Gadget::TGate];
        EXPECT_LT(pt, prev) << n;
        prev = pt;
    }
}

TEST(FailureModel, MonteCarloAgreesOnTwoGates) {
    auto a = mc_oracle(kinds(0, 2, 0, 0), kinds(0, 0.1, 0, 0), 1'000'000, 42);
    EXPECT_NEAR(a.estimate, 0.01, 3 * a.std_error);
    auto b = mc_oracle(kinds(0, 2, 0, 0), kinds(0, 0.1, 0, 0), 1'000'000, 42);
    EXPECT_EQ(a.estimate, b.estimate);
    EXPECT_EQ(a.std_error, b.std_error);
}

TEST(FailureModel, MonteCarloAgreesOnMemoryExRec) {
    auto counts = counts_at(paper_census().l1(Gadget::Memory), 10.0);
    ASSERT_EQ(counts, kinds(934, 408, 0, 40));
    KindArray<double> p{1e-5, 1e-4, 0, 1e-4};
    auto mc = mc_oracle(counts, p, 1'000'000, 3);
    EXPECT_NEAR(mc.estimate, gadget_failure(counts, p), 3 * mc.std_error);
}

TEST(FailureModel, MonteCarloAgreesOnLevelOneT) {
    PhysicalSetting s{1e-6, 0.1, 1.0, 10.0};
    auto counts = counts_at(paper_census().l1(Gadget::TGate), s.tr);
    KindArray<double> p{s.p0m(), s.p0S, 0, s.p0r()};
    double exact = level1_failures(s, paper_census())[Gadget::TGate];
    auto mc = mc_oracle(counts, p, 10'000'000, 11);
    // Use the exact variance: the sample one is noisy with ~20 expected hits.
    double se = std::sqrt(exact * (1 - exact) / 1e7);
    EXPECT_NEAR(mc.estimate, exact, 3 * se);
}

TEST(FailureModel, MonteCarloNeedsIntegerCounts) {
    EXPECT_THROW(mc_oracle(kinds(0, 2.5, 0, 0), kinds(0, 0.1, 0, 0), 10, 1), DomainError);
}
