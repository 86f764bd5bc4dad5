#include <gtest/gtest.h>

#include <cmath>

#include "ftlab/threshold_solver.hpp"

using namespace ftlab;

namespace {

const Ratios kDefault{0.1, 1.0, 10.0};

void expect_within(double got, double want, double rel) {
    EXPECT_LE(std::abs(got - want), rel * want) << "got " << got << ", want " << want << " +-" << rel * 100 << "%";
}

// p0S where two curve columns cross, by log-linear interpolation on the grid.
double grid_crossing(const CurveTable& t, std::size_t a, std::size_t b) {
    for (std::size_t i = 0; i + 1 < t.rows.size(); ++i) {
        double g0 = t.rows[i].pT[a] - t.rows[i].pT[b];
        double g1 = t.rows[i + 1].pT[a] - t.rows[i + 1].pT[b];
        if ((g0 > 0) != (g1 > 0)) {
            double f = g0 / (g0 - g1);
            return std::exp(std::log(t.rows[i].p0S) + f * (std::log(t.rows[i + 1].p0S) - std::log(t.rows[i].p0S)));
        }
    }
    return NAN;
}

}  // namespace

// Published level thresholds at the default setting.
TEST(Threshold, LevelTwoMatchesPublishedValue) {
    expect_within(level_threshold(kDefault, 2, paper_census()).threshold, 1.36e-6, 0.03);
}
TEST(Threshold, LevelFiveMatchesPublishedValue) {
    expect_within(level_threshold(kDefault, 5, paper_census()).threshold, 1.91e-6, 0.03);
}
TEST(Threshold, AsymptoticDefaultSetting) {
    expect_within(asymptotic_threshold(kDefault, paper_census()).threshold, 1.96e-6, 0.03);
}
TEST(Threshold, AsymptoticNoMemoryErrors) {
    expect_within(asymptotic_threshold({0.0, 1.0, 1.0}, paper_census()).threshold, 2.88e-6, 0.03);
}
TEST(Threshold, AsymptoticFastReadout) {
    expect_within(asymptotic_threshold({0.1, 1.0, 1.0}, paper_census()).threshold, 2.05e-6, 0.03);
}
TEST(Threshold, AsymptoticSlowNoisyReadout) {
    expect_within(asymptotic_threshold({1.0, 100.0, 1000.0}, paper_census()).threshold, 3.78e-8, 0.03);
}

// Values this solver produces, frozen after the oracle checks below passed.
TEST(Threshold, FrozenValues) {
    auto c = paper_census();
    EXPECT_NEAR(level_threshold(kDefault, 2, c).threshold, 1.75663e-6, 1e-11);
    EXPECT_NEAR(level_threshold(kDefault, 3, c).threshold, 1.88440e-6, 1e-11);
    EXPECT_NEAR(level_threshold(kDefault, 4, c).threshold, 1.92933e-6, 1e-11);
    EXPECT_NEAR(level_threshold(kDefault, 5, c).threshold, 1.94813e-6, 1e-11);
    EXPECT_NEAR(level_threshold(kDefault, 100, c).threshold, 1.96486e-6, 1e-11);
    EXPECT_NEAR(asymptotic_threshold({0.0, 1.0, 1.0}, c).threshold, 2.25451e-6, 1e-11);
}

TEST(Threshold, ResultInvariants) {
    for (int n : {2, 3, 4, 5}) {
        auto t = level_threshold(kDefault, n, paper_census());
        EXPECT_LT(t.lo, t.threshold + 1e-30);
        EXPECT_LE(t.threshold, t.hi);
        EXPECT_LE(t.residual, 1e-10 * t.p1T) << "n=" << n;
        EXPECT_FALSE(t.multiple_roots);
    }
}

TEST(Threshold, NondecreasingInLevel) {
    double prev = 0;
    for (int n : {2, 3, 4, 5, 10, 50, 100}) {
        double t = level_threshold(kDefault, n, paper_census()).threshold;
        EXPECT_GE(t, prev) << "n=" << n;
        prev = t;
    }
}

TEST(Threshold, HeavierTRowLowersThreshold) {
    auto heavy = paper_census();
    for (auto& c : heavy.leveln[idx(Gadget::TGate)].counts)
        if (c) c->base *= 2;
    for (Ratios r : {kDefault, Ratios{0.0, 1.0, 1.0}, Ratios{1.0, 10.0, 100.0}})
        EXPECT_LT(level_threshold(r, 2, heavy).threshold, level_threshold(r, 2, paper_census()).threshold);
}

TEST(Threshold, Deterministic) {
    auto a = level_threshold(kDefault, 7, paper_census());
    auto b = level_threshold(kDefault, 7, paper_census());
    EXPECT_EQ(a.threshold, b.threshold);
    EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Threshold, NoRootInBracket) {
    SolverOptions opt;
    opt.lo = 1e-9;
    opt.hi = 1e-8;
    EXPECT_THROW(level_threshold(kDefault, 2, paper_census(), opt), NoThresholdError);
    EXPECT_THROW(level_threshold(kDefault, 1, paper_census()), DomainError);
}

TEST(Curve, LevelsMeetAtThreshold) {
    auto t = level_threshold(kDefault, 2, paper_census());
    auto curve = failure_curve(kDefault, {1, 2}, {t.threshold}, paper_census());
    const auto& row = curve.rows.front();
    EXPECT_LE(std::abs(row.pT[1] - row.pT[0]), 1e-10 * row.pT[0]);
}

TEST(Curve, VanishesAtZeroRate) {
    auto curve = failure_curve(kDefault, {1, 2, 3, 100}, {1e-300}, paper_census());
    for (double v : curve.rows.front().pT) EXPECT_LT(v, 1e-280);
}

TEST(Curve, EachLevelCrossesLevelOneAtItsThreshold) {
    auto curve = failure_curve(kDefault, {1, 2, 3, 4, 5}, log_grid(5e-7, 5e-6, 2001), paper_census());
    for (std::size_t n = 2; n <= 5; ++n) {
        double x = grid_crossing(curve, n - 1, 0);
        expect_within(x, level_threshold(kDefault, static_cast<int>(n), paper_census()).threshold, 0.01);
    }
}

TEST(Curve, NeighbouringLevelsCrossNearTheHigherThreshold) {
    for (int n = 2; n <= 4; ++n) {
        double cross = level_crossing(kDefault, n + 1, n, paper_census()).threshold;
        double thr = level_threshold(kDefault, n + 1, paper_census()).threshold;
        expect_within(cross, thr, 0.01);
    }
}

TEST(Curve, RejectsBadGrid) {
    EXPECT_THROW(log_grid(1e-7, 1e-5, 1), DomainError);
    EXPECT_THROW(log_grid(1e-5, 1e-7, 10), DomainError);
    EXPECT_THROW(failure_curve(kDefault, {}, {1e-6}, paper_census()), DomainError);
}

TEST(Sweep, RmIsNonincreasingThroughDefault) {
    auto t = sweep(SweepParam::Rm, default_range(SweepParam::Rm), 25, kDefault, 100, paper_census());
    ASSERT_EQ(t.rows.size(), 25u);
    double prev = INFINITY;
    for (const auto& r : t.rows) {
        ASSERT_TRUE(r.result) << r.error;
        EXPECT_LE(r.result->threshold, prev);
        prev = r.result->threshold;
    }
    const auto& at_default = t.rows[16];
    EXPECT_NEAR(at_default.value, 0.1, 1e-12);
    expect_within(at_default.result->threshold, 1.96e-6, 0.03);
}

TEST(Sweep, ReadoutTimeStartsAtPublishedValue) {
    auto t = sweep(SweepParam::tr, {1.0, 1000.0}, 25, kDefault, 100, paper_census());
    ASSERT_TRUE(t.rows.front().result);
    EXPECT_EQ(t.rows.front().value, 1.0);
    expect_within(t.rows.front().result->threshold, 2.05e-6, 0.03);
}

TEST(Sweep, EveryParameterIsNonincreasing) {
    for (auto p : {SweepParam::Rm, SweepParam::Rr, SweepParam::tr}) {
        auto t = sweep(p, default_range(p), 25, kDefault, 100, paper_census());
        for (std::size_t i = 1; i < t.rows.size(); ++i) {
            EXPECT_GT(t.rows[i].value, t.rows[i - 1].value);
            ASSERT_TRUE(t.rows[i].result && t.rows[i - 1].result);
            EXPECT_LE(t.rows[i].result->threshold, t.rows[i - 1].result->threshold) << to_string(p) << " row " << i;
        }
    }
}

TEST(Sweep, RowOrderIndependentOfThreads) {
    auto a = sweep(SweepParam::Rr, default_range(SweepParam::Rr), 9, kDefault, 20, paper_census(), {}, 1);
    auto b = sweep(SweepParam::Rr, default_range(SweepParam::Rr), 9, kDefault, 20, paper_census(), {}, 4);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].value, b.rows[i].value);
        EXPECT_EQ(a.rows[i].result->threshold, b.rows[i].result->threshold);
    }
}

TEST(Sweep, OnePointIsRejected) {
    EXPECT_THROW(sweep(SweepParam::Rm, {0.1, 1.0}, 1, kDefault, 100, paper_census()), DomainError);
}
