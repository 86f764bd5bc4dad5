#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftlab/census.hpp"
#include "ftlab/failure_model.hpp"

namespace ftlab {

struct Ratios {
    double Rm = 0.1;
    double Rr = 1.0;
    double tr = 10.0;

    PhysicalSetting at(double p0S) const { return {p0S, Rm, Rr, tr}; }
};

struct SolverOptions {
    double lo = 1e-9;
    double hi = 1e-3;
    int scan_points = 200;
    double rel_tol = 1e-10;
    int asymptotic_level = 100;
};

struct ThresholdResult {
    int level = 0;
    Ratios ratios{};
    double threshold = 0.0;
    double lo = 0.0;  // scan cell holding the root
    double hi = 0.0;
    int iterations = 0;
    double residual = 0.0;  // |p_nT - p_1T| at threshold
    double p1T = 0.0;
    bool multiple_roots = false;
};

class NoThresholdError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Root of p_nT(p) - p_1T(p) in [opt.lo, opt.hi].
ThresholdResult level_threshold(const Ratios& r, int n, const CensusSet& c, const SolverOptions& opt = {});
ThresholdResult asymptotic_threshold(const Ratios& r, const CensusSet& c, const SolverOptions& opt = {});

// Root of p_aT(p) - p_bT(p) for a > b; level_threshold is the case b = 1.
ThresholdResult level_crossing(const Ratios& r, int a, int b, const CensusSet& c, const SolverOptions& opt = {});

struct CurveRow {
    double p0S = 0.0;
    std::vector<double> pT;  // one per requested level, in request order
};

struct CurveTable {
    Ratios ratios{};
    std::vector<int> levels;
    std::vector<CurveRow> rows;
};

CurveTable failure_curve(const Ratios& r, const std::vector<int>& levels, const std::vector<double>& grid,
                         const CensusSet& c);
std::vector<double> log_grid(double lo, double hi, int points);

enum class SweepParam { Rm, Rr, tr };
std::string_view to_string(SweepParam p);
std::optional<SweepParam> parse_sweep_param(std::string_view s);

struct SweepRow {
    double value = 0.0;
    std::optional<ThresholdResult> result;
    std::string error;
};

struct SweepTable {
    SweepParam varied = SweepParam::Rm;
    Ratios fixed{};
    int level = 100;
    std::vector<SweepRow> rows;
};

struct SweepRange {
    double lo = 0.0;
    double hi = 0.0;
};
SweepRange default_range(SweepParam p);

// Points are solved independently on worker threads; row order follows the grid.
SweepTable sweep(SweepParam varied, SweepRange range, int points, const Ratios& fixed, int n, const CensusSet& c,
                 const SolverOptions& opt = {}, unsigned threads = 0);

}  // namespace ftlab
