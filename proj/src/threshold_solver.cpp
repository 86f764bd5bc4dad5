#include "ftlab/threshold_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace ftlab {

namespace {

struct Eval {
    double hi_level = 0.0;
    double lo_level = 0.0;
    double g() const { return hi_level - lo_level; }
};

Eval evaluate(const Ratios& r, int a, int b, const CensusSet& c, double p) {
    PhysicalSetting s = r.at(p);
    FailureVector v = level1_failures(s, c);
    Eval e;
    if (b == 1) e.lo_level = v[Gadget::TGate];
    KindArray<KindArray<double>> logical{};
    for (auto g : kGadgets) logical[idx(g)] = counts_at(c.ln(g), 0.0);
    for (int level = 2; level <= a; ++level) {
        KindArray<double> next{};
        for (auto g : kGadgets) next[idx(g)] = gadget_failure(logical[idx(g)], v.probs);
        v.probs = next;
        v.level = level;
        if (level == b) e.lo_level = v[Gadget::TGate];
    }
    e.hi_level = v[Gadget::TGate];
    return e;
}

}  // namespace

ThresholdResult level_crossing(const Ratios& r, int a, int b, const CensusSet& c, const SolverOptions& opt) {
    if (b < 1 || a <= b) throw DomainError("crossing needs levels a > b >= 1");
    if (!(opt.lo > 0.0 && opt.hi > opt.lo) || opt.scan_points < 2) throw DomainError("bad solver bracket");

    std::vector<double> grid = log_grid(opt.lo, opt.hi, opt.scan_points);
    std::vector<double> g(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) g[i] = evaluate(r, a, b, c, grid[i]).g();

    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if ((g[i] > 0.0) != (g[i + 1] > 0.0)) cells.push_back(i);
    }
    if (cells.empty()) {
        std::ostringstream os;
        os << "no threshold in range [" << opt.lo << ", " << opt.hi << "] for level " << a;
        throw NoThresholdError(os.str());
    }

    std::size_t cell = cells.front();
    double lo = grid[cell];
    double hi = grid[cell + 1];
    bool lo_above = g[cell] > 0.0;
    Eval elo = evaluate(r, a, b, c, lo);
    Eval ehi = evaluate(r, a, b, c, hi);

    ThresholdResult res;
    res.level = a;
    res.ratios = r;
    res.lo = lo;
    res.hi = hi;
    res.multiple_roots = cells.size() > 1;

    // Bisect past the nominal tolerance while the residual can still shrink.
    int it = 0;
    while (it < 2000) {
        double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        double best = std::min(std::abs(elo.g()), std::abs(ehi.g()));
        double scale = std::max(elo.lo_level, ehi.lo_level);
        if (hi - lo <= opt.rel_tol * lo && best <= opt.rel_tol * scale) break;
        Eval em = evaluate(r, a, b, c, mid);
        ++it;
        if ((em.g() > 0.0) == lo_above) {
            lo = mid;
            elo = em;
        } else {
            hi = mid;
            ehi = em;
        }
    }
    bool take_lo = std::abs(elo.g()) <= std::abs(ehi.g());
    res.threshold = take_lo ? lo : hi;
    const Eval& e = take_lo ? elo : ehi;
    res.residual = std::abs(e.g());
    res.p1T = e.lo_level;
    res.iterations = it;
    return res;
}

ThresholdResult level_threshold(const Ratios& r, int n, const CensusSet& c, const SolverOptions& opt) {
    if (n < 2) throw DomainError("threshold level must be >= 2");
    return level_crossing(r, n, 1, c, opt);
}

ThresholdResult asymptotic_threshold(const Ratios& r, const CensusSet& c, const SolverOptions& opt) {
    return level_threshold(r, opt.asymptotic_level, c, opt);
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (points < 2) throw DomainError("grid needs at least 2 points");
    if (!(lo > 0.0) || !(hi > lo)) throw DomainError("log grid needs 0 < lo < hi");
    std::vector<double> out(static_cast<std::size_t>(points));
    double step = std::log(hi / lo) / (points - 1);
    for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
    out.front() = lo;
    out.back() = hi;
    return out;
}

CurveTable failure_curve(const Ratios& r, const std::vector<int>& levels, const std::vector<double>& grid,
                         const CensusSet& c) {
    if (levels.empty()) throw DomainError("no levels requested");
    for (int n : levels) {
        if (n < 1) throw DomainError("curve levels must be >= 1");
    }
    int top = *std::max_element(levels.begin(), levels.end());
    KindArray<KindArray<double>> logical{};
    for (auto g : kGadgets) logical[idx(g)] = counts_at(c.ln(g), 0.0);

    CurveTable t;
    t.ratios = r;
    t.levels = levels;
    for (double p : grid) {
        if (!(p > 0.0 && p <= 1e-2)) throw DomainError("curve grid values must lie in (0, 1e-2]");
        std::vector<double> byLevel(static_cast<std::size_t>(top) + 1, 0.0);
        FailureVector v = level1_failures(r.at(p), c);
        byLevel[1] = v[Gadget::TGate];
        for (int level = 2; level <= top; ++level) {
            KindArray<double> next{};
            for (auto g : kGadgets) next[idx(g)] = gadget_failure(logical[idx(g)], v.probs);
            v.probs = next;
            byLevel[static_cast<std::size_t>(level)] = v[Gadget::TGate];
        }
        CurveRow row{p, {}};
        for (int n : levels) row.pT.push_back(byLevel[static_cast<std::size_t>(n)]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string_view to_string(SweepParam p) {
    switch (p) {
        case SweepParam::Rm: return "rm";
        case SweepParam::Rr: return "rr";
        case SweepParam::tr: return "tr";
    }
    return "?";
}

std::optional<SweepParam> parse_sweep_param(std::string_view s) {
    for (auto p : {SweepParam::Rm, SweepParam::Rr, SweepParam::tr}) {
        if (to_string(p) == s) return p;
    }
    return std::nullopt;
}

SweepRange default_range(SweepParam p) {
    switch (p) {
        case SweepParam::Rm: return {1e-3, 1.0};
        case SweepParam::Rr: return {1e-1, 1e2};
        case SweepParam::tr: return {1.0, 1e3};
    }
    return {};
}

SweepTable sweep(SweepParam varied, SweepRange range, int points, const Ratios& fixed, int n, const CensusSet& c,
                 const SolverOptions& opt, unsigned threads) {
    std::vector<double> values = log_grid(range.lo, range.hi, points);
    SweepTable t;
    t.varied = varied;
    t.fixed = fixed;
    t.level = n;
    t.rows.resize(values.size());

    auto solve = [&](std::size_t i) {
        Ratios r = fixed;
        switch (varied) {
            case SweepParam::Rm: r.Rm = values[i]; break;
            case SweepParam::Rr: r.Rr = values[i]; break;
            case SweepParam::tr: r.tr = values[i]; break;
        }
        SweepRow& row = t.rows[i];
        row.value = values[i];
        try {
            row.result = level_threshold(r, n, c, opt);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };

    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(values.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < values.size(); ++i) solve(i);
        return t;
    }
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < values.size(); i += workers) solve(i);
        });
    }
    pool.clear();
    return t;
}

}  // namespace ftlab
