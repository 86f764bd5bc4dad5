#include "ftlab/failure_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace ftlab {

namespace {

void check_inputs(std::span<const double> counts, std::span<const double> probs) {
    if (counts.size() != probs.size()) throw DomainError("counts and probabilities differ in length");
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (!(counts[i] >= 0.0) || !std::isfinite(counts[i]))
            throw DomainError("location count must be nonnegative, got " + std::to_string(counts[i]));
        if (!(probs[i] >= 0.0 && probs[i] <= 1.0))
            throw DomainError("location probability outside [0,1]: " + std::to_string(probs[i]));
    }
}

// 1 - e^{-u}(1+u), i.e. P(Poisson(u) >= 2), without cancellation for small u.
double poisson_tail2(double u) {
    if (u >= 1.0) return -std::expm1(-u) - u * std::exp(-u);
    double term = 1.0;  // u^k / k!
    double sum = 0.0;
    for (int k = 1; k < 80; ++k) {
        term *= u / k;
        if (k < 2) continue;
        double t = (k % 2 == 0 ? 1.0 : -1.0) * (k - 1) * term;
        sum += t;
        if (std::abs(t) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// q/(1-q) + log(1-q) = sum_{k>=2} (k-1)/k q^k.
double single_excess(double q) {
    if (q >= 0.1) return q / (1.0 - q) + std::log1p(-q);
    double qk = q;
    double sum = 0.0;
    for (int k = 2; k < 80; ++k) {
        qk *= q;
        double t = (k - 1.0) / k * qk;
        sum += t;
        if (t <= 1e-18 * sum) break;
    }
    return sum;
}

double clamp01(double x) {
    if (!(x > 0.0)) return 0.0;
    return x > 1.0 ? 1.0 : x;
}

}  // namespace

void PhysicalSetting::check() const {
    auto in01 = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in01(p0S)) throw DomainError("p0S outside [0,1]");
    if (!(Rm >= 0.0) || !(Rr >= 0.0) || !(tr >= 0.0)) throw DomainError("ratios must be nonnegative");
    if (!in01(p0m())) throw DomainError("Rm*p0S exceeds 1");
    if (!in01(p0r())) throw DomainError("Rr*p0S exceeds 1");
}

double gadget_failure(std::span<const double> counts, std::span<const double> probs) {
    check_inputs(counts, probs);

    bool integral = true;
    double total = 0.0;
    for (double n : counts) {
        integral = integral && n == std::floor(n);
        total += n;
    }
    if (integral && total <= 1.0) return 0.0;

    // Certain faults: evaluate the closed form literally.
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (probs[i] < 1.0 || counts[i] == 0.0) continue;
        double others_ok = 0.0;  // log prob that every other location is fault-free
        for (std::size_t k = 0; k < counts.size(); ++k) {
            if (k == i || counts[k] == 0.0) continue;
            if (probs[k] >= 1.0) return 1.0;
            others_ok += counts[k] * std::log1p(-probs[k]);
        }
        double single = counts[i] * std::pow(0.0, counts[i] - 1.0) * std::exp(others_ok);
        return clamp01(1.0 - single);
    }

    // Kinds are folded in one at a time so that P(>=2) only ever accumulates
    // nonnegative terms; one kind alone uses 1 - e^{-u}(1+u) - e^{-u} delta.
    double p0 = 1.0, p1 = 0.0, p2 = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        double n = counts[i], q = probs[i];
        if (n == 0.0 || q == 0.0) continue;
        double u = -n * std::log1p(-q);
        double a0 = std::exp(-u);
        double a1 = n * q / (1.0 - q) * a0;
        double a2 = (n == 1.0) ? 0.0 : poisson_tail2(u) - a0 * n * single_excess(q);
        p2 += p0 * a2 + p1 * -std::expm1(-u);
        p1 = p1 * a0 + p0 * a1;
        p0 *= a0;
    }
    return clamp01(p2);
}

double gadget_failure(const KindArray<double>& counts, const KindArray<double>& probs) {
    return gadget_failure(std::span<const double>(counts), std::span<const double>(probs));
}

KindArray<double> counts_at(const ExRecCensus& c, double tr) {
    KindArray<double> out{};
    for (auto k : kLocationKinds) out[idx(k)] = count_at(c, k, tr);
    return out;
}

FailureVector level1_failures(const PhysicalSetting& s, const CensusSet& censuses) {
    s.check();
    KindArray<double> q{};
    q[idx(LocationKind::Memory)] = s.p0m();
    q[idx(LocationKind::Swap)] = s.p0S;
    q[idx(LocationKind::TGate)] = 0.0;
    q[idx(LocationKind::Readout)] = s.p0r();
    FailureVector v;
    v.level = 1;
    for (auto g : kGadgets) v.probs[idx(g)] = gadget_failure(counts_at(censuses.l1(g), s.tr), q);
    return v;
}

FailureVector recurse_failures(const PhysicalSetting& s, const CensusSet& censuses, int n) {
    if (n < 1) throw DomainError("concatenation level must be >= 1");
    FailureVector v = level1_failures(s, censuses);
    KindArray<KindArray<double>> logical{};
    for (auto g : kGadgets) logical[idx(g)] = counts_at(censuses.ln(g), 0.0);
    for (int level = 2; level <= n; ++level) {
        FailureVector next;
        next.level = level;
        // A level-(n-1) gadget of type j is a level-n location of kind j.
        for (auto g : kGadgets) next.probs[idx(g)] = gadget_failure(logical[idx(g)], v.probs);
        v = next;
    }
    return v;
}

McEstimate mc_oracle(std::span<const double> counts, std::span<const double> probs, std::uint64_t samples,
                     std::uint64_t seed) {
    check_inputs(counts, probs);
    if (samples < 1) throw DomainError("samples must be >= 1");
    std::vector<std::binomial_distribution<std::int64_t>> dists;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] != std::floor(counts[i]))
            throw DomainError("Monte-Carlo oracle needs integer counts, got " + std::to_string(counts[i]));
        if (counts[i] > 0 && probs[i] > 0)
            dists.emplace_back(static_cast<std::int64_t>(counts[i]), probs[i]);
    }
    std::mt19937_64 rng(seed);
    std::uint64_t hits = 0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        std::int64_t faults = 0;
        for (auto& d : dists) {
            faults += d(rng);
            if (faults >= 2) break;
        }
        if (faults >= 2) ++hits;
    }
    double p = static_cast<double>(hits) / static_cast<double>(samples);
    double se = std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(samples));
    return {p, se};
}

McEstimate mc_oracle(const KindArray<double>& counts, const KindArray<double>& probs, std::uint64_t samples,
                     std::uint64_t seed) {
    return mc_oracle(std::span<const double>(counts), std::span<const double>(probs), samples, seed);
}

}  // namespace ftlab
