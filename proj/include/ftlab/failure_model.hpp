#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

#include "ftlab/census.hpp"

namespace ftlab {

class DomainError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

struct PhysicalSetting {
    double p0S = 0.0;
    double Rm = 0.0;
    double Rr = 0.0;
    double tr = 0.0;

    double p0m() const { return Rm * p0S; }
    double p0r() const { return Rr * p0S; }
    // Throws DomainError when any derived probability leaves [0,1].
    void check() const;
};

struct FailureVector {
    int level = 1;
    KindArray<double> probs{};  // indexed by Gadget

    double operator[](Gadget g) const { return probs[idx(g)]; }
};

// P(at least two faults) over independent locations; counts may be real.
double gadget_failure(std::span<const double> counts, std::span<const double> probs);
double gadget_failure(const KindArray<double>& counts, const KindArray<double>& probs);

KindArray<double> counts_at(const ExRecCensus& c, double tr);

FailureVector level1_failures(const PhysicalSetting& s, const CensusSet& censuses);
FailureVector recurse_failures(const PhysicalSetting& s, const CensusSet& censuses, int n);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

// Counts must be nonnegative integers (as doubles).
McEstimate mc_oracle(std::span<const double> counts, std::span<const double> probs, std::uint64_t samples,
                     std::uint64_t seed);
McEstimate mc_oracle(const KindArray<double>& counts, const KindArray<double>& probs, std::uint64_t samples,
                     std::uint64_t seed);

}  // namespace ftlab
