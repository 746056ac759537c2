#pragma once

#include <cstdint>

namespace ordermc::planner {

// Accuracy complement eps and confidence complement delta, both in (0,1).
// A plan built from this spec targets accuracy 1-eps at confidence 1-delta.
struct ReliabilitySpec {
    double epsilon;
    double delta;

    ReliabilitySpec(double eps, double del);
};

// Fraction of the sampling distribution's mass that lands in the
// constrained subset, in (0, 1].
struct VolumeRatio {
    double rho;

    explicit VolumeRatio(double r);
};

// Smallest number of constrained hits guaranteeing the one-sided
// (min-side or max-side) coverage statement:
//   smallest n with (1 - eps)^n <= delta.
std::int64_t constrained_size_one_sided(const ReliabilitySpec& spec);

// Smallest number of constrained hits guaranteeing the two-sided (range)
// coverage statement: smallest n >= 2 with mu(n, eps) <= delta.
std::int64_t constrained_size_two_sided(const ReliabilitySpec& spec);

// Smallest number of raw draws guaranteeing the one-sided statement when
// sampling the whole parameter space: smallest n with (1 - rho*eps)^n <= delta.
std::int64_t global_size_one_sided(const ReliabilitySpec& spec, const VolumeRatio& rho);

// Smallest number of raw draws guaranteeing the two-sided statement:
// smallest n >= 2 with mu(n, eps*rho) <= delta.
std::int64_t global_size_two_sided(const ReliabilitySpec& spec, const VolumeRatio& rho);

// Expected number of raw draws the stop-at-n_c-hits sampler consumes: n_c / rho.
double expected_trials_indirect(std::int64_t n_c, const VolumeRatio& rho);

} // namespace ordermc::planner
