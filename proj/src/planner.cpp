#include "ordermc/planner.hpp"

#include "ordermc/orderstat.hpp"

#include <cmath>
#include <stdexcept>

namespace ordermc::planner {

namespace {

double pow_one_minus(double eps, std::int64_t n) {
    return std::exp(static_cast<double>(n) * std::log1p(-eps));
}

// Smallest n >= lo with f(n) <= delta, for strictly decreasing f.
// Exponential bracketing, then bisection, then a short linear sweep so
// the returned n is decided by direct evaluation rather than by the
// floating-point log arithmetic that produced the initial guess.
template <typename F>
std::int64_t smallest_satisfying(F&& f, double delta, std::int64_t lo) {
    std::int64_t hi = lo;
    while (f(hi) > delta) {
        if (hi > (INT64_C(1) << 61)) throw std::domain_error("sample size search overflow");
        hi *= 2;
    }
    std::int64_t lo_fail = lo - 1; // f(lo_fail) > delta or lo_fail < domain
    std::int64_t hi_ok = hi;
    while (hi_ok - lo_fail > 1) {
        const std::int64_t mid = lo_fail + (hi_ok - lo_fail) / 2;
        if (mid < lo) {
            lo_fail = mid;
        } else if (f(mid) <= delta) {
            hi_ok = mid;
        } else {
            lo_fail = mid;
        }
    }
    // verification sweep around the boundary
    std::int64_t n = hi_ok;
    while (n - 1 >= lo && f(n - 1) <= delta) --n;
    while (f(n) > delta) ++n;
    return n;
}

} // namespace

ReliabilitySpec::ReliabilitySpec(double eps, double del) : epsilon(eps), delta(del) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("ReliabilitySpec: epsilon must lie in (0,1)");
    if (!(del > 0.0 && del < 1.0)) throw std::domain_error("ReliabilitySpec: delta must lie in (0,1)");
}

VolumeRatio::VolumeRatio(double r) : rho(r) {
    if (!(r > 0.0 && r <= 1.0)) throw std::domain_error("VolumeRatio: rho must lie in (0,1]");
}

std::int64_t constrained_size_one_sided(const ReliabilitySpec& spec) {
    return smallest_satisfying(
        [&](std::int64_t n) { return pow_one_minus(spec.epsilon, n); }, spec.delta, 1);
}

std::int64_t constrained_size_two_sided(const ReliabilitySpec& spec) {
    return smallest_satisfying(
        [&](std::int64_t n) { return orderstat::mu(n, spec.epsilon); }, spec.delta, 2);
}

std::int64_t global_size_one_sided(const ReliabilitySpec& spec, const VolumeRatio& rho) {
    const double eff = spec.epsilon * rho.rho;
    return smallest_satisfying(
        [&](std::int64_t n) { return pow_one_minus(eff, n); }, spec.delta, 1);
}

std::int64_t global_size_two_sided(const ReliabilitySpec& spec, const VolumeRatio& rho) {
    const double eff = spec.epsilon * rho.rho;
    return smallest_satisfying(
        [&](std::int64_t n) { return orderstat::mu(n, eff); }, spec.delta, 2);
}

double expected_trials_indirect(std::int64_t n_c, const VolumeRatio& rho) {
    if (n_c < 1) throw std::domain_error("expected_trials_indirect: n_c must be >= 1");
    return static_cast<double>(n_c) / rho.rho;
}

} // namespace ordermc::planner
