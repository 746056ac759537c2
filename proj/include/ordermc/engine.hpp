#pragma once

#include "ordermc/planner.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ordermc::engine {

// Per-coordinate sampling laws. Independent across coordinates; each law
// is restricted to the coordinate's bounds.
struct Uniform {};
struct TruncatedNormal {
    double mean;
    double stddev;
};
using CoordinateLaw = std::variant<Uniform, TruncatedNormal>;

struct Interval {
    double lo;
    double hi;
};

// Compact search box for the uncertain parameter vector, with a sampling
// law per coordinate (uniform over the bounds by default).
class ParameterSpace {
  public:
    ParameterSpace(std::vector<Interval> bounds, std::vector<CoordinateLaw> laws);
    explicit ParameterSpace(std::vector<Interval> bounds);

    int dimension() const { return static_cast<int>(bounds_.size()); }
    const std::vector<Interval>& bounds() const { return bounds_; }
    const std::vector<CoordinateLaw>& laws() const { return laws_; }

    // Draw number `counter` of the stream identified by `seed`. A pure
    // function of (seed, counter) — order of invocation does not matter.
    std::vector<double> draw(std::uint64_t seed, std::uint64_t counter) const;

  private:
    std::vector<Interval> bounds_;
    std::vector<CoordinateLaw> laws_;
};

using Predicate = std::function<bool(const std::vector<double>&)>;
using Index = std::function<double(const std::vector<double>&)>;

// A parameter space, a constraint carving out the admissible subset, and
// the scalar performance index whose extrema over that subset are sought.
// `index` is only ever evaluated at points accepted by `constraint`.
struct ConstrainedProblem {
    ParameterSpace space;
    Predicate constraint;
    Index index;
    std::string name; // optional label echoed into reports
};

enum class SampleMode { indirect, direct };

struct ExtremeSample {
    double value = 0.0;
    std::vector<double> parameters;
    std::int64_t draw_index = 0; // 0-based index of the raw draw
};

// Sorted index observations from the constrained hits of one run, plus
// the raw/hit counters that the coverage formulas need.
struct OrderStatisticsBatch {
    std::vector<double> sorted_values;   // length == constrained_hits
    std::int64_t raw_draws_consumed = 0; // realized L (indirect) or n (direct)
    std::int64_t constrained_hits = 0;   // n_c (indirect) or realized M (direct)
    SampleMode mode = SampleMode::indirect;
    bool inconclusive = false; // direct runs with fewer than 2 hits
    std::optional<ExtremeSample> min_sample;
    std::optional<ExtremeSample> max_sample;
};

struct ExecPolicy {
    int worker_threads = 1; // index evaluation threads; results commit in draw order
    int block_size = 256;
};

inline constexpr std::int64_t kDefaultDrawCapFactor = 1000;

// Draw until exactly n_c samples satisfy the constraint; the realized
// number of raw draws is recorded as raw_draws_consumed. Throws
// sampling_error if draw_cap raw draws happen first.
OrderStatisticsBatch sample_indirect(const ConstrainedProblem& problem, std::int64_t n_c,
                                     std::uint64_t seed, std::int64_t draw_cap,
                                     const ExecPolicy& exec = {});

// Draw exactly n samples and keep the ones satisfying the constraint.
// A run with fewer than 2 hits is marked inconclusive, never an error.
OrderStatisticsBatch sample_direct(const ConstrainedProblem& problem, std::int64_t n,
                                   std::uint64_t seed, const ExecPolicy& exec = {});

struct EstimateReport {
    std::optional<double> u_min_hat;
    std::optional<double> u_max_hat;
    std::vector<double> argmin_sample;
    std::vector<double> argmax_sample;
    planner::ReliabilitySpec spec;
    SampleMode mode = SampleMode::indirect;
    std::int64_t planned_size = 0;
    std::int64_t raw_draws = 0;
    std::int64_t constrained_hits = 0;
    bool inconclusive = false;
    std::uint64_t seed = 0;
    std::optional<double> rho_used;      // direct mode planning input
    std::optional<double> empirical_rho; // hits / raw draws, when raw draws > 0
    // Coverage statements realized at the size actually used.
    double one_sided_confidence = 0.0;   // 1 - (1 - eff_eps)^n
    double two_sided_confidence = 0.0;   // 1 - mu(n, eff_eps)
};

struct EstimateOptions {
    bool two_sided = false;            // plan for the range statement instead of one side
    std::optional<std::int64_t> size_override;
    std::int64_t draw_cap_factor = kDefaultDrawCapFactor;
    ExecPolicy exec = {};
};

// Plan the sample size from `spec`, run the chosen sampler, and package
// the extrema with their achieving parameter vectors. Direct mode needs
// `rho_hint` to size the run; indirect mode ignores it.
EstimateReport estimate_extrema(const ConstrainedProblem& problem, const planner::ReliabilitySpec& spec,
                                SampleMode mode, std::optional<planner::VolumeRatio> rho_hint,
                                std::uint64_t seed, const EstimateOptions& options = {});

struct RhoEstimate {
    double rho = 0.0;
    double standard_error = 0.0;
    std::int64_t probes = 0;
};

// Empirical volume-ratio probe: hit fraction over n_probe draws with its
// binomial standard error. A convenience for direct-mode planning; the
// planner itself never estimates rho.
RhoEstimate estimate_rho(const ConstrainedProblem& problem, std::int64_t n_probe, std::uint64_t seed,
                         const ExecPolicy& exec = {});

} // namespace ordermc::engine
