#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace ordermc::orderstat {

// Indices i_1 < i_2 < ... < i_k of order statistics taken from a sample of
// size `sample_size`. Validated on construction.
struct IndexTuple {
    std::vector<int> indices;
    int sample_size = 0;

    IndexTuple(std::vector<int> idx, int n);
    int order() const { return static_cast<int>(indices.size()); }
};

// Nondecreasing probability levels t_1 <= ... <= t_k, each in [0,1].
// Ties are legal at the type level; individual operations state whether
// they require strict increase.
struct ThresholdVector {
    std::vector<double> thresholds;

    explicit ThresholdVector(std::vector<double> t);
    int size() const { return static_cast<int>(thresholds.size()); }
};

// A distribution on the real line built from finitely many linear-CDF
// segments and point masses. Rich enough to produce continuous CDFs,
// jumps, and plateaus (gaps between pieces), while keeping the CDF, its
// left limits, quantiles, and the generalized inverse exactly computable.
struct LinearSegment {
    double lo = 0.0;
    double hi = 0.0;
    double mass = 0.0; // CDF rises linearly by `mass` over [lo, hi]
};

struct Atom {
    double location = 0.0;
    double mass = 0.0; // CDF jumps by `mass` at `location`
};

class TestDistribution {
  public:
    // Pieces may be given in any order; they are sorted and validated.
    // Segments must not overlap each other; atoms must not fall in the
    // open interior of a segment (place them at endpoints or in gaps).
    // Total mass must equal 1 within 1e-12.
    TestDistribution(std::vector<LinearSegment> segments, std::vector<Atom> atoms);

    static TestDistribution uniform01();
    static TestDistribution uniform(double a, double b);
    static TestDistribution point_mass(double x);

    // F(x) = Pr{X <= x}, right-continuous.
    double cdf(double x) const;
    // F(x^-) = Pr{X < x}.
    double cdf_left(double x) const;
    // inf{x : F(x) >= p} for p in (0, 1].
    double quantile(double p) const;

    // Distribution of -X.
    TestDistribution mirrored() const;

    bool has_atoms() const { return !atoms_.empty(); }
    // True when the CDF is constant on some interval inside the support hull.
    bool has_plateaus() const;
    // Maximal intervals of constant CDF strictly inside the support hull.
    std::vector<std::pair<double, double>> plateaus() const;

    const std::vector<LinearSegment>& segments() const { return segments_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    double support_min() const;
    double support_max() const;

  private:
    std::vector<LinearSegment> segments_; // sorted by lo
    std::vector<Atom> atoms_;             // sorted by location
};

// One-sided coverage confidence for the i-th order statistic of n_c
// samples: the upper tail of a Beta(i, n_c - i + 1) variable,
//
//   V(n_c, i, eps) = integral over [eps, 1] of
//                    n_c! / ((i-1)! (n_c-i)!) x^(i-1) (1-x)^(n_c-i) dx,
//
// equal to the binomial sum  sum_{j=0}^{i-1} C(n_c,j) eps^j (1-eps)^(n_c-j).
// Absolute accuracy 1e-12 or better.
double confidence_v(int n_c, int i, double eps);

// Two-sided (range) failure probability
//   mu(n, e) = (1-e)^(n-1) * (1 + (n-1) e),
// strictly decreasing in n, with mu(1, e) = 1. The caller passes e = eps
// for constrained runs and e = eps*rho for global runs.
double mu(std::int64_t n, double eps_eff);

inline constexpr std::uint64_t kDefaultTermBudget = 10'000'000;

// Joint CDF of uniform order statistics:
//   Pr{ U_(i_1) <= t_1, ..., U_(i_k) <= t_k },
// computed by lazily enumerating bin occupancies (j_1,...,j_k) with
// i_s <= j_1 + ... + j_s <= N, pruning infeasible prefixes. Thresholds
// must be strictly increasing; t_1 = 0 and t_k = 1 are allowed.
// Throws budget_error if more than `term_budget` terms would be summed.
double joint_uniform_cdf(const IndexTuple& idx, const ThresholdVector& t,
                         std::uint64_t term_budget = kDefaultTermBudget);

// Generalized inverse tau(t) = sup{ F(x) : F(x) < t } for t in (0,1).
// Equals t when the level t is reached continuously from below, and the
// lower edge of the jump when t falls strictly inside one.
double generalized_inverse_tau(const TestDistribution& dist, double t);

// Exact joint law of the probability-transformed constrained order
// statistics:
//   Pr{ F(u_(i_1)) < t_1, ..., F(u_(i_k)) < t_k }
// for samples drawn from `dist`, with no continuity assumption. Evaluates
// the uniform joint CDF at (tau_1,...,tau_k) after deleting constraints
// made redundant by tied tau levels (the later index dominates).
// Always <= joint_uniform_cdf(idx, t), with equality iff every t_s is
// reached continuously by the CDF.
double exact_constrained_cdf(const IndexTuple& idx, const ThresholdVector& t,
                             const TestDistribution& dist,
                             std::uint64_t term_budget = kDefaultTermBudget);

} // namespace ordermc::orderstat
