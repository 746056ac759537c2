#include "ordermc/orderstat.hpp"

#include "ordermc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ordermc::orderstat {

namespace {

constexpr double kMassTol = 1e-12;

double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// sum_{j=0}^{i-1} C(n,j) eps^j (1-eps)^(n-j), evaluated term-by-term in
// log space. Exact enough for n <= 60; binomial coefficients above that
// are better handled by the continued fraction.
double binomial_lower_tail(int n, int i, double eps) {
    const double log_eps = std::log(eps);
    const double log_1me = std::log1p(-eps);
    double total = 0.0;
    for (int j = 0; j < i; ++j) {
        total += std::exp(log_choose(n, j) + j * log_eps + (n - j) * log_1me);
    }
    return std::min(total, 1.0);
}

// Continued fraction for the regularized incomplete beta function
// (modified Lentz). Standard formulation; converges in O(sqrt(max(a,b)))
// iterations for the x-range it is called with.
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw numeric_error("regularized incomplete beta: continued fraction did not converge");
}

// I_x(a, b), regularized incomplete beta.
double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(log_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * beta_cf(a, b, x) / a;
    }
    return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

} // namespace

IndexTuple::IndexTuple(std::vector<int> idx, int n) : indices(std::move(idx)), sample_size(n) {
    if (indices.empty()) throw std::domain_error("IndexTuple: at least one index required");
    if (sample_size < 1) throw std::domain_error("IndexTuple: sample size must be positive");
    int prev = 0;
    for (int i : indices) {
        if (i <= prev) throw std::domain_error("IndexTuple: indices must be strictly increasing and >= 1");
        prev = i;
    }
    if (indices.back() > sample_size)
        throw std::domain_error("IndexTuple: largest index exceeds sample size");
}

ThresholdVector::ThresholdVector(std::vector<double> t) : thresholds(std::move(t)) {
    if (thresholds.empty()) throw std::domain_error("ThresholdVector: at least one threshold required");
    double prev = 0.0;
    for (double v : thresholds) {
        if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("ThresholdVector: thresholds must lie in [0,1]");
        if (v < prev) throw std::domain_error("ThresholdVector: thresholds must be nondecreasing");
        prev = v;
    }
}

TestDistribution::TestDistribution(std::vector<LinearSegment> segments, std::vector<Atom> atoms)
    : segments_(std::move(segments)), atoms_(std::move(atoms)) {
    for (const auto& s : segments_) {
        if (!(std::isfinite(s.lo) && std::isfinite(s.hi) && s.lo < s.hi))
            throw std::domain_error("TestDistribution: segment needs finite lo < hi");
        if (!(s.mass > 0.0)) throw std::domain_error("TestDistribution: segment mass must be positive");
    }
    for (const auto& a : atoms_) {
        if (!std::isfinite(a.location)) throw std::domain_error("TestDistribution: atom location must be finite");
        if (!(a.mass > 0.0)) throw std::domain_error("TestDistribution: atom mass must be positive");
    }
    std::sort(segments_.begin(), segments_.end(),
              [](const LinearSegment& x, const LinearSegment& y) { return x.lo < y.lo; });
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& x, const Atom& y) { return x.location < y.location; });
    for (std::size_t i = 1; i < segments_.size(); ++i) {
        if (segments_[i].lo < segments_[i - 1].hi)
            throw std::domain_error("TestDistribution: segments overlap");
    }
    for (std::size_t i = 1; i < atoms_.size(); ++i) {
        if (atoms_[i].location == atoms_[i - 1].location)
            throw std::domain_error("TestDistribution: duplicate atom location (merge masses first)");
    }
    for (const auto& a : atoms_) {
        for (const auto& s : segments_) {
            if (a.location > s.lo && a.location < s.hi)
                throw std::domain_error("TestDistribution: atom inside segment interior");
        }
    }
    double total = 0.0;
    for (const auto& s : segments_) total += s.mass;
    for (const auto& a : atoms_) total += a.mass;
    if (std::fabs(total - 1.0) > kMassTol)
        throw std::domain_error("TestDistribution: total mass must be 1 (got " + std::to_string(total) + ")");
    if (segments_.empty() && atoms_.empty())
        throw std::domain_error("TestDistribution: empty distribution");
}

TestDistribution TestDistribution::uniform01() { return uniform(0.0, 1.0); }

TestDistribution TestDistribution::uniform(double a, double b) {
    return TestDistribution({LinearSegment{a, b, 1.0}}, {});
}

TestDistribution TestDistribution::point_mass(double x) {
    return TestDistribution({}, {Atom{x, 1.0}});
}

double TestDistribution::cdf(double x) const {
    double f = 0.0;
    for (const auto& s : segments_) {
        if (x >= s.hi) {
            f += s.mass;
        } else if (x > s.lo) {
            f += s.mass * (x - s.lo) / (s.hi - s.lo);
        }
    }
    for (const auto& a : atoms_) {
        if (x >= a.location) f += a.mass;
    }
    return std::min(f, 1.0);
}

double TestDistribution::cdf_left(double x) const {
    double f = 0.0;
    for (const auto& s : segments_) {
        if (x >= s.hi) {
            f += s.mass;
        } else if (x > s.lo) {
            f += s.mass * (x - s.lo) / (s.hi - s.lo);
        }
    }
    for (const auto& a : atoms_) {
        if (x > a.location) f += a.mass;
    }
    return std::min(f, 1.0);
}

namespace {

// Unified sweep order over pieces: a segment sorts by its left end and is
// processed before an atom sitting at that left end only if the segment
// *ends* there. Realized by sorting on (key, is_segment_start) pairs.
struct Piece {
    double key;      // location for atoms, lo for segments
    bool is_atom;
    double mass;
    double lo, hi;   // segments only
};

std::vector<Piece> sweep_order(const std::vector<LinearSegment>& segs, const std::vector<Atom>& atoms) {
    std::vector<Piece> ps;
    ps.reserve(segs.size() + atoms.size());
    for (const auto& s : segs) ps.push_back({s.lo, false, s.mass, s.lo, s.hi});
    for (const auto& a : atoms) ps.push_back({a.location, true, a.mass, a.location, a.location});
    // Atoms at a point p come before a segment starting at p (the segment
    // contributes nothing at its own left end); a segment ending at p was
    // already placed earlier because its key is its lo < p.
    std::sort(ps.begin(), ps.end(), [](const Piece& x, const Piece& y) {
        if (x.key != y.key) return x.key < y.key;
        return x.is_atom && !y.is_atom;
    });
    return ps;
}

} // namespace

double TestDistribution::quantile(double p) const {
    if (!(p > 0.0 && p <= 1.0 + kMassTol))
        throw std::domain_error("TestDistribution::quantile: p must lie in (0,1]");
    double cum = 0.0;
    const auto ps = sweep_order(segments_, atoms_);
    for (const auto& piece : ps) {
        if (p <= cum + piece.mass) {
            if (piece.is_atom) return piece.lo;
            return piece.lo + (p - cum) / piece.mass * (piece.hi - piece.lo);
        }
        cum += piece.mass;
    }
    return support_max();
}

TestDistribution TestDistribution::mirrored() const {
    std::vector<LinearSegment> segs;
    segs.reserve(segments_.size());
    for (const auto& s : segments_) segs.push_back({-s.hi, -s.lo, s.mass});
    std::vector<Atom> atoms;
    atoms.reserve(atoms_.size());
    for (const auto& a : atoms_) atoms.push_back({-a.location, a.mass});
    return TestDistribution(std::move(segs), std::move(atoms));
}

bool TestDistribution::has_plateaus() const { return !plateaus().empty(); }

std::vector<std::pair<double, double>> TestDistribution::plateaus() const {
    std::vector<std::pair<double, double>> flats;
    const auto ps = sweep_order(segments_, atoms_);
    double reach = -std::numeric_limits<double>::infinity();
    bool have_reach = false;
    for (const auto& piece : ps) {
        if (have_reach && piece.lo > reach) flats.emplace_back(reach, piece.lo);
        reach = have_reach ? std::max(reach, piece.hi) : piece.hi;
        have_reach = true;
    }
    return flats;
}

double TestDistribution::support_min() const {
    double m = std::numeric_limits<double>::infinity();
    if (!segments_.empty()) m = std::min(m, segments_.front().lo);
    if (!atoms_.empty()) m = std::min(m, atoms_.front().location);
    return m;
}

double TestDistribution::support_max() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& s : segments_) m = std::max(m, s.hi);
    if (!atoms_.empty()) m = std::max(m, atoms_.back().location);
    return m;
}

double confidence_v(int n_c, int i, double eps) {
    if (n_c < 1) throw std::domain_error("confidence_v: sample size must be positive");
    if (i < 1 || i > n_c) throw std::domain_error("confidence_v: order index out of [1, n_c]");
    if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("confidence_v: eps must lie in (0,1)");
    // exact binomial sum for small n, continued fraction above
    constexpr int kSumLimit = 60;
    if (n_c <= kSumLimit) return binomial_lower_tail(n_c, i, eps);
    return reg_inc_beta(static_cast<double>(n_c - i + 1), static_cast<double>(i), 1.0 - eps);
}

double mu(std::int64_t n, double eps_eff) {
    if (n < 1) throw std::domain_error("mu: n must be >= 1");
    if (!(eps_eff > 0.0 && eps_eff < 1.0)) throw std::domain_error("mu: eps must lie in (0,1)");
    if (n == 1) return 1.0;
    const double nm1 = static_cast<double>(n - 1);
    return std::exp(nm1 * std::log1p(-eps_eff)) * (1.0 + nm1 * eps_eff);
}

namespace {

// Shared enumeration core for the joint uniform order-statistic CDF.
// Thresholds here may start at 0 (zero-width first gap) and end at 1;
// interior gaps are strictly positive. Counts leaf terms against `budget`.
class JointCdfSum {
  public:
    JointCdfSum(int n, const std::vector<int>& indices, const std::vector<double>& thresholds,
                std::uint64_t budget)
        : n_(n), idx_(indices), budget_(budget) {
        const int k = static_cast<int>(thresholds.size());
        log_gap_.resize(k);
        gap_zero_.resize(k);
        double prev = 0.0;
        for (int s = 0; s < k; ++s) {
            const double gap = thresholds[s] - prev;
            gap_zero_[s] = gap <= 0.0;
            log_gap_[s] = gap_zero_[s] ? -std::numeric_limits<double>::infinity() : std::log(gap);
            prev = thresholds[s];
        }
        const double tail = 1.0 - thresholds.back();
        tail_zero_ = tail <= 0.0;
        log_tail_ = tail_zero_ ? -std::numeric_limits<double>::infinity() : std::log(tail);
    }

    double run() {
        total_ = 0.0;
        terms_ = 0;
        descend(0, 0, 0.0);
        return std::min(total_, 1.0);
    }

  private:
    void descend(int s, int placed, double log_w) {
        if (s == static_cast<int>(idx_.size())) {
            const int rest = n_ - placed;
            if (rest > 0 && tail_zero_) return;
            if (++terms_ > budget_) throw budget_error("joint_uniform_cdf: term budget exceeded");
            total_ += std::exp(log_w + (rest > 0 ? rest * log_tail_ : 0.0));
            return;
        }
        const int j_lo = std::max(0, idx_[s] - placed);
        const int j_hi = n_ - placed;
        if (j_lo > j_hi) return;
        if (gap_zero_[s]) {
            // zero-width bin: only an empty occupancy contributes
            if (j_lo == 0) descend(s + 1, placed, log_w);
            return;
        }
        for (int j = j_lo; j <= j_hi; ++j) {
            descend(s + 1, placed + j, log_w + log_choose(n_ - placed, j) + j * log_gap_[s]);
        }
    }

    int n_;
    std::vector<int> idx_;
    std::vector<double> log_gap_;
    std::vector<char> gap_zero_;
    double log_tail_ = 0.0;
    bool tail_zero_ = false;
    std::uint64_t budget_ = 0;
    std::uint64_t terms_ = 0;
    double total_ = 0.0;
};

double joint_cdf_core(int n, const std::vector<int>& indices, const std::vector<double>& thresholds,
                      std::uint64_t budget) {
    return JointCdfSum(n, indices, thresholds, budget).run();
}

} // namespace

double joint_uniform_cdf(const IndexTuple& idx, const ThresholdVector& t, std::uint64_t term_budget) {
    if (t.size() != idx.order())
        throw std::domain_error("joint_uniform_cdf: index and threshold counts differ");
    for (int s = 1; s < t.size(); ++s) {
        if (!(t.thresholds[s - 1] < t.thresholds[s]))
            throw std::domain_error("joint_uniform_cdf: thresholds must be strictly increasing");
    }
    return joint_cdf_core(idx.sample_size, idx.indices, t.thresholds, term_budget);
}

namespace {

// sup{ F(x) : F(x) < t } for t in (0, 1]. Sweeps the pieces left to right
// tracking the cumulative CDF level: a linear segment spanning level t
// reaches it continuously, so tau = t; a jump across the level leaves tau
// at the pre-jump value.
double tau_core(const TestDistribution& dist, double t) {
    const auto ps = sweep_order(dist.segments(), dist.atoms());
    double cum = 0.0;
    double best = 0.0;
    for (const auto& piece : ps) {
        if (cum >= t) break;
        if (piece.is_atom) {
            best = cum;                  // pre-jump level, reached from the left
            cum += piece.mass;
            if (cum < t) best = cum;     // post-jump level, attained at the atom
        } else {
            const double top = cum + piece.mass;
            if (t <= top) return t;      // the segment passes through level t
            best = top;
            cum = top;
        }
    }
    return best;
}

} // namespace

double generalized_inverse_tau(const TestDistribution& dist, double t) {
    if (!(t > 0.0 && t < 1.0)) throw std::domain_error("generalized_inverse_tau: t must lie in (0,1)");
    return tau_core(dist, t);
}

double exact_constrained_cdf(const IndexTuple& idx, const ThresholdVector& t,
                             const TestDistribution& dist, std::uint64_t term_budget) {
    if (t.size() != idx.order())
        throw std::domain_error("exact_constrained_cdf: index and threshold counts differ");
    const int k = idx.order();
    std::vector<double> tau(k);
    for (int s = 0; s < k; ++s) {
        const double ts = t.thresholds[s];
        tau[s] = ts <= 0.0 ? 0.0 : tau_core(dist, ts);
    }
    // Equal tau levels make all but the last constraint at that level
    // redundant (the largest order index dominates).
    std::vector<int> kept_idx;
    std::vector<double> kept_tau;
    for (int s = 0; s < k; ++s) {
        if (s + 1 < k && tau[s + 1] == tau[s]) continue;
        kept_idx.push_back(idx.indices[s]);
        kept_tau.push_back(tau[s]);
    }
    return joint_cdf_core(idx.sample_size, kept_idx, kept_tau, term_budget);
}

} // namespace ordermc::orderstat
