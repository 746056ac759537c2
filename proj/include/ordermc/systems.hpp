#pragma once

#include "ordermc/engine.hpp"
#include "ordermc/linalg.hpp"

#include <string>
#include <vector>

namespace ordermc::systems {

// Matrix whose entries depend affinely on the parameter vector q:
//   M(q) = base + q_1 * coeff[0] + ... + q_n * coeff[n-1].
class AffineMatrix {
  public:
    AffineMatrix(linalg::Matrix base, std::vector<linalg::Matrix> coeffs);
    static AffineMatrix constant(linalg::Matrix base, int param_dim);

    int rows() const { return base_.rows(); }
    int cols() const { return base_.cols(); }
    int param_dim() const { return static_cast<int>(coeffs_.size()); }

    linalg::Matrix at(const std::vector<double>& q) const;

    const linalg::Matrix& base() const { return base_; }
    const std::vector<linalg::Matrix>& coeffs() const { return coeffs_; }

  private:
    linalg::Matrix base_;
    std::vector<linalg::Matrix> coeffs_;
};

// State-space realization with affine parameter dependence in all four
// blocks. Dimensions are checked on construction.
struct StateSpaceModel {
    AffineMatrix A;
    AffineMatrix B;
    AffineMatrix C;
    AffineMatrix D;

    StateSpaceModel(AffineMatrix a, AffineMatrix b, AffineMatrix c, AffineMatrix d);
    int state_dim() const { return A.rows(); }
    int param_dim() const { return A.param_dim(); }
};

// Fixed-parameter realization.
struct StateSpace {
    linalg::Matrix A, B, C, D;
};

StateSpace evaluate(const StateSpaceModel& model, const std::vector<double>& q);

inline constexpr int kMaxStateDim = 16;

// Largest real part over the eigenvalues of A. Negative iff Hurwitz.
double spectral_abscissa(const linalg::Matrix& a);

struct HinfOptions {
    double rel_tol = 1e-4;     // accuracy contract on the returned peak
    int grid_points = 400;     // log-spaced frequency grid
    double omega_min = 1e-4;
    double omega_max = 1e4;
};

// Peak over frequency of the largest singular value of
// C (jwI - A)^{-1} B + D, for a Hurwitz A. Logarithmic grid search plus
// golden-section refinement around the best grid point; DC and
// feedthrough values are always candidates. Throws numeric_error when A
// is not Hurwitz.
double hinf_norm(const StateSpace& ss, const HinfOptions& options = {});

// Largest singular value of the frequency response at a single frequency.
double frequency_gain(const StateSpace& ss, double omega);

// Stability-margin search problem for a scalar gain perturbation: the
// parameter is the gain q in [0, gamma0], the constraint keeps the
// closed-loop A(q) non-Hurwitz (destabilized), and the index is the
// perturbation size |q|. The engine's estimated minimum over this problem
// lower-approximates the true margin in probability.
engine::ConstrainedProblem stability_margin_problem(const StateSpaceModel& loop_model, double gamma0);

struct SynthesisProblem {
    StateSpaceModel plant;           // closed loop with q the controller parameters
    engine::ParameterSpace space;    // controller parameter box
    double decay_margin;             // required eigenvalue decay alpha > 0
};

// Constrained synthesis: admissible q must place every closed-loop
// eigenvalue left of -alpha; the index is the closed-loop H-infinity norm.
engine::ConstrainedProblem synthesis_problem(const SynthesisProblem& p,
                                             const HinfOptions& hinf = {});

// Robust stability over the whole box: index is the spectral abscissa,
// no constraint.
engine::ConstrainedProblem robust_stability_problem(const StateSpaceModel& model,
                                                    engine::ParameterSpace space);

// Performance range over the stable part of the box: constraint is
// Hurwitz stability, index is the H-infinity norm.
engine::ConstrainedProblem performance_range_problem(const StateSpaceModel& model,
                                                     engine::ParameterSpace space,
                                                     const HinfOptions& hinf = {});

} // namespace ordermc::systems
