#include "ordermc/systems.hpp"

#include "ordermc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <utility>

namespace ordermc::systems {

namespace {

using linalg::ComplexMatrix;
using linalg::Matrix;

void check_dims(const AffineMatrix& m, int rows, int cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols)
        throw std::domain_error(std::string("StateSpaceModel: block ") + name + " has wrong dimensions");
}

} // namespace

AffineMatrix::AffineMatrix(Matrix base, std::vector<Matrix> coeffs)
    : base_(std::move(base)), coeffs_(std::move(coeffs)) {
    for (const auto& c : coeffs_) {
        if (c.rows() != base_.rows() || c.cols() != base_.cols())
            throw std::domain_error("AffineMatrix: coefficient block dimension mismatch");
    }
}

AffineMatrix AffineMatrix::constant(Matrix base, int param_dim) {
    const int r = base.rows();
    const int c = base.cols();
    return AffineMatrix(std::move(base),
                        std::vector<Matrix>(static_cast<std::size_t>(param_dim), Matrix(r, c)));
}

Matrix AffineMatrix::at(const std::vector<double>& q) const {
    if (static_cast<int>(q.size()) != param_dim())
        throw std::domain_error("AffineMatrix: parameter vector has wrong dimension");
    Matrix out = base_;
    for (std::size_t p = 0; p < coeffs_.size(); ++p) {
        const double qp = q[p];
        if (qp == 0.0) continue;
        const Matrix& c = coeffs_[p];
        for (int i = 0; i < out.rows(); ++i)
            for (int j = 0; j < out.cols(); ++j) out(i, j) += qp * c(i, j);
    }
    return out;
}

StateSpaceModel::StateSpaceModel(AffineMatrix a, AffineMatrix b, AffineMatrix c, AffineMatrix d)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
    const int n = A.rows();
    if (A.cols() != n) throw std::domain_error("StateSpaceModel: A must be square");
    if (n < 1 || n > kMaxStateDim)
        throw std::domain_error("StateSpaceModel: state dimension must lie in [1, 16]");
    const int m = B.cols();
    const int p = C.rows();
    check_dims(B, n, m, "B");
    check_dims(C, p, n, "C");
    check_dims(D, p, m, "D");
    const int pd = A.param_dim();
    if (B.param_dim() != pd || C.param_dim() != pd || D.param_dim() != pd)
        throw std::domain_error("StateSpaceModel: blocks disagree on parameter dimension");
}

StateSpace evaluate(const StateSpaceModel& model, const std::vector<double>& q) {
    return StateSpace{model.A.at(q), model.B.at(q), model.C.at(q), model.D.at(q)};
}

double spectral_abscissa(const Matrix& a) {
    if (a.rows() != a.cols()) throw std::domain_error("spectral_abscissa: square matrix required");
    if (a.rows() > kMaxStateDim)
        throw std::domain_error("spectral_abscissa: dimension capped at 16");
    const auto eig = linalg::eigenvalues(a);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& l : eig) worst = std::max(worst, l.real());
    return worst;
}

double frequency_gain(const StateSpace& ss, double omega) {
    const int n = ss.A.rows();
    ComplexMatrix shifted(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            shifted(i, j) = std::complex<double>(-ss.A(i, j), i == j ? omega : 0.0);
    const ComplexMatrix x = linalg::solve(shifted, linalg::to_complex(ss.B)); // (jwI - A)^{-1} B
    ComplexMatrix g = linalg::to_complex(ss.C) * x;
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j) g(i, j) += ss.D(i, j);
    return linalg::largest_singular_value(g);
}

double hinf_norm(const StateSpace& ss, const HinfOptions& options) {
    if (!(options.rel_tol > 1e-6 && options.rel_tol < 1e-1))
        throw std::domain_error("hinf_norm: rel_tol must lie in (1e-6, 1e-1)");
    if (options.grid_points < 8) throw std::domain_error("hinf_norm: grid too coarse");
    if (spectral_abscissa(ss.A) >= 0.0)
        throw numeric_error("hinf_norm: realization is not Hurwitz");

    // DC gain: sigma_max(D - C A^{-1} B).
    Matrix dc = ss.C * linalg::solve(ss.A, ss.B);
    for (int i = 0; i < dc.rows(); ++i)
        for (int j = 0; j < dc.cols(); ++j) dc(i, j) = ss.D(i, j) - dc(i, j);
    double best = linalg::largest_singular_value(dc);
    double best_log_w = -std::numeric_limits<double>::infinity();

    // Feedthrough (w -> infinity).
    best = std::max(best, linalg::largest_singular_value(ss.D));

    const double log_lo = std::log(options.omega_min);
    const double log_hi = std::log(options.omega_max);
    const int g = options.grid_points;
    int best_i = -1;
    for (int i = 0; i < g; ++i) {
        const double lw = log_lo + (log_hi - log_lo) * i / (g - 1);
        const double gain = frequency_gain(ss, std::exp(lw));
        if (gain > best) {
            best = gain;
            best_log_w = lw;
            best_i = i;
        }
    }

    if (best_i >= 0) {
        // Golden-section refinement in log frequency between the grid
        // neighbours of the best point.
        const double step = (log_hi - log_lo) / (g - 1);
        double a = best_log_w - step;
        double b = best_log_w + step;
        constexpr double kInvPhi = 0.6180339887498949;
        double x1 = b - kInvPhi * (b - a);
        double x2 = a + kInvPhi * (b - a);
        double f1 = frequency_gain(ss, std::exp(x1));
        double f2 = frequency_gain(ss, std::exp(x2));
        for (int it = 0; it < 80 && (b - a) > 1e-12; ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + kInvPhi * (b - a);
                f2 = frequency_gain(ss, std::exp(x2));
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - kInvPhi * (b - a);
                f1 = frequency_gain(ss, std::exp(x1));
            }
        }
        best = std::max({best, f1, f2});
    }
    return best;
}

engine::ConstrainedProblem stability_margin_problem(const StateSpaceModel& loop_model, double gamma0) {
    if (!(gamma0 > 0.0)) throw config_error("stability_margin_problem: gamma0 must be positive");
    if (loop_model.param_dim() != 1)
        throw config_error("stability_margin_problem: only the scalar-gain perturbation is supported");

    engine::ParameterSpace space({engine::Interval{0.0, gamma0}});
    engine::ConstrainedProblem problem{
        std::move(space),
        [loop_model](const std::vector<double>& q) {
            return spectral_abscissa(loop_model.A.at(q)) >= 0.0; // destabilized
        },
        [](const std::vector<double>& q) { return std::fabs(q[0]); },
        "stability-margin"};
    return problem;
}

engine::ConstrainedProblem synthesis_problem(const SynthesisProblem& p, const HinfOptions& hinf) {
    if (!(p.decay_margin > 0.0)) throw config_error("synthesis_problem: decay margin alpha must be positive");
    if (p.space.dimension() != p.plant.param_dim())
        throw config_error("synthesis_problem: parameter space dimension does not match the plant");

    const StateSpaceModel model = p.plant;
    const double alpha = p.decay_margin;
    engine::ConstrainedProblem problem{
        p.space,
        [model, alpha](const std::vector<double>& q) {
            return spectral_abscissa(model.A.at(q)) < -alpha;
        },
        [model, hinf](const std::vector<double>& q) {
            return hinf_norm(evaluate(model, q), hinf);
        },
        "synthesis"};
    return problem;
}

engine::ConstrainedProblem robust_stability_problem(const StateSpaceModel& model,
                                                    engine::ParameterSpace space) {
    if (space.dimension() != model.param_dim())
        throw config_error("robust_stability_problem: parameter space dimension does not match the model");
    engine::ConstrainedProblem problem{
        std::move(space),
        [](const std::vector<double>&) { return true; },
        [model](const std::vector<double>& q) { return spectral_abscissa(model.A.at(q)); },
        "robust-stability"};
    return problem;
}

engine::ConstrainedProblem performance_range_problem(const StateSpaceModel& model,
                                                     engine::ParameterSpace space,
                                                     const HinfOptions& hinf) {
    if (space.dimension() != model.param_dim())
        throw config_error("performance_range_problem: parameter space dimension does not match the model");
    engine::ConstrainedProblem problem{
        std::move(space),
        [model](const std::vector<double>& q) { return spectral_abscissa(model.A.at(q)) < 0.0; },
        [model, hinf](const std::vector<double>& q) {
            return hinf_norm(evaluate(model, q), hinf);
        },
        "performance-range"};
    return problem;
}

} // namespace ordermc::systems
