#include "ordermc/linalg.hpp"

#include "ordermc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace ordermc::linalg {

namespace {

using Complex = std::complex<double>;

constexpr double kUlp = 2.220446049250313e-16;

void require_square(int rows, int cols, const char* who) {
    if (rows != cols) throw std::domain_error(std::string(who) + ": square matrix required");
}

// EISPACK-style balancing: iteratively rescale rows/columns by powers of
// two until row and column norms are comparable. Exact in floating point
// (powers of the radix), improves eigenvalue conditioning for badly
// scaled models.
void balance(Matrix& a) {
    const int n = a.rows();
    constexpr double radix = 2.0;
    constexpr double sq = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (int i = 0; i < n; ++i) {
            double r = 0.0;
            double c = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::fabs(a(j, i));
                r += std::fabs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sq;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sq;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                const double ginv = 1.0 / f;
                for (int j = 0; j < n; ++j) a(i, j) *= ginv;
                for (int j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

// Unitary reduction to upper Hessenberg form by complex Householder
// reflectors.
void hessenberg(ComplexMatrix& a) {
    const int n = a.rows();
    std::vector<Complex> v(static_cast<std::size_t>(std::max(0, n - 1)));
    for (int k = 0; k + 2 < n; ++k) {
        double colnorm_sq = 0.0;
        for (int i = k + 1; i < n; ++i) colnorm_sq += std::norm(a(i, k));
        const double colnorm = std::sqrt(colnorm_sq);
        if (colnorm == 0.0) continue;

        const Complex alpha = a(k + 1, k);
        const double aa = std::abs(alpha);
        const Complex beta = aa > 0.0 ? -(alpha / aa) * colnorm : Complex(-colnorm, 0.0);

        const int m = n - k - 1; // reflector length
        v[0] = alpha - beta;
        for (int i = 1; i < m; ++i) v[static_cast<std::size_t>(i)] = a(k + 1 + i, k);
        double vsq = 0.0;
        for (int i = 0; i < m; ++i) vsq += std::norm(v[static_cast<std::size_t>(i)]);
        if (vsq == 0.0) continue;
        const double scale = 2.0 / vsq;

        // left: rows k+1..n-1
        for (int j = k; j < n; ++j) {
            Complex w = 0.0;
            for (int i = 0; i < m; ++i) w += std::conj(v[static_cast<std::size_t>(i)]) * a(k + 1 + i, j);
            w *= scale;
            for (int i = 0; i < m; ++i) a(k + 1 + i, j) -= w * v[static_cast<std::size_t>(i)];
        }
        // right: columns k+1..n-1
        for (int i = 0; i < n; ++i) {
            Complex w = 0.0;
            for (int j = 0; j < m; ++j) w += a(i, k + 1 + j) * v[static_cast<std::size_t>(j)];
            w *= scale;
            for (int j = 0; j < m; ++j) a(i, k + 1 + j) -= w * std::conj(v[static_cast<std::size_t>(j)]);
        }
        a(k + 1, k) = beta;
        for (int i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

struct Givens {
    double c = 1.0; // real by construction
    Complex s = 0.0;
};

// Rotation with G [f g]^T = [r 0]^T, c real.
Givens make_givens(Complex f, Complex g) {
    const double af = std::abs(f);
    const double ag = std::abs(g);
    if (ag == 0.0) return {1.0, 0.0};
    if (af == 0.0) return {0.0, std::conj(g) / ag};
    const double r = std::hypot(af, ag);
    return {af / r, (f / af) * std::conj(g) / r};
}

} // namespace

template <typename T>
BasicMatrix<T>::BasicMatrix(int rows, int cols, std::vector<T> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (static_cast<std::size_t>(rows) * cols != data_.size())
        throw std::domain_error("BasicMatrix: data size does not match dimensions");
}

template <typename T>
BasicMatrix<T> BasicMatrix<T>::identity(int n) {
    BasicMatrix<T> m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
}

template class BasicMatrix<double>;
template class BasicMatrix<Complex>;

namespace {

template <typename T>
BasicMatrix<T> mat_mul(const BasicMatrix<T>& a, const BasicMatrix<T>& b) {
    if (a.cols() != b.rows()) throw std::domain_error("matrix product: inner dimensions differ");
    BasicMatrix<T> out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const T aik = a(i, k);
            if (aik == T(0)) continue;
            for (int j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

template <typename T>
BasicMatrix<T> mat_add(const BasicMatrix<T>& a, const BasicMatrix<T>& b, double sign) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::domain_error("matrix sum: dimensions differ");
    BasicMatrix<T> out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + T(sign) * b(i, j);
    return out;
}

// LU solve with partial pivoting, shared by the real and complex paths.
template <typename T>
BasicMatrix<T> lu_solve(BasicMatrix<T> a, BasicMatrix<T> x) {
    require_square(a.rows(), a.cols(), "solve");
    if (x.rows() != a.rows()) throw std::domain_error("solve: right-hand side rows differ");
    const int n = a.rows();
    const int m = x.cols();
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::abs(a(col, col));
        for (int r = col + 1; r < n; ++r) {
            const double cand = std::abs(a(r, col));
            if (cand > best) {
                best = cand;
                pivot = r;
            }
        }
        if (best == 0.0) throw numeric_error("solve: matrix is singular");
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
            for (int j = 0; j < m; ++j) std::swap(x(col, j), x(pivot, j));
        }
        for (int r = col + 1; r < n; ++r) {
            const T f = a(r, col) / a(col, col);
            if (f == T(0)) continue;
            for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            for (int j = 0; j < m; ++j) x(r, j) -= f * x(col, j);
        }
    }
    for (int row = n - 1; row >= 0; --row) {
        for (int j = 0; j < m; ++j) {
            T acc = x(row, j);
            for (int c = row + 1; c < n; ++c) acc -= a(row, c) * x(c, j);
            x(row, j) = acc / a(row, row);
        }
    }
    return x;
}

} // namespace

Matrix operator*(const Matrix& a, const Matrix& b) { return mat_mul(a, b); }
Matrix operator+(const Matrix& a, const Matrix& b) { return mat_add(a, b, 1.0); }
Matrix operator-(const Matrix& a, const Matrix& b) { return mat_add(a, b, -1.0); }

Matrix operator*(double s, const Matrix& a) {
    Matrix out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out(i, j) = s * a(i, j);
    return out;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) { return mat_mul(a, b); }

ComplexMatrix to_complex(const Matrix& a) {
    ComplexMatrix out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    return out;
}

ComplexMatrix solve(ComplexMatrix a, const ComplexMatrix& b) { return lu_solve(std::move(a), b); }
Matrix solve(Matrix a, const Matrix& b) { return lu_solve(std::move(a), b); }

std::vector<std::complex<double>> eigenvalues(Matrix a_in) {
    require_square(a_in.rows(), a_in.cols(), "eigenvalues");
    const int n = a_in.rows();
    std::vector<Complex> eig(static_cast<std::size_t>(n));
    if (n == 0) return eig;
    for (const double v : a_in.data()) {
        if (!std::isfinite(v)) throw std::domain_error("eigenvalues: non-finite entry");
    }
    if (n == 1) {
        eig[0] = a_in(0, 0);
        return eig;
    }

    balance(a_in);
    ComplexMatrix a = to_complex(a_in);
    hessenberg(a);

    // Shifted QR with deflation, eigenvalues only. Updates stay inside the
    // active block [l..high]; converged trailing entries are never touched
    // again.
    int high = n - 1;
    int its = 0;
    while (high >= 0) {
        int l = high;
        while (l > 0) {
            double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
            if (s == 0.0) s = 1.0;
            if (std::abs(a(l, l - 1)) <= kUlp * s) {
                a(l, l - 1) = 0.0;
                break;
            }
            --l;
        }
        if (l == high) {
            eig[static_cast<std::size_t>(high)] = a(high, high);
            --high;
            its = 0;
            continue;
        }
        if (++its > 60)
            throw numeric_error("eigenvalues: QR iteration did not converge");

        Complex shift;
        if (its % 20 == 0) {
            // exceptional shift to break rare cycles
            shift = a(high, high) + 1.5 * std::abs(a(high, high - 1));
        } else {
            const Complex h00 = a(high - 1, high - 1);
            const Complex h01 = a(high - 1, high);
            const Complex h10 = a(high, high - 1);
            const Complex h11 = a(high, high);
            const Complex mid = 0.5 * (h00 + h11);
            const Complex disc = std::sqrt(0.25 * (h00 - h11) * (h00 - h11) + h01 * h10);
            const Complex r1 = mid + disc;
            const Complex r2 = mid - disc;
            shift = std::abs(r1 - h11) < std::abs(r2 - h11) ? r1 : r2;
        }

        for (int i = l; i <= high; ++i) a(i, i) -= shift;
        std::vector<Givens> rot(static_cast<std::size_t>(high - l));
        for (int k = l; k < high; ++k) {
            const Givens g = make_givens(a(k, k), a(k + 1, k));
            rot[static_cast<std::size_t>(k - l)] = g;
            for (int j = k; j <= high; ++j) {
                const Complex top = a(k, j);
                const Complex bot = a(k + 1, j);
                a(k, j) = g.c * top + g.s * bot;
                a(k + 1, j) = -std::conj(g.s) * top + g.c * bot;
            }
        }
        for (int k = l; k < high; ++k) {
            const Givens g = rot[static_cast<std::size_t>(k - l)];
            for (int i = l; i <= k + 1; ++i) {
                const Complex left = a(i, k);
                const Complex right = a(i, k + 1);
                a(i, k) = g.c * left + std::conj(g.s) * right;
                a(i, k + 1) = -g.s * left + g.c * right;
            }
        }
        for (int i = l; i <= high; ++i) a(i, i) += shift;
    }
    return eig;
}

double largest_singular_value(const ComplexMatrix& a) {
    const int m = a.cols();
    const int r = a.rows();
    if (m == 0 || r == 0) return 0.0;
    double fro_sq = 0.0;
    for (const auto& v : a.data()) fro_sq += std::norm(v);
    if (fro_sq == 0.0) return 0.0;

    // Gram matrix, Hermitian positive semidefinite.
    ComplexMatrix gram(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            Complex acc = 0.0;
            for (int k = 0; k < r; ++k) acc += std::conj(a(k, i)) * a(k, j);
            gram(i, j) = acc;
        }
    }

    std::vector<Complex> v(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) v[static_cast<std::size_t>(i)] = 1.0 + 1e-3 * (i + 1);
    double vn = 0.0;
    for (const auto& x : v) vn += std::norm(x);
    vn = std::sqrt(vn);
    for (auto& x : v) x /= vn;

    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
        std::vector<Complex> w(static_cast<std::size_t>(m), 0.0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) w[static_cast<std::size_t>(i)] += gram(i, j) * v[static_cast<std::size_t>(j)];
        double rq = 0.0;
        for (int i = 0; i < m; ++i)
            rq += std::real(std::conj(v[static_cast<std::size_t>(i)]) * w[static_cast<std::size_t>(i)]);
        double wn = 0.0;
        for (const auto& x : w) wn += std::norm(x);
        wn = std::sqrt(wn);
        if (wn == 0.0) return 0.0;
        for (int i = 0; i < m; ++i) v[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] / wn;
        if (it > 0 && std::fabs(rq - lambda) <= 1e-10 * std::max(1.0, rq)) {
            return std::sqrt(std::max(rq, 0.0));
        }
        lambda = rq;
    }
    throw numeric_error("largest_singular_value: power iteration did not converge");
}

double largest_singular_value(const Matrix& a) { return largest_singular_value(to_complex(a)); }

} // namespace ordermc::linalg
