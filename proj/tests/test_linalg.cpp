#include "ordermc/errors.hpp"
#include "ordermc/linalg.hpp"
#include "ordermc/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

using namespace ordermc;
using namespace ordermc::linalg;

namespace {

Matrix random_matrix(int n, CounterRng& rng, double scale = 1.0) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = scale * (2.0 * rng.next_unit() - 1.0);
    return m;
}

// Householder reflector from a random vector: exactly orthogonal, so a
// similarity transform through it preserves eigenvalues to roundoff.
Matrix random_reflector(int n, CounterRng& rng) {
    std::vector<double> v(static_cast<std::size_t>(n));
    double norm_sq = 0.0;
    for (auto& x : v) {
        x = 2.0 * rng.next_unit() - 1.0;
        norm_sq += x * x;
    }
    Matrix h = Matrix::identity(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h(i, j) -= 2.0 * v[i] * v[j] / norm_sq;
    return h;
}

// Jacobi eigenvalue oracle for symmetric matrices (test-only, independent
// of the Hessenberg-QR path).
std::vector<double> jacobi_eigenvalues(Matrix a) {
    const int n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(a(p, q)) < 1e-18) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = a(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

double det_by_lu(Matrix a) {
    const int n = a.rows();
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a(r, col)) > std::fabs(a(pivot, col))) pivot = r;
        if (a(pivot, col) == 0.0) return 0.0;
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
            det = -det;
        }
        det *= a(col, col);
        for (int r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
        }
    }
    return det;
}

} // namespace

TEST_SUITE("linalg") {

TEST_CASE("eigenvalues of triangular and companion matrices") {
    Matrix diag(2, 2);
    diag(0, 0) = -1.0;
    diag(1, 1) = -3.0;
    auto eig = eigenvalues(diag);
    std::sort(eig.begin(), eig.end(), [](auto a, auto b) { return a.real() < b.real(); });
    CHECK(eig[0].real() == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(eig[1].real() == doctest::Approx(-1.0).epsilon(1e-12));

    // companion of s^2 + 2 s + 5: roots -1 +/- 2i
    Matrix comp(2, 2);
    comp(0, 1) = 1.0;
    comp(1, 0) = -5.0;
    comp(1, 1) = -2.0;
    eig = eigenvalues(comp);
    for (const auto& l : eig) {
        CHECK(l.real() == doctest::Approx(-1.0).epsilon(1e-10));
        CHECK(std::fabs(l.imag()) == doctest::Approx(2.0).epsilon(1e-10));
    }

    Matrix rot(2, 2);
    rot(0, 1) = 1.0;
    rot(1, 0) = -1.0;
    eig = eigenvalues(rot);
    for (const auto& l : eig) {
        CHECK(std::fabs(l.real()) <= 1e-12);
        CHECK(std::fabs(std::fabs(l.imag()) - 1.0) <= 1e-12);
    }
}

TEST_CASE("eigenvalue sums match traces and products match determinants") {
    CounterRng rng(2101, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_unit() * 9);
        const Matrix a = random_matrix(n, rng, 2.0);
        const auto eig = eigenvalues(a);
        std::complex<double> sum = 0.0;
        std::complex<double> prod = 1.0;
        for (const auto& l : eig) {
            sum += l;
            prod *= l;
        }
        double trace = 0.0;
        for (int i = 0; i < n; ++i) trace += a(i, i);
        CHECK(sum.real() == doctest::Approx(trace).epsilon(1e-8));
        CHECK(std::fabs(sum.imag()) <= 1e-8 * std::max(1.0, std::fabs(trace)));
        const double det = det_by_lu(a);
        CHECK(prod.real() == doctest::Approx(det).epsilon(1e-6));
    }
}

TEST_CASE("symmetric eigenvalues agree with the Jacobi oracle") {
    CounterRng rng(2102, 0);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_unit() * 7);
        Matrix a = random_matrix(n, rng);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j) a(j, i) = a(i, j);
        const auto want = jacobi_eigenvalues(a);
        auto got_c = eigenvalues(a);
        std::vector<double> got(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            CHECK(std::fabs(got_c[static_cast<std::size_t>(i)].imag()) <= 1e-9);
            got[static_cast<std::size_t>(i)] = got_c[static_cast<std::size_t>(i)].real();
        }
        std::sort(got.begin(), got.end());
        for (int i = 0; i < n; ++i)
            CHECK(got[static_cast<std::size_t>(i)] ==
                  doctest::Approx(want[static_cast<std::size_t>(i)]).epsilon(1e-9));
    }
}

TEST_CASE("eigenvalues survive orthogonal similarity transforms") {
    CounterRng rng(2103, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_unit() * 5);
        const Matrix a = random_matrix(n, rng);
        const Matrix h = random_reflector(n, rng);
        const Matrix b = h * a * h; // reflector is its own inverse
        const auto ea = eigenvalues(a);
        auto eb = eigenvalues(b);
        // greedy nearest matching: sorting is unstable for conjugate pairs
        // whose real parts differ by one ulp between the two runs
        for (const auto& l : ea) {
            std::size_t best = 0;
            for (std::size_t j = 1; j < eb.size(); ++j)
                if (std::abs(eb[j] - l) < std::abs(eb[best] - l)) best = j;
            CHECK(std::abs(eb[best] - l) <= 1e-7);
            eb.erase(eb.begin() + static_cast<std::ptrdiff_t>(best));
        }
    }
}

TEST_CASE("defective matrices keep their eigenvalue cluster") {
    // Jordan block: all eigenvalues 2, maximally ill conditioned. The
    // cluster spreads by roughly eps^(1/n); the mean stays tight.
    const int n = 4;
    Matrix j(n, n);
    for (int i = 0; i < n; ++i) {
        j(i, i) = 2.0;
        if (i + 1 < n) j(i, i + 1) = 1.0;
    }
    const auto eig = eigenvalues(j);
    std::complex<double> sum = 0.0;
    for (const auto& l : eig) {
        CHECK(std::abs(l - 2.0) <= 1e-2);
        sum += l;
    }
    CHECK(sum.real() == doctest::Approx(8.0).epsilon(1e-10));
    CHECK(std::fabs(sum.imag()) <= 1e-10);
}

TEST_CASE("complex linear solve residuals vanish") {
    CounterRng rng(2104, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_unit() * 8);
        ComplexMatrix a(n, n);
        ComplexMatrix b(n, 2);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j)
                a(i, j) = {2.0 * rng.next_unit() - 1.0, 2.0 * rng.next_unit() - 1.0};
            a(i, i) += 4.0; // keep well conditioned
            b(i, 0) = {rng.next_unit(), rng.next_unit()};
            b(i, 1) = {rng.next_unit(), -rng.next_unit()};
        }
        const ComplexMatrix x = solve(a, b);
        const ComplexMatrix r = a * x;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < 2; ++j) CHECK(std::abs(r(i, j) - b(i, j)) <= 1e-10);
    }
}

TEST_CASE("solve rejects singular systems") {
    Matrix a(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = 2.0;
    a(1, 0) = 2.0;
    a(1, 1) = 4.0;
    Matrix b(2, 1);
    b(0, 0) = 1.0;
    CHECK_THROWS_AS(solve(a, b), numeric_error);
}

TEST_CASE("largest singular value on known matrices") {
    Matrix d(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = -7.0;
    CHECK(largest_singular_value(d) == doctest::Approx(7.0).epsilon(1e-9));

    // rank-one: sigma = |u| |v|
    Matrix r1(3, 2);
    const double u[3] = {1.0, 2.0, -2.0};
    const double v[2] = {3.0, 4.0};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) r1(i, j) = u[i] * v[j];
    CHECK(largest_singular_value(r1) == doctest::Approx(15.0).epsilon(1e-9));

    CHECK(largest_singular_value(Matrix(3, 3)) == 0.0);
}

TEST_CASE("singular value dominates column norms and respects scaling") {
    CounterRng rng(2105, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_unit() * 6);
        const Matrix a = random_matrix(n, rng, 3.0);
        const double s = largest_singular_value(a);
        for (int j = 0; j < n; ++j) {
            double col = 0.0;
            for (int i = 0; i < n; ++i) col += a(i, j) * a(i, j);
            CHECK(s >= std::sqrt(col) - 1e-9);
        }
        CHECK(largest_singular_value(2.5 * a) == doctest::Approx(2.5 * s).epsilon(1e-8));
    }
}

} // TEST_SUITE
