#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace ordermc::linalg {

// Dense row-major matrix over double or std::complex<double>. Sized for
// desk-scale control models (n <= 16); no view machinery, just values.
template <typename T>
class BasicMatrix {
  public:
    BasicMatrix() = default;
    BasicMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {}
    BasicMatrix(int rows, int cols, std::vector<T> data);

    static BasicMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    T& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    const T& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    const std::vector<T>& data() const { return data_; }

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

using Matrix = BasicMatrix<double>;
using ComplexMatrix = BasicMatrix<std::complex<double>>;

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix to_complex(const Matrix& a);

// Solve A X = B by LU with partial pivoting. Throws numeric_error when A
// is numerically singular.
ComplexMatrix solve(ComplexMatrix a, const ComplexMatrix& b);
Matrix solve(Matrix a, const Matrix& b);

// All eigenvalues of a real square matrix via balancing, Hessenberg
// reduction, and Francis double-shift QR. Throws numeric_error if the
// iteration fails to deflate.
std::vector<std::complex<double>> eigenvalues(Matrix a);

// Largest singular value by power iteration on the Gram matrix,
// convergence threshold 1e-10 on the Rayleigh quotient.
double largest_singular_value(const ComplexMatrix& a);
double largest_singular_value(const Matrix& a);

} // namespace ordermc::linalg
