#pragma once

#include <cstddef>

#include "common.hpp"

namespace levyham {

/// Dense row-major matrix. Everything in this project is tiny (at most a
/// few dozen rows), so plain loops beat any library dispatch.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vec data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Vec matvec(const Matrix& a, const Vec& x);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);
double frobenius_norm(const Matrix& a);

/// Canonical Poisson matrix J = [[0, I], [-I, 0]] of size 2n.
Matrix poisson_matrix(std::size_t half_dim);

/// y = J x for the canonical J (x of even length), without forming J.
void apply_canonical_j(const Vec& x, Vec& out);

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues ascending; columns of `vectors` are eigenvectors.
struct SymmetricEigen {
  Vec values;
  Matrix vectors;
};
SymmetricEigen symmetric_eigen(const Matrix& a);

/// Symmetric PSD square root via the eigendecomposition. Eigenvalues in
/// [-tol, 0) are clamped to zero; more negative ones raise ValidationError.
Matrix psd_sqrt(const Matrix& a, double tol = 1e-10);

/// Matrix exponential by scaling-and-squaring with a Taylor kernel.
/// Accurate to machine precision for the small matrices used here.
Matrix expm(const Matrix& a);

/// Singular values of a (tall or square) matrix via eigen of A^T A.
Vec singular_values(const Matrix& a);

}  // namespace levyham
