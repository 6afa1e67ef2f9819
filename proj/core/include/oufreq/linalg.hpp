#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace oufreq {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::vector<double> column(std::size_t j) const;

  const std::vector<double>& data() const { return data_; }

  Matrix transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

/// Largest |a_ij - a_ji|.
double asymmetry(const Matrix& a);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

/// Eigenpairs of a symmetric matrix: values ascending, vectors as columns.
struct EigenDecomposition {
  std::vector<double> values;
  Matrix vectors;
};

/// Householder reduction to tridiagonal form followed by the implicit QL
/// iteration. Only the lower triangle of `a` is read.
EigenDecomposition symmetric_eigen(const Matrix& a);

/// Implicit QL on a symmetric tridiagonal matrix given by its diagonal and
/// subdiagonal (`sub[i]` couples rows i and i+1, size n-1). Returns the
/// eigenvalues ascending together with the first component of each
/// normalized eigenvector, which is all Golub-Welsch needs.
struct TridiagonalSpectrum {
  std::vector<double> values;
  std::vector<double> first_components;
};
TridiagonalSpectrum tridiagonal_eigen_first_row(std::vector<double> diag,
                                                std::vector<double> sub);

/// Lower Cholesky factor of a symmetric positive definite matrix.
/// Throws NumericError if a pivot is not positive.
Matrix cholesky(const Matrix& a);

/// Solves a x = rho b x for symmetric a and SPD b.
EigenDecomposition generalized_symmetric_eigen(const Matrix& a, const Matrix& b);

}  // namespace oufreq
