#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "oufreq/error.hpp"
#include "oufreq/linalg.hpp"

using namespace oufreq;

namespace {

Matrix random_symmetric(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = U(rng);
  return a;
}

// Cyclic Jacobi rotations; independent of the Householder/QL path.
std::vector<double> jacobi_eigenvalues(Matrix a) {
  const std::size_t n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace

TEST_CASE("symmetric eigensolver agrees with Jacobi rotations") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const Matrix a = random_symmetric(14, seed);
    const EigenDecomposition e = symmetric_eigen(a);
    const std::vector<double> ref = jacobi_eigenvalues(a);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(e.values[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    // A v = lambda v and orthonormal columns.
    for (std::size_t k = 0; k < ref.size(); ++k) {
      const std::vector<double> v = e.vectors.column(k);
      const std::vector<double> Av = a * std::span<const double>(v);
      for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(Av[i] - e.values[k] * v[i]) < 1e-12);
      CHECK(norm2(v) == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("tridiagonal first-row spectrum") {
  // Path-graph Laplacian tridiag(-1, 2, -1): eigenvalues 2 - 2cos(k pi/(n+1)).
  const std::size_t n = 9;
  const TridiagonalSpectrum s = tridiagonal_eigen_first_row(std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0));
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    CHECK(s.values[k] == doctest::Approx(2.0 - 2.0 * std::cos((k + 1) * M_PI / (n + 1))).epsilon(1e-13));
    sum_sq += s.first_components[k] * s.first_components[k];
  }
  CHECK(sum_sq == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("cholesky and generalized eigenproblem") {
  Matrix b = random_symmetric(6, 7);
  for (std::size_t i = 0; i < 6; ++i) b(i, i) += 6.0;
  const Matrix L = cholesky(b);
  const Matrix LLt = L * L.transposed();
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(LLt(i, j) == doctest::Approx(b(i, j)).epsilon(1e-13));

  const Matrix a = random_symmetric(6, 8);
  const EigenDecomposition g = generalized_symmetric_eigen(a, b);
  for (std::size_t k = 0; k < 6; ++k) {
    const std::vector<double> x = g.vectors.column(k);
    const std::vector<double> Ax = a * std::span<const double>(x), Bx = b * std::span<const double>(x);
    for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(Ax[i] - g.values[k] * Bx[i]) < 1e-11);
  }

  Matrix indefinite = Matrix::identity(2);
  indefinite(1, 1) = -1.0;
  CHECK_THROWS_AS(cholesky(indefinite), NumericError);
}
