#include <cmath>

#include <doctest.h>

#include "oufreq/angular.hpp"
#include "oufreq/error.hpp"
#include "oufreq/quadrature.hpp"

using namespace oufreq;

TEST_CASE("Galerkin matrix of the Laplace-Beltrami operator") {
  const Matrix m0 = assemble_angular(AngularPotential::constant(0.0), 2);
  REQUIRE(m0.rows() == 9);
  const double diag[9] = {0, 2, 2, 2, 6, 6, 6, 6, 6};
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j) CHECK(m0(i, j) == doctest::Approx(i == j ? diag[i] : 0.0));

  const Matrix ml = assemble_angular(AngularPotential::constant(0.3), 4);
  const Matrix mz = assemble_angular(AngularPotential::constant(0.0), 4);
  for (std::size_t i = 0; i < ml.rows(); ++i)
    for (std::size_t j = 0; j < ml.cols(); ++j) CHECK(ml(i, j) == doctest::Approx(mz(i, j) - (i == j ? 0.3 : 0.0)));

  // a_{0,0} Y_{0,0} with a_{0,0} = c sqrt(4 pi) is the constant c.
  const double c = 0.2;
  const Matrix mt = assemble_angular(AngularPotential::harmonic_table({{0, 0, c * std::sqrt(4.0 * M_PI)}}), 3);
  const Matrix mc = assemble_angular(AngularPotential::constant(c), 3);
  for (std::size_t i = 0; i < mt.rows(); ++i)
    for (std::size_t j = 0; j < mt.cols(); ++j) CHECK(mt(i, j) == doctest::Approx(mc(i, j)).epsilon(1e-12));
}

TEST_CASE("angular spectra") {
  const AngularSpectrum s0 = solve_angular(AngularPotential::constant(0.0), 3, 4, 9);
  const double mu[9] = {0, 2, 2, 2, 6, 6, 6, 6, 6};
  for (std::size_t k = 0; k < 9; ++k) CHECK(s0.eigenvalues[k] == doctest::Approx(mu[k]).epsilon(1e-13));

  const AngularSpectrum s1 = solve_angular(AngularPotential::constant(0.1), 3, 4, 9);
  CHECK(s1.eigenvalues[0] == doctest::Approx(-0.1).epsilon(1e-13));

  // Non-constant zonal potential: L = 24 against the L = 48 oracle.
  const auto cosine = AngularPotential::zonal_from([](double u) { return u; }, 4);
  const double lo = solve_angular(cosine, 3, 24, 16).eigenvalues[0];
  const double hi = solve_angular(cosine, 3, 48, 16).eigenvalues[0];
  CHECK(std::abs(lo - hi) < 1e-9);
  CHECK(lo < 0.0);

  // General N: mu_k(0) = l (l + N - 2) with harmonic multiplicities.
  const AngularSpectrum s5 = solve_angular(AngularPotential::constant(0.0), 5, 3, 20);
  CHECK(s5.eigenvalues[0] == doctest::Approx(0.0));
  CHECK(s5.eigenvalues[1] == doctest::Approx(4.0));
  CHECK(s5.eigenvalues[5] == doctest::Approx(4.0));
  CHECK(s5.eigenvalues[6] == doctest::Approx(10.0));
  CHECK(harmonic_multiplicity(5, 1) == 5);
  CHECK(harmonic_multiplicity(5, 2) == 14);
  CHECK(harmonic_multiplicity(3, 4) == 9);

  CHECK_THROWS_AS(solve_angular(AngularPotential::zonal_from([](double u) { return u; }, 3), 4, 4, 9), ConfigError);
}

TEST_CASE("positivity of the Hardy form") {
  const PositivityCheck p0 = check_positivity(solve_angular(AngularPotential::constant(0.0), 3, 4, 9));
  CHECK(p0.positive);
  CHECK(p0.margin == doctest::Approx(0.25));
  const AngularSpectrum bad = solve_angular(AngularPotential::constant(0.3), 3, 4, 9);
  const PositivityCheck p1 = check_positivity(bad);
  CHECK_FALSE(p1.positive);
  CHECK(p1.margin == doctest::Approx(-0.05));
  CHECK_THROWS_AS(require_positivity(bad), PositivityError);
  for (double lambda : {1.0, 2.2, 2.3}) {
    const PositivityCheck p = check_positivity(solve_angular(AngularPotential::constant(lambda), 5, 2, 6));
    CHECK(p.positive == (lambda < 2.25));
  }
}

TEST_CASE("angular eigenfunctions") {
  const AngularSpectrum s = solve_angular(AngularPotential::constant(0.0), 3, 4, 9);
  const double th[3] = {0.48, -0.6, 0.64};
  CHECK(std::abs(eval_psi(s, 0, th)) == doctest::Approx(1.0 / std::sqrt(4.0 * M_PI)));

  // psi_2..psi_4 span the degree-1 harmonics: sum psi_k(x) psi_k(y) = 3/(4 pi) x.y.
  const double y[3] = {0.0, 0.6, 0.8};
  double kernel = 0.0;
  for (std::size_t k = 1; k <= 3; ++k) kernel += eval_psi(s, k, th) * eval_psi(s, k, y);
  CHECK(kernel == doctest::Approx(3.0 / (4.0 * M_PI) * (th[1] * y[1] + th[2] * y[2])).epsilon(1e-12));

  // Orthonormality: Gauss-Legendre in cos(theta) and a trapezoid in phi are
  // exact for products of degree-12 harmonics.
  const auto a = AngularPotential::zonal_from([](double u) { return 0.4 * u * u - 0.1; }, 5);
  const AngularSpectrum z = solve_angular(a, 3, 12, 16);
  const LineRule gl = gauss_legendre(30);
  const int np = 64;
  double g[3][3] = {};
  for (std::size_t i = 0; i < gl.nodes.size(); ++i)
    for (int j = 0; j < np; ++j) {
      const double u = gl.nodes[i], s = std::sqrt(1.0 - u * u), ph = 2.0 * M_PI * j / np;
      const double p[3] = {s * std::cos(ph), s * std::sin(ph), u};
      const double w = gl.weights[i] * 2.0 * M_PI / np;
      double v[3];
      for (std::size_t k = 0; k < 3; ++k) v[k] = eval_psi(z, k, p);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) g[r][c] += w * v[r] * v[c];
    }
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) CHECK(std::abs(g[r][c] - (r == c ? 1.0 : 0.0)) < 1e-12);
}
