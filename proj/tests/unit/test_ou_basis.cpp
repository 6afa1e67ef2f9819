#include <cmath>
#include <map>

#include <doctest.h>

#include "oufreq/error.hpp"
#include "oufreq/ou_basis.hpp"
#include "oufreq/quadrature.hpp"

using namespace oufreq;

namespace {

std::shared_ptr<const AngularSpectrum> constant_spectrum(double lambda, int N = 3, int L = 8, int K = 64) {
  return std::make_shared<AngularSpectrum>(solve_angular(AngularPotential::constant(lambda), N, L, K));
}

}  // namespace

TEST_CASE("eigenvalue ladder without potential") {
  const OUBasis b = enumerate_modes(constant_spectrum(0.0), 2.0);
  std::map<long, int> count;
  for (const auto& m : b.modes) {
    const double twice = 2.0 * m.gamma;
    CHECK(std::abs(twice - std::round(twice)) < 1e-12);
    ++count[std::lround(twice)];
  }
  // Multiplicity oracle: 3-D multi-indices of total degree 2 gamma.
  for (long d = 0; d <= 4; ++d) CHECK(count[d] == (d + 2) * (d + 1) / 2);
  CHECK(count.size() == 5);
}

TEST_CASE("multiplicity and index sets") {
  const auto s0 = constant_spectrum(0.0);
  const Multiplicity g0 = multiplicity(0.0, *s0);
  CHECK(g0.count == 1);
  REQUIRE(g0.J.size() == 1);
  CHECK(g0.J[0] == std::pair<int, std::size_t>{0, 0});
  CHECK(multiplicity(1.0, *s0).count == 6);
  CHECK(multiplicity(1.5, *s0).count == 10);
  CHECK(multiplicity(0.5, *constant_spectrum(0.1)).count == 0);
  CHECK_THROWS_AS(multiplicity(0.5 + 1e-7, *s0), DegeneracyError);
}

TEST_CASE("constant potential shifts the towers") {
  const double lambda = 0.1;
  const OUBasis b = enumerate_modes(constant_spectrum(lambda), 1.0);
  // l = 0 tower: alpha = 1/2 - sqrt(1/4 - lambda).
  const double alpha0 = 0.5 - std::sqrt(0.25 - lambda);
  CHECK(b.modes[0].gamma == doctest::Approx(-alpha0 / 2.0).epsilon(1e-14));
  bool found = false;
  for (const auto& m : b.modes)
    if (m.j == 0 && m.n == 1) {
      CHECK(m.gamma == doctest::Approx(1.0 - alpha0 / 2.0).epsilon(1e-14));
      found = true;
    }
  CHECK(found);
}

TEST_CASE("basis certification on 32 modes") {
  for (double lambda : {0.0, 0.1}) {
    const OUBasis b = first_modes(constant_spectrum(lambda), 32);
    REQUIRE(b.size() == 32);
    CHECK(b.gram_residual < 1e-8);
    CHECK(b.bilinear_residual < 1e-6);
  }
}

TEST_CASE("pairings of individual modes") {
  const OUBasis b = first_modes(constant_spectrum(0.0), 16);
  CHECK(inner_L(b, 0, 0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(inner_L(b, 0, 1) == 0.0);
  CHECK(std::abs(bilinear_B(b, 0, 0)) < 1e-13);
  CHECK(bilinear_B(b, 1, 1) == doctest::Approx(0.5).epsilon(1e-12));
  // Same angular index, n = 0 vs n = 1.
  std::size_t n1 = 0;
  for (std::size_t k = 0; k < b.size(); ++k)
    if (b.modes[k].j == 0 && b.modes[k].n == 1) n1 = k;
  REQUIRE(n1 > 0);
  CHECK(std::abs(inner_L(b, 0, n1)) < 1e-12);
  CHECK(bilinear_B(b, n1, n1) == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t p = 0; p < b.size(); ++p)
    for (std::size_t q = 0; q < b.size(); ++q)
      if (p != q) CHECK(std::abs(bilinear_B(b, p, q)) < 1e-6);
}

TEST_CASE("mode values against direct cubature") {
  // int V~_p V~_q e^{-|x|^2/4} computed pointwise reproduces the Gram matrix.
  auto spec = std::make_shared<AngularSpectrum>(
      solve_angular(AngularPotential::zonal_from([](double u) { return 0.2 * u; }, 3), 3, 12, 32));
  const OUBasis b = first_modes(spec, 8);
  // The singular factor |x|^{-alpha_p - alpha_q} is moved into the radial weight.
  std::map<long, std::vector<std::pair<std::size_t, std::size_t>>> by_exponent;
  for (std::size_t p = 0; p < 8; ++p)
    for (std::size_t q = 0; q < 8; ++q)
      by_exponent[std::lround(1e9 * (b.modes[p].alpha + b.modes[q].alpha))].push_back({p, q});
  std::vector<double> vals;
  Matrix g(8, 8);
  for (const auto& [key, pairs] : by_exponent) {
    const double e = b.modes[pairs[0].first].alpha + b.modes[pairs[0].second].alpha;
    const ProductRule rule = make_product_rule(3, 40, 16, -e);
    for_each_node(rule, 1.0, [&](std::span<const double> x, double w) {
      eval_basis(b, x, vals, nullptr);
      const double scale = std::pow(std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]), e);
      for (const auto& [p, q] : pairs) g(p, q) += w * scale * vals[p] * vals[q];
    });
  }
  for (std::size_t p = 0; p < 8; ++p)
    for (std::size_t q = 0; q < 8; ++q) CHECK(std::abs(g(p, q) - (p == q ? 1.0 : 0.0)) < 1e-8);
}

TEST_CASE("energy matrix is identity plus B plus Hardy term") {
  const OUBasis b = first_modes(constant_spectrum(0.1), 12);
  const Matrix E = energy_matrix(b), B = bilinear_matrix(b), R = hardy_matrix(b);
  // int |grad V|^2 G = B + int a V^2/|x|^2 G with a = 0.1.
  for (std::size_t p = 0; p < 12; ++p)
    for (std::size_t q = 0; q < 12; ++q) CHECK(E(p, q) == doctest::Approx(B(p, q) + 0.1 * R(p, q)).epsilon(1e-10));
}

TEST_CASE("truncation is certified") {
  auto small = std::make_shared<AngularSpectrum>(solve_angular(AngularPotential::constant(0.0), 3, 2, 4));
  CHECK_THROWS_AS(enumerate_modes(small, 2.0), TruncationError);
}
