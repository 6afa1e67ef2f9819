#include <cmath>

#include <doctest.h>

#include "oufreq/error.hpp"
#include "oufreq/quadrature.hpp"

using namespace oufreq;

namespace {
double r2(std::span<const double> x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return s;
}
}  // namespace

TEST_CASE("generalized Laguerre rules") {
  const RadialRule one = laguerre_rule(0.0, 1);
  REQUIRE(one.size() == 1);
  CHECK(one.nodes[0] == doctest::Approx(1.0));
  CHECK(one.weights[0] == doctest::Approx(1.0));

  const RadialRule half = laguerre_rule(0.5, 8);
  double total = 0.0;
  for (double w : half.weights) total += w;
  CHECK(total == doctest::Approx(std::sqrt(M_PI) / 2.0).epsilon(1e-14));

  const RadialRule four = laguerre_rule(0.0, 4);
  double m3 = 0.0;
  for (std::size_t i = 0; i < four.size(); ++i) m3 += four.weights[i] * std::pow(four.nodes[i], 3);
  CHECK(m3 == doctest::Approx(6.0).epsilon(1e-13));

  // Exact through degree 2n-1: int s^k s^a e^{-s} = Gamma(k+a+1).
  const RadialRule r = laguerre_rule(1.3, 10);
  for (int k = 0; k <= 19; ++k) {
    double m = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) m += r.weights[i] * std::pow(r.nodes[i], k);
    CHECK(m == doctest::Approx(std::tgamma(k + 2.3)).epsilon(1e-11));
  }
}

TEST_CASE("Gauss-Legendre and Gegenbauer moments") {
  const LineRule gl = gauss_legendre(6);
  for (int k = 0; k <= 11; ++k) {
    double m = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) m += gl.weights[i] * std::pow(gl.nodes[i], k);
    CHECK(m == doctest::Approx(k % 2 ? 0.0 : 2.0 / (k + 1)).epsilon(1e-14));
  }
  // int (1-u^2)^{1/2} du = pi/2, int u^2 (1-u^2)^{1/2} du = pi/8.
  const LineRule gg = gauss_gegenbauer(0.5, 5);
  double m0 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < gg.nodes.size(); ++i) {
    m0 += gg.weights[i];
    m2 += gg.weights[i] * gg.nodes[i] * gg.nodes[i];
  }
  CHECK(m0 == doctest::Approx(M_PI / 2.0).epsilon(1e-14));
  CHECK(m2 == doctest::Approx(M_PI / 8.0).epsilon(1e-14));
}

TEST_CASE("sphere rules integrate low-degree monomials") {
  for (int N : {3, 4, 5}) {
    const SphereRule s = sphere_rule(N, 6);
    double area = 0.0, x0sq = 0.0, x0x1 = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto p = s.point(i);
      area += s.weights[i];
      x0sq += s.weights[i] * p[0] * p[0];
      x0x1 += s.weights[i] * p[0] * p[1];
    }
    CHECK(area == doctest::Approx(sphere_area(N)).epsilon(1e-13));
    CHECK(x0sq == doctest::Approx(sphere_area(N) / N).epsilon(1e-13));
    CHECK(std::abs(x0x1) < 1e-13);
  }
  CHECK(sphere_area(3) == doctest::Approx(4.0 * M_PI));
}

TEST_CASE("heat-kernel cubature") {
  const ProductRule rule = make_product_rule(3, 32, 8);
  const double full = 8.0 * std::pow(M_PI, 1.5);
  CHECK(integrate_G(rule, [](std::span<const double>) { return 1.0; }, 1.0) == doctest::Approx(full).epsilon(1e-12));
  CHECK(integrate_G(rule, [](std::span<const double>) { return 1.0; }, 0.37) == doctest::Approx(full).epsilon(1e-12));
  CHECK(integrate_G(rule, r2, 1.0) == doctest::Approx(48.0 * std::pow(M_PI, 1.5)).epsilon(1e-12));

  // |x|^{-2} absorbed into the weight: int |x|^{-2} G = (4pi)^{3/2} / 2 at t = 1 in 3-D.
  const ProductRule sing = make_product_rule(3, 32, 8, -2.0);
  CHECK(integrate_G(sing, [](std::span<const double>) { return 1.0; }, 1.0) ==
        doctest::Approx(0.5 * std::pow(4.0 * M_PI, 1.5)).epsilon(1e-12));

  CHECK_THROWS_AS(integrate_G(rule, [](std::span<const double>) { return NAN; }, 1.0), SingularityError);
}

TEST_CASE("doubling-verified integral and norms") {
  const StableIntegral s = integrate_G_stable(4, [](std::span<const double> x) { return std::exp(-r2(x) / 4.0); }, 1.0);
  CHECK(s.value == doctest::Approx(std::pow(2.0 * M_PI, 2.0)).epsilon(1e-11));
  CHECK(s.relative_change < 1e-10);

  const ProductRule rule = make_product_rule(3, 32, 8);
  const Field one{[](std::span<const double>) { return 1.0; },
                  [](std::span<const double>, std::span<double> g) {
                    for (double& c : g) c = 0.0;
                  }};
  const double expect = std::sqrt(8.0 * std::pow(M_PI, 1.5));
  CHECK(norm_Lt(rule, one, 1.0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(norm_Ht(rule, one, 0.2) == doctest::Approx(expect).epsilon(1e-12));

  // u = x_0: int (t + x_0^2) G(., t) = t int G + 2t int G.
  const Field lin{[](std::span<const double> x) { return x[0]; },
                  [](std::span<const double>, std::span<double> g) {
                    for (double& c : g) c = 0.0;
                    g[0] = 1.0;
                  }};
  const double t = 0.5, full = 8.0 * std::pow(M_PI, 1.5);
  CHECK(norm_Ht(rule, lin, t) == doctest::Approx(std::sqrt(3.0 * t * full)).epsilon(1e-12));
}
