#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "oufreq/error.hpp"

namespace oufreq {

/// One-dimensional Gauss rule.
struct LineRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Generalized Gauss-Laguerre rule for the weight s^a e^{-s} on (0, inf),
/// with the radial variable s = r^2/4.
struct RadialRule {
  double gl_parameter = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Golub-Welsch on the Laguerre Jacobi matrix (diagonal 2i+a+1,
/// off-diagonal sqrt(i(i+a))). Exact for polynomials of degree <= 2n-1.
RadialRule laguerre_rule(double a, int n);

/// Gauss-Legendre on [-1, 1].
LineRule gauss_legendre(int n);

/// Gauss rule for the weight (1-u^2)^c on [-1, 1], c >= 0.
LineRule gauss_gegenbauer(double c, int n);

/// Cubature on the unit sphere S^{N-1} embedded in R^N.
///
/// Built from polar angles with Gauss-Gegenbauer rules and a trapezoid rule
/// in the azimuth. The last Cartesian coordinate is the cosine of the first
/// polar angle, so for N = 3 this is Gauss-Legendre in cos(theta) times a
/// trapezoid in phi with theta measured from the z axis. The rule is
/// invariant under x -> -x.
struct SphereRule {
  int dim = 3;
  std::vector<double> points;  // size() * dim, row-major
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

/// `n_polar` nodes per polar angle and 2*n_polar azimuthal nodes.
SphereRule sphere_rule(int N, int n_polar);

/// Surface area of S^{N-1}.
double sphere_area(int N);

/// Product cubature for integrals against the heat kernel
/// G(x,t) = t^{-N/2} exp(-|x|^2/(4t)).
///
/// With `radial_power` p the rule integrates |x|^p f(x) G(x,t) exactly in the
/// weight: the radial Laguerre parameter is N/2 - 1 + p/2, so singular
/// factors such as |x|^{-2} are absorbed into the weight rather than sampled.
struct ProductRule {
  int dim = 3;
  double radial_power = 0.0;
  RadialRule radial;
  SphereRule angular;

  std::size_t size() const { return radial.size() * angular.size(); }
};

ProductRule make_product_rule(int N, int n_r, int n_polar, double radial_power = 0.0);

/// Calls visit(x, w) for every node, where x is the physical node at time t
/// and w the weight such that sum w f(x) approximates
/// int |x|^p f(x) G(x,t) dx.
template <class Visit>
void for_each_node(const ProductRule& rule, double t, Visit&& visit) {
  const int N = rule.dim;
  const double p = rule.radial_power;
  const double scale = std::pow(2.0, N - 1 + p) * std::pow(t, 0.5 * p);
  std::vector<double> x(static_cast<std::size_t>(N));
  for (std::size_t i = 0; i < rule.radial.size(); ++i) {
    const double r = std::sqrt(t) * 2.0 * std::sqrt(rule.radial.nodes[i]);
    const double wr = scale * rule.radial.weights[i];
    for (std::size_t a = 0; a < rule.angular.size(); ++a) {
      const auto theta = rule.angular.point(a);
      for (int d = 0; d < N; ++d) x[static_cast<std::size_t>(d)] = r * theta[static_cast<std::size_t>(d)];
      visit(std::span<const double>(x), wr * rule.angular.weights[a]);
    }
  }
}

/// Quadrature estimate of int |x|^p f(x) G(x,t) dx. Throws SingularityError
/// naming the node if f is not finite there.
template <class F>
double integrate_G(const ProductRule& rule, F&& f, double t) {
  double total = 0.0;
  std::size_t idx = 0;
  for_each_node(rule, t, [&](std::span<const double> x, double w) {
    const double v = f(x);
    if (!std::isfinite(v)) {
      std::string where;
      for (double c : x) where += std::to_string(c) + " ";
      throw SingularityError("integrand not finite at node " + std::to_string(idx) + " (x = " + where + ")");
    }
    total += w * v;
    ++idx;
  });
  return total;
}

/// int_0^inf r^{N-1+p} e^{-r^2/4} g(r) dr via the radial rule of `rule`.
template <class G>
double integrate_radial(const RadialRule& rule, int N, double radial_power, G&& g) {
  const double scale = std::pow(2.0, N - 1 + radial_power);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) total += rule.weights[i] * g(2.0 * std::sqrt(rule.nodes[i]));
  return scale * total;
}

/// Scalar field with gradient, evaluated pointwise.
struct Field {
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
};

/// Result of a doubling-verified integral.
struct StableIntegral {
  double value = 0.0;
  int n_r = 0;
  double relative_change = 0.0;
};

/// Doubles the radial node count from `n_r` until two successive estimates
/// agree to 1e-10 relative (cap 1024); throws AccuracyError otherwise.
StableIntegral integrate_G_stable(int N, const std::function<double(std::span<const double>)>& f, double t,
                                  int n_r = 64, int n_polar = 16, double radial_power = 0.0);

/// ||u||_{L_t} = (int u^2 G(.,t))^{1/2}.
double norm_Lt(const ProductRule& rule, const Field& u, double t);

/// ||u||_{H_t} = (int (t |grad u|^2 + u^2) G(.,t))^{1/2}.
double norm_Ht(const ProductRule& rule, const Field& u, double t);

}  // namespace oufreq
