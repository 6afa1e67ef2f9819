#include "oufreq/quadrature.hpp"

#include <numbers>
#include <sstream>

#include "oufreq/linalg.hpp"

namespace oufreq {

RadialRule laguerre_rule(double a, int n) {
  if (!(a > -1.0)) throw ConfigError("laguerre_rule: parameter must exceed -1");
  if (n < 1) throw ConfigError("laguerre_rule: need at least one node");
  std::vector<double> diag(static_cast<std::size_t>(n));
  std::vector<double> sub(static_cast<std::size_t>(n - 1));
  for (int i = 0; i < n; ++i) diag[static_cast<std::size_t>(i)] = 2.0 * i + a + 1.0;
  for (int i = 1; i < n; ++i) sub[static_cast<std::size_t>(i - 1)] = std::sqrt(i * (i + a));
  const TridiagonalSpectrum spec = tridiagonal_eigen_first_row(std::move(diag), std::move(sub));

  RadialRule rule;
  rule.gl_parameter = a;
  rule.nodes = spec.values;
  rule.weights.resize(rule.nodes.size());
  const double mass = std::tgamma(a + 1.0);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    rule.weights[i] = mass * spec.first_components[i] * spec.first_components[i];
  return rule;
}

LineRule gauss_gegenbauer(double c, int n) {
  if (!(c >= 0.0)) throw ConfigError("gauss_gegenbauer: exponent must be non-negative");
  if (n < 1) throw ConfigError("gauss_gegenbauer: need at least one node");
  std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
  std::vector<double> sub(static_cast<std::size_t>(n - 1));
  for (int k = 1; k < n; ++k) {
    const double num = k * (k + 2.0 * c);
    const double den = (2.0 * k + 2.0 * c + 1.0) * (2.0 * k + 2.0 * c - 1.0);
    sub[static_cast<std::size_t>(k - 1)] = std::sqrt(num / den);
  }
  const TridiagonalSpectrum spec = tridiagonal_eigen_first_row(std::move(diag), std::move(sub));
  const double mass = std::sqrt(std::numbers::pi) * std::tgamma(c + 1.0) / std::tgamma(c + 1.5);
  LineRule rule;
  rule.nodes = spec.values;
  rule.weights.resize(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    rule.weights[i] = mass * spec.first_components[i] * spec.first_components[i];
  // Symmetrize: the weight is even, round-off should not break x -> -x.
  const std::size_t m = rule.nodes.size();
  for (std::size_t i = 0; i < m / 2; ++i) {
    const double x = 0.5 * (rule.nodes[m - 1 - i] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[m - 1 - i] + rule.weights[i]);
    rule.nodes[i] = -x;
    rule.nodes[m - 1 - i] = x;
    rule.weights[i] = rule.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
  return rule;
}

LineRule gauss_legendre(int n) { return gauss_gegenbauer(0.0, n); }

double sphere_area(int N) { return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N); }

SphereRule sphere_rule(int N, int n_polar) {
  if (N < 2) throw ConfigError("sphere_rule: dimension must be at least 2");
  const int n_az = 2 * n_polar;
  SphereRule rule;
  rule.dim = N;

  // Polar angles phi_1..phi_{N-2}; phi_i carries sin^{N-1-i}, i.e. a
  // Gegenbauer weight (1-u^2)^{(N-2-i)/2} in u = cos(phi_i).
  std::vector<LineRule> polar;
  for (int i = 1; i <= N - 2; ++i) polar.push_back(gauss_gegenbauer(0.5 * (N - 2 - i), n_polar));

  std::vector<std::size_t> idx(polar.size(), 0);
  std::vector<double> x(static_cast<std::size_t>(N));
  while (true) {
    double w_polar = 1.0;
    double sin_prod = 1.0;
    // Coordinates: x_N = cos(phi_1), x_{N-1} = sin(phi_1) cos(phi_2), ...,
    // the final two coordinates (x_1, x_2) carry the azimuth.
    for (std::size_t i = 0; i < polar.size(); ++i) {
      const double u = polar[i].nodes[idx[i]];
      w_polar *= polar[i].weights[idx[i]];
      x[static_cast<std::size_t>(N) - 1 - i] = sin_prod * u;
      sin_prod *= std::sqrt(std::max(0.0, 1.0 - u * u));
    }
    for (int k = 0; k < n_az; ++k) {
      const double phi = 2.0 * std::numbers::pi * (k + 0.5) / n_az;
      x[0] = sin_prod * std::cos(phi);
      x[1] = sin_prod * std::sin(phi);
      rule.points.insert(rule.points.end(), x.begin(), x.end());
      rule.weights.push_back(w_polar * 2.0 * std::numbers::pi / n_az);
    }
    std::size_t level = 0;
    while (level < idx.size() && ++idx[level] == polar[level].nodes.size()) idx[level++] = 0;
    if (level == idx.size()) break;
  }
  return rule;
}

ProductRule make_product_rule(int N, int n_r, int n_polar, double radial_power) {
  const double a = 0.5 * N - 1.0 + 0.5 * radial_power;
  if (!(a > -1.0)) throw ConfigError("make_product_rule: radial power too singular for dimension");
  ProductRule rule;
  rule.dim = N;
  rule.radial_power = radial_power;
  rule.radial = laguerre_rule(a, n_r);
  rule.angular = sphere_rule(N, n_polar);
  return rule;
}

StableIntegral integrate_G_stable(int N, const std::function<double(std::span<const double>)>& f, double t,
                                  int n_r, int n_polar, double radial_power) {
  constexpr double kTol = 1e-10;
  constexpr int kCap = 1024;
  double prev = integrate_G(make_product_rule(N, n_r, n_polar, radial_power), f, t);
  double change = 0.0;
  for (int n = 2 * n_r; n <= kCap; n *= 2) {
    const double cur = integrate_G(make_product_rule(N, n, n_polar, radial_power), f, t);
    change = std::abs(cur - prev) / std::max(std::abs(cur), 1e-300);
    if (change < kTol || cur == prev) return {cur, n, change};
    prev = cur;
  }
  std::ostringstream msg;
  msg << "radial doubling did not stabilize up to n_r = " << kCap << " (last relative change " << change << ")";
  throw AccuracyError(msg.str());
}

double norm_Lt(const ProductRule& rule, const Field& u, double t) {
  return std::sqrt(integrate_G(rule, [&](std::span<const double> x) {
    const double v = u.value(x);
    return v * v;
  }, t));
}

double norm_Ht(const ProductRule& rule, const Field& u, double t) {
  std::vector<double> g(static_cast<std::size_t>(rule.dim));
  return std::sqrt(integrate_G(rule, [&](std::span<const double> x) {
    const double v = u.value(x);
    u.gradient(x, g);
    double gg = 0.0;
    for (double c : g) gg += c * c;
    return t * gg + v * v;
  }, t));
}

}  // namespace oufreq
