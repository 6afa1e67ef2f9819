#include "oufreq/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oufreq/error.hpp"

namespace oufreq {

double Polynomial::operator()(double t) const {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs.size() <= 1) return Polynomial{{0.0}};
  Polynomial d;
  d.coeffs.resize(coeffs.size() - 1);
  for (std::size_t i = 1; i < coeffs.size(); ++i) d.coeffs[i - 1] = static_cast<double>(i) * coeffs[i];
  return d;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial c;
  c.coeffs.assign(a.coeffs.size() + b.coeffs.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs.size(); ++j) c.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
  return c;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  Polynomial c;
  c.coeffs.assign(std::max(a.coeffs.size(), b.coeffs.size()), 0.0);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) c.coeffs[i] += a.coeffs[i];
  for (std::size_t i = 0; i < b.coeffs.size(); ++i) c.coeffs[i] += b.coeffs[i];
  return c;
}

Polynomial operator*(double s, const Polynomial& p) {
  Polynomial c = p;
  for (double& x : c.coeffs) x *= s;
  return c;
}

double pochhammer(double s, int i) {
  double prod = 1.0;
  for (int j = 0; j < i; ++j) prod *= s + j;
  return prod;
}

double kummer_m(double c, double b, double t) {
  constexpr double kRelTol = 1e-15;
  constexpr int kMaxTerms = 10000;

  const double nearest = std::round(c);
  const bool terminating = nearest <= 0.0 && std::abs(c - nearest) <= 1e-12;
  const int last = terminating ? static_cast<int>(-nearest) : kMaxTerms;

  double term = 1.0;
  double sum = 1.0;
  const double cc = terminating ? nearest : c;
  for (int n = 0; n < last; ++n) {
    const double denom = (b + n) * (n + 1);
    if (denom == 0.0) throw NumericError("kummer_m: b is a non-positive integer");
    term *= (cc + n) / denom * t;
    sum += term;
    if (!terminating && std::abs(term) < kRelTol * std::abs(sum)) return sum;
    if (term == 0.0 && !terminating) return sum;
  }
  if (terminating) return sum;
  std::ostringstream msg;
  msg << "kummer_m(" << c << ", " << b << ", " << t << ") did not converge in " << kMaxTerms
      << " terms; last |term| = " << std::abs(term);
  throw NumericError(msg.str());
}

double alpha_from_mu(double mu, int N) {
  const double half = 0.5 * (N - 2);
  const double disc = half * half + mu;
  if (!(disc > 0.0)) {
    std::ostringstream msg;
    msg << "positivity condition violated: mu_1 = " << mu << " <= -(N-2)^2/4 = " << -half * half;
    throw PositivityError(msg.str());
  }
  return half - std::sqrt(disc);
}

double gamma_mk(int m, double alpha_k) { return m - 0.5 * alpha_k; }

Polynomial p_poly(int n, double alpha, int N) {
  const double b = 0.5 * N - alpha;
  Polynomial p;
  p.coeffs.resize(static_cast<std::size_t>(n) + 1);
  // c_i = (-n)_i / ((b)_i i!), built incrementally.
  double c = 1.0;
  p.coeffs[0] = 1.0;
  for (int i = 0; i < n; ++i) {
    c *= static_cast<double>(-n + i) / ((b + i) * (i + 1));
    p.coeffs[static_cast<std::size_t>(i) + 1] = c;
  }
  return p;
}

}  // namespace oufreq
