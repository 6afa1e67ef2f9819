#pragma once

#include <vector>

namespace oufreq {

/// Real polynomial, coeffs[i] multiplies t^i.
struct Polynomial {
  std::vector<double> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  /// Horner evaluation.
  double operator()(double t) const;
  Polynomial derivative() const;
};

Polynomial operator*(const Polynomial& a, const Polynomial& b);
Polynomial operator+(const Polynomial& a, const Polynomial& b);
Polynomial operator*(double s, const Polynomial& p);

/// (s)_i = s (s+1) ... (s+i-1), with (s)_0 = 1.
double pochhammer(double s, int i);

/// Kummer's confluent hypergeometric series M(c, b, t).
///
/// Sums until |term| < 1e-15 |partial sum| (hard cap 10000 terms). When c is
/// within 1e-12 of a non-positive integer the series is summed exactly as a
/// polynomial of degree -c. Throws NumericError on non-convergence. Accuracy
/// degrades for large |t| because of cancellation; callers stay at
/// |t| <= O(100).
double kummer_m(double c, double b, double t);

/// alpha = (N-2)/2 - sqrt(((N-2)/2)^2 + mu). Throws PositivityError when
/// mu <= -(N-2)^2/4.
double alpha_from_mu(double mu, int N);

/// gamma_{m,k} = m - alpha_k / 2.
double gamma_mk(int m, double alpha_k);

/// Radial polynomial of degree n in t = |x|^2/4:
/// sum_i (-n)_i / ((N/2 - alpha)_i i!) t^i.
Polynomial p_poly(int n, double alpha, int N);

}  // namespace oufreq
