#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "oufreq/angular.hpp"
#include "oufreq/linalg.hpp"
#include "oufreq/specfun.hpp"

namespace oufreq {

/// One eigenfunction V_{n,j}(x) = |x|^{-alpha_j} P_{j,n}(|x|^2/4) psi_j(x/|x|)
/// of L = -Delta + x/2 . grad - a(x/|x|)/|x|^2.
struct OUMode {
  std::size_t j = 0;  // angular index (0-based, psi_{j+1} in 1-based labels)
  int n = 0;          // radial index
  double mu = 0.0;
  double alpha = 0.0;
  double gamma = 0.0;  // n - alpha/2
  Polynomial poly;
  double norm_L = 1.0;  // ||V||_L with the weight e^{-|x|^2/4}
};

/// Orthonormal family V~ = V/||V||_L sorted by (gamma, j, n).
struct OUBasis {
  std::shared_ptr<const AngularSpectrum> spectrum;
  int N = 3;
  std::vector<OUMode> modes;
  double gram_residual = 0.0;
  double bilinear_residual = 0.0;

  std::size_t size() const { return modes.size(); }
  std::vector<double> gammas() const;
};

/// All modes with gamma <= gamma_max. Throws TruncationError unless the
/// last computed angular eigenvalue certifies that no further tower starts
/// at or below gamma_max, and PositivityError if mu_1 is too negative.
OUBasis enumerate_modes(std::shared_ptr<const AngularSpectrum> spec, double gamma_max);

/// The K lowest modes in (gamma, j, n) order.
OUBasis first_modes(std::shared_ptr<const AngularSpectrum> spec, std::size_t K);

/// Eigenvalue multiplicity and the index set {(m,k) : m - alpha_k/2 = gamma}.
struct Multiplicity {
  int count = 0;
  std::vector<std::pair<int, std::size_t>> J;  // (m, angular index k)
};

/// Detects gamma + alpha_j/2 within 1e-9 of a non-negative integer. A
/// distance in (1e-9, 1e-6) raises DegeneracyError.
Multiplicity multiplicity(double gamma, const AngularSpectrum& spec);

/// Raw (unnormalized) V at a point. x = 0 is singular for alpha > 0.
double eval_V(const OUMode& mode, const AngularSpectrum& spec, std::span<const double> x);
std::vector<double> eval_grad_V(const OUMode& mode, const AngularSpectrum& spec, std::span<const double> x);

/// Normalized values V~_p(x) for all modes; `grads` (optional) receives
/// N entries per mode.
void eval_basis(const OUBasis& basis, std::span<const double> x, std::vector<double>& vals,
                std::vector<double>* grads = nullptr);

/// <V~_p, V~_q>_L. Different angular indices give exactly 0.
double inner_L(const OUBasis& basis, std::size_t p, std::size_t q);

/// B(V~_p, V~_q) = int (grad V~_p . grad V~_q - a/|x|^2 V~_p V~_q) G(x,1) dx.
double bilinear_B(const OUBasis& basis, std::size_t p, std::size_t q);

/// int grad V~_p . grad V~_q G(x,1) dx.
double energy_E(const OUBasis& basis, std::size_t p, std::size_t q);

/// int V~_p V~_q / |x|^2 G(x,1) dx.
double hardy_R(const OUBasis& basis, std::size_t p, std::size_t q);

/// Full matrices over the first K modes (K = 0 means all).
Matrix gram_matrix(const OUBasis& basis, std::size_t K = 0);
Matrix bilinear_matrix(const OUBasis& basis, std::size_t K = 0);
Matrix energy_matrix(const OUBasis& basis, std::size_t K = 0);
Matrix hardy_matrix(const OUBasis& basis, std::size_t K = 0);

/// Radial integral 2^{N-1+p-sigma} int s^{N/2-1+p/2-sigma/2} q(s) e^{-s} ds,
/// i.e. int r^{N-1+p} r^{-sigma} q(r^2/4) e^{-r^2/4} dr, by a Gauss-Laguerre
/// rule exact for q; checked against a rule with more nodes.
double radial_polynomial_integral(const Polynomial& q, int N, double sigma, double radial_power);

}  // namespace oufreq
