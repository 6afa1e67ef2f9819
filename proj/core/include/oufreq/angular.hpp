#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "oufreq/linalg.hpp"

namespace oufreq {

/// Real spherical harmonic coefficient a_{l,m} (m < 0 selects sin(|m| phi)).
struct HarmonicCoefficient {
  int l = 0;
  int m = 0;
  double value = 0.0;
};

/// Bounded angular potential a(theta) on S^{N-1}.
///
/// Constant potentials are valid in any dimension N >= 3; zonal and
/// harmonic-table potentials are defined on S^2 only.
class AngularPotential {
 public:
  enum class Kind { constant, zonal, harmonic_table };

  static AngularPotential constant(double lambda);
  /// `samples` are values of a at the Gauss-Legendre nodes in cos(theta);
  /// a is the Legendre interpolant of degree samples.size()-1.
  static AngularPotential zonal(std::vector<double> samples);
  static AngularPotential zonal_from(const std::function<double(double)>& a_of_cos, int n_samples);
  static AngularPotential harmonic_table(std::vector<HarmonicCoefficient> coeffs);

  Kind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  const std::vector<double>& zonal_samples() const { return samples_; }
  const std::vector<HarmonicCoefficient>& table() const { return table_; }

  /// Polynomial degree of a on the sphere (0 for constants).
  int degree() const;
  bool is_zonal() const;
  bool supports_dimension(int N) const { return kind_ == Kind::constant || N == 3; }

  /// Estimate of ||a||_inf: max over a dense sampling grid, padded by 0.1%.
  double sup_norm_bound() const { return sup_norm_; }

  /// Value at a unit vector (3 components unless constant).
  double operator()(std::span<const double> theta) const;

 private:
  void finish();

  Kind kind_ = Kind::constant;
  double lambda_ = 0.0;
  std::vector<double> samples_;
  std::vector<double> legendre_;  // orthonormal Legendre coefficients of zonal a
  std::vector<HarmonicCoefficient> table_;
  double sup_norm_ = 0.0;
};

/// Real spherical harmonics on S^2 up to degree L, indexed l*l + l + m.
/// Y_{l,m} = Pbar_l^{|m|}(cos theta) Phi_m(phi), L^2(S^2)-orthonormal.
namespace harmonics {

constexpr int index(int l, int m) { return l * l + l + m; }
constexpr int count(int L) { return (L + 1) * (L + 1); }
int degree_of(int index);

/// Values of all Y_b at a unit vector.
std::vector<double> values(int L, std::span<const double> theta);

/// Values plus Cartesian surface gradients (3 entries per harmonic).
void values_and_gradients(int L, std::span<const double> theta, std::vector<double>& vals,
                          std::vector<double>& grads);

}  // namespace harmonics

/// Galerkin matrix diag(l(l+1)) - A, A_pq = int a Y_p Y_q dS, on S^2.
Matrix assemble_angular(const AngularPotential& a, int L);

/// Spectrum of -Delta_S - a on S^{N-1}.
struct AngularSpectrum {
  int N = 3;
  int L = 0;
  AngularPotential potential;
  std::vector<double> eigenvalues;  // ascending, repeated by multiplicity
  Matrix eigenvectors;              // harmonic coefficients (N = 3 only), one column per eigenvalue
  std::vector<int> degree;          // dominant harmonic degree of each eigenfunction
  double residual_bound = 0.0;

  std::size_t size() const { return eigenvalues.size(); }
  bool has_eigenfunctions() const { return N == 3; }
  /// int grad_S psi_j . grad_S psi_k dS.
  double stiffness(std::size_t j, std::size_t k) const;
};

/// First K eigenpairs at truncation degree L. Requires K to leave one full
/// degree of the basis unused. Throws TruncationError if mu_1 is not
/// separated from mu_2 by more than 10 residual bounds.
AngularSpectrum solve_angular(const AngularPotential& a, int N, int L, int K);

/// Doubles L from `L0` (cap 64) until the K-th eigenvalue moves by < 1e-9.
AngularSpectrum solve_angular_auto(const AngularPotential& a, int N, int K, int L0 = 16);

struct PositivityCheck {
  bool positive = false;
  double margin = 0.0;  // mu_1 + (N-2)^2/4
};

PositivityCheck check_positivity(const AngularSpectrum& spec);

/// Throws PositivityError when check_positivity fails.
void require_positivity(const AngularSpectrum& spec);

/// psi_k at a unit vector.
double eval_psi(const AngularSpectrum& spec, std::size_t k, std::span<const double> theta);

/// All psi_k at once.
std::vector<double> eval_psi_all(const AngularSpectrum& spec, std::span<const double> theta);

/// All psi_k and their Cartesian surface gradients (N entries each).
void eval_psi_all_with_gradient(const AngularSpectrum& spec, std::span<const double> theta,
                                std::vector<double>& vals, std::vector<double>& grads);

/// Dimension of degree-l spherical harmonics on S^{N-1}.
long harmonic_multiplicity(int N, int l);

}  // namespace oufreq
