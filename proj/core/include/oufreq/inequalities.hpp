#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "oufreq/angular.hpp"
#include "oufreq/ou_basis.hpp"

namespace oufreq {

/// A test function u_t(x) = phi(x / sqrt(t)) with phi given in unit variables.
struct TestFunction {
  enum class Kind { bump, poly_gauss, constant };

  Kind kind = Kind::constant;
  std::vector<double> center;  // bump center
  double width = 1.0;          // bump width
  double c0 = 1.0;             // poly_gauss: c0 + b.y + y^T A y
  std::vector<double> b;
  std::vector<double> A;       // N x N, symmetric
  double decay = 0.0;          // poly_gauss: exp(-decay |y|^2)

  double value(std::span<const double> x, double t) const;
  void gradient(std::span<const double> x, double t, std::span<double> g) const;
  double value_and_gradient(std::span<const double> x, double t, std::span<double> g) const;
  std::string describe() const;
};

enum class FamilyKind { bumps, poly_gauss, mixed };

/// Reproducible random family. Bump centers have radius density ~ 1/r on
/// [1e-3, 2] and uniform direction; widths are log-uniform on [0.4, 2].
std::vector<TestFunction> make_family(FamilyKind kind, int N, std::size_t count, std::uint64_t seed);

struct QuadOptions {
  int n_r = 48;
  int n_polar = 0;  // 0 picks a default by dimension
};

/// Relative gaps (RHS - LHS)/RHS; a violation is a gap below -1e-10.
double hardy_parabolic(const TestFunction& u, int N, double t, const QuadOptions& q = {});
double hardy_anisotropic(const TestFunction& u, const AngularSpectrum& spec, double t, const QuadOptions& q = {});
double x2_bound(const TestFunction& u, int N, const QuadOptions& q = {});

/// (int |u|^s G^{s/2})^{2/s} / (t^{-(N/s)(s-2)/2} ||u||_{H_t}^2).
double sobolev_ratio(const TestFunction& u, int N, double s, double t, const QuadOptions& q = {});

/// Mode-level anisotropic Hardy gap from the exact radial reductions:
/// B + (N-2)/4 - (mu_1 + (N-2)^2/4) R, divided by B + (N-2)/4.
double hardy_anisotropic_mode(const OUBasis& basis, std::size_t p);

/// Smallest generalized eigenvalue of (B + cI) x = rho (E + cI) x over the
/// basis, c = (N-2)/4. Throws AccuracyError if it is not positive.
double coercivity_infimum(const OUBasis& basis);

struct InequalityReport {
  std::string inequality;
  std::string family;
  int N = 3;
  std::size_t count = 0;
  std::size_t violations = 0;
  double min_gap = 0.0;
  std::string argmin;
  std::uint64_t seed = 0;
  double max_value = 0.0;  // Sobolev sweeps: largest ratio seen
  double refined_gap = 0.0;        // argmin member at doubled resolution
  double refinement_change = 0.0;
};

enum class Inequality { hardy_parabolic, hardy_anisotropic, x2_bound, sobolev_scaling };

std::string to_string(Inequality which);

struct SweepOptions {
  std::size_t count = 1000;
  std::uint64_t seed = 1;
  FamilyKind family = FamilyKind::mixed;
  double t = 1.0;
  double sobolev_s = 0.0;   // 0 picks the midpoint of [2, 2*]
  double t_rescale = 0.37;  // Sobolev scaling test factor
  QuadOptions quad;
};

/// Runs one inequality over a random family. For hardy_anisotropic `spec`
/// supplies a and mu_1; other inequalities only use spec.N.
InequalityReport sweep(Inequality which, const AngularSpectrum& spec, const SweepOptions& opts);

/// JSON array of reports.
std::string reports_json(const std::vector<InequalityReport>& reports);

}  // namespace oufreq
