#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oufreq/ou_basis.hpp"
#include "oufreq/quadrature.hpp"

namespace oufreq {

/// Forcing term f(x, t, u) of u_t + Delta u + a/|x|^2 u + f = 0.
///
/// Linear kinds use f = h(x,t) u with |h| <= C_h (1 + |x|^{-2+eps_h});
/// the semilinear kind uses f = eps |u|^{p-1} u.
struct Perturbation {
  enum class Kind { none, constant, radial, general, semilinear };

  Kind kind = Kind::none;
  double epsilon = 0.0;  // h for the constant kind, coefficient for semilinear
  double p = 2.0;        // semilinear exponent
  double C_h = 0.0;
  double eps_h = 1.0;
  std::function<double(double r, double t)> h_radial;
  std::function<double(std::span<const double> x, double t)> h_general;
  std::string label = "none";
  bool admissibility_checked = false;

  static Perturbation none();
  static Perturbation constant(double eps);
  static Perturbation radial(std::function<double(double, double)> h, double C_h, double eps_h,
                             std::string label);
  static Perturbation general(std::function<double(std::span<const double>, double)> h, double C_h,
                              double eps_h, std::string label);
  static Perturbation semilinear(double eps, double p);

  bool is_linear() const { return kind != Kind::semilinear; }

  /// h at a point; for the semilinear kind f(x,t,s)/s.
  double h(std::span<const double> x, double t) const;

  /// Forcing of the blow-up family u(lambda x, lambda^2 t):
  /// h_lambda(x,t) = lambda^2 h(lambda x, lambda^2 t).
  Perturbation rescaled(double lambda) const;
};

struct AdmissibilityReport {
  bool admissible = true;
  std::size_t samples = 0;
  std::vector<std::string> failures;  // first few offending nodes
};

/// Samples |h| against C_h (1 + |x|^{-2+eps_h}) on cubature nodes over a
/// t-grid in [t_min, 1].
AdmissibilityReport check_h_admissible(const Perturbation& pert, int N, int sample_count = 16,
                                       double t_min = 1e-6, int n_r = 48, int n_polar = 8);

struct CubatureOptions {
  int n_r = 48;      // radial Gauss-Laguerre nodes
  int n_polar = 8;   // polar nodes of the sphere rule (nodal paths only)
};

/// The Galerkin system dc/dtau = Gamma c - e^tau F(tau, c) on span{V~_k},
/// F_k = <f(sqrt(t) ., t, sum c_j V~_j), V~_k>_L, t = e^tau.
class SpectralSystem {
 public:
  SpectralSystem(std::shared_ptr<const OUBasis> basis, Perturbation pert, CubatureOptions opts = {});

  std::size_t size() const { return basis_->size(); }
  const OUBasis& basis() const { return *basis_; }
  std::shared_ptr<const OUBasis> basis_ptr() const { return basis_; }
  const Perturbation& perturbation() const { return pert_; }
  const CubatureOptions& cubature() const { return opts_; }

  void forcing(double tau, std::span<const double> c, std::span<double> F) const;
  std::vector<double> forcing(double tau, std::span<const double> c) const;

  void rhs(double tau, std::span<const double> c, std::span<double> out) const;
  std::vector<double> rhs(double tau, std::span<const double> c) const;

  /// t <f(v), v>_L = t F . c (the term subtracted from sum gamma c^2 in tD).
  double pairing(double tau, std::span<const double> c) const;

  /// Same system with the rescaled forcing of Perturbation::rescaled.
  std::shared_ptr<SpectralSystem> rescaled(double lambda) const;

 private:
  void radial_forcing(double t, std::span<const double> c, std::span<double> F) const;
  void nodal_forcing(double t, std::span<const double> c, std::span<double> F) const;

  std::shared_ptr<const OUBasis> basis_;
  Perturbation pert_;
  CubatureOptions opts_;
  std::vector<double> gamma_;

  // radial path: one matched Laguerre rule per angular tower
  struct Tower {
    std::vector<std::size_t> members;  // basis indices
    double prefactor = 0.0;            // 2^{N-1-sigma}
    std::vector<double> r_unit;        // node radii at t = 1
    std::vector<double> weights;
    std::vector<double> values;        // members x nodes, P~(s_i)
  };
  std::vector<Tower> towers_;

  // nodal path: product cubature at t = 1
  std::vector<double> node_x_;   // nodes x N
  std::vector<double> node_w_;
  std::vector<double> node_V_;   // nodes x K
};

/// Initial data on the basis.
struct InitialData {
  std::vector<double> coeffs;
  double residual = 0.0;  // ||v - sum c_k V~_k||_L / ||v||_L for sampled data
};

InitialData build_initial(const OUBasis& basis, const std::vector<std::pair<std::size_t, double>>& entries);
InitialData build_initial(const OUBasis& basis, const std::function<double(std::span<const double>)>& v,
                          int n_r = 64, int n_polar = 16);

struct IntegrationOptions {
  double tau_min = std::log(1e-3);
  double dtau = 1e-3;
  bool verify_halving = true;
  double halving_tolerance = 1e-8;
  double truncation_tolerance = 1e-6;
};

/// Stored solution of the Galerkin system on tau_k = -k dtau, k = 0..steps.
struct Trajectory {
  std::shared_ptr<const SpectralSystem> system;
  std::vector<double> tau;                  // descending, tau[0] = 0
  std::vector<std::vector<double>> coeffs;  // one row per tau
  double dtau = 0.0;
  double halving_error = 0.0;
  double truncation_ratio = 0.0;
  bool truncation_flagged = false;

  std::size_t rows() const { return tau.size(); }
  std::size_t size() const { return coeffs.empty() ? 0 : coeffs.front().size(); }
  double t(std::size_t row) const { return std::exp(tau[row]); }
  double tau_min() const { return tau.back(); }

  /// Coefficients at any tau in [tau_min, 0]: one partial RK4 step from
  /// the nearest stored row above.
  std::vector<double> state_at(double tau_query) const;

  /// dc/dt at a stored row, rhs / t.
  std::vector<double> dcdt(std::size_t row) const;
};

/// Classical RK4 from tau = 0 down to tau_min. The step is shrunk so that
/// tau_min is hit exactly. With verify_halving the run is repeated at
/// dtau/2 and AccuracyError is thrown when stored rows disagree by more
/// than halving_tolerance relative to max(1, sup |c|).
Trajectory integrate_backward(std::shared_ptr<const SpectralSystem> system, std::vector<double> c0,
                              const IntegrationOptions& opts = {});

/// Exact coefficient vectors of the closed-form families.
struct ClosedForm {
  enum class Family { pure, mixture, exp_linear };
  Family family = Family::pure;
  std::vector<std::size_t> modes;   // basis indices
  std::vector<double> weights;      // initial coefficients on those modes
  double epsilon = 0.0;             // exp_linear only

  static ClosedForm pure(std::size_t k);
  static ClosedForm mixture(std::vector<std::size_t> modes, std::vector<double> weights);
  static ClosedForm exp_linear(std::size_t k, double eps);
};

std::vector<double> closed_form_reference(const OUBasis& basis, const ClosedForm& family, double t);

/// Initial data of a closed-form family (its value at t = 1).
std::vector<double> closed_form_initial(const OUBasis& basis, const ClosedForm& family);

}  // namespace oufreq
