#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "oufreq/evolve.hpp"

namespace oufreq {

struct HDN {
  double H = 0.0;
  double D = 0.0;
  double N = 0.0;  // tD/H
};

/// H = sum c_k^2, tD = sum gamma_k c_k^2 - t <f(v), v>_L, N = tD/H.
/// Throws AccuracyError if H <= 1e-300.
HDN compute_HDN(const Trajectory& traj, std::size_t row);

/// Schwarz gap (2t/H^2)(|c'|^2 H - (c'.c)^2) with c' = dc/dt from the
/// right-hand side at the row.
double nu1(const Trajectory& traj, std::size_t row);

struct FrequencyRow {
  double t = 0.0, H = 0.0, D = 0.0, N = 0.0, nu1 = 0.0;
};

struct FitOptions {
  double window_decades = 1.0;  // fit over [t_min, t_min 10^w]
  double fit_tolerance = 1e-3;
};

/// Frequency rows in increasing t plus the fit N(t) ~ gamma + C t^delta.
struct FrequencyTrace {
  std::vector<FrequencyRow> rows;  // ascending in t
  double gamma_hat = 0.0;
  double C_hat = 0.0;
  double delta_hat = 0.0;
  double fit_lo = 0.0, fit_hi = 0.0;
  double fit_residual = 0.0;  // RMS over the window
  bool fit_flagged = false;
  bool underflow_truncated = false;
};

FrequencyTrace frequency_trace(const Trajectory& traj, const FitOptions& opts = {});

/// max |H' - 2D| / (|2D| + 1e-30) with H' by central differences in tau.
double check_Hprime(const Trajectory& traj);

/// Integrates the blow-up family u(lambda x, lambda^2 t) as its own problem
/// (rescaled forcing, data c(lambda^2) at t = 1) and returns
/// max_t |N_lambda(t) - N(lambda^2 t)| over its stored rows.
double check_scaling(const Trajectory& traj, double lambda);

struct PowerLaw {
  double K1_hat = 0.0;
  double min_ratio_small = 0.0;
  bool liminf_positive = false;
};

/// H(t)/t^{2 gamma}: maximum over rows and minimum over the smallest decade.
PowerLaw check_H_powerlaw(const FrequencyTrace& trace, double gamma_hat);

/// Largest decrease of N between consecutive rows (ascending t); zero for
/// a non-decreasing trace.
double monotonicity_defect(const FrequencyTrace& trace);

/// Stand-in for the coercivity constant at time t. rho is the infimum of
/// the Rayleigh quotient from coercivity_infimum; the linear forcing
/// enters through C_h and eps_h.
double coercivity_constant(double rho, int N, double t, double C_h = 0.0, double eps_h = 1.0);

/// min over rows of N(t) - (C1(t) - (N-2)/4); non-negative when the lower
/// bound holds.
double lower_bound_margin(const FrequencyTrace& trace, const Trajectory& traj, double rho);

/// Largest relative decrease of t^{-2 C1 + (N-2)/2} H(t) between consecutive
/// rows with t <= t_max, C1 taken as its minimum over that window.
double hcreas_defect(const FrequencyTrace& trace, const Trajectory& traj, double rho, double t_max);

/// Nearest eigenvalue m - alpha_k/2 of L within tol, if any.
std::optional<double> snap_to_spectrum(double gamma_hat, const AngularSpectrum& spec, double tol = 1e-6);

}  // namespace oufreq
