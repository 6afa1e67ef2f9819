#include "oufreq/almgren.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "oufreq/error.hpp"

namespace oufreq {

namespace {

HDN hdn_of(const SpectralSystem& sys, double tau, std::span<const double> c) {
  const OUBasis& B = sys.basis();
  HDN out;
  double tD = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    out.H += c[k] * c[k];
    tD += B.modes[k].gamma * c[k] * c[k];
  }
  if (!(out.H > 1e-300)) throw AccuracyError("compute_HDN: H below the underflow guard");
  tD -= sys.pairing(tau, c);
  const double t = std::exp(tau);
  out.D = tD / t;
  out.N = tD / out.H;
  return out;
}

struct LinearFit {
  double gamma = 0.0, C = 0.0, sse = 0.0;
};

// Least squares for N ~ gamma + C (t/t_hi)^delta at fixed delta.
LinearFit fit_at(const std::vector<double>& t, const std::vector<double>& n, double t_hi, double delta) {
  double s0 = 0, s1 = 0, s11 = 0, y0 = 0, y1 = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double u = std::pow(t[i] / t_hi, delta);
    s0 += 1;
    s1 += u;
    s11 += u * u;
    y0 += n[i];
    y1 += u * n[i];
  }
  LinearFit f;
  const double det = s0 * s11 - s1 * s1;
  if (std::abs(det) < 1e-300 * std::max(1.0, s0 * s11)) {
    f.gamma = y0 / s0;
  } else {
    f.gamma = (s11 * y0 - s1 * y1) / det;
    f.C = (s0 * y1 - s1 * y0) / det;
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = n[i] - f.gamma - f.C * std::pow(t[i] / t_hi, delta);
    f.sse += r * r;
  }
  return f;
}

}  // namespace

HDN compute_HDN(const Trajectory& traj, std::size_t row) {
  return hdn_of(*traj.system, traj.tau[row], traj.coeffs[row]);
}

double nu1(const Trajectory& traj, std::size_t row) {
  const auto& c = traj.coeffs[row];
  const std::vector<double> cp = traj.dcdt(row);
  const double H = dot(c, c);
  // Lagrange identity: |c'|^2 |c|^2 - (c'.c)^2 = sum_{i<j} (c'_i c_j - c'_j c_i)^2,
  // free of the cancellation in the direct form.
  double gap = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const double m = cp[i] * c[j] - cp[j] * c[i];
      gap += m * m;
    }
  return 2.0 * traj.t(row) / (H * H) * gap;
}

FrequencyTrace frequency_trace(const Trajectory& traj, const FitOptions& opts) {
  FrequencyTrace tr;
  std::vector<FrequencyRow> rows(traj.rows());
  std::size_t valid = traj.rows();
  for (std::size_t k = 0; k < traj.rows(); ++k) {
    HDN h;
    try {
      h = compute_HDN(traj, k);
    } catch (const AccuracyError&) {
      valid = k;
      tr.underflow_truncated = true;
      break;
    }
    rows[k] = {traj.t(k), h.H, h.D, h.N, nu1(traj, k)};
  }
  rows.resize(valid);
  std::reverse(rows.begin(), rows.end());
  tr.rows = std::move(rows);
  if (tr.rows.size() < 3) throw AccuracyError("frequency_trace: fewer than three valid rows");

  // Fit window: the smallest stored decade.
  tr.fit_lo = tr.rows.front().t;
  tr.fit_hi = std::min(tr.rows.back().t, tr.fit_lo * std::pow(10.0, opts.window_decades));
  std::vector<double> ts, ns;
  for (const auto& r : tr.rows)
    if (r.t <= tr.fit_hi * (1 + 1e-12)) {
      ts.push_back(r.t);
      ns.push_back(r.N);
    }

  // Variable projection: golden section on delta, linear solve inside.
  double a = 0.01, b = 4.0;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = fit_at(ts, ns, tr.fit_hi, x1).sse, f2 = fit_at(ts, ns, tr.fit_hi, x2).sse;
  for (int it = 0; it < 200 && b - a > 1e-10; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = fit_at(ts, ns, tr.fit_hi, x1).sse;
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = fit_at(ts, ns, tr.fit_hi, x2).sse;
    }
  }
  tr.delta_hat = 0.5 * (a + b);
  const LinearFit best = fit_at(ts, ns, tr.fit_hi, tr.delta_hat);
  tr.gamma_hat = best.gamma;
  tr.C_hat = best.C * std::pow(tr.fit_hi, -tr.delta_hat);
  tr.fit_residual = std::sqrt(best.sse / static_cast<double>(ts.size()));
  if (tr.fit_residual > opts.fit_tolerance) {
    tr.fit_flagged = true;
    tr.gamma_hat = tr.rows.front().N;
  }
  return tr;
}

double check_Hprime(const Trajectory& traj) {
  if (traj.rows() < 3) throw ConfigError("check_Hprime: need at least three rows");
  std::vector<HDN> h(traj.rows());
  for (std::size_t k = 0; k < traj.rows(); ++k) h[k] = compute_HDN(traj, k);
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < traj.rows(); ++k) {
    // tau decreases with k; dH/dt = (dH/dtau)/t.
    const double dHdtau = (h[k - 1].H - h[k + 1].H) / (traj.tau[k - 1] - traj.tau[k + 1]);
    const double Hp = dHdtau / traj.t(k);
    worst = std::max(worst, std::abs(Hp - 2.0 * h[k].D) / (std::abs(2.0 * h[k].D) + 1e-30));
  }
  return worst;
}

double check_scaling(const Trajectory& traj, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError("check_scaling: lambda must lie in (0,1)");
  const double shift = 2.0 * std::log(lambda);
  const double tau_min = traj.tau_min() - shift;
  if (!(tau_min < -traj.dtau)) throw ConfigError("check_scaling: lambda^2 outside the stored range");
  auto scaled = traj.system->rescaled(lambda);
  IntegrationOptions opts;
  opts.tau_min = tau_min;
  opts.dtau = traj.dtau;
  opts.verify_halving = false;
  const Trajectory other = integrate_backward(scaled, traj.state_at(shift), opts);
  double worst = 0.0;
  for (std::size_t k = 0; k < other.rows(); ++k) {
    const double n_scaled = compute_HDN(other, k).N;
    const double tau_orig = std::max(other.tau[k] + shift, traj.tau_min());
    const double n_orig = hdn_of(*traj.system, tau_orig, traj.state_at(tau_orig)).N;
    worst = std::max(worst, std::abs(n_scaled - n_orig));
  }
  return worst;
}

PowerLaw check_H_powerlaw(const FrequencyTrace& trace, double gamma_hat) {
  PowerLaw p;
  p.min_ratio_small = std::numeric_limits<double>::infinity();
  const double t_lo = trace.rows.front().t;
  for (const auto& r : trace.rows) {
    const double ratio = r.H / std::pow(r.t, 2.0 * gamma_hat);
    p.K1_hat = std::max(p.K1_hat, ratio);
    if (r.t <= 10.0 * t_lo * (1 + 1e-12)) p.min_ratio_small = std::min(p.min_ratio_small, ratio);
  }
  p.liminf_positive = p.min_ratio_small > 1e-8 * p.K1_hat;
  return p;
}

double monotonicity_defect(const FrequencyTrace& trace) {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < trace.rows.size(); ++i)
    worst = std::max(worst, trace.rows[i].N - trace.rows[i + 1].N);
  return worst;
}

double coercivity_constant(double rho, int N, double t, double C_h, double eps_h) {
  const double c = (N - 2) / 4.0;
  const double te = std::pow(t, 0.5 * eps_h);
  const double a = rho - 4.0 * C_h * te / ((N - 2.0) * (N - 2.0));
  const double b = rho * c - C_h * (t + te * (N - 1.0) / (N - 2.0));
  return std::min(a, b);
}

namespace {
void forcing_constants(const Trajectory& traj, double& C_h, double& eps_h) {
  const Perturbation& p = traj.system->perturbation();
  if (p.kind == Perturbation::Kind::semilinear)
    throw ConfigError("coercivity bounds are stated for linear forcing only");
  C_h = p.kind == Perturbation::Kind::none ? 0.0 : p.C_h;
  eps_h = p.eps_h;
}
}  // namespace

double lower_bound_margin(const FrequencyTrace& trace, const Trajectory& traj, double rho) {
  double C_h, eps_h;
  forcing_constants(traj, C_h, eps_h);
  const int N = traj.system->basis().N;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.rows)
    worst = std::min(worst, r.N - (coercivity_constant(rho, N, r.t, C_h, eps_h) - (N - 2) / 4.0));
  return worst;
}

double hcreas_defect(const FrequencyTrace& trace, const Trajectory& traj, double rho, double t_max) {
  double C_h, eps_h;
  forcing_constants(traj, C_h, eps_h);
  const int N = traj.system->basis().N;
  double C1 = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.rows)
    if (r.t <= t_max) C1 = std::min(C1, coercivity_constant(rho, N, r.t, C_h, eps_h));
  double worst = 0.0;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : trace.rows) {
    if (r.t > t_max) break;
    const double q = std::log(r.H) + (-2.0 * C1 + (N - 2) / 2.0) * std::log(r.t);
    if (!std::isnan(prev)) worst = std::max(worst, -std::expm1(q - prev));
    prev = q;
  }
  return worst;
}

std::optional<double> snap_to_spectrum(double gamma_hat, const AngularSpectrum& spec, double tol) {
  const double top = -0.5 * alpha_from_mu(spec.eigenvalues.back(), spec.N);
  if (!(top > gamma_hat + tol)) {
    std::ostringstream os;
    os << "snap_to_spectrum: angular spectrum does not cover gamma = " << gamma_hat;
    throw TruncationError(os.str());
  }
  std::optional<double> best;
  double best_d = tol;
  for (double mu : spec.eigenvalues) {
    const double half_alpha = 0.5 * alpha_from_mu(mu, spec.N);
    const double m = std::max(0.0, std::round(gamma_hat + half_alpha));
    const double g = m - half_alpha;
    const double d = std::abs(g - gamma_hat);
    if (d <= best_d) {
      best_d = d;
      best = g;
    }
  }
  return best;
}

}  // namespace oufreq
