#include "oufreq/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oufreq/error.hpp"
#include "oufreq/parallel.hpp"

namespace oufreq {

namespace {

// Two-point Gauss-Legendre on [-1, 1].
constexpr double kGL2 = 0.57735026918962576451;

// e^{(1-gamma) tau} F_j(tau, c) for every J0 entry.
void integrand(const Trajectory& traj, double tau, std::span<const double> c, double gamma,
               const std::vector<J0Entry>& J0, std::vector<double>& F, std::vector<double>& out) {
  traj.system->forcing(tau, c, F);
  const double w = std::exp((1.0 - gamma) * tau);
  for (std::size_t a = 0; a < J0.size(); ++a) out[a] = w * F[J0[a].mode];
}

void gauss_interval(const Trajectory& traj, double lo, double hi, double gamma, const std::vector<J0Entry>& J0,
                    std::vector<double>& acc) {
  std::vector<double> F(traj.size()), g(J0.size());
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (double x : {-kGL2, kGL2}) {
    const double tau = mid + half * x;
    integrand(traj, tau, traj.state_at(tau), gamma, J0, F, g);
    for (std::size_t a = 0; a < J0.size(); ++a) acc[a] += half * g[a];
  }
}

double neville_at_zero(const std::vector<double>& x, std::vector<double> y) {
  const std::size_t n = x.size();
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t i = 0; i + level < n; ++i)
      y[i] = (x[i + level] * y[i] - x[i] * y[i + 1]) / (x[i + level] - x[i]);
  return y[0];
}

}  // namespace

std::vector<J0Entry> resolve_J0(const OUBasis& basis, double gamma) {
  const Multiplicity mult = multiplicity(gamma, *basis.spectrum);
  std::vector<J0Entry> J0;
  for (const auto& [m, k] : mult.J) {
    auto it = std::find_if(basis.modes.begin(), basis.modes.end(),
                           [&](const OUMode& mode) { return mode.j == k && mode.n == m; });
    if (it == basis.modes.end()) {
      std::ostringstream os;
      os << "resolve_J0: mode (m=" << m << ", k=" << k << ") of gamma = " << gamma << " is outside the basis";
      throw TruncationError(os.str());
    }
    J0.push_back({m, k, static_cast<std::size_t>(it - basis.modes.begin())});
  }
  return J0;
}

BetaResult beta_integral(const Trajectory& traj, double Lambda, double gamma, const std::vector<J0Entry>& J0) {
  const double tau_L = 2.0 * std::log(Lambda);
  if (!(tau_L <= 0.0 && tau_L >= traj.tau_min()))
    throw ConfigError("beta_integral: Lambda^2 outside the stored range");
  const std::size_t nJ = J0.size();
  BetaResult res;
  res.beta.assign(nJ, 0.0);
  res.tail.assign(nJ, 0.0);
  res.tail_error.assign(nJ, 0.0);

  // Stored intervals below tau_L, then the partial one up to tau_L.
  const std::size_t last = traj.rows() - 1;
  std::size_t first_row = static_cast<std::size_t>(std::ceil(-tau_L / traj.dtau - 1e-9));
  first_row = std::min(first_row, last);
  std::vector<double> integral(nJ, 0.0);
  for (std::size_t r = first_row; r < last; ++r) gauss_interval(traj, traj.tau[r + 1], traj.tau[r], gamma, J0, integral);
  if (traj.tau[first_row] < tau_L - 1e-15) gauss_interval(traj, traj.tau[first_row], tau_L, gamma, J0, integral);

  // Tail below tau_min: g ~ g_min e^{kappa (tau - tau_min)}.
  std::vector<double> F(traj.size()), g0(nJ), g1(nJ), g2(nJ);
  const std::size_t m1 = std::min<std::size_t>(10, last), m2 = std::min<std::size_t>(20, last);
  integrand(traj, traj.tau[last], traj.coeffs[last], gamma, J0, F, g0);
  integrand(traj, traj.tau[last - m1], traj.coeffs[last - m1], gamma, J0, F, g1);
  integrand(traj, traj.tau[last - m2], traj.coeffs[last - m2], gamma, J0, F, g2);

  const std::vector<double> cL = traj.state_at(tau_L);
  for (std::size_t a = 0; a < nJ; ++a) {
    double tail = 0.0, err = 0.0;
    if (g0[a] != 0.0) {
      const double k1 = std::log(g1[a] / g0[a]) / (traj.tau[last - m1] - traj.tau[last]);
      const double k2 = std::log(g2[a] / g0[a]) / (traj.tau[last - m2] - traj.tau[last]);
      if (!(std::isfinite(k1) && std::isfinite(k2) && k1 > 0.0 && k2 > 0.0))
        throw AccuracyError("beta_integral: forcing does not decay below the stored range; extend tau_min");
      tail = g0[a] / k1;
      err = std::abs(tail - g0[a] / k2);
    }
    res.tail[a] = tail;
    res.tail_error[a] = err;
    res.beta[a] = std::exp(-gamma * tau_L) * cL[J0[a].mode] + integral[a] + tail;
    if (err > 1e-8 * std::abs(res.beta[a])) {
      std::ostringstream os;
      os << "beta_integral: tail uncertainty " << err << " exceeds 1e-8 |beta| (beta = " << res.beta[a]
         << "); extend tau_min";
      throw AccuracyError(os.str());
    }
  }
  return res;
}

BetaTable beta_table(const Trajectory& traj, double gamma, const std::vector<double>& Lambda_grid) {
  BetaTable tab;
  tab.gamma = gamma;
  tab.J0 = resolve_J0(traj.system->basis(), gamma);
  tab.Lambda_grid = Lambda_grid;
  tab.beta_by_Lambda.resize(Lambda_grid.size());
  std::vector<double> tail_err(Lambda_grid.size(), 0.0);
  parallel_for(Lambda_grid.size(), [&](std::size_t i) {
    BetaResult r = beta_integral(traj, Lambda_grid[i], gamma, tab.J0);
    tab.beta_by_Lambda[i] = r.beta;
    for (double e : r.tail_error) tail_err[i] = std::max(tail_err[i], e);
  });
  for (double e : tail_err) tab.max_tail_error = std::max(tab.max_tail_error, e);
  if (!tab.beta_by_Lambda.empty()) tab.beta = tab.beta_by_Lambda.front();
  for (std::size_t a = 0; a < tab.J0.size(); ++a) {
    double lo = INFINITY, hi = -INFINITY, mag = 0.0;
    for (const auto& row : tab.beta_by_Lambda) {
      lo = std::min(lo, row[a]);
      hi = std::max(hi, row[a]);
      mag = std::max(mag, std::abs(row[a]));
    }
    if (mag > 0.0) tab.variation = std::max(tab.variation, (hi - lo) / mag);
  }
  return tab;
}

double lambda_independence(const Trajectory& traj, const std::vector<double>& Lambda_grid, double gamma,
                           const std::vector<J0Entry>& J0) {
  double worst = 0.0;
  std::vector<std::vector<double>> b;
  for (double L : Lambda_grid) b.push_back(beta_integral(traj, L, gamma, J0).beta);
  for (std::size_t a = 0; a < J0.size(); ++a) {
    double lo = INFINITY, hi = -INFINITY, mag = 0.0;
    for (const auto& row : b) {
      lo = std::min(lo, row[a]);
      hi = std::max(hi, row[a]);
      mag = std::max(mag, std::abs(row[a]));
    }
    if (mag > 0.0) worst = std::max(worst, (hi - lo) / mag);
  }
  return worst;
}

DirectLimit beta_direct(const Trajectory& traj, double gamma, const std::vector<std::size_t>& modes,
                        const std::vector<double>& lambdas) {
  DirectLimit out;
  out.lambdas = lambdas;
  std::vector<double> x;
  std::vector<std::vector<double>> states;
  for (double l : lambdas) {
    const double tau = 2.0 * std::log(l);
    if (tau < traj.tau_min()) throw ConfigError("beta_direct: lambda^2 outside the stored range");
    x.push_back(l * l);
    states.push_back(traj.state_at(tau));
  }
  for (std::size_t k : modes) {
    std::vector<double> seq;
    for (std::size_t i = 0; i < lambdas.size(); ++i) seq.push_back(std::pow(lambdas[i], -2.0 * gamma) * states[i][k]);
    out.limit.push_back(neville_at_zero(x, seq));
    out.sequence.push_back(std::move(seq));
  }
  return out;
}

ReconstructionError reconstruction_error(const Trajectory& traj, const BetaTable& table, const Matrix& energy,
                                         double lambda, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("reconstruction_error: tau must lie in (0,1)");
  if (2.0 * std::log(lambda) + std::log(tau) < traj.tau_min() - 1e-12)
    throw ConfigError("reconstruction_error: lambda^2 tau outside the stored range");
  const std::size_t K = traj.size();
  std::vector<double> target(K, 0.0);
  for (std::size_t a = 0; a < table.J0.size(); ++a) target[table.J0[a].mode] = table.beta[a];

  const double scale = std::pow(lambda, -2.0 * table.gamma);
  auto diff_at = [&](double t) {
    std::vector<double> d = traj.state_at(std::log(lambda * lambda * t));
    const double tg = std::pow(t, table.gamma);
    for (std::size_t k = 0; k < K; ++k) d[k] = scale * d[k] - tg * target[k];
    return d;
  };
  auto h_norm2 = [&](const std::vector<double>& d) {
    const std::vector<double> Ed = energy * std::span<const double>(d);
    return dot(d, d) + dot(d, Ed);
  };

  ReconstructionError res;
  res.lambda = lambda;
  constexpr int panels = 48;
  const double nodes[3] = {-0.77459666924148337704, 0.0, 0.77459666924148337704};
  const double weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double sup2 = 0.0, integral = 0.0;
  for (double t : {tau, 1.0}) sup2 = std::max(sup2, dot(diff_at(t), diff_at(t)));
  const double width = (1.0 - tau) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = tau + (p + 0.5) * width;
    for (int q = 0; q < 3; ++q) {
      const double t = mid + 0.5 * width * nodes[q];
      const std::vector<double> d = diff_at(t);
      sup2 = std::max(sup2, dot(d, d));
      integral += 0.5 * width * weights[q] * h_norm2(d);
    }
  }
  res.errL = std::sqrt(sup2);
  res.errH = std::sqrt(std::max(0.0, integral));
  return res;
}

std::vector<double> convergence_orders(const std::vector<double>& errors) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) out.push_back(std::log2(errors[i] / errors[i + 1]));
  return out;
}

}  // namespace oufreq
