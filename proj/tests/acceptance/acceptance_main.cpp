// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "oufreq/almgren.hpp"
#include "oufreq/asymptotics.hpp"
#include "oufreq/error.hpp"
#include "oufreq/inequalities.hpp"
#include "oufreq/ou_basis.hpp"

using namespace oufreq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Every trace produced by criteria 3-5 and 10 is also checked by criterion 9.
struct TraceStats {
  std::size_t traces = 0, rows = 0;
  double min_nu1 = INFINITY;
  double min_H = INFINITY;
};
TraceStats g_traces;

void record(const FrequencyTrace& ft) {
  ++g_traces.traces;
  for (const auto& r : ft.rows) {
    ++g_traces.rows;
    g_traces.min_nu1 = std::min(g_traces.min_nu1, r.nu1);
    g_traces.min_H = std::min(g_traces.min_H, r.H);
  }
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::shared_ptr<const AngularSpectrum> constant_spectrum(double lambda, int N = 3) {
  return std::make_shared<AngularSpectrum>(solve_angular(AngularPotential::constant(lambda), N, 12, 64));
}

std::shared_ptr<const OUBasis> free_basis() {
  static auto b = std::make_shared<OUBasis>(first_modes(constant_spectrum(0.0), 32));
  return b;
}

Trajectory run(std::shared_ptr<const OUBasis> b, Perturbation p, std::vector<double> c0, double tau_min,
               double dtau = 1e-3, int n_r = 48) {
  auto sys = std::make_shared<SpectralSystem>(std::move(b), std::move(p), CubatureOptions{n_r, 8});
  IntegrationOptions o;
  o.tau_min = tau_min;
  o.dtau = dtau;
  return integrate_backward(sys, std::move(c0), o);
}

std::vector<double> mixture_data(const OUBasis& b) {
  std::vector<double> c(b.size(), 0.0);
  c[0] = c[1] = 1.0;
  return c;
}

std::size_t first_mode_with_gamma(const OUBasis& b, double g) {
  for (std::size_t k = 0; k < b.size(); ++k)
    if (std::abs(b.modes[k].gamma - g) < 1e-12) return k;
  throw InvariantError("no mode with the requested gamma");
}

// binom(n, 2)
long binomial2(long n) { return n * (n - 1) / 2; }

// 1. eigenvalue ladder of L without potential
Outcome spectrum_ladder() {
  const OUBasis b = enumerate_modes(constant_spectrum(0.0), 2.0);
  std::map<long, long> count;
  double err = 0.0;
  for (const auto& m : b.modes) {
    const long half = std::lround(2.0 * m.gamma);
    err = std::max(err, std::abs(m.gamma - 0.5 * half));
    ++count[half];
  }
  bool ok = err < 1e-12 && count.size() == 5;
  std::ostringstream os;
  os << "levels";
  for (long h = 0; h <= 4; ++h) {
    const long expect = binomial2(h + 2);  // binom(2 gamma + 2, 2)
    const long mult = multiplicity(0.5 * h, *b.spectrum).count;
    ok = ok && count[h] == expect && mult == expect;
    os << ' ' << 0.5 * h << ':' << count[h];
  }
  os << ", max eigenvalue error " << fmt("%.2e", err);
  return {ok, os.str()};
}

// 2. basis certification
Outcome basis_certification() {
  double gram = 0.0, bil = 0.0;
  for (double lambda : {0.0, 0.1}) {
    const OUBasis b = first_modes(constant_spectrum(lambda), 32);
    gram = std::max(gram, b.gram_residual);
    bil = std::max(bil, b.bilinear_residual);
  }
  return {gram < 1e-8 && bil < 1e-6, "Gram residual " + fmt("%.2e", gram) + ", eigen-residual " + fmt("%.2e", bil)};
}

// 3. pure modes
Outcome pure_modes() {
  const auto b = free_basis();
  const std::vector<std::size_t> modes{0, 1, 3, first_mode_with_gamma(*b, 1.0), first_mode_with_gamma(*b, 1.0) + 4};
  double err = 0.0;
  std::map<long, int> distinct;
  for (std::size_t k : modes) {
    const double g = b->modes[k].gamma;
    ++distinct[std::lround(2 * g)];
    const Trajectory tr = run(b, Perturbation::none(), closed_form_initial(*b, ClosedForm::pure(k)), std::log(1e-3));
    const FrequencyTrace ft = frequency_trace(tr);
    record(ft);
    for (const auto& r : ft.rows) err = std::max(err, std::abs(r.N - g));
  }
  return {err < 1e-8 && distinct.size() == 3,
          std::to_string(modes.size()) + " modes, " + std::to_string(distinct.size()) + " distinct gamma, max |N - gamma| " +
              fmt("%.2e", err)};
}

// 4. two-mode mixture
Outcome mixture_limit() {
  const auto b = free_basis();
  const Trajectory tr = run(b, Perturbation::none(), mixture_data(*b), std::log(1e-6));
  const FrequencyTrace ft = frequency_trace(tr);
  record(ft);
  double err = 0.0;
  for (const auto& r : ft.rows) err = std::max(err, std::abs(r.N - 0.5 * r.t / (1.0 + r.t)));
  const bool ok = err < 1e-8 && std::abs(ft.gamma_hat) < 1e-6 && std::abs(ft.delta_hat - 1.0) < 0.05;
  return {ok, "rowwise error " + fmt("%.2e", err) + ", gamma_hat " + fmt("%.2e", ft.gamma_hat) + ", delta_hat " +
                  fmt("%.5f", ft.delta_hat)};
}

// 5. exact perturbed family e^{-eps t} t^gamma
Outcome exp_linear_family() {
  const auto b = free_basis();
  const std::vector<std::size_t> modes{0, 1, first_mode_with_gamma(*b, 1.0)};
  double sup = 0.0, nerr = 0.0, berr = 0.0, var = 0.0;
  for (double eps : {0.05, 0.1, 0.2}) {
    for (std::size_t k : modes) {
      const ClosedForm cf = ClosedForm::exp_linear(k, eps);
      const Trajectory tr = run(b, Perturbation::constant(eps), closed_form_initial(*b, cf), std::log(1e-6));
      for (std::size_t r = 0; r < tr.rows() && tr.tau[r] >= std::log(1e-3) - 1e-12; ++r) {
        const auto ref = closed_form_reference(*b, cf, tr.t(r));
        for (std::size_t q = 0; q < ref.size(); ++q) sup = std::max(sup, std::abs(ref[q] - tr.coeffs[r][q]));
      }
      const FrequencyTrace ft = frequency_trace(tr);
      record(ft);
      const double g = b->modes[k].gamma;
      for (const auto& r : ft.rows) nerr = std::max(nerr, std::abs(r.N - (g - eps * r.t)));
      const BetaTable tab = beta_table(tr, g);
      for (const auto& row : tab.beta_by_Lambda)
        for (std::size_t a = 0; a < tab.J0.size(); ++a)
          berr = std::max(berr, std::abs(row[a] - (tab.J0[a].mode == k ? 1.0 : 0.0)));
      var = std::max(var, tab.variation);
    }
  }
  const bool ok = sup < 1e-8 && nerr < 1e-8 && berr < 1e-6 && var < 1e-8;
  return {ok, "sup error " + fmt("%.2e", sup) + ", |N - (gamma - eps t)| " + fmt("%.2e", nerr) + ", |beta - 1| " +
                  fmt("%.2e", berr) + ", Lambda-variation " + fmt("%.2e", var)};
}

// 6. scaling identity
Outcome scaling_identity() {
  const auto b = free_basis();
  const Trajectory mix = run(b, Perturbation::none(), mixture_data(*b), std::log(1e-3));
  const Trajectory lin =
      run(b, Perturbation::constant(0.1), closed_form_initial(*b, ClosedForm::exp_linear(1, 0.1)), std::log(1e-3));
  double worst = 0.0;
  for (const Trajectory* tr : {&mix, &lin})
    for (double l : {0.125, 0.25, 0.5}) worst = std::max(worst, check_scaling(*tr, l));
  return {worst < 1e-9, "max |N_lambda(t) - N(lambda^2 t)| " + fmt("%.2e", worst)};
}

// 7. reconstruction convergence
Outcome reconstruction() {
  const auto b = free_basis();
  const Matrix E = energy_matrix(*b);
  const Trajectory mix = run(b, Perturbation::none(), mixture_data(*b), std::log(1e-6));
  const BetaTable tab = beta_table(mix, 0.0);
  std::vector<double> eh, el;
  for (double l : {0.5, 0.25, 0.125}) {
    const ReconstructionError r = reconstruction_error(mix, tab, E, l, 0.1);
    eh.push_back(r.errH);
    el.push_back(r.errL);
  }
  const double expected = 2.0 * (b->modes[1].gamma - b->modes[0].gamma);
  bool ok = eh[0] > eh[1] && eh[1] > eh[2] && el[0] > el[1] && el[1] > el[2];
  double worst_order = 0.0;
  for (const auto& e : {eh, el})
    for (double o : convergence_orders(e)) worst_order = std::max(worst_order, std::abs(o - expected) / expected);
  ok = ok && worst_order <= 0.15;

  double pure_err = 0.0;
  for (std::size_t k : {0, 1, 4}) {
    const Trajectory tr = run(b, Perturbation::none(), closed_form_initial(*b, ClosedForm::pure(k)), std::log(1e-6));
    const BetaTable tp = beta_table(tr, b->modes[k].gamma);
    for (double l : {0.5, 0.25, 0.125}) {
      const ReconstructionError r = reconstruction_error(tr, tp, E, l, 0.1);
      pure_err = std::max({pure_err, r.errH, r.errL});
    }
  }
  ok = ok && pure_err < 1e-10;
  return {ok, "mixture orders H " + fmt("%.4f", convergence_orders(eh)[0]) + "/" + fmt("%.4f", convergence_orders(eh)[1]) +
                  ", L " + fmt("%.4f", convergence_orders(el)[0]) + "/" + fmt("%.4f", convergence_orders(el)[1]) +
                  " (expected " + fmt("%.2f", expected) + "), pure-mode error " + fmt("%.2e", pure_err)};
}

// 8. inequality sweeps
Outcome inequality_sweeps() {
  std::size_t total = 0, violations = 0;
  double min_gap = INFINITY;
  SweepOptions o;
  o.count = 1000;
  o.seed = 1;
  for (int N : {3, 4, 5}) {
    const AngularSpectrum spec =
        solve_angular(AngularPotential::constant(0.1 * (N - 2) * (N - 2) / 4.0), N, 6, 10);
    for (auto which : {Inequality::hardy_parabolic, Inequality::hardy_anisotropic, Inequality::x2_bound,
                       Inequality::sobolev_scaling}) {
      const InequalityReport r = sweep(which, spec, o);
      total += r.count;
      violations += r.violations;
      min_gap = std::min(min_gap, r.min_gap);
    }
  }
  const AngularSpectrum zonal =
      solve_angular(AngularPotential::zonal_from([](double u) { return 0.3 * u * u - 0.1 * u; }, 12), 3, 16, 64);
  const InequalityReport r = sweep(Inequality::hardy_anisotropic, zonal, o);
  total += r.count;
  violations += r.violations;
  min_gap = std::min(min_gap, r.min_gap);
  return {violations == 0 && min_gap >= -1e-10, std::to_string(total) + " evaluations in 13 sweeps, " +
                                                    std::to_string(violations) + " violations, min relative gap " +
                                                    fmt("%.2e", min_gap)};
}

// 9. identities on every trace
Outcome identities() {
  const auto b = free_basis();
  std::vector<double> c0(b->size(), 0.0);
  c0[0] = c0[1] = c0[4] = 1.0;
  std::vector<double> res;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    const Trajectory tr = run(b, Perturbation::constant(0.1), c0, std::log(1e-2), dt);
    record(frequency_trace(tr));
    res.push_back(check_Hprime(tr));
  }
  const std::vector<double> orders = convergence_orders(res);
  bool ok = true;
  for (double o : orders) ok = ok && std::abs(o - 2.0) <= 0.1;
  ok = ok && g_traces.min_nu1 >= -1e-10 && g_traces.min_H > 0.0;
  return {ok, "H' residual orders " + fmt("%.3f", orders[0]) + "/" + fmt("%.3f", orders[1]) + "; over " +
                  std::to_string(g_traces.traces) + " traces, " + std::to_string(g_traces.rows) + " rows: min nu1 " +
                  fmt("%.2e", g_traces.min_nu1) + ", min H " + fmt("%.2e", g_traces.min_H)};
}

// 10. admissible radial perturbation without closed form
struct BetaRun {
  double gamma_hat = 0.0, snapped = 0.0, beta = 0.0, direct = 0.0, variation = 0.0, tail = 0.0, halving = 0.0;
  bool snapped_ok = false;
};

BetaRun radial_run(double dtau, int n_r) {
  const auto b = free_basis();
  std::vector<double> c0(b->size(), 0.0);
  c0[0] = 1.0;
  const Trajectory tr = run(b, Perturbation::radial([](double r, double) { return 0.1 / (1.0 + r * r); }, 0.1, 1.0, "rational"),
                            c0, std::log(1e-6), dtau, n_r);
  const FrequencyTrace ft = frequency_trace(tr);
  record(ft);
  BetaRun out;
  out.gamma_hat = ft.gamma_hat;
  out.halving = tr.halving_error;
  const auto snap = snap_to_spectrum(ft.gamma_hat, *b->spectrum, 1e-5);
  if (!snap) return out;
  out.snapped_ok = true;
  out.snapped = *snap;
  const BetaTable tab = beta_table(tr, *snap);
  const DirectLimit d = beta_direct(tr, *snap, {tab.J0[0].mode});
  out.beta = tab.beta[0];
  out.direct = d.limit[0];
  out.variation = tab.variation;
  out.tail = tab.max_tail_error;
  return out;
}

Outcome radial_perturbation() {
  const BetaRun base = radial_run(1e-3, 48);
  const BetaRun half = radial_run(5e-4, 48);
  const BetaRun fine = radial_run(1e-3, 96);
  bool ok = true;
  double worst_direct = 0.0, spread = 0.0;
  for (const BetaRun* r : {&base, &half, &fine}) {
    ok = ok && r->snapped_ok && r->snapped == base.snapped && std::abs(r->beta - r->direct) < 1e-4 &&
         r->variation < 1e-8 && r->tail < 1e-8 * std::abs(r->beta) && r->halving < 1e-8;
    worst_direct = std::max(worst_direct, std::abs(r->beta - r->direct));
    spread = std::max(spread, std::abs(r->beta - base.beta));
  }
  ok = ok && spread < 1e-6;
  return {ok, "gamma_hat " + fmt("%.3e", base.gamma_hat) + " -> " + fmt("%g", base.snapped) + ", beta " +
                  fmt("%.10f", base.beta) + ", |beta - direct| " + fmt("%.2e", worst_direct) +
                  ", rerun spread " + fmt("%.2e", spread)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> fn;
  };
  // Criterion 9 reads the traces recorded by the others, so it runs last.
  const std::vector<Criterion> criteria{
      {"spectrum ladder", 1.0, spectrum_ladder},
      {"basis certification", 5.0, basis_certification},
      {"pure-mode frequency", 5.0, pure_modes},
      {"mixture limit", 5.0, mixture_limit},
      {"exact perturbed family", 30.0, exp_linear_family},
      {"scaling identity", 5.0, scaling_identity},
      {"reconstruction convergence", 10.0, reconstruction},
      {"inequality sweeps", 60.0, inequality_sweeps},
      {"identities", 60.0, identities},
      {"admissible radial perturbation", 120.0, radial_perturbation},
  };
  // The free basis is shared; build it outside the timed sections.
  free_basis();
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail += "; over the " + fmt("%g", c.budget_s) + " s budget";
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
