#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <map>
#include <memory>

#include <json.hpp>

#include "oufreq/almgren.hpp"
#include "oufreq/asymptotics.hpp"
#include "oufreq/error.hpp"
#include "oufreq/inequalities.hpp"
#include "oufreq/io.hpp"
#include "oufreq/quadrature.hpp"
#include "oufreq/specfun.hpp"

namespace oufreq::cli {

using json = nlohmann::ordered_json;

namespace {

std::string config_hash(const RunConfig& cfg) { return hex_digest(serialize_config(cfg)); }

std::map<std::string, std::string> meta(const RunConfig& cfg, const std::string& basis_digest) {
  return {{"config_hash", config_hash(cfg)},
          {"basis_hash", basis_digest},
          {"version", std::string(version())},
          {"seed", std::to_string(cfg.seed)}};
}

json meta_json(const RunConfig& cfg, const std::string& basis_digest) {
  json j;
  for (const auto& [k, v] : meta(cfg, basis_digest)) j[k] = v;
  return j;
}

std::string path_in(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << text << '\n';
}

std::shared_ptr<const AngularSpectrum> spectrum_for(const RunConfig& cfg) {
  auto spec = std::make_shared<AngularSpectrum>(solve_angular(make_potential(cfg), cfg.N, cfg.L, cfg.angular_K));
  require_positivity(*spec);
  return spec;
}

struct Run {
  std::shared_ptr<const OUBasis> basis;
  std::shared_ptr<const SpectralSystem> system;
  Trajectory traj;
  FrequencyTrace trace;
  std::string basis_digest;
};

Run simulate(const RunConfig& cfg) {
  Run run;
  auto spec = spectrum_for(cfg);
  run.basis = std::make_shared<OUBasis>(first_modes(spec, static_cast<std::size_t>(cfg.K)));
  run.basis_digest = basis_hash(*run.basis);
  run.system = std::make_shared<SpectralSystem>(run.basis, make_perturbation(cfg), CubatureOptions{cfg.n_r, cfg.n_polar});
  const InitialData init = build_initial(*run.basis, parse_initial(cfg.initial));
  IntegrationOptions opts;
  opts.tau_min = cfg.tau_min;
  opts.dtau = cfg.dtau;
  run.traj = integrate_backward(run.system, init.coeffs, opts);
  run.trace = frequency_trace(run.traj);
  return run;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvariantError(what);
}

}  // namespace

void cmd_spectrum(const RunConfig& cfg, std::ostream& log) {
  auto spec = spectrum_for(cfg);
  const OUBasis basis = enumerate_modes(spec, cfg.gamma_max);
  const std::string digest = basis_hash(basis);

  json j;
  j["meta"] = meta_json(cfg, digest);
  j["N"] = cfg.N;
  j["potential"] = cfg.potential;
  j["positivity_margin"] = check_positivity(*spec).margin;
  j["mu"] = spec->eigenvalues;
  std::vector<double> alpha;
  for (double mu : spec->eigenvalues) alpha.push_back(alpha_from_mu(mu, cfg.N));
  j["alpha"] = alpha;
  json levels = json::array();
  log << "gamma multiplicity\n";
  std::size_t i = 0;
  while (i < basis.size()) {
    const double g = basis.modes[i].gamma;
    const Multiplicity m = multiplicity(g, *spec);
    std::size_t count = 0;
    while (i < basis.size() && std::abs(basis.modes[i].gamma - g) <= 1e-9) {
      ++count;
      ++i;
    }
    require(static_cast<std::size_t>(m.count) == count, "multiplicity count disagrees with the enumerated modes");
    json lv;
    lv["gamma"] = g;
    lv["multiplicity"] = m.count;
    json J = json::array();
    for (const auto& [mm, k] : m.J) J.push_back({mm, k});
    lv["J"] = J;
    levels.push_back(lv);
    log << format_double(g) << ' ' << m.count << '\n';
  }
  j["levels"] = levels;
  j["gram_residual"] = basis.gram_residual;
  j["bilinear_residual"] = basis.bilinear_residual;
  write_text(path_in(cfg, "spectrum.json"), j.dump(2));
  write_text(path_in(cfg, "basis.json"), basis_json(basis));
}

void cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  const Run run = simulate(cfg);
  const auto m = meta(cfg, run.basis_digest);

  std::vector<std::string> header{"tau", "t"};
  for (std::size_t k = 0; k < run.traj.size(); ++k) header.push_back("c_" + std::to_string(k));
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < run.traj.rows(); ++r) {
    std::vector<double> row{run.traj.tau[r], run.traj.t(r)};
    row.insert(row.end(), run.traj.coeffs[r].begin(), run.traj.coeffs[r].end());
    rows.push_back(std::move(row));
  }
  write_csv(path_in(cfg, "trajectory.csv"), m, header, rows);

  json side;
  side["meta"] = meta_json(cfg, run.basis_digest);
  side["dtau"] = run.traj.dtau;
  side["perturbation"] = run.system->perturbation().label;
  side["halving_error"] = run.traj.halving_error;
  side["truncation_ratio"] = run.traj.truncation_ratio;
  side["truncation_flagged"] = run.traj.truncation_flagged;
  write_text(path_in(cfg, "trajectory.json"), side.dump(2));

  rows.clear();
  double min_nu1 = INFINITY, min_H = INFINITY;
  for (const auto& r : run.trace.rows) {
    rows.push_back({r.t, r.H, r.D, r.N, r.nu1});
    min_nu1 = std::min(min_nu1, r.nu1);
    min_H = std::min(min_H, r.H);
  }
  write_csv(path_in(cfg, "frequency.csv"), m, {"t", "H", "D", "N", "nu1"}, rows);

  const PowerLaw pl = check_H_powerlaw(run.trace, run.trace.gamma_hat);
  const double hprime = check_Hprime(run.traj);
  json fj;
  fj["meta"] = meta_json(cfg, run.basis_digest);
  fj["gamma_hat"] = run.trace.gamma_hat;
  fj["delta_hat"] = run.trace.delta_hat;
  fj["K1_hat"] = pl.K1_hat;
  fj["liminf_positive"] = pl.liminf_positive;
  fj["fit_residual"] = run.trace.fit_residual;
  fj["fit_flagged"] = run.trace.fit_flagged;
  fj["Hprime_residual"] = hprime;
  fj["min_nu1"] = min_nu1;
  json sc = json::object();
  double worst_scaling = 0.0;
  for (double l : cfg.scaling_lambdas) {
    if (2.0 * std::log(l) <= run.traj.tau_min() + run.traj.dtau) continue;
    const double dev = check_scaling(run.traj, l);
    sc[format_double(l)] = dev;
    worst_scaling = std::max(worst_scaling, dev);
  }
  fj["scaling_deviation"] = sc;
  if (const auto snapped = snap_to_spectrum(run.trace.gamma_hat, *run.basis->spectrum)) fj["gamma_snapped"] = *snapped;
  else fj["gamma_snapped"] = nullptr;
  write_text(path_in(cfg, "frequency.json"), fj.dump(2));

  log << "rows " << run.traj.rows() << ", gamma_hat " << format_double(run.trace.gamma_hat) << ", delta_hat "
      << format_double(run.trace.delta_hat) << ", H' residual " << format_double(hprime) << ", min nu1 "
      << format_double(min_nu1) << ", scaling " << format_double(worst_scaling) << '\n';
  if (run.traj.truncation_flagged)
    log << "warning: truncation ratio " << format_double(run.traj.truncation_ratio) << " exceeds 1e-6\n";
  if (run.system->perturbation().kind == Perturbation::Kind::semilinear)
    log << "note: semilinear run; only conclusions are checked, the hypotheses on u and t u_t are not computable\n";
  require(min_H > 0.0, "H(t) is not positive on every row");
  require(min_nu1 >= -1e-10, "nu1 below -1e-10");
  require(worst_scaling <= 1e-8, "scaling identity deviates by more than 1e-8");
}

void cmd_beta(const RunConfig& cfg, std::ostream& log) {
  const Run run = simulate(cfg);
  const auto snapped = snap_to_spectrum(run.trace.gamma_hat, *run.basis->spectrum);
  if (!snapped) throw AccuracyError("gamma_hat = " + format_double(run.trace.gamma_hat) + " does not match the spectrum within 1e-6");
  const BetaTable tab = beta_table(run.traj, *snapped, cfg.lambda_grid);
  std::vector<std::size_t> modes;
  for (const auto& e : tab.J0) modes.push_back(e.mode);
  const DirectLimit direct = beta_direct(run.traj, *snapped, modes, cfg.direct_lambdas);

  json j;
  j["meta"] = meta_json(cfg, run.basis_digest);
  j["gamma"] = tab.gamma;
  j["gamma_hat"] = run.trace.gamma_hat;
  json J0 = json::array();
  for (const auto& e : tab.J0) J0.push_back({{"m", e.m}, {"k", e.k}, {"mode", e.mode}});
  j["J0"] = J0;
  j["beta"] = tab.beta;
  j["beta_by_Lambda"] = tab.beta_by_Lambda;
  j["Lambda_grid"] = tab.Lambda_grid;
  j["variation"] = tab.variation;
  j["beta_direct"] = direct.limit;
  j["max_tail_error"] = tab.max_tail_error;
  write_text(path_in(cfg, "beta.json"), j.dump(2));

  const Matrix E = energy_matrix(*run.basis);
  std::vector<std::vector<double>> rows;
  for (double l : cfg.recon_lambdas) {
    const ReconstructionError r = reconstruction_error(run.traj, tab, E, l, cfg.recon_tau);
    rows.push_back({r.lambda, r.errH, r.errL});
  }
  write_csv(path_in(cfg, "reconstruction.csv"), meta(cfg, run.basis_digest), {"lambda", "errH", "errL"}, rows);

  double max_beta = 0.0;
  for (double b : tab.beta) max_beta = std::max(max_beta, std::abs(b));
  log << "gamma " << format_double(tab.gamma) << ", |J0| " << tab.J0.size() << ", beta";
  for (double b : tab.beta) log << ' ' << format_double(b);
  log << ", Lambda variation " << format_double(tab.variation) << '\n';
  require(max_beta > 0.0, "all beta vanish for a nontrivial run");
}

void cmd_verify(const RunConfig& cfg, std::ostream& log) {
  auto spec = spectrum_for(cfg);
  std::vector<InequalityReport> reports;
  SweepOptions opts;
  opts.count = static_cast<std::size_t>(cfg.inequality_count);
  opts.seed = cfg.seed;
  opts.sobolev_s = cfg.sobolev_s;
  for (auto which : {Inequality::hardy_parabolic, Inequality::hardy_anisotropic, Inequality::x2_bound,
                     Inequality::sobolev_scaling})
    reports.push_back(sweep(which, *spec, opts));

  const OUBasis basis = first_modes(spec, static_cast<std::size_t>(cfg.K));
  const double rho = coercivity_infimum(basis);
  json j;
  j["meta"] = meta_json(cfg, basis_hash(basis));
  j["reports"] = json::parse(reports_json(reports));
  j["coercivity_infimum"] = rho;
  write_text(path_in(cfg, "inequalities.json"), j.dump(2));

  std::size_t violations = 0;
  for (const auto& r : reports) {
    log << r.inequality << ": " << r.count << " functions, " << r.violations << " violations, min gap "
        << format_double(r.min_gap) << '\n';
    violations += r.violations;
  }
  log << "coercivity infimum " << format_double(rho) << '\n';
  require(violations == 0, "inequality violations found");
}

void cmd_quadcheck(const RunConfig& cfg, std::ostream& log) {
  const int N = cfg.N;
  struct Probe {
    std::string name;
    std::function<double(std::span<const double>)> f;
    double exact;
  };
  // Closed forms for int f G(x,1) dx, G = e^{-|x|^2/4}.
  const double full = std::pow(4.0 * M_PI, 0.5 * N);
  std::vector<Probe> probes{
      {"one", [](std::span<const double>) { return 1.0; }, full},
      {"r2", [](std::span<const double> x) {
         double r2 = 0;
         for (double c : x) r2 += c * c;
         return r2;
       }, 2.0 * N * full},
      {"gauss", [](std::span<const double> x) {
         double r2 = 0;
         for (double c : x) r2 += c * c;
         return std::exp(-r2 / 4.0);
       }, std::pow(2.0 * M_PI, 0.5 * N)},
  };
  json arr = json::array();
  bool ok = true;
  for (const auto& p : probes) {
    const StableIntegral s = integrate_G_stable(N, p.f, 1.0, cfg.n_r, cfg.n_polar);
    const double rel = std::abs(s.value - p.exact) / std::abs(p.exact);
    arr.push_back({{"name", p.name}, {"value", s.value}, {"exact", p.exact}, {"relative_error", rel},
                   {"n_r", s.n_r}, {"doubling_change", s.relative_change}});
    log << p.name << ": relative error " << format_double(rel) << " at n_r " << s.n_r << '\n';
    ok = ok && rel < 1e-10;
  }
  json j;
  j["meta"] = meta_json(cfg, "none");
  j["probes"] = arr;
  write_text(path_in(cfg, "quadcheck.json"), j.dump(2));
  require(ok, "quadrature probes disagree with closed forms");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const PositivityError*>(&e)) return 4;
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  return 3;
}

}  // namespace oufreq::cli
