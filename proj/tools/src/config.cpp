#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "oufreq/error.hpp"
#include "oufreq/io.hpp"

namespace oufreq::cli {

namespace pt = boost::property_tree;

namespace {

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  while (b < e && *b == ' ') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) throw ConfigError("config: '" + key + "' is not a number: '" + text + "'");
  return v;
}

long long to_int(const std::string& key, const std::string& text) {
  long long v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size())
    throw ConfigError("config: '" + key + "' is not an integer: '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    const auto a = cur.find_first_not_of(" \t");
    const auto b = cur.find_last_not_of(" \t");
    out.push_back(a == std::string::npos ? "" : cur.substr(a, b - a + 1));
  }
  return out;
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(to_double(key, part));
  return out;
}

std::string join(const std::vector<double>& v) { return csv_join(v); }

template <class T, class F>
void read(const pt::ptree& tree, const std::string& key, T& field, F&& conv) {
  if (auto v = tree.get_optional<std::string>(key)) field = conv(key, *v);
}

void reject_unknown(const pt::ptree& tree) {
  static const std::vector<std::string> sections{"problem", "discretization", "experiment", "output"};
  static const std::vector<std::vector<std::string>> keys{
      {"N", "potential", "perturbation"},
      {"L", "angular_K", "K", "n_r", "n_polar", "dtau", "tau_min"},
      {"gamma_max", "initial", "lambda_grid", "direct_lambdas", "recon_lambdas", "recon_tau", "scaling_lambdas",
       "inequality_count", "sobolev_s"},
      {"dir"}};
  for (const auto& [name, child] : tree) {
    if (child.empty()) {
      if (name != "seed") throw ConfigError("config: unknown top-level key '" + name + "'");
      continue;
    }
    const auto it = std::find(sections.begin(), sections.end(), name);
    if (it == sections.end()) throw ConfigError("config: unknown section [" + name + "]");
    const auto& allowed = keys[static_cast<std::size_t>(it - sections.begin())];
    for (const auto& [k, _] : child)
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
        throw ConfigError("config: unknown key '" + k + "' in [" + name + "]");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  reject_unknown(tree);
  RunConfig c;
  auto str = [](const std::string&, const std::string& v) { return v; };
  auto i32 = [](const std::string& k, const std::string& v) { return static_cast<int>(to_int(k, v)); };
  read(tree, "problem.N", c.N, i32);
  read(tree, "problem.potential", c.potential, str);
  read(tree, "problem.perturbation", c.perturbation, str);
  read(tree, "discretization.L", c.L, i32);
  read(tree, "discretization.angular_K", c.angular_K, i32);
  read(tree, "discretization.K", c.K, i32);
  read(tree, "discretization.n_r", c.n_r, i32);
  read(tree, "discretization.n_polar", c.n_polar, i32);
  read(tree, "discretization.dtau", c.dtau, to_double);
  read(tree, "discretization.tau_min", c.tau_min, to_double);
  read(tree, "experiment.gamma_max", c.gamma_max, to_double);
  read(tree, "experiment.initial", c.initial, str);
  read(tree, "experiment.lambda_grid", c.lambda_grid, to_list);
  read(tree, "experiment.direct_lambdas", c.direct_lambdas, to_list);
  read(tree, "experiment.recon_lambdas", c.recon_lambdas, to_list);
  read(tree, "experiment.recon_tau", c.recon_tau, to_double);
  read(tree, "experiment.scaling_lambdas", c.scaling_lambdas, to_list);
  read(tree, "experiment.inequality_count", c.inequality_count, i32);
  read(tree, "experiment.sobolev_s", c.sobolev_s, to_double);
  read(tree, "output.dir", c.out_dir, str);
  read(tree, "seed", c.seed, [](const std::string& k, const std::string& v) {
    std::uint64_t s = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("config: '" + k + "' is not a u64");
    return s;
  });
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "seed = " << c.seed << "\n\n";
  os << "[problem]\n";
  os << "N = " << c.N << "\n";
  os << "potential = " << c.potential << "\n";
  os << "perturbation = " << c.perturbation << "\n\n";
  os << "[discretization]\n";
  os << "L = " << c.L << "\n";
  os << "angular_K = " << c.angular_K << "\n";
  os << "K = " << c.K << "\n";
  os << "n_r = " << c.n_r << "\n";
  os << "n_polar = " << c.n_polar << "\n";
  os << "dtau = " << format_double(c.dtau) << "\n";
  os << "tau_min = " << format_double(c.tau_min) << "\n\n";
  os << "[experiment]\n";
  os << "gamma_max = " << format_double(c.gamma_max) << "\n";
  os << "initial = " << c.initial << "\n";
  os << "lambda_grid = " << join(c.lambda_grid) << "\n";
  os << "direct_lambdas = " << join(c.direct_lambdas) << "\n";
  os << "recon_lambdas = " << join(c.recon_lambdas) << "\n";
  os << "recon_tau = " << format_double(c.recon_tau) << "\n";
  os << "scaling_lambdas = " << join(c.scaling_lambdas) << "\n";
  os << "inequality_count = " << c.inequality_count << "\n";
  os << "sobolev_s = " << format_double(c.sobolev_s) << "\n\n";
  os << "[output]\n";
  os << "dir = " << c.out_dir << "\n";
  return os.str();
}

void validate(const RunConfig& c) {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
  };
  need(c.N >= 3 && c.N <= 8, "problem.N must lie in [3, 8]");
  need(c.L >= 1 && c.L <= 64, "discretization.L must lie in [1, 64]");
  need(c.angular_K >= 1, "discretization.angular_K must be positive");
  need(c.K >= 1 && c.K <= 2000, "discretization.K must lie in [1, 2000]");
  need(c.n_r >= 4 && c.n_r <= 1024, "discretization.n_r must lie in [4, 1024]");
  need(c.n_polar >= 2 && c.n_polar <= 128, "discretization.n_polar must lie in [2, 128]");
  need(c.dtau > 0 && c.dtau <= 0.01, "discretization.dtau must lie in (0, 0.01]");
  need(c.tau_min < 0 && c.tau_min >= std::log(1e-6) - 1e-12, "discretization.tau_min must lie in [log 1e-6, 0)");
  need(c.gamma_max >= 0, "experiment.gamma_max must be non-negative");
  for (double l : c.lambda_grid) need(l > 0 && l <= 1, "experiment.lambda_grid entries must lie in (0, 1]");
  for (double l : c.direct_lambdas) need(l > 0 && l <= 1, "experiment.direct_lambdas entries must lie in (0, 1]");
  for (double l : c.recon_lambdas) need(l > 0 && l <= 1, "experiment.recon_lambdas entries must lie in (0, 1]");
  for (double l : c.scaling_lambdas) need(l > 0 && l < 1, "experiment.scaling_lambdas entries must lie in (0, 1)");
  need(c.recon_tau > 0 && c.recon_tau < 1, "experiment.recon_tau must lie in (0, 1)");
  need(c.inequality_count >= 1, "experiment.inequality_count must be positive");
  need(c.sobolev_s == 0 || (c.sobolev_s >= 2 && c.sobolev_s <= 2.0 * c.N / (c.N - 2.0)),
       "experiment.sobolev_s must be 0 or lie in [2, 2N/(N-2)]");
  need(!c.out_dir.empty(), "output.dir must not be empty");
  make_potential(c);
  make_perturbation(c);
  parse_initial(c.initial);
}

AngularPotential make_potential(const RunConfig& c) {
  const auto colon = c.potential.find(':');
  const std::string kind = c.potential.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : c.potential.substr(colon + 1);
  if (kind == "constant") return AngularPotential::constant(args.empty() ? 0.0 : to_double("problem.potential", args));
  if (kind == "zonal") {
    // a(theta) = sum_i c_i cos^i(theta)
    const std::vector<double> coef = to_list("problem.potential", args);
    if (coef.empty()) throw ConfigError("config: zonal potential needs coefficients");
    if (c.N != 3) throw ConfigError("config: anisotropic potentials need N = 3");
    return AngularPotential::zonal_from(
        [coef](double x) {
          double s = 0.0;
          for (std::size_t i = coef.size(); i-- > 0;) s = s * x + coef[i];
          return s;
        },
        static_cast<int>(coef.size()) + 1);
  }
  if (kind == "harmonic") {
    // l,m,value;l,m,value;...
    if (c.N != 3) throw ConfigError("config: anisotropic potentials need N = 3");
    std::vector<HarmonicCoefficient> table;
    for (const auto& item : split(args, ';')) {
      const auto parts = split(item, ',');
      if (parts.size() != 3) throw ConfigError("config: harmonic entries are l,m,value");
      table.push_back({static_cast<int>(to_int("problem.potential", parts[0])),
                       static_cast<int>(to_int("problem.potential", parts[1])), to_double("problem.potential", parts[2])});
    }
    return AngularPotential::harmonic_table(std::move(table));
  }
  throw ConfigError("config: unknown potential kind '" + kind + "'");
}

Perturbation make_perturbation(const RunConfig& c) {
  const auto colon = c.perturbation.find(':');
  const std::string kind = c.perturbation.substr(0, colon);
  const std::vector<double> args =
      colon == std::string::npos ? std::vector<double>{} : to_list("problem.perturbation", c.perturbation.substr(colon + 1));
  auto arity = [&](std::size_t n) {
    if (args.size() != n) throw ConfigError("config: perturbation '" + kind + "' takes " + std::to_string(n) + " arguments");
  };
  if (kind == "none") return Perturbation::none();
  if (kind == "constant") {
    arity(1);
    return Perturbation::constant(args[0]);
  }
  if (kind == "rational") {
    // h = eps / (1 + |x|^2)
    arity(1);
    const double e = args[0];
    return Perturbation::radial([e](double r, double) { return e / (1.0 + r * r); }, std::abs(e), 1.0, c.perturbation);
  }
  if (kind == "gaussian") {
    // h = eps exp(-|x|^2)
    arity(1);
    const double e = args[0];
    return Perturbation::radial([e](double r, double) { return e * std::exp(-r * r); }, std::abs(e), 1.0, c.perturbation);
  }
  if (kind == "power") {
    // h = C |x|^{-2+e}, the extreme admissible profile
    arity(2);
    const double C = args[0], e = args[1];
    return Perturbation::radial([C, e](double r, double) { return C * std::pow(r, -2.0 + e); }, std::abs(C), e,
                                c.perturbation);
  }
  if (kind == "semilinear") {
    arity(2);
    return Perturbation::semilinear(args[0], args[1]);
  }
  throw ConfigError("config: unknown perturbation kind '" + kind + "'");
}

std::vector<std::pair<std::size_t, double>> parse_initial(const std::string& spec) {
  std::vector<std::pair<std::size_t, double>> out;
  for (const auto& item : split(spec, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) throw ConfigError("config: initial entries are mode:coefficient");
    const long long k = to_int("experiment.initial", parts[0]);
    if (k < 0) throw ConfigError("config: initial mode index must be non-negative");
    out.emplace_back(static_cast<std::size_t>(k), to_double("experiment.initial", parts[1]));
  }
  if (out.empty()) throw ConfigError("config: initial data is empty");
  return out;
}

}  // namespace oufreq::cli
