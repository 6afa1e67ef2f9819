#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oufreq/angular.hpp"
#include "oufreq/evolve.hpp"

namespace oufreq::cli {

/// Parsed run configuration. See docs in README ("Configuration").
struct RunConfig {
  // [problem]
  int N = 3;
  std::string potential = "constant:0";
  std::string perturbation = "none";
  // [discretization]
  int L = 16;
  int angular_K = 64;
  int K = 32;
  int n_r = 48;
  int n_polar = 8;
  double dtau = 1e-3;
  double tau_min = -6.907755278982137;  // log(1e-3)
  // [experiment]
  double gamma_max = 2.0;
  std::string initial = "0:1";
  std::vector<double> lambda_grid{0.1, 0.2, 0.3, 0.4};
  std::vector<double> direct_lambdas{0.4, 0.2, 0.1, 0.05, 0.025};
  std::vector<double> recon_lambdas{0.5, 0.25, 0.125};
  double recon_tau = 0.1;
  std::vector<double> scaling_lambdas{0.5, 0.25};
  int inequality_count = 1000;
  double sobolev_s = 0.0;
  // [output]
  std::string out_dir = "out";
  // top level
  std::uint64_t seed = 1;

  bool operator==(const RunConfig&) const = default;
};

/// Parses INI text; throws ConfigError with the offending key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// INI text that parses back to an identical RunConfig.
std::string serialize_config(const RunConfig& cfg);

/// Range checks; throws ConfigError.
void validate(const RunConfig& cfg);

AngularPotential make_potential(const RunConfig& cfg);
Perturbation make_perturbation(const RunConfig& cfg);
std::vector<std::pair<std::size_t, double>> parse_initial(const std::string& spec);

}  // namespace oufreq::cli
