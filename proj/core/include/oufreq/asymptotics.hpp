#pragma once

#include <cstddef>
#include <vector>

#include "oufreq/evolve.hpp"
#include "oufreq/linalg.hpp"

namespace oufreq {

/// One index (m, k) of the eigenvalue gamma with its position in the basis.
struct J0Entry {
  int m = 0;
  std::size_t k = 0;     // angular index
  std::size_t mode = 0;  // basis index
};

/// J0 = {(m,k) : m - alpha_k/2 = gamma}, mapped onto basis indices. Throws
/// TruncationError when a member lies outside the basis.
std::vector<J0Entry> resolve_J0(const OUBasis& basis, double gamma);

struct BetaResult {
  std::vector<double> beta;        // one per J0 entry
  std::vector<double> tail;        // contribution below the stored range
  std::vector<double> tail_error;  // estimated uncertainty of that contribution
};

/// beta_k = Lambda^{-2 gamma} c_k(Lambda^2) + int_{-inf}^{log Lambda^2} e^{(1-gamma) tau} F_k dtau,
/// the tau form of the Cauchy-type formula. Two-point Gauss-Legendre on each
/// stored step; the part below tau_min is an exponential extrapolation.
/// Throws AccuracyError when the tail uncertainty exceeds 1e-8 |beta|.
BetaResult beta_integral(const Trajectory& traj, double Lambda, double gamma, const std::vector<J0Entry>& J0);

struct BetaTable {
  double gamma = 0.0;
  std::vector<J0Entry> J0;
  std::vector<double> Lambda_grid;
  std::vector<std::vector<double>> beta_by_Lambda;  // [Lambda][J0 entry]
  std::vector<double> beta;                         // at the first Lambda
  double variation = 0.0;                           // max relative spread over Lambda
  double max_tail_error = 0.0;
};

BetaTable beta_table(const Trajectory& traj, double gamma, const std::vector<double>& Lambda_grid = {0.1, 0.2, 0.3, 0.4});

/// Max over J0 of (max - min)/max|beta| across the grid.
double lambda_independence(const Trajectory& traj, const std::vector<double>& Lambda_grid, double gamma,
                           const std::vector<J0Entry>& J0);

struct DirectLimit {
  std::vector<double> lambdas;
  std::vector<std::vector<double>> sequence;  // [mode][lambda] = lambda^{-2 gamma} c(lambda^2)
  std::vector<double> limit;                  // polynomial extrapolation in lambda^2 to 0
};

DirectLimit beta_direct(const Trajectory& traj, double gamma, const std::vector<std::size_t>& modes,
                        const std::vector<double>& lambdas = {0.4, 0.2, 0.1, 0.05, 0.025});

struct ReconstructionError {
  double lambda = 0.0;
  double errH = 0.0;  // sqrt of int_tau^1 ||.||_{H_t}^2 dt
  double errL = 0.0;  // sup over t in [tau,1] of ||.||_{L_t}
};

/// Distance between lambda^{-2 gamma} u(lambda x, lambda^2 t) and
/// t^gamma sum beta V~(x/sqrt t), computed on coefficients. `energy` is
/// energy_matrix(basis).
ReconstructionError reconstruction_error(const Trajectory& traj, const BetaTable& table, const Matrix& energy,
                                         double lambda, double tau);

/// log2 ratios of consecutive errors along a halving lambda grid.
std::vector<double> convergence_orders(const std::vector<double>& errors);

}  // namespace oufreq
