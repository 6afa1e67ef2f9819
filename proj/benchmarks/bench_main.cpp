#include <cmath>
#include <memory>

#include <benchmark/benchmark.h>

#include "oufreq/almgren.hpp"
#include "oufreq/angular.hpp"
#include "oufreq/evolve.hpp"
#include "oufreq/inequalities.hpp"
#include "oufreq/ou_basis.hpp"
#include "oufreq/quadrature.hpp"
#include "oufreq/specfun.hpp"

namespace {

using namespace oufreq;

std::shared_ptr<const AngularSpectrum> zonal_spectrum() {
  static auto spec = std::make_shared<AngularSpectrum>(
      solve_angular(AngularPotential::zonal_from([](double c) { return 0.1 + 0.1 * c; }, 4), 3, 16, 64));
  return spec;
}

void BM_Laguerre(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(laguerre_rule(0.5, n));
}
BENCHMARK(BM_Laguerre)->Arg(32)->Arg(64)->Arg(128);

void BM_AngularSolve(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const auto a = AngularPotential::zonal_from([](double c) { return 0.1 + 0.1 * c; }, 4);
  for (auto _ : state) benchmark::DoNotOptimize(solve_angular(a, 3, L, 64));
}
BENCHMARK(BM_AngularSolve)->Arg(12)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_BasisBuild(benchmark::State& state) {
  const auto spec = zonal_spectrum();
  for (auto _ : state) benchmark::DoNotOptimize(first_modes(spec, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_BasisBuild)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_IntegrateRadial(benchmark::State& state) {
  auto basis = std::make_shared<OUBasis>(first_modes(zonal_spectrum(), 32));
  auto sys = std::make_shared<SpectralSystem>(
      basis, Perturbation::radial([](double r, double) { return 0.1 / (1.0 + r * r); }, 0.1, 1.0, "rational"));
  std::vector<double> c0(basis->size(), 0.0);
  c0[0] = 1.0;
  IntegrationOptions opts;
  opts.tau_min = std::log(1e-2);
  opts.verify_halving = false;
  for (auto _ : state) benchmark::DoNotOptimize(integrate_backward(sys, c0, opts));
}
BENCHMARK(BM_IntegrateRadial)->Unit(benchmark::kMillisecond);

void BM_HardySweep(benchmark::State& state) {
  const auto spec = zonal_spectrum();
  SweepOptions opts;
  opts.count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sweep(Inequality::hardy_parabolic, *spec, opts));
}
BENCHMARK(BM_HardySweep)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
