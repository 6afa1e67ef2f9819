#include <cmath>

#include <doctest.h>

#include "oufreq/error.hpp"
#include "oufreq/evolve.hpp"

using namespace oufreq;

namespace {

std::shared_ptr<const OUBasis> basis_for(double lambda, std::size_t K = 16) {
  auto spec = std::make_shared<AngularSpectrum>(solve_angular(AngularPotential::constant(lambda), 3, 8, 64));
  return std::make_shared<OUBasis>(first_modes(spec, K));
}

double r_of(std::span<const double> x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("closed-form families") {
  const auto b = basis_for(0.0);
  CHECK(closed_form_reference(*b, ClosedForm::pure(3), 1.0)[3] == 1.0);
  // mixture c = (2, 3) on gamma = (0, 1).
  std::size_t g1 = 0;
  for (std::size_t k = 0; k < b->size(); ++k)
    if (std::abs(b->modes[k].gamma - 1.0) < 1e-12) {
      g1 = k;
      break;
    }
  const auto mix = closed_form_reference(*b, ClosedForm::mixture({0, g1}, {2.0, 3.0}), 0.1);
  CHECK(mix[0] == doctest::Approx(2.0));
  CHECK(mix[g1] == doctest::Approx(0.3));
  // exp_linear with gamma = 0.5, eps = 0.2 at t = 0.25.
  CHECK(closed_form_reference(*b, ClosedForm::exp_linear(1, 0.2), 0.25)[1] ==
        doctest::Approx(std::exp(-0.05) * 0.5).epsilon(1e-14));
}

TEST_CASE("right-hand sides") {
  const auto b = basis_for(0.0);
  std::vector<double> c(b->size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = 1.0 / (k + 1.0);
  const double tau = -0.7;

  const SpectralSystem free(b, Perturbation::none());
  const auto r0 = free.rhs(tau, c);
  for (std::size_t k = 0; k < c.size(); ++k) CHECK(r0[k] == doctest::Approx(b->modes[k].gamma * c[k]));

  const double eps = 0.15;
  const SpectralSystem lin(b, Perturbation::constant(eps));
  const auto r1 = lin.rhs(tau, c);
  for (std::size_t k = 0; k < c.size(); ++k)
    CHECK(r1[k] == doctest::Approx((b->modes[k].gamma - eps * std::exp(tau)) * c[k]).epsilon(1e-12));

  // A radial h = eps is the same forcing as the constant kind.
  const SpectralSystem rad(b, Perturbation::radial([&](double, double) { return eps; }, eps, 1.0, "flat"));
  const auto r2 = rad.rhs(tau, c);
  for (std::size_t k = 0; k < c.size(); ++k) CHECK(r2[k] == doctest::Approx(r1[k]).epsilon(1e-12));

  // The general path with a radial function agrees with the radial path.
  auto h = [](double r, double t) { return 0.1 / (1.0 + r * r) + 0.05 * t; };
  const SpectralSystem hr(b, Perturbation::radial(h, 0.15, 1.0, "h"), CubatureOptions{128, 8});
  const SpectralSystem hg(b, Perturbation::general([&](std::span<const double> x, double t) { return h(r_of(x), t); },
                                                   0.15, 1.0, "h"),
                          CubatureOptions{128, 12});
  const auto Fr = hr.forcing(tau, c), Fg = hg.forcing(tau, c);
  for (std::size_t k = 0; k < c.size(); ++k) CHECK(std::abs(Fr[k] - Fg[k]) < 1e-9);
}

TEST_CASE("semilinear forcing respects parity") {
  const auto b = basis_for(0.0);
  const SpectralSystem sys(b, Perturbation::semilinear(0.1, 2.0));
  std::vector<double> c(b->size(), 0.0);
  c[0] = 1.0;
  const auto F = sys.forcing(-0.5, c);
  CHECK(std::abs(F[0]) > 1e-6);
  // Ground data is radial: only l = 0 modes receive forcing.
  for (std::size_t k = 0; k < b->size(); ++k)
    if (b->modes[k].j != 0) CHECK(std::abs(F[k]) < 1e-12);
}

TEST_CASE("admissibility of forcing terms") {
  CHECK(check_h_admissible(Perturbation::constant(0.2), 3).admissible);
  CHECK(check_h_admissible(Perturbation::radial([](double r, double) { return 1.0 / r; }, 1.0, 1.0, "inv"), 3).admissible);
  const auto bad = Perturbation::radial([](double r, double) { return 1.0 / (r * r); }, 10.0, 1.0, "inv2");
  const AdmissibilityReport rep = check_h_admissible(bad, 3);
  CHECK_FALSE(rep.admissible);
  CHECK_FALSE(rep.failures.empty());
  CHECK_THROWS_AS(SpectralSystem(basis_for(0.0), bad), ConfigError);
  // Semilinear exponent must lie below 2* - 1 = 5 in 3-D.
  CHECK_THROWS_AS(SpectralSystem(basis_for(0.0), Perturbation::semilinear(0.1, 6.0)), ConfigError);
}

TEST_CASE("initial data projection") {
  const auto b = basis_for(0.0);
  const InitialData pure = build_initial(*b, {{4, 1.0}});
  for (std::size_t k = 0; k < b->size(); ++k) CHECK(pure.coeffs[k] == (k == 4 ? 1.0 : 0.0));

  std::vector<double> vals;
  auto two_modes = [&](std::span<const double> x) {
    eval_basis(*b, x, vals);
    return vals[1] + 2.0 * vals[5];
  };
  const InitialData mix = build_initial(*b, two_modes);
  for (std::size_t k = 0; k < b->size(); ++k)
    CHECK(std::abs(mix.coeffs[k] - (k == 1 ? 1.0 : k == 5 ? 2.0 : 0.0)) < 1e-10);
  CHECK(mix.residual < 1e-6);  // square root of a cancelling difference

  // Gaussian data: per-coefficient oracle at doubled resolution.
  const auto wide = basis_for(0.0, 32);
  auto gauss = [](std::span<const double> x) { return std::exp(-r_of(x) * r_of(x) / 128.0); };
  const InitialData g = build_initial(*wide, gauss, 64, 16);
  const InitialData g2 = build_initial(*wide, gauss, 128, 32);
  for (std::size_t k = 0; k < wide->size(); ++k) CHECK(std::abs(g.coeffs[k] - g2.coeffs[k]) < 1e-12);
  // <e^{-|x|^2/128}, (4 pi)^{-3/4}> = (128 pi/33)^{3/2} / (4 pi)^{3/4}.
  CHECK(g.coeffs[0] == doctest::Approx(std::pow(128.0 * M_PI / 33.0, 1.5) / std::pow(4.0 * M_PI, 0.75)).epsilon(1e-12));
  CHECK(g.residual < 1e-3);
  CHECK_THROWS_AS(build_initial(*b, [](std::span<const double> x) { return x[0] * x[0] * x[0] * x[0] * x[0] * x[0] * x[0]; }),
                  TruncationError);
}

TEST_CASE("backward integration") {
  const auto b = basis_for(0.0);
  const double eps = 0.1;
  auto sys = std::make_shared<SpectralSystem>(b, Perturbation::constant(eps));
  const ClosedForm cf = ClosedForm::exp_linear(1, eps);
  const Trajectory tr = integrate_backward(sys, closed_form_initial(*b, cf));
  CHECK(tr.tau.front() == 0.0);
  CHECK(tr.tau_min() == doctest::Approx(std::log(1e-3)).epsilon(1e-15));
  CHECK(tr.halving_error < 1e-8);
  double err = 0.0;
  for (std::size_t r = 0; r < tr.rows(); ++r) {
    const auto ref = closed_form_reference(*b, cf, tr.t(r));
    for (std::size_t k = 0; k < ref.size(); ++k) err = std::max(err, std::abs(ref[k] - tr.coeffs[r][k]));
  }
  CHECK(err < 1e-10);
  // Interior states come from a partial step.
  const double tq = -1.2345;
  CHECK(tr.state_at(tq)[1] == doctest::Approx(closed_form_reference(*b, cf, std::exp(tq))[1]).epsilon(1e-11));

  IntegrationOptions bad;
  bad.dtau = 0.5;
  CHECK_THROWS_AS(integrate_backward(sys, closed_form_initial(*b, cf), bad), ConfigError);
}

TEST_CASE("rescaled forcing") {
  const auto p = Perturbation::radial([](double r, double t) { return 1.0 / (1.0 + r) + t; }, 2.0, 1.0, "h");
  const auto q = p.rescaled(0.5);
  const double x[3] = {0.3, 0.4, 1.2};
  const double y[3] = {0.15, 0.2, 0.6};
  CHECK(q.h(x, 0.8) == doctest::Approx(0.25 * p.h(y, 0.2)));
}
