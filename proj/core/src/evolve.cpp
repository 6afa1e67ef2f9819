#include "oufreq/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oufreq/error.hpp"

namespace oufreq {

// ---------------------------------------------------------------- Perturbation

Perturbation Perturbation::none() { return {}; }

Perturbation Perturbation::constant(double eps) {
  Perturbation p;
  p.kind = Kind::constant;
  p.epsilon = eps;
  p.C_h = std::abs(eps);
  p.eps_h = 1.0;
  std::ostringstream os;
  os << "constant(" << eps << ")";
  p.label = os.str();
  p.admissibility_checked = true;  // |h| = C_h satisfies the bound trivially
  return p;
}

Perturbation Perturbation::radial(std::function<double(double, double)> h, double C_h, double eps_h,
                                  std::string label) {
  Perturbation p;
  p.kind = Kind::radial;
  p.h_radial = std::move(h);
  p.C_h = C_h;
  p.eps_h = eps_h;
  p.label = std::move(label);
  return p;
}

Perturbation Perturbation::general(std::function<double(std::span<const double>, double)> h, double C_h,
                                   double eps_h, std::string label) {
  Perturbation p;
  p.kind = Kind::general;
  p.h_general = std::move(h);
  p.C_h = C_h;
  p.eps_h = eps_h;
  p.label = std::move(label);
  return p;
}

Perturbation Perturbation::semilinear(double eps, double pw) {
  Perturbation p;
  p.kind = Kind::semilinear;
  p.epsilon = eps;
  p.p = pw;
  std::ostringstream os;
  os << "semilinear(" << eps << "," << pw << ")";
  p.label = os.str();
  return p;
}

double Perturbation::h(std::span<const double> x, double t) const {
  switch (kind) {
    case Kind::none: return 0.0;
    case Kind::constant: return epsilon;
    case Kind::radial: {
      double r2 = 0.0;
      for (double c : x) r2 += c * c;
      return h_radial(std::sqrt(r2), t);
    }
    case Kind::general: return h_general(x, t);
    case Kind::semilinear: break;
  }
  throw ConfigError("Perturbation::h: the semilinear forcing has no potential form");
}

Perturbation Perturbation::rescaled(double lambda) const {
  Perturbation q = *this;
  const double l2 = lambda * lambda;
  switch (kind) {
    case Kind::none: break;
    case Kind::constant:
    case Kind::semilinear: q.epsilon = l2 * epsilon; break;
    case Kind::radial: {
      auto h = h_radial;
      q.h_radial = [h, lambda, l2](double r, double t) { return l2 * h(lambda * r, l2 * t); };
      break;
    }
    case Kind::general: {
      auto h = h_general;
      q.h_general = [h, lambda, l2](std::span<const double> x, double t) {
        std::vector<double> y(x.begin(), x.end());
        for (double& c : y) c *= lambda;
        return l2 * h(y, l2 * t);
      };
      break;
    }
  }
  if (kind == Kind::constant) q.C_h = std::abs(q.epsilon);
  else q.C_h = C_h * std::max(l2, std::pow(lambda, eps_h));
  std::ostringstream os;
  os << label << "@lambda=" << lambda;
  q.label = os.str();
  return q;
}

AdmissibilityReport check_h_admissible(const Perturbation& pert, int N, int sample_count, double t_min, int n_r,
                                       int n_polar) {
  AdmissibilityReport rep;
  if (pert.kind == Perturbation::Kind::none) return rep;
  if (pert.kind == Perturbation::Kind::semilinear) {
    const double crit = 2.0 * N / (N - 2.0) - 1.0;
    rep.samples = 1;
    if (!(pert.p > 1.0 && pert.p < crit)) {
      rep.admissible = false;
      std::ostringstream os;
      os << "exponent p = " << pert.p << " outside (1, " << crit << ")";
      rep.failures.push_back(os.str());
    }
    return rep;
  }
  if (!(pert.eps_h > 0.0 && pert.eps_h < 2.0)) throw ConfigError("check_h_admissible: eps_h must lie in (0,2)");
  const ProductRule rule = make_product_rule(N, n_r, n_polar, 0.0);
  const int nt = std::max(sample_count, 2);
  for (int it = 0; it < nt; ++it) {
    const double t = std::exp(std::log(t_min) * (1.0 - static_cast<double>(it) / (nt - 1)));
    for_each_node(rule, t, [&](std::span<const double> x, double) {
      double r2 = 0.0;
      for (double c : x) r2 += c * c;
      const double r = std::sqrt(r2);
      const double bound = pert.C_h * (1.0 + std::pow(r, -2.0 + pert.eps_h));
      const double h = pert.h(x, t);
      ++rep.samples;
      if (!(std::abs(h) <= bound * (1.0 + 1e-12))) {
        rep.admissible = false;
        if (rep.failures.size() < 8) {
          std::ostringstream os;
          os << "|h| = " << std::abs(h) << " > " << bound << " at |x| = " << r << ", t = " << t;
          rep.failures.push_back(os.str());
        }
      }
    });
  }
  return rep;
}

// -------------------------------------------------------------- SpectralSystem

SpectralSystem::SpectralSystem(std::shared_ptr<const OUBasis> basis, Perturbation pert, CubatureOptions opts)
    : basis_(std::move(basis)), pert_(std::move(pert)), opts_(opts) {
  const OUBasis& B = *basis_;
  const std::size_t K = B.size();
  gamma_ = B.gammas();

  if (pert_.kind != Perturbation::Kind::none && !pert_.admissibility_checked) {
    const AdmissibilityReport rep = check_h_admissible(pert_, B.N);
    if (!rep.admissible) {
      std::string msg = "perturbation '" + pert_.label + "' fails the admissibility bound";
      for (const auto& f : rep.failures) msg += "; " + f;
      throw ConfigError(msg);
    }
    pert_.admissibility_checked = true;
  }

  if (pert_.kind == Perturbation::Kind::radial) {
    std::vector<std::size_t> tower_of(B.spectrum->size(), static_cast<std::size_t>(-1));
    for (std::size_t p = 0; p < K; ++p) {
      const OUMode& m = B.modes[p];
      if (tower_of[m.j] == static_cast<std::size_t>(-1)) {
        tower_of[m.j] = towers_.size();
        Tower tw;
        const double sigma = 2.0 * m.alpha;
        const RadialRule rule = laguerre_rule(0.5 * B.N - 1.0 - 0.5 * sigma, opts_.n_r);
        tw.prefactor = std::pow(2.0, B.N - 1 - sigma);
        tw.weights = rule.weights;
        for (double s : rule.nodes) tw.r_unit.push_back(2.0 * std::sqrt(s));
        towers_.push_back(std::move(tw));
      }
      towers_[tower_of[m.j]].members.push_back(p);
    }
    for (auto& tw : towers_) {
      const std::size_t n = tw.r_unit.size();
      tw.values.assign(tw.members.size() * n, 0.0);
      for (std::size_t a = 0; a < tw.members.size(); ++a) {
        const OUMode& m = B.modes[tw.members[a]];
        for (std::size_t i = 0; i < n; ++i) {
          const double s = 0.25 * tw.r_unit[i] * tw.r_unit[i];
          tw.values[a * n + i] = m.poly(s) / m.norm_L;
        }
      }
    }
  } else if (pert_.kind == Perturbation::Kind::general || pert_.kind == Perturbation::Kind::semilinear) {
    const ProductRule rule = make_product_rule(B.N, opts_.n_r, opts_.n_polar, 0.0);
    std::vector<double> vals;
    for_each_node(rule, 1.0, [&](std::span<const double> x, double w) {
      eval_basis(B, x, vals);
      node_x_.insert(node_x_.end(), x.begin(), x.end());
      node_w_.push_back(w);
      node_V_.insert(node_V_.end(), vals.begin(), vals.end());
    });
  }
}

void SpectralSystem::radial_forcing(double t, std::span<const double> c, std::span<double> F) const {
  const double st = std::sqrt(t);
  std::vector<double> hv;
  for (const auto& tw : towers_) {
    const std::size_t n = tw.r_unit.size();
    hv.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double v = 0.0;
      for (std::size_t a = 0; a < tw.members.size(); ++a) v += tw.values[a * n + i] * c[tw.members[a]];
      hv[i] = tw.weights[i] * pert_.h_radial(st * tw.r_unit[i], t) * v;
    }
    for (std::size_t a = 0; a < tw.members.size(); ++a) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += hv[i] * tw.values[a * n + i];
      F[tw.members[a]] = tw.prefactor * s;
    }
  }
}

void SpectralSystem::nodal_forcing(double t, std::span<const double> c, std::span<double> F) const {
  const std::size_t K = size();
  const std::size_t N = static_cast<std::size_t>(basis_->N);
  const std::size_t nodes = node_w_.size();
  const double st = std::sqrt(t);
  std::fill(F.begin(), F.end(), 0.0);
  std::vector<double> y(N);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double* Vi = node_V_.data() + i * K;
    double v = 0.0;
    for (std::size_t k = 0; k < K; ++k) v += Vi[k] * c[k];
    double f;
    if (pert_.kind == Perturbation::Kind::semilinear) {
      f = pert_.epsilon * std::pow(std::abs(v), pert_.p - 1.0) * v;
    } else {
      for (std::size_t d = 0; d < N; ++d) y[d] = st * node_x_[i * N + d];
      f = pert_.h_general(y, t) * v;
    }
    if (!std::isfinite(f)) throw SingularityError("forcing not finite at a cubature node");
    const double wf = node_w_[i] * f;
    for (std::size_t k = 0; k < K; ++k) F[k] += wf * Vi[k];
  }
}

void SpectralSystem::forcing(double tau, std::span<const double> c, std::span<double> F) const {
  const double t = std::exp(tau);
  switch (pert_.kind) {
    case Perturbation::Kind::none: std::fill(F.begin(), F.end(), 0.0); return;
    case Perturbation::Kind::constant:
      for (std::size_t k = 0; k < c.size(); ++k) F[k] = pert_.epsilon * c[k];
      return;
    case Perturbation::Kind::radial: radial_forcing(t, c, F); return;
    case Perturbation::Kind::general:
    case Perturbation::Kind::semilinear: nodal_forcing(t, c, F); return;
  }
}

std::vector<double> SpectralSystem::forcing(double tau, std::span<const double> c) const {
  std::vector<double> F(c.size());
  forcing(tau, c, F);
  return F;
}

void SpectralSystem::rhs(double tau, std::span<const double> c, std::span<double> out) const {
  forcing(tau, c, out);
  const double et = std::exp(tau);
  for (std::size_t k = 0; k < c.size(); ++k) out[k] = gamma_[k] * c[k] - et * out[k];
}

std::vector<double> SpectralSystem::rhs(double tau, std::span<const double> c) const {
  std::vector<double> out(c.size());
  rhs(tau, c, out);
  return out;
}

double SpectralSystem::pairing(double tau, std::span<const double> c) const {
  if (pert_.kind == Perturbation::Kind::none) return 0.0;
  const std::vector<double> F = forcing(tau, c);
  return std::exp(tau) * dot(F, c);
}

std::shared_ptr<SpectralSystem> SpectralSystem::rescaled(double lambda) const {
  return std::make_shared<SpectralSystem>(basis_, pert_.rescaled(lambda), opts_);
}

// ------------------------------------------------------------- initial data

InitialData build_initial(const OUBasis& basis, const std::vector<std::pair<std::size_t, double>>& entries) {
  InitialData d;
  d.coeffs.assign(basis.size(), 0.0);
  for (const auto& [k, v] : entries) {
    if (k >= basis.size()) throw ConfigError("build_initial: mode index outside the basis");
    d.coeffs[k] += v;
  }
  return d;
}

InitialData build_initial(const OUBasis& basis, const std::function<double(std::span<const double>)>& v, int n_r,
                          int n_polar) {
  const std::size_t K = basis.size();
  const ProductRule rule = make_product_rule(basis.N, n_r, n_polar, 0.0);
  InitialData d;
  d.coeffs.assign(K, 0.0);
  double norm2 = 0.0;
  std::vector<double> vals;
  std::size_t idx = 0;
  for_each_node(rule, 1.0, [&](std::span<const double> x, double w) {
    const double f = v(x);
    if (!std::isfinite(f)) {
      std::ostringstream os;
      os << "build_initial: data not finite at node " << idx;
      throw SingularityError(os.str());
    }
    eval_basis(basis, x, vals);
    for (std::size_t k = 0; k < K; ++k) d.coeffs[k] += w * f * vals[k];
    norm2 += w * f * f;
    ++idx;
  });
  double proj = 0.0;
  for (double c : d.coeffs) proj += c * c;
  d.residual = norm2 > 0.0 ? std::sqrt(std::max(0.0, norm2 - proj) / norm2) : 0.0;
  if (d.residual > 1e-3) {
    std::ostringstream os;
    os << "build_initial: data under-resolved by the basis, relative L residual " << d.residual;
    throw TruncationError(os.str());
  }
  return d;
}

// ---------------------------------------------------------------- integrator

namespace {

void rk4_step(const SpectralSystem& sys, double tau, double h, std::vector<double>& c, std::vector<double>& k1,
              std::vector<double>& k2, std::vector<double>& k3, std::vector<double>& k4, std::vector<double>& tmp) {
  const std::size_t K = c.size();
  sys.rhs(tau, c, k1);
  for (std::size_t i = 0; i < K; ++i) tmp[i] = c[i] + 0.5 * h * k1[i];
  sys.rhs(tau + 0.5 * h, tmp, k2);
  for (std::size_t i = 0; i < K; ++i) tmp[i] = c[i] + 0.5 * h * k2[i];
  sys.rhs(tau + 0.5 * h, tmp, k3);
  for (std::size_t i = 0; i < K; ++i) tmp[i] = c[i] + h * k3[i];
  sys.rhs(tau + h, tmp, k4);
  for (std::size_t i = 0; i < K; ++i) c[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

std::vector<std::vector<double>> march(const SpectralSystem& sys, std::vector<double> c, long steps, double dtau) {
  const std::size_t K = c.size();
  std::vector<double> k1(K), k2(K), k3(K), k4(K), tmp(K);
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(steps) + 1);
  rows.push_back(c);
  for (long s = 0; s < steps; ++s) {
    rk4_step(sys, -static_cast<double>(s) * dtau, -dtau, c, k1, k2, k3, k4, tmp);
    for (double v : c)
      if (!std::isfinite(v)) throw NumericError("integrate_backward: non-finite coefficient");
    rows.push_back(c);
  }
  return rows;
}

}  // namespace

Trajectory integrate_backward(std::shared_ptr<const SpectralSystem> system, std::vector<double> c0,
                              const IntegrationOptions& opts) {
  if (!(opts.tau_min < 0.0)) throw ConfigError("integrate_backward: tau_min must be negative");
  if (opts.tau_min < std::log(1e-6) - 1e-12) throw ConfigError("integrate_backward: tau_min below log(1e-6)");
  if (!(opts.dtau > 0.0 && opts.dtau <= 0.01)) throw ConfigError("integrate_backward: dtau must lie in (0, 0.01]");
  if (c0.size() != system->size()) throw ConfigError("integrate_backward: initial data size mismatch");

  const long steps = static_cast<long>(std::ceil(-opts.tau_min / opts.dtau - 1e-9));
  const double dtau = -opts.tau_min / static_cast<double>(steps);

  Trajectory tr;
  tr.system = system;
  tr.dtau = dtau;
  tr.coeffs = march(*system, c0, steps, dtau);
  tr.tau.resize(tr.coeffs.size());
  for (std::size_t k = 0; k < tr.tau.size(); ++k) tr.tau[k] = -static_cast<double>(k) * dtau;
  tr.tau.back() = opts.tau_min;

  if (opts.verify_halving) {
    const auto fine = march(*system, c0, 2 * steps, 0.5 * dtau);
    double diff = 0.0, scale = 1.0;
    for (std::size_t k = 0; k < tr.coeffs.size(); ++k)
      for (std::size_t i = 0; i < c0.size(); ++i) {
        diff = std::max(diff, std::abs(tr.coeffs[k][i] - fine[2 * k][i]));
        scale = std::max(scale, std::abs(fine[2 * k][i]));
      }
    tr.halving_error = diff / scale;
    if (tr.halving_error > opts.halving_tolerance) {
      // RK4: the error falls by 16 per halving.
      const double suggested = dtau * std::pow(opts.halving_tolerance / tr.halving_error / 2.0, 0.25);
      std::ostringstream os;
      os << "integrate_backward: step-halving disagreement " << tr.halving_error << " exceeds "
         << opts.halving_tolerance << "; try dtau <= " << suggested;
      throw AccuracyError(os.str());
    }
  }

  // Truncation indicator: weight of the highest eigenvalue level at tau_min.
  const OUBasis& B = system->basis();
  const double top = B.modes.back().gamma;
  const auto& last = tr.coeffs.back();
  double top_abs = 0.0;
  for (std::size_t k = 0; k < B.size(); ++k)
    if (B.modes[k].gamma == top) top_abs = std::max(top_abs, std::abs(last[k]));
  const double nrm = norm2(last);
  tr.truncation_ratio = nrm > 0.0 ? top_abs / nrm : 0.0;
  tr.truncation_flagged = tr.truncation_ratio > opts.truncation_tolerance;
  return tr;
}

std::vector<double> Trajectory::state_at(double tau_query) const {
  if (tau_query > 1e-14 || tau_query < tau.back() - 1e-12)
    throw ConfigError("Trajectory::state_at: tau outside the stored range");
  std::size_t row = static_cast<std::size_t>(std::floor(-tau_query / dtau + 1e-9));
  row = std::min(row, rows() - 1);
  const double h = tau_query - tau[row];
  std::vector<double> c = coeffs[row];
  if (std::abs(h) <= 1e-15) return c;
  const std::size_t K = c.size();
  std::vector<double> k1(K), k2(K), k3(K), k4(K), tmp(K);
  rk4_step(*system, tau[row], h, c, k1, k2, k3, k4, tmp);
  return c;
}

std::vector<double> Trajectory::dcdt(std::size_t row) const {
  std::vector<double> d = system->rhs(tau[row], coeffs[row]);
  const double inv_t = 1.0 / t(row);
  for (double& v : d) v *= inv_t;
  return d;
}

// ---------------------------------------------------------------- closed forms

ClosedForm ClosedForm::pure(std::size_t k) { return {Family::pure, {k}, {1.0}, 0.0}; }

ClosedForm ClosedForm::mixture(std::vector<std::size_t> modes, std::vector<double> weights) {
  if (modes.size() != weights.size()) throw ConfigError("mixture: modes and weights differ in length");
  return {Family::mixture, std::move(modes), std::move(weights), 0.0};
}

ClosedForm ClosedForm::exp_linear(std::size_t k, double eps) { return {Family::exp_linear, {k}, {1.0}, eps}; }

std::vector<double> closed_form_reference(const OUBasis& basis, const ClosedForm& family, double t) {
  std::vector<double> c(basis.size(), 0.0);
  for (std::size_t i = 0; i < family.modes.size(); ++i) {
    const std::size_t k = family.modes[i];
    if (k >= basis.size()) throw ConfigError("closed_form_reference: mode index outside the basis");
    double v = family.weights[i] * std::pow(t, basis.modes[k].gamma);
    if (family.family == ClosedForm::Family::exp_linear) v *= std::exp(-family.epsilon * t);
    c[k] += v;
  }
  return c;
}

std::vector<double> closed_form_initial(const OUBasis& basis, const ClosedForm& family) {
  return closed_form_reference(basis, family, 1.0);
}

}  // namespace oufreq
