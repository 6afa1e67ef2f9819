#include "oufreq/ou_basis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "oufreq/error.hpp"
#include "oufreq/quadrature.hpp"

namespace oufreq {

namespace {

const RadialRule& cached_rule(double a, int n) {
  static std::mutex mu;
  static std::map<std::pair<double, int>, RadialRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({a, n});
  if (it == cache.end()) it = cache.emplace(std::make_pair(a, n), laguerre_rule(a, n)).first;
  return it->second;
}

double laguerre_sum(const RadialRule& rule, const Polynomial& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * q(rule.nodes[i]);
  return s;
}

double laguerre_abs_sum(const RadialRule& rule, const Polynomial& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * std::abs(q(rule.nodes[i]));
  return s;
}

// Q(s) with f'(r) = r^{-alpha-1} Q(r^2/4), f(r) = r^{-alpha} P(r^2/4).
Polynomial radial_derivative_poly(const OUMode& m) {
  Polynomial two_s_dp = Polynomial{{0.0, 2.0}} * m.poly.derivative();
  return two_s_dp + (-m.alpha) * m.poly;
}

// Raw (unnormalized) radial pairings for modes sharing or not sharing j.
double raw_l2(const OUMode& a, const OUMode& b, int N) {
  return radial_polynomial_integral(a.poly * b.poly, N, a.alpha + b.alpha, 0.0);
}
double raw_inv_r2(const OUMode& a, const OUMode& b, int N) {
  return radial_polynomial_integral(a.poly * b.poly, N, a.alpha + b.alpha, -2.0);
}
double raw_grad_r(const OUMode& a, const OUMode& b, int N) {
  return radial_polynomial_integral(radial_derivative_poly(a) * radial_derivative_poly(b), N, a.alpha + b.alpha, -2.0);
}

void certify_coverage(const AngularSpectrum& spec, double gamma_max, const char* who) {
  const double top_alpha = alpha_from_mu(spec.eigenvalues.back(), spec.N);
  if (!(-0.5 * top_alpha > gamma_max)) {
    std::ostringstream msg;
    msg << who << ": angular spectrum truncated too early; the last computed tower starts at gamma = "
        << -0.5 * top_alpha << " which does not exceed " << gamma_max;
    throw TruncationError(msg.str());
  }
}

OUBasis build(std::shared_ptr<const AngularSpectrum> spec, double gamma_max) {
  require_positivity(*spec);
  certify_coverage(*spec, gamma_max, "enumerate_modes");
  OUBasis basis;
  basis.N = spec->N;
  for (std::size_t j = 0; j < spec->size(); ++j) {
    const double mu = spec->eigenvalues[j];
    const double alpha = alpha_from_mu(mu, spec->N);
    for (int n = 0; gamma_mk(n, alpha) <= gamma_max; ++n) {
      OUMode m;
      m.j = j;
      m.n = n;
      m.mu = mu;
      m.alpha = alpha;
      m.gamma = gamma_mk(n, alpha);
      m.poly = p_poly(n, alpha, spec->N);
      m.norm_L = std::sqrt(raw_l2(m, m, spec->N));
      basis.modes.push_back(std::move(m));
    }
  }
  std::sort(basis.modes.begin(), basis.modes.end(), [](const OUMode& a, const OUMode& b) {
    if (a.gamma != b.gamma) return a.gamma < b.gamma;
    if (a.j != b.j) return a.j < b.j;
    return a.n < b.n;
  });
  basis.spectrum = std::move(spec);
  return basis;
}

void certify(OUBasis& basis) {
  const std::size_t K = basis.size();
  double gram = 0.0, bil = 0.0;
  for (std::size_t p = 0; p < K; ++p)
    for (std::size_t q = p; q < K; ++q) {
      const double g = inner_L(basis, p, q);
      const double b = bilinear_B(basis, p, q);
      const double target_g = p == q ? 1.0 : 0.0;
      gram = std::max(gram, std::abs(g - target_g));
      bil = std::max(bil, std::abs(b - basis.modes[q].gamma * target_g));
    }
  basis.gram_residual = gram;
  basis.bilinear_residual = bil;
  if (gram >= 1e-8 || bil >= 1e-6) {
    std::ostringstream msg;
    msg << "basis certification failed: Gram residual " << gram << ", weak eigen-residual " << bil;
    throw AccuracyError(msg.str());
  }
}

}  // namespace

std::vector<double> OUBasis::gammas() const {
  std::vector<double> g;
  g.reserve(modes.size());
  for (const auto& m : modes) g.push_back(m.gamma);
  return g;
}

double radial_polynomial_integral(const Polynomial& q, int N, double sigma, double radial_power) {
  const double a = 0.5 * N - 1.0 + 0.5 * radial_power - 0.5 * sigma;
  if (!(a > -1.0)) throw SingularityError("radial integral diverges at the origin");
  const int n = std::max(1, q.degree() / 2 + 1);
  const RadialRule& r1 = cached_rule(a, n);
  const RadialRule& r2 = cached_rule(a, n + 4);
  const double v1 = laguerre_sum(r1, q);
  const double v2 = laguerre_sum(r2, q);
  const double scale = laguerre_abs_sum(r2, q);
  if (std::abs(v1 - v2) > 1e-11 * std::max(scale, 1e-300)) {
    std::ostringstream msg;
    msg << "radial quadrature unstable under refinement: " << v1 << " vs " << v2;
    throw NumericError(msg.str());
  }
  return std::pow(2.0, N - 1 + radial_power - sigma) * v2;
}

OUBasis enumerate_modes(std::shared_ptr<const AngularSpectrum> spec, double gamma_max) {
  OUBasis basis = build(std::move(spec), gamma_max);
  certify(basis);
  return basis;
}

OUBasis first_modes(std::shared_ptr<const AngularSpectrum> spec, std::size_t K) {
  require_positivity(*spec);
  // Largest certified level: strictly below the start of the last tower.
  const double top = -0.5 * alpha_from_mu(spec->eigenvalues.back(), spec->N);
  OUBasis all = build(spec, std::nextafter(top, -1e300));
  if (all.size() < K) {
    std::ostringstream msg;
    msg << "first_modes: only " << all.size() << " modes are certified by the angular spectrum, " << K
        << " requested";
    throw TruncationError(msg.str());
  }
  all.modes.resize(K);
  certify(all);
  return all;
}

Multiplicity multiplicity(double gamma, const AngularSpectrum& spec) {
  certify_coverage(spec, gamma, "multiplicity");
  Multiplicity out;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const double v = gamma + 0.5 * alpha_from_mu(spec.eigenvalues[j], spec.N);
    const double m = std::round(v);
    const double d = std::abs(v - m);
    if (m < 0) continue;
    if (d <= 1e-9) {
      out.J.emplace_back(static_cast<int>(m), j);
      ++out.count;
    } else if (d < 1e-6) {
      std::ostringstream msg;
      msg << "gamma = " << gamma << " is within " << d << " of the tower of angular index " << j
          << "; cannot decide membership";
      throw DegeneracyError(msg.str());
    }
  }
  return out;
}

double eval_V(const OUMode& mode, const AngularSpectrum& spec, std::span<const double> x) {
  double r2 = 0.0;
  for (double c : x) r2 += c * c;
  const double r = std::sqrt(r2);
  if (r == 0.0) {
    if (mode.alpha > 0) throw SingularityError("eval_V: V is singular at the origin (alpha > 0)");
    if (mode.alpha < 0) return 0.0;
    std::vector<double> pole(x.size(), 0.0);
    pole.back() = 1.0;
    return mode.poly(0.0) * eval_psi(spec, mode.j, pole);
  }
  std::vector<double> theta(x.begin(), x.end());
  for (double& c : theta) c /= r;
  return std::pow(r, -mode.alpha) * mode.poly(0.25 * r2) * eval_psi(spec, mode.j, theta);
}

std::vector<double> eval_grad_V(const OUMode& mode, const AngularSpectrum& spec, std::span<const double> x) {
  double r2 = 0.0;
  for (double c : x) r2 += c * c;
  const double r = std::sqrt(r2);
  if (r == 0.0) throw SingularityError("eval_grad_V: gradient requested at the origin");
  const std::size_t N = x.size();
  std::vector<double> theta(x.begin(), x.end());
  for (double& c : theta) c /= r;
  std::vector<double> psi, gpsi;
  eval_psi_all_with_gradient(spec, theta, psi, gpsi);
  const double s = 0.25 * r2;
  const double f = std::pow(r, -mode.alpha) * mode.poly(s);
  const double fp = std::pow(r, -mode.alpha - 1.0) * (-mode.alpha * mode.poly(s) + 2.0 * s * mode.poly.derivative()(s));
  std::vector<double> g(N);
  for (std::size_t d = 0; d < N; ++d) g[d] = fp * psi[mode.j] * theta[d] + f / r * gpsi[N * mode.j + d];
  return g;
}

void eval_basis(const OUBasis& basis, std::span<const double> x, std::vector<double>& vals,
                std::vector<double>* grads) {
  const std::size_t K = basis.size();
  const std::size_t N = x.size();
  double r2 = 0.0;
  for (double c : x) r2 += c * c;
  const double r = std::sqrt(r2);
  if (r == 0.0) throw SingularityError("eval_basis: evaluation at the origin");
  std::vector<double> theta(x.begin(), x.end());
  for (double& c : theta) c /= r;
  std::vector<double> psi, gpsi;
  if (grads)
    eval_psi_all_with_gradient(*basis.spectrum, theta, psi, gpsi);
  else
    psi = eval_psi_all(*basis.spectrum, theta);
  const double s = 0.25 * r2;
  vals.assign(K, 0.0);
  if (grads) grads->assign(K * N, 0.0);
  for (std::size_t p = 0; p < K; ++p) {
    const OUMode& m = basis.modes[p];
    const double rp = std::pow(r, -m.alpha) / m.norm_L;
    const double P = m.poly(s);
    vals[p] = rp * P * psi[m.j];
    if (grads) {
      const double fp = rp / r * (-m.alpha * P + 2.0 * s * m.poly.derivative()(s));
      const double f_over_r = rp * P / r;
      for (std::size_t d = 0; d < N; ++d)
        (*grads)[p * N + d] = fp * psi[m.j] * theta[d] + f_over_r * gpsi[N * m.j + d];
    }
  }
}

double inner_L(const OUBasis& basis, std::size_t p, std::size_t q) {
  const OUMode& a = basis.modes[p];
  const OUMode& b = basis.modes[q];
  if (a.j != b.j) return 0.0;
  return raw_l2(a, b, basis.N) / (a.norm_L * b.norm_L);
}

double bilinear_B(const OUBasis& basis, std::size_t p, std::size_t q) {
  const OUMode& a = basis.modes[p];
  const OUMode& b = basis.modes[q];
  if (a.j != b.j) return 0.0;
  return (raw_grad_r(a, b, basis.N) + a.mu * raw_inv_r2(a, b, basis.N)) / (a.norm_L * b.norm_L);
}

double energy_E(const OUBasis& basis, std::size_t p, std::size_t q) {
  const OUMode& a = basis.modes[p];
  const OUMode& b = basis.modes[q];
  const double S = basis.spectrum->stiffness(a.j, b.j);
  double e = 0.0;
  if (a.j == b.j) e += raw_grad_r(a, b, basis.N);
  if (S != 0.0) e += S * raw_inv_r2(a, b, basis.N);
  return e / (a.norm_L * b.norm_L);
}

double hardy_R(const OUBasis& basis, std::size_t p, std::size_t q) {
  const OUMode& a = basis.modes[p];
  const OUMode& b = basis.modes[q];
  if (a.j != b.j) return 0.0;
  return raw_inv_r2(a, b, basis.N) / (a.norm_L * b.norm_L);
}

namespace {
template <class F>
Matrix pair_matrix(const OUBasis& basis, std::size_t K, F&& f) {
  if (K == 0 || K > basis.size()) K = basis.size();
  Matrix m(K, K);
  for (std::size_t p = 0; p < K; ++p)
    for (std::size_t q = p; q < K; ++q) m(p, q) = m(q, p) = f(basis, p, q);
  return m;
}
}  // namespace

Matrix gram_matrix(const OUBasis& basis, std::size_t K) { return pair_matrix(basis, K, inner_L); }
Matrix bilinear_matrix(const OUBasis& basis, std::size_t K) { return pair_matrix(basis, K, bilinear_B); }
Matrix energy_matrix(const OUBasis& basis, std::size_t K) { return pair_matrix(basis, K, energy_E); }
Matrix hardy_matrix(const OUBasis& basis, std::size_t K) { return pair_matrix(basis, K, hardy_R); }

}  // namespace oufreq
