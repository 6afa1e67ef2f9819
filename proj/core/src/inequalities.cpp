#include "oufreq/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

#include <json.hpp>

#include "oufreq/error.hpp"
#include "oufreq/parallel.hpp"
#include "oufreq/quadrature.hpp"

namespace oufreq {

// --------------------------------------------------------------- TestFunction

double TestFunction::value(std::span<const double> x, double t) const {
  const double is = 1.0 / std::sqrt(t);
  const std::size_t N = x.size();
  switch (kind) {
    case Kind::constant: return c0;
    case Kind::bump: {
      double d2 = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double d = x[i] * is - center[i];
        d2 += d * d;
      }
      return std::exp(-0.5 * d2 / (width * width));
    }
    case Kind::poly_gauss: {
      double q = c0, y2 = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double yi = x[i] * is;
        y2 += yi * yi;
        q += b[i] * yi;
        for (std::size_t j = 0; j < N; ++j) q += A[i * N + j] * yi * x[j] * is;
      }
      return q * std::exp(-decay * y2);
    }
  }
  return 0.0;
}

void TestFunction::gradient(std::span<const double> x, double t, std::span<double> g) const {
  const double is = 1.0 / std::sqrt(t);
  const std::size_t N = x.size();
  switch (kind) {
    case Kind::constant: std::fill(g.begin(), g.end(), 0.0); return;
    case Kind::bump: {
      const double v = value(x, t);
      for (std::size_t i = 0; i < N; ++i) g[i] = -v * (x[i] * is - center[i]) / (width * width) * is;
      return;
    }
    case Kind::poly_gauss: {
      double q = c0, y2 = 0.0;
      std::vector<double> y(N);
      for (std::size_t i = 0; i < N; ++i) {
        y[i] = x[i] * is;
        y2 += y[i] * y[i];
      }
      for (std::size_t i = 0; i < N; ++i) {
        q += b[i] * y[i];
        for (std::size_t j = 0; j < N; ++j) q += A[i * N + j] * y[i] * y[j];
      }
      const double e = std::exp(-decay * y2);
      for (std::size_t i = 0; i < N; ++i) {
        double dq = b[i];
        for (std::size_t j = 0; j < N; ++j) dq += 2.0 * A[i * N + j] * y[j];
        g[i] = (dq - 2.0 * decay * y[i] * q) * e * is;
      }
      return;
    }
  }
}

double TestFunction::value_and_gradient(std::span<const double> x, double t, std::span<double> g) const {
  if (kind != Kind::bump) {
    gradient(x, t, g);
    return value(x, t);
  }
  const double is = 1.0 / std::sqrt(t);
  const std::size_t N = x.size();
  double d2 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    g[i] = x[i] * is - center[i];
    d2 += g[i] * g[i];
  }
  const double iw2 = 1.0 / (width * width);
  const double v = std::exp(-0.5 * d2 * iw2);
  for (std::size_t i = 0; i < N; ++i) g[i] *= -v * iw2 * is;
  return v;
}

std::string TestFunction::describe() const {
  std::ostringstream os;
  os.precision(6);
  switch (kind) {
    case Kind::constant: os << "constant " << c0; break;
    case Kind::bump: {
      double r = 0.0;
      for (double c : center) r += c * c;
      os << "bump |center|=" << std::sqrt(r) << " width=" << width;
      break;
    }
    case Kind::poly_gauss: os << "poly_gauss c0=" << c0 << " decay=" << decay; break;
  }
  return os.str();
}

std::vector<TestFunction> make_family(FamilyKind kind, int N, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = static_cast<std::size_t>(N);
  std::vector<TestFunction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const bool bump = kind == FamilyKind::bumps || (kind == FamilyKind::mixed && i % 2 == 0);
    TestFunction f;
    if (bump) {
      f.kind = TestFunction::Kind::bump;
      std::vector<double> dir(n);
      double nrm = 0.0;
      while (nrm < 1e-12) {
        nrm = 0.0;
        for (double& d : dir) {
          d = normal(rng);
          nrm += d * d;
        }
      }
      nrm = std::sqrt(nrm);
      // density proportional to 1/r on [1e-3, 2]
      const double r = 1e-3 * std::pow(2.0 / 1e-3, unit(rng));
      f.center.resize(n);
      for (std::size_t d = 0; d < n; ++d) f.center[d] = r * dir[d] / nrm;
      f.width = 0.4 * std::pow(5.0, unit(rng));
    } else {
      f.kind = TestFunction::Kind::poly_gauss;
      f.c0 = normal(rng);
      f.b.resize(n);
      for (double& v : f.b) v = normal(rng);
      f.A.assign(n * n, 0.0);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t c = a; c < n; ++c) f.A[a * n + c] = f.A[c * n + a] = 0.5 * normal(rng);
      f.decay = 0.1 * unit(rng);
    }
    out.push_back(std::move(f));
  }
  return out;
}

// ------------------------------------------------------------------ integrals

namespace {

int default_polar(int N) {
  switch (N) {
    case 3: return 12;
    case 4: return 6;
    default: return 4;
  }
}

const ProductRule& cached_rule(int N, int n_r, int n_polar, double p) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int, double>, ProductRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(N, n_r, n_polar, p);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, make_product_rule(N, n_r, n_polar, p)).first;
  return it->second;
}

struct Moments {
  double u2 = 0.0;     // int u^2 G
  double grad2 = 0.0;  // int |grad u|^2 G
  double x2u2 = 0.0;   // int |x|^2 u^2 G
  double R = 0.0;      // int u^2/|x|^2 G
  double Ra = 0.0;     // int a u^2/|x|^2 G
};

// One pass over the rule with radial power -2; smooth integrands g are
// fed as g |x|^2, which stays polynomial in s = |x|^2/4t.
Moments moments(const TestFunction& u, int N, double t, const QuadOptions& q, const AngularPotential* a = nullptr) {
  const int np = q.n_polar > 0 ? q.n_polar : default_polar(N);
  const ProductRule& rule = cached_rule(N, q.n_r, np, -2.0);
  const std::size_t na = rule.angular.size();
  std::vector<double> a_nodes(na, 0.0);
  if (a)
    for (std::size_t k = 0; k < na; ++k) a_nodes[k] = (*a)(rule.angular.point(k));
  Moments m;
  std::vector<double> g(static_cast<std::size_t>(N));
  std::size_t idx = 0;
  for_each_node(rule, t, [&](std::span<const double> x, double w) {
    const double v = u.value_and_gradient(x, t, g);
    double gg = 0.0, r2 = 0.0;
    for (int d = 0; d < N; ++d) {
      gg += g[static_cast<std::size_t>(d)] * g[static_cast<std::size_t>(d)];
      r2 += x[static_cast<std::size_t>(d)] * x[static_cast<std::size_t>(d)];
    }
    const double v2 = v * v;
    m.u2 += w * r2 * v2;
    m.grad2 += w * r2 * gg;
    m.x2u2 += w * r2 * r2 * v2;
    m.R += w * v2;
    m.Ra += w * a_nodes[idx % na] * v2;
    ++idx;
  });
  return m;
}

}  // namespace

double hardy_parabolic(const TestFunction& u, int N, double t, const QuadOptions& q) {
  const Moments m = moments(u, N, t, q);
  const double lhs = m.R;
  const double rhs = m.u2 / ((N - 2.0) * t) + 4.0 / ((N - 2.0) * (N - 2.0)) * m.grad2;
  return (rhs - lhs) / rhs;
}

double hardy_anisotropic(const TestFunction& u, const AngularSpectrum& spec, double t, const QuadOptions& q) {
  require_positivity(spec);
  const int N = spec.N;
  QuadOptions qq = q;
  if (qq.n_polar == 0 && N == 3 && !(spec.potential.kind() == AngularPotential::Kind::constant)) qq.n_polar = 24;
  const Moments m = moments(u, N, t, qq, &spec.potential);
  const double R = m.R, Ra = m.Ra;
  const double lhs = m.grad2 - Ra + (N - 2.0) / (4.0 * t) * m.u2;
  const double rhs = (spec.eigenvalues.front() + 0.25 * (N - 2.0) * (N - 2.0)) * R;
  const double scale = m.grad2 + std::abs(Ra) + (N - 2.0) / (4.0 * t) * m.u2;
  return (lhs - rhs) / scale;
}

double x2_bound(const TestFunction& u, int N, const QuadOptions& q) {
  const Moments m = moments(u, N, 1.0, q);
  const double rhs = m.grad2 + 0.25 * N * m.u2;
  return (rhs - m.x2u2 / 16.0) / rhs;
}

double sobolev_ratio(const TestFunction& u, int N, double s, double t, const QuadOptions& q) {
  const double s_max = 2.0 * N / (N - 2.0);
  if (!(s >= 2.0 && s <= s_max)) throw ConfigError("sobolev_ratio: s outside [2, 2N/(N-2)]");
  const int np = q.n_polar > 0 ? q.n_polar : default_polar(N);
  const ProductRule& rule = cached_rule(N, q.n_r, np, 0.0);
  // G^{s/2}(x,t) = t^{-Ns/4} kappa^{N/2} G(x,kappa), kappa = 2t/s
  const double kappa = 2.0 * t / s;
  const double num_int = std::pow(t, -0.25 * N * s) * std::pow(kappa, 0.5 * N) *
                         integrate_G(rule, [&](std::span<const double> x) { return std::pow(std::abs(u.value(x, t)), s); },
                                     kappa);
  const Moments m = moments(u, N, t, q);
  const double h2 = t * m.grad2 + m.u2;
  return std::pow(num_int, 2.0 / s) / (std::pow(t, -(N / s) * (s - 2.0) / 2.0) * h2);
}

double hardy_anisotropic_mode(const OUBasis& basis, std::size_t p) {
  const double c = (basis.N - 2) / 4.0;
  const double B = bilinear_B(basis, p, p);
  const double R = hardy_R(basis, p, p);
  const double mu1 = basis.spectrum->eigenvalues.front();
  const double lhs = B + c;
  return (lhs - (mu1 + 0.25 * (basis.N - 2.0) * (basis.N - 2.0)) * R) / lhs;
}

double coercivity_infimum(const OUBasis& basis) {
  const double c = (basis.N - 2) / 4.0;
  Matrix A = bilinear_matrix(basis);
  Matrix E = energy_matrix(basis);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    A(i, i) += c;
    E(i, i) += c;
  }
  const double rho = generalized_symmetric_eigen(A, E).values.front();
  if (!(rho > 0.0)) {
    std::ostringstream os;
    os << "coercivity_infimum: non-positive infimum " << rho << " under verified positivity";
    throw AccuracyError(os.str());
  }
  return rho;
}

// --------------------------------------------------------------------- sweeps

std::string to_string(Inequality which) {
  switch (which) {
    case Inequality::hardy_parabolic: return "hardy_parabolic";
    case Inequality::hardy_anisotropic: return "hardy_anisotropic";
    case Inequality::x2_bound: return "x2_bound";
    case Inequality::sobolev_scaling: return "sobolev_scaling";
  }
  return "?";
}

InequalityReport sweep(Inequality which, const AngularSpectrum& spec, const SweepOptions& opts) {
  const int N = spec.N;
  const auto family = make_family(opts.family, N, opts.count, opts.seed);
  const double s = opts.sobolev_s > 0.0 ? opts.sobolev_s : 0.5 * (2.0 + 2.0 * N / (N - 2.0));
  std::vector<double> gaps(family.size()), values(family.size(), 0.0);
  parallel_for(family.size(), [&](std::size_t i) {
    const TestFunction& u = family[i];
    switch (which) {
      case Inequality::hardy_parabolic: gaps[i] = hardy_parabolic(u, N, opts.t, opts.quad); break;
      case Inequality::hardy_anisotropic: gaps[i] = hardy_anisotropic(u, spec, opts.t, opts.quad); break;
      case Inequality::x2_bound: gaps[i] = x2_bound(u, N, opts.quad); break;
      case Inequality::sobolev_scaling: {
        const double r1 = sobolev_ratio(u, N, s, opts.t, opts.quad);
        const double r2 = sobolev_ratio(u, N, s, opts.t * opts.t_rescale, opts.quad);
        values[i] = r1;
        gaps[i] = -std::abs(r1 - r2) / std::abs(r1);
        break;
      }
    }
  });
  InequalityReport rep;
  rep.inequality = to_string(which);
  rep.family = opts.family == FamilyKind::bumps ? "bumps" : opts.family == FamilyKind::poly_gauss ? "poly_gauss" : "mixed";
  rep.N = N;
  rep.count = family.size();
  rep.seed = opts.seed;
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (!std::isfinite(gaps[i]) || gaps[i] < -1e-10) ++rep.violations;
    if (gaps[i] < rep.min_gap) {
      rep.min_gap = gaps[i];
      rep.argmin = family[i].describe();
    }
    rep.max_value = std::max(rep.max_value, values[i]);
  }
  // Doubling check on the member closest to violation.
  if (!family.empty() && which != Inequality::sobolev_scaling) {
    std::size_t worst = static_cast<std::size_t>(std::min_element(gaps.begin(), gaps.end()) - gaps.begin());
    QuadOptions fine = opts.quad;
    fine.n_r *= 2;
    fine.n_polar = 2 * (opts.quad.n_polar > 0 ? opts.quad.n_polar : default_polar(N));
    if (which == Inequality::hardy_anisotropic && N == 3 && opts.quad.n_polar == 0) fine.n_polar = 48;
    const TestFunction& u = family[worst];
    double refined = 0.0;
    switch (which) {
      case Inequality::hardy_parabolic: refined = hardy_parabolic(u, N, opts.t, fine); break;
      case Inequality::hardy_anisotropic: refined = hardy_anisotropic(u, spec, opts.t, fine); break;
      case Inequality::x2_bound: refined = x2_bound(u, N, fine); break;
      case Inequality::sobolev_scaling: break;
    }
    rep.refined_gap = refined;
    rep.refinement_change = std::abs(refined - gaps[worst]);
    if (refined < -1e-10) ++rep.violations;
  }
  return rep;
}

std::string reports_json(const std::vector<InequalityReport>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["inequality"] = r.inequality;
    j["family"] = r.family;
    j["N"] = r.N;
    j["count"] = r.count;
    j["violations"] = r.violations;
    j["min_gap"] = r.min_gap;
    j["argmin"] = r.argmin;
    j["seed"] = r.seed;
    if (r.inequality == "sobolev_scaling") j["max_ratio"] = r.max_value;
    else {
      j["argmin_refined_gap"] = r.refined_gap;
      j["refinement_change"] = r.refinement_change;
    }
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

}  // namespace oufreq
