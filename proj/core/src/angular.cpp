#include "oufreq/angular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "oufreq/error.hpp"
#include "oufreq/quadrature.hpp"

namespace oufreq {

namespace {

constexpr double kPi = std::numbers::pi;

int tri(int l, int m) { return l * (l + 1) / 2 + m; }

// Normalized associated Legendre functions on [-1,1] (no Condon-Shortley
// phase), P[tri(l,m)] = Pbar_l^m(x), and Q = Pbar_l^m / sin(theta) for m >= 1.
void legendre_table(int L, double x, double y, std::vector<double>& P, std::vector<double>& Q) {
  const int n = tri(L, L) + 1;
  P.assign(static_cast<std::size_t>(n), 0.0);
  Q.assign(static_cast<std::size_t>(n), 0.0);
  double cmm = std::sqrt(0.5);  // Pbar_m^m / y^m
  double ypow = 1.0;            // y^m
  for (int m = 0; m <= L; ++m) {
    if (m > 0) {
      cmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m));
      ypow *= y;
    }
    const double seedP = cmm * ypow;
    const double seedQ = m > 0 ? cmm * std::pow(y, m - 1) : 0.0;
    P[static_cast<std::size_t>(tri(m, m))] = seedP;
    Q[static_cast<std::size_t>(tri(m, m))] = seedQ;
    if (m + 1 <= L) {
      const double f = std::sqrt(2.0 * m + 3.0) * x;
      P[static_cast<std::size_t>(tri(m + 1, m))] = f * seedP;
      Q[static_cast<std::size_t>(tri(m + 1, m))] = f * seedQ;
    }
    for (int l = m + 2; l <= L; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
      const double b = std::sqrt((static_cast<double>(l - 1) * (l - 1) - static_cast<double>(m) * m) /
                                 (4.0 * (l - 1) * (l - 1) - 1.0));
      const auto i = static_cast<std::size_t>(tri(l, m));
      const auto i1 = static_cast<std::size_t>(tri(l - 1, m));
      const auto i2 = static_cast<std::size_t>(tri(l - 2, m));
      P[i] = a * (x * P[i1] - b * P[i2]);
      Q[i] = a * (x * Q[i1] - b * Q[i2]);
    }
  }
}

double phi_basis(int m, double phi) {
  if (m == 0) return 1.0 / std::sqrt(2.0 * kPi);
  if (m > 0) return std::cos(m * phi) / std::sqrt(kPi);
  return std::sin(-m * phi) / std::sqrt(kPi);
}

double phi_basis_derivative(int m, double phi) {
  if (m == 0) return 0.0;
  if (m > 0) return -m * std::sin(m * phi) / std::sqrt(kPi);
  return -m * std::cos(-m * phi) / std::sqrt(kPi);
}

struct Polar {
  double x, y, phi;
};

Polar to_polar(std::span<const double> theta) {
  const double rho = std::hypot(theta[0], theta[1]);
  const double norm = std::hypot(rho, theta[2]);
  return {theta[2] / norm, rho / norm, std::atan2(theta[1], theta[0])};
}

// Orthonormal Legendre polynomials sqrt((2l+1)/2) P_l(x), l = 0..n-1.
std::vector<double> legendre_values(int n, double x) {
  std::vector<double> p(static_cast<std::size_t>(std::max(n, 1)), 0.0);
  double prev = 0.0, cur = 1.0;  // P_{l-1}, P_l
  for (int l = 0; l < n; ++l) {
    if (l == 1) {
      prev = cur;
      cur = x;
    } else if (l > 1) {
      const double next = ((2.0 * l - 1.0) * x * cur - (l - 1.0) * prev) / l;
      prev = cur;
      cur = next;
    }
    p[static_cast<std::size_t>(l)] = cur * std::sqrt((2.0 * l + 1.0) / 2.0);
  }
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// AngularPotential

AngularPotential AngularPotential::constant(double lambda) {
  AngularPotential a;
  a.kind_ = Kind::constant;
  a.lambda_ = lambda;
  a.finish();
  return a;
}

AngularPotential AngularPotential::zonal(std::vector<double> samples) {
  if (samples.empty()) throw ConfigError("zonal potential needs at least one sample");
  AngularPotential a;
  a.kind_ = Kind::zonal;
  a.samples_ = std::move(samples);
  const int n = static_cast<int>(a.samples_.size());
  const LineRule gl = gauss_legendre(n);
  a.legendre_.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const auto p = legendre_values(n, gl.nodes[static_cast<std::size_t>(i)]);
    for (int l = 0; l < n; ++l)
      a.legendre_[static_cast<std::size_t>(l)] +=
          gl.weights[static_cast<std::size_t>(i)] * a.samples_[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(l)];
  }
  a.finish();
  return a;
}

AngularPotential AngularPotential::zonal_from(const std::function<double(double)>& a_of_cos, int n_samples) {
  const LineRule gl = gauss_legendre(n_samples);
  std::vector<double> s(gl.nodes.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = a_of_cos(gl.nodes[i]);
  return zonal(std::move(s));
}

AngularPotential AngularPotential::harmonic_table(std::vector<HarmonicCoefficient> coeffs) {
  for (const auto& c : coeffs)
    if (c.l < 0 || std::abs(c.m) > c.l) throw ConfigError("harmonic table entry has |m| > l or l < 0");
  AngularPotential a;
  a.kind_ = Kind::harmonic_table;
  a.table_ = std::move(coeffs);
  a.finish();
  return a;
}

int AngularPotential::degree() const {
  switch (kind_) {
    case Kind::constant:
      return 0;
    case Kind::zonal:
      return static_cast<int>(samples_.size()) - 1;
    case Kind::harmonic_table: {
      int d = 0;
      for (const auto& c : table_) d = std::max(d, c.l);
      return d;
    }
  }
  return 0;
}

bool AngularPotential::is_zonal() const {
  if (kind_ != Kind::harmonic_table) return true;
  return std::all_of(table_.begin(), table_.end(), [](const HarmonicCoefficient& c) { return c.m == 0 || c.value == 0.0; });
}

double AngularPotential::operator()(std::span<const double> theta) const {
  switch (kind_) {
    case Kind::constant:
      return lambda_;
    case Kind::zonal: {
      const Polar p = to_polar(theta);
      const auto leg = legendre_values(static_cast<int>(legendre_.size()), p.x);
      double s = 0.0;
      for (std::size_t l = 0; l < legendre_.size(); ++l) s += legendre_[l] * leg[l];
      return s;
    }
    case Kind::harmonic_table: {
      const auto y = harmonics::values(degree(), theta);
      double s = 0.0;
      for (const auto& c : table_) s += c.value * y[static_cast<std::size_t>(harmonics::index(c.l, c.m))];
      return s;
    }
  }
  return 0.0;
}

void AngularPotential::finish() {
  if (kind_ == Kind::constant) {
    sup_norm_ = std::abs(lambda_);
    return;
  }
  double worst = 0.0;
  for (double s : samples_) worst = std::max(worst, std::abs(s));
  const int nt = 96, np = 192;
  for (int i = 0; i <= nt; ++i) {
    const double th = kPi * i / nt;
    for (int k = 0; k < np; ++k) {
      const double ph = 2.0 * kPi * k / np;
      const double v[3] = {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
      worst = std::max(worst, std::abs((*this)(v)));
      if (is_zonal()) break;
    }
  }
  sup_norm_ = worst * 1.001;
}

// ---------------------------------------------------------------------------
// Spherical harmonics

int harmonics::degree_of(int index) { return static_cast<int>(std::floor(std::sqrt(static_cast<double>(index)))); }

std::vector<double> harmonics::values(int L, std::span<const double> theta) {
  const Polar p = to_polar(theta);
  std::vector<double> P, Q;
  legendre_table(L, p.x, p.y, P, Q);
  std::vector<double> out(static_cast<std::size_t>(count(L)));
  for (int l = 0; l <= L; ++l)
    for (int m = -l; m <= l; ++m)
      out[static_cast<std::size_t>(index(l, m))] = P[static_cast<std::size_t>(tri(l, std::abs(m)))] * phi_basis(m, p.phi);
  return out;
}

void harmonics::values_and_gradients(int L, std::span<const double> theta, std::vector<double>& vals,
                                     std::vector<double>& grads) {
  const Polar p = to_polar(theta);
  // Need degree L+1 of P for the dP/dtheta ladder.
  std::vector<double> P, Q;
  legendre_table(L + 1, p.x, p.y, P, Q);
  const double cp = std::cos(p.phi), sp = std::sin(p.phi);
  const double e_theta[3] = {p.x * cp, p.x * sp, -p.y};
  const double e_phi[3] = {-sp, cp, 0.0};
  const std::size_t n = static_cast<std::size_t>(count(L));
  vals.assign(n, 0.0);
  grads.assign(3 * n, 0.0);
  auto Pat = [&](int l, int m) { return P[static_cast<std::size_t>(tri(l, m))]; };
  for (int l = 0; l <= L; ++l) {
    for (int m = -l; m <= l; ++m) {
      const int am = std::abs(m);
      double dP;
      if (am == 0) {
        dP = l > 0 ? -std::sqrt(static_cast<double>(l) * (l + 1)) * Pat(l, 1) : 0.0;
      } else {
        const double up = am + 1 <= l ? std::sqrt(static_cast<double>(l - am) * (l + am + 1)) * Pat(l, am + 1) : 0.0;
        dP = 0.5 * (std::sqrt(static_cast<double>(l + am) * (l - am + 1)) * Pat(l, am - 1) - up);
      }
      const double phi_v = phi_basis(m, p.phi);
      const double dth = dP * phi_v;
      const double dph = am > 0 ? Q[static_cast<std::size_t>(tri(l, am))] * phi_basis_derivative(m, p.phi) : 0.0;
      const auto b = static_cast<std::size_t>(index(l, m));
      vals[b] = Pat(l, am) * phi_v;
      for (int d = 0; d < 3; ++d) grads[3 * b + static_cast<std::size_t>(d)] = dth * e_theta[d] + dph * e_phi[d];
    }
  }
}

// ---------------------------------------------------------------------------
// Galerkin assembly

Matrix assemble_angular(const AngularPotential& a, int L) {
  if (L < 2) throw ConfigError("assemble_angular: truncation degree must be at least 2");
  if (!a.supports_dimension(3)) throw ConfigError("assemble_angular: potential not defined on S^2");
  const int dim = harmonics::count(L);
  Matrix M(static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
  for (int b = 0; b < dim; ++b) {
    const int l = harmonics::degree_of(b);
    M(static_cast<std::size_t>(b), static_cast<std::size_t>(b)) = static_cast<double>(l) * (l + 1);
  }
  if (a.kind() == AngularPotential::Kind::constant) {
    for (int b = 0; b < dim; ++b) M(static_cast<std::size_t>(b), static_cast<std::size_t>(b)) -= a.lambda();
    return M;
  }

  // Exact for integrands of degree 2L + deg(a) in cos(theta) and phi.
  const int D = 2 * L + a.degree();
  const int n_theta = D / 2 + 2;
  const int n_phi = D + 2;
  const LineRule gl = gauss_legendre(n_theta);
  const bool zonal = a.is_zonal();
  const int nm = 2 * L + 1;

  std::vector<double> P, Q;
  std::vector<double> T(static_cast<std::size_t>(nm * nm));
  std::vector<double> phis(static_cast<std::size_t>(n_phi));
  for (int k = 0; k < n_phi; ++k) phis[static_cast<std::size_t>(k)] = 2.0 * kPi * (k + 0.5) / n_phi;

  for (int i = 0; i < n_theta; ++i) {
    const double x = gl.nodes[static_cast<std::size_t>(i)];
    const double y = std::sqrt(std::max(0.0, 1.0 - x * x));
    legendre_table(L, x, y, P, Q);
    std::fill(T.begin(), T.end(), 0.0);
    if (zonal) {
      const double v[3] = {y, 0.0, x};
      const double av = a(v);
      for (int m = 0; m < nm; ++m) T[static_cast<std::size_t>(m * nm + m)] = av;
    } else {
      for (int k = 0; k < n_phi; ++k) {
        const double ph = phis[static_cast<std::size_t>(k)];
        const double v[3] = {y * std::cos(ph), y * std::sin(ph), x};
        const double w = a(v) * 2.0 * kPi / n_phi;
        std::vector<double> f(static_cast<std::size_t>(nm));
        for (int m = -L; m <= L; ++m) f[static_cast<std::size_t>(m + L)] = phi_basis(m, ph);
        for (int m1 = 0; m1 < nm; ++m1)
          for (int m2 = 0; m2 < nm; ++m2)
            T[static_cast<std::size_t>(m1 * nm + m2)] += w * f[static_cast<std::size_t>(m1)] * f[static_cast<std::size_t>(m2)];
      }
    }
    const double wi = gl.weights[static_cast<std::size_t>(i)];
    for (int l1 = 0; l1 <= L; ++l1)
      for (int m1 = -l1; m1 <= l1; ++m1) {
        const auto p1 = static_cast<std::size_t>(harmonics::index(l1, m1));
        const double P1 = wi * P[static_cast<std::size_t>(tri(l1, std::abs(m1)))];
        for (int l2 = 0; l2 <= L; ++l2)
          for (int m2 = -l2; m2 <= l2; ++m2) {
            const double t = T[static_cast<std::size_t>((m1 + L) * nm + (m2 + L))];
            if (t == 0.0) continue;
            const auto p2 = static_cast<std::size_t>(harmonics::index(l2, m2));
            M(p1, p2) -= P1 * P[static_cast<std::size_t>(tri(l2, std::abs(m2)))] * t;
          }
      }
  }
  for (std::size_t r = 0; r < M.rows(); ++r)
    for (std::size_t c = 0; c < r; ++c) M(r, c) = M(c, r) = 0.5 * (M(r, c) + M(c, r));
  return M;
}

// ---------------------------------------------------------------------------
// Eigen solve

namespace {

// Splits the matrix into connected blocks of its exact nonzero pattern and
// diagonalizes each block independently.
EigenDecomposition blockwise_eigen(const Matrix& M) {
  const std::size_t n = M.rows();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (M(i, j) != 0.0) parent[find(i)] = find(j);

  std::vector<std::vector<std::size_t>> blocks;
  std::vector<long> block_of(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (block_of[r] < 0) {
      block_of[r] = static_cast<long>(blocks.size());
      blocks.emplace_back();
    }
    blocks[static_cast<std::size_t>(block_of[r])].push_back(i);
  }

  EigenDecomposition out;
  out.vectors = Matrix(n, n);
  out.values.reserve(n);
  std::size_t col = 0;
  for (const auto& blk : blocks) {
    Matrix sub(blk.size(), blk.size());
    for (std::size_t i = 0; i < blk.size(); ++i)
      for (std::size_t j = 0; j < blk.size(); ++j) sub(i, j) = M(blk[i], blk[j]);
    const EigenDecomposition e = symmetric_eigen(sub);
    for (std::size_t k = 0; k < blk.size(); ++k, ++col) {
      out.values.push_back(e.values[k]);
      for (std::size_t i = 0; i < blk.size(); ++i) out.vectors(blk[i], col) = e.vectors(i, k);
    }
  }
  return out;
}

}  // namespace

long harmonic_multiplicity(int N, int l) {
  auto binom = [](long n, long k) -> long {
    if (k < 0 || n < k) return 0;
    long r = 1;
    for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  return binom(N + l - 1, l) - binom(N + l - 3, l - 2);
}

AngularSpectrum solve_angular(const AngularPotential& a, int N, int L, int K) {
  if (N < 3) throw ConfigError("solve_angular: dimension must be at least 3");
  if (!a.supports_dimension(N))
    throw ConfigError("solve_angular: anisotropic potentials are only supported for N = 3");
  if (K < 1) throw ConfigError("solve_angular: K must be positive");

  AngularSpectrum spec;
  spec.N = N;
  spec.L = L;
  spec.potential = a;

  if (N != 3) {
    // Constant potential: shifted Laplace-Beltrami spectrum, enumerated
    // combinatorially. The last degree L is the truncation buffer.
    long available = 0;
    for (int l = 0; l < L; ++l) available += harmonic_multiplicity(N, l);
    if (K > available)
      throw TruncationError("solve_angular: K exceeds the basis dimension minus one full degree");
    for (int l = 0; static_cast<int>(spec.eigenvalues.size()) < K; ++l)
      for (long c = 0; c < harmonic_multiplicity(N, l) && static_cast<int>(spec.eigenvalues.size()) < K; ++c) {
        spec.eigenvalues.push_back(static_cast<double>(l) * (l + N - 2) - a.lambda());
        spec.degree.push_back(l);
      }
    spec.residual_bound = 0.0;
    return spec;
  }

  const int dim = harmonics::count(L);
  if (K > dim - (2 * L + 1))
    throw TruncationError("solve_angular: K exceeds the basis dimension minus one full degree");
  const Matrix M = assemble_angular(a, L);
  EigenDecomposition eig = blockwise_eigen(M);

  // Order: eigenvalue, then (inside numerically degenerate clusters) index of
  // the dominant harmonic.
  const std::size_t n = eig.values.size();
  std::vector<std::size_t> dominant(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t best = 0;
    for (std::size_t b = 1; b < n; ++b)
      if (std::abs(eig.vectors(b, k)) > std::abs(eig.vectors(best, k)) + 1e-12) best = b;
    dominant[k] = best;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return eig.values[p] < eig.values[q]; });
  for (std::size_t s = 0; s < n;) {
    std::size_t e = s + 1;
    while (e < n && eig.values[order[e]] - eig.values[order[e - 1]] < 1e-9) ++e;
    std::sort(order.begin() + static_cast<long>(s), order.begin() + static_cast<long>(e),
              [&](std::size_t p, std::size_t q) { return dominant[p] < dominant[q]; });
    s = e;
  }

  spec.eigenvectors = Matrix(static_cast<std::size_t>(dim), static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const std::size_t src = order[static_cast<std::size_t>(k)];
    spec.eigenvalues.push_back(eig.values[src]);
    const double sign = eig.vectors(dominant[src], src) < 0 ? -1.0 : 1.0;
    for (int b = 0; b < dim; ++b)
      spec.eigenvectors(static_cast<std::size_t>(b), static_cast<std::size_t>(k)) = sign * eig.vectors(static_cast<std::size_t>(b), src);
    spec.degree.push_back(harmonics::degree_of(static_cast<int>(dominant[src])));
  }

  double resid = 0.0;
  for (int k = 0; k < K; ++k) {
    const auto v = spec.eigenvectors.column(static_cast<std::size_t>(k));
    auto Mv = M * std::span<const double>(v);
    for (std::size_t i = 0; i < Mv.size(); ++i) Mv[i] -= spec.eigenvalues[static_cast<std::size_t>(k)] * v[i];
    resid = std::max(resid, norm2(Mv));
  }
  spec.residual_bound = resid;

  if (K >= 2 && !(spec.eigenvalues[1] - spec.eigenvalues[0] > 10.0 * spec.residual_bound &&
                  spec.eigenvalues[1] - spec.eigenvalues[0] > 1e-9)) {
    std::ostringstream msg;
    msg << "first angular eigenvalue is not simple (gap " << spec.eigenvalues[1] - spec.eigenvalues[0]
        << ", residual bound " << spec.residual_bound << "); increase L";
    throw TruncationError(msg.str());
  }
  return spec;
}

AngularSpectrum solve_angular_auto(const AngularPotential& a, int N, int K, int L0) {
  int L = L0;
  while (K > harmonics::count(L) - (2 * L + 1) && N == 3) L *= 2;
  AngularSpectrum coarse = solve_angular(a, N, L, K);
  if (N != 3 || a.kind() == AngularPotential::Kind::constant) return coarse;
  while (2 * L <= 64) {
    AngularSpectrum fine = solve_angular(a, N, 2 * L, K);
    const double shift = std::abs(fine.eigenvalues.back() - coarse.eigenvalues.back());
    if (shift < 1e-9) return fine;
    coarse = std::move(fine);
    L *= 2;
  }
  throw TruncationError("solve_angular_auto: eigenvalues did not settle below L = 64");
}

double AngularSpectrum::stiffness(std::size_t j, std::size_t k) const {
  if (N != 3) return j == k ? static_cast<double>(degree[j]) * (degree[j] + N - 2) : 0.0;
  double s = 0.0;
  for (std::size_t b = 0; b < eigenvectors.rows(); ++b) {
    const int l = harmonics::degree_of(static_cast<int>(b));
    s += eigenvectors(b, j) * eigenvectors(b, k) * l * (l + 1);
  }
  return s;
}

PositivityCheck check_positivity(const AngularSpectrum& spec) {
  const double margin = spec.eigenvalues.front() + 0.25 * (spec.N - 2) * (spec.N - 2);
  return {margin > 0.0, margin};
}

void require_positivity(const AngularSpectrum& spec) {
  const PositivityCheck c = check_positivity(spec);
  if (!c.positive) {
    std::ostringstream msg;
    msg << "positivity condition mu_1 > -(N-2)^2/4 fails: mu_1 = " << spec.eigenvalues.front()
        << ", margin " << c.margin;
    throw PositivityError(msg.str());
  }
}

std::vector<double> eval_psi_all(const AngularSpectrum& spec, std::span<const double> theta) {
  const std::size_t K = spec.size();
  std::vector<double> out(K, 0.0);
  if (spec.N != 3) {
    for (std::size_t k = 0; k < K; ++k) {
      if (spec.degree[k] != 0) continue;
      out[k] = 1.0 / std::sqrt(sphere_area(spec.N));
    }
    return out;
  }
  const auto y = harmonics::values(spec.L, theta);
  for (std::size_t b = 0; b < y.size(); ++b) {
    if (y[b] == 0.0) continue;
    for (std::size_t k = 0; k < K; ++k) out[k] += spec.eigenvectors(b, k) * y[b];
  }
  return out;
}

double eval_psi(const AngularSpectrum& spec, std::size_t k, std::span<const double> theta) {
  if (k >= spec.size()) throw ConfigError("eval_psi: index beyond computed spectrum");
  if (spec.N != 3 && spec.degree[k] != 0)
    throw ConfigError("eval_psi: eigenfunctions for N != 3 are only available at degree 0");
  return eval_psi_all(spec, theta)[k];
}

void eval_psi_all_with_gradient(const AngularSpectrum& spec, std::span<const double> theta,
                                std::vector<double>& vals, std::vector<double>& grads) {
  const std::size_t K = spec.size();
  const auto N = static_cast<std::size_t>(spec.N);
  vals.assign(K, 0.0);
  grads.assign(K * N, 0.0);
  if (spec.N != 3) {
    for (std::size_t k = 0; k < K; ++k)
      if (spec.degree[k] == 0) vals[k] = 1.0 / std::sqrt(sphere_area(spec.N));
    return;
  }
  std::vector<double> y, gy;
  harmonics::values_and_gradients(spec.L, theta, y, gy);
  for (std::size_t b = 0; b < y.size(); ++b)
    for (std::size_t k = 0; k < K; ++k) {
      const double c = spec.eigenvectors(b, k);
      if (c == 0.0) continue;
      vals[k] += c * y[b];
      for (std::size_t d = 0; d < 3; ++d) grads[3 * k + d] += c * gy[3 * b + d];
    }
}

}  // namespace oufreq
