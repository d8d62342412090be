#include "twoweight/riesz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twoweight/energy.hpp"
#include "twoweight/haar.hpp"

namespace tw {

Point riesz_kernel(const Point& w, const FracParams& p) {
  double r = norm(w);
  if (r == 0) return Point::zero(w.dim);
  return std::pow(r, -(p.n + 1 - p.alpha)) * w;
}

double kernel_size_constant(const FracParams&) { return 1.0; }

// eigenvalues of |w|^{n+1-a} grad K are 1 (n-1 times) and a - n
double kernel_smoothness_constant(const FracParams& p) { return std::max(1.0, p.n - p.alpha); }

Eigen::MatrixXd riesz_kernel_gradient(const Point& w, const FracParams& p) {
  const int n = w.dim;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  double r = norm(w);
  if (r == 0) return g;
  double e = p.n + 1 - p.alpha;
  double a = std::pow(r, -e), b = e * std::pow(r, -e - 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = (i == j ? a : 0.0) - b * w[i] * w[j];
  return g;
}

TruncationProfile::TruncationProfile(TruncationKind k, const FracParams& p, double delta, double R)
    : kind_(k), p_(p), delta_(delta), R_(R) {
  if (!(delta > 0 && delta < R)) throw std::invalid_argument("truncation: need 0 < delta < R");
  switch (k) {
    case TruncationKind::tangent: S_ = R * (p.n - p.alpha + 1) / (p.n - p.alpha); break;
    case TruncationKind::cutoff: S_ = R; break;
    case TruncationKind::smooth: S_ = 2 * R; break;
  }
}

TruncationProfile TruncationProfile::tangent(const FracParams& p, double delta, double R) {
  return {TruncationKind::tangent, p, delta, R};
}
TruncationProfile TruncationProfile::cutoff(const FracParams& p, double delta, double R) {
  return {TruncationKind::cutoff, p, delta, R};
}
TruncationProfile TruncationProfile::smooth(const FracParams& p, double delta, double R) {
  return {TruncationKind::smooth, p, delta, R};
}

namespace {

// 1 on t <= 1, 0 on t >= 2, smooth in between
double bump(double t) {
  auto g = [](double s) { return s > 0 ? std::exp(-1.0 / s) : 0.0; };
  if (t <= 1) return 1.0;
  if (t >= 2) return 0.0;
  double a = g(2 - t), b = g(t - 1);
  return a / (a + b);
}

}  // namespace

double TruncationProfile::operator()(double r) const {
  if (r <= 0) return 0.0;
  const double e = p_.alpha - p_.n;
  switch (kind_) {
    case TruncationKind::cutoff: return (r >= delta_ && r <= R_) ? std::pow(r, e) : 0.0;
    case TruncationKind::smooth: return std::pow(r, e) * (1 - bump(r / delta_)) * bump(r / R_);
    case TruncationKind::tangent: {
      if (r >= delta_ && r <= R_) return std::pow(r, e);
      if (r < delta_) return std::pow(delta_, e) + e * std::pow(delta_, e - 1) * (r - delta_);
      if (r < S_) return std::pow(R_, e) + e * std::pow(R_, e - 1) * (r - R_);
      return 0.0;
    }
  }
  return 0.0;
}

double tangent_truncation(double r, const TruncationProfile& profile) { return profile(r); }

double truncation_majorant_constant(const FracParams& p) {
  const double d = p.n - p.alpha;
  // inner region: psi <= psi(0+) = (d + 1) delta^{-d}, majorant term = delta^{-d}
  double c = d + 1;
  // outer region: on [2^{k-1}R, 2^k R] psi <= R^{-d}(1 - d(2^{k-1} - 1)), term = 2^{-2kd} R^{-d}
  for (int k = 1; k < 200; ++k) {
    double top = 1 - d * (std::ldexp(1.0, k - 1) - 1);
    if (top <= 0) break;
    c = std::max(c, std::pow(2.0, 2 * k * d) * top);
  }
  return c;
}

DifferenceBound truncation_difference_bound(const Point& w, const TruncationProfile& profile) {
  const FracParams& p = profile.params();
  const double d = p.n - p.alpha;
  const double r = norm(w);
  DifferenceBound b;
  if (r == 0) return b;
  double untrunc = (r >= profile.delta() && r <= profile.R()) ? std::pow(r, -d) : 0.0;
  b.lhs = std::abs(profile(r) - untrunc);  // |Omega(w)| = 1
  double s = 0;
  for (int k = 0; k < 400; ++k) {
    double hi = std::ldexp(profile.delta(), -k), lo = hi / 2;
    if (hi < r) break;
    if (r >= lo && r <= hi) s += std::pow(2.0, -k * d) * std::pow(hi, -d);
  }
  for (int k = 1; k < 400; ++k) {
    double hi = std::ldexp(profile.R(), k), lo = hi / 2;
    if (lo > r) break;
    if (r >= lo && r <= hi) s += std::pow(2.0, -k * d) * std::pow(hi, -d);
  }
  b.rhs = truncation_majorant_constant(p) * s;
  return b;
}

double apply_truncated(const DiscreteMeasure& mu, const Point& x, const TruncationProfile& profile, int component,
                       std::span<const double> f) {
  double s = 0;
  for (std::size_t a = 0; a < mu.size(); ++a) {
    Point w = x - mu[a].x;
    double r = norm(w);
    if (r == 0) continue;
    double fa = f.empty() ? 1.0 : f[a];
    s += w[component] / r * profile(r) * mu[a].mass * fa;
  }
  return s;
}

Point apply_truncated(const DiscreteMeasure& mu, const Point& x, const TruncationProfile& profile,
                      std::span<const double> f) {
  Point out = Point::zero(x.dim);
  for (int l = 0; l < x.dim; ++l) out[l] = apply_truncated(mu, x, profile, l, f);
  return out;
}

double OperatorMatrix::norm() const {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Eigen::MatrixXd g = a.rows() < a.cols() ? Eigen::MatrixXd(a * a.transpose()) : Eigen::MatrixXd(a.transpose() * a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

OperatorMatrix operator_matrix(const DiscreteMeasure& sigma, const DiscreteMeasure& omega,
                               const TruncationProfile& profile) {
  require_same_dim(sigma.dim(), omega.dim());
  const int n = sigma.dim();
  const auto rows = static_cast<Eigen::Index>(omega.size()), cols = static_cast<Eigen::Index>(sigma.size());
  OperatorMatrix m;
  m.a = Eigen::MatrixXd::Zero(n * rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Atom& x = omega[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < cols; ++j) {
      const Atom& y = sigma[static_cast<std::size_t>(j)];
      Point w = x.x - y.x;
      double r = norm(w);
      if (r == 0) continue;
      double scale = std::sqrt(x.mass * y.mass) * profile(r) / r;
      for (int l = 0; l < n; ++l) m.a(l * rows + i, j) = scale * w[l];
    }
  }
  return m;
}

TruncationLattice default_lattice(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, int per_axis) {
  double dmin = std::numeric_limits<double>::infinity(), dmax = 0;
  for (const auto& a : sigma.atoms())
    for (const auto& b : omega.atoms()) {
      double d = dist(a.x, b.x);
      if (d > 0) {
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
      }
    }
  if (!(dmax > 0)) {
    dmin = 1;
    dmax = 1;
  }
  std::vector<double> v;
  double lo = dmin / 2, hi = 2 * dmax;
  for (int i = 0; i < per_axis; ++i)
    v.push_back(per_axis == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (per_axis - 1)));
  TruncationLattice out;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) out.emplace_back(v[i], v[j]);
  return out;
}

namespace {

TruncationProfile make_profile(TruncationKind kind, const FracParams& p, double delta, double R) {
  switch (kind) {
    case TruncationKind::cutoff: return TruncationProfile::cutoff(p, delta, R);
    case TruncationKind::smooth: return TruncationProfile::smooth(p, delta, R);
    default: return TruncationProfile::tangent(p, delta, R);
  }
}

std::string lattice_label(double delta, double R) {
  return "delta=" + std::to_string(delta) + ",R=" + std::to_string(R);
}

}  // namespace

SupResult operator_norm(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                        const TruncationLattice& lattice, TruncationKind kind) {
  SupResult r;
  r.empty_family = lattice.empty();
  for (const auto& [d, R] : lattice) {
    double v = operator_matrix(sigma, omega, make_profile(kind, p, d, R)).norm();
    if (v > r.value) {
      r.value = v;
      r.witness = lattice_label(d, R);
    }
  }
  return r;
}

SupResult testing_constant(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                           const TruncationLattice& lattice, const CubeFamily& family, TruncationKind kind) {
  SupResult r;
  r.empty_family = family.cubes.empty() || lattice.empty();
  std::vector<TruncationProfile> profiles;
  for (const auto& [d, R] : lattice) profiles.push_back(make_profile(kind, p, d, R));
  const int n = sigma.dim();
  for (const auto& q : family.cubes) {
    DiscreteMeasure s = sigma.restricted(q), w = omega.restricted(q);
    double ms = s.total_mass();
    if (ms <= 0 || w.empty()) continue;
    for (std::size_t t = 0; t < profiles.size(); ++t) {
      double integral = 0;
      for (const auto& x : w.atoms()) {
        Point v = Point::zero(n);
        for (const auto& y : s.atoms()) {
          Point d = x.x - y.x;
          double rr = norm(d);
          if (rr == 0) continue;
          v = v + (y.mass * profiles[t](rr) / rr) * d;
        }
        integral += x.mass * norm2(v);
      }
      double val = integral / ms;
      if (val > r.value) {
        r.value = val;
        r.witness = describe(q) + " " + lattice_label(lattice[t].first, lattice[t].second);
      }
    }
  }
  return r;
}

SupResult testing_constant_dual(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                                const TruncationLattice& lattice, const CubeFamily& family, TruncationKind kind) {
  return testing_constant(omega, sigma, p, lattice, family, kind);
}

namespace {

bool disjoint(const Cube& a, const Cube& b) {
  for (int i = 0; i < a.dim(); ++i)
    if (a.corner[i] >= b.corner[i] + b.side || b.corner[i] >= a.corner[i] + a.side) return true;
  return false;
}

}  // namespace

bool wbp_admissible(const Cube& q, const Cube& qp, double C) {
  double ratio = q.side / qp.side;
  if (ratio < 1 / C || ratio > C) return false;
  if (!disjoint(q, qp)) return false;
  return qp.dilated(3).contains(q) || q.dilated(3).contains(qp);
}

PairFamily wbp_pair_family(const WeightPair& w, double C) {
  PairFamily out;
  const auto& grid = w.grid();
  int span = static_cast<int>(std::floor(std::log2(C) + 1e-12));
  for (int k = 0; k <= grid.depth(); ++k) {
    for (int m = std::max(0, k - span); m <= std::min(grid.depth(), k + span); ++m) {
      for (const auto& qp : w.occ_sigma().occupied(k)) {
        Cube bqp = grid.base_cube(qp);
        for (const auto& q : w.occ_omega().occupied(m)) {
          if (!grid.in_top(q) && !grid.in_top(qp)) continue;
          Cube bq = grid.base_cube(q);
          if (wbp_admissible(bq, bqp, C)) out.emplace_back(grid.cube(q), grid.cube(qp));
        }
      }
    }
  }
  return out;
}

SupResult weak_boundedness(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                           const TruncationLattice& lattice, const PairFamily& pairs, TruncationKind kind) {
  SupResult r;
  r.empty_family = pairs.empty() || lattice.empty();
  const int n = sigma.dim();
  for (const auto& [q, qp] : pairs) {
    DiscreteMeasure w = omega.restricted(q), s = sigma.restricted(qp);
    double mw = w.total_mass(), ms = s.total_mass();
    if (mw <= 0 || ms <= 0) continue;
    for (const auto& [d, R] : lattice) {
      TruncationProfile prof = make_profile(kind, p, d, R);
      Point acc = Point::zero(n);
      for (const auto& x : w.atoms()) acc = acc + x.mass * apply_truncated(s, x.x, prof);
      double val = norm(acc) / std::sqrt(mw * ms);
      if (val > r.value) {
        r.value = val;
        r.witness = describe(q) + " vs " + describe(qp) + " " + lattice_label(d, R);
      }
    }
  }
  return r;
}

Point riesz_potential(const DiscreteMeasure& mu, const Point& x, const FracParams& p) {
  Point out = Point::zero(x.dim);
  for (const auto& a : mu.atoms()) out = out + a.mass * riesz_kernel(x - a.x, p);
  return out;
}

namespace {

void require_outside(const DiscreteMeasure& mu, const QuasiCube& region, const char* what) {
  for (const auto& a : mu.atoms())
    if (region.contains(a.x)) throw std::invalid_argument(std::string(what) + ": measure must be supported outside");
}

}  // namespace

Monotonicity monotonicity_functional(const CubeIndex& j, const GridOccupancy& omega, const DiscreteMeasure& mu,
                                     const FracParams& p) {
  const QuasiCube qj = omega.grid().cube(j);
  require_outside(mu, qj.dilated(2), "monotonicity_functional");
  Monotonicity m;
  const double l = qj.side();
  double pj = poisson_standard(qj, mu, p) / l;
  double pd = poisson_m_weighted(qj, mu, p, 1 + p.delta_cz) / l;
  double dx = 0;
  HaarBasis b = build_haar_basis(j, omega);
  for (int i = 0; i < omega.measure().dim(); ++i)
    for (double c : haar_coefficients(b, coordinate(omega.measure(), i), omega)) dx += c * c;
  m.haar_term = pj * pj * dx;
  MomentSpectrum s = moment_spectrum(qj, omega.measure());
  m.moment_term = pd * pd * s.M[0] * s.M[0];
  m.phi = std::sqrt(m.haar_term + m.moment_term);
  return m;
}

double delta_of_riesz(const CubeIndex& j, const GridOccupancy& omega, const DiscreteMeasure& mu, const FracParams& p) {
  const auto& w = omega.measure();
  HaarBasis b = build_haar_basis(j, omega);
  if (b.dimension() == 0) return 0.0;
  std::vector<Values> comps(static_cast<std::size_t>(w.dim()), Values(w.size(), 0.0));
  if (const auto* cell = omega.find(j)) {
    for (int a : cell->atoms) {
      Point t = riesz_potential(mu, w[static_cast<std::size_t>(a)].x, p);
      for (int l = 0; l < w.dim(); ++l) comps[static_cast<std::size_t>(l)][static_cast<std::size_t>(a)] = t[l];
    }
  }
  double s = 0;
  for (const auto& f : comps)
    for (double c : haar_coefficients(b, f, omega)) s += c * c;
  return std::sqrt(s);
}

double pivotal_bound_check(const QuasiCube& j, std::span<const double> psi, const DiscreteMeasure& omega,
                           const DiscreteMeasure& nu, const FracParams& p, double gamma) {
  require_outside(nu, j.dilated(gamma), "pivotal_bound_check");
  if (psi.size() != omega.size()) throw std::invalid_argument("pivotal_bound_check: psi size must match omega");
  double psi_norm2 = 0, mass_j = 0;
  Point pairing = Point::zero(omega.dim());
  for (std::size_t a = 0; a < omega.size(); ++a) {
    if (!j.contains(omega[a].x)) continue;
    mass_j += omega[a].mass;
    psi_norm2 += omega[a].mass * psi[a] * psi[a];
    if (psi[a] != 0) pairing = pairing + (omega[a].mass * psi[a]) * riesz_potential(nu, omega[a].x, p);
  }
  double denom = std::sqrt(psi_norm2) * poisson_standard(j, nu, p) * std::sqrt(mass_j);
  if (denom <= 0) return 0.0;
  return norm(pairing) / denom;
}

double semiharmonic_laplacian(const Point& x, const FracParams& p, int ell) {
  if (ell < 1 || ell > x.dim) throw std::invalid_argument("semiharmonic_laplacian: need 1 <= ell <= n");
  double a = 0, b = 0;
  for (int i = 0; i < x.dim; ++i) (i < ell ? a : b) += x[i] * x[i];
  if (a + b == 0) throw std::invalid_argument("semiharmonic_laplacian: x = 0");
  double beta = p.alpha - p.n + 1;
  return beta * ((ell + beta - 2) * a + ell * b) * std::pow(a + b, (beta - 4) / 2);
}

bool semiharmonic_admissible(int n, int ell, double alpha) {
  if (n < 2 || alpha < 0 || alpha >= n) return false;
  if (ell >= 2 && ell <= n - 1) return alpha > n + 1 - ell && alpha != n - 1;
  if (ell == n) return alpha != 1 && alpha != n - 1;
  return false;
}

bool reversal_admissible(int n, int k, double alpha) { return semiharmonic_admissible(n, k + 1, alpha); }

RieszGradient riesz_gradient(const Point& z, const DiscreteMeasure& mu, const FracParams& p) {
  const int n = z.dim;
  RieszGradient g;
  g.m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& a : mu.atoms()) {
    Point w = z - a.x;
    if (norm(w) == 0) throw std::invalid_argument("riesz_gradient: atom at evaluation point");
    g.m += a.mass * riesz_kernel_gradient(w, p);
  }
  g.m = 0.5 * (g.m + g.m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.m, Eigen::EigenvaluesOnly);
  for (int i = 0; i < n; ++i) g.eigenvalues.push_back(es.eigenvalues()(i));
  std::sort(g.eigenvalues.begin(), g.eigenvalues.end(), [](double u, double v) { return std::abs(u) < std::abs(v); });
  return g;
}

Reversal energy_reversal_check(const QuasiCube& j, const DiscreteMeasure& mu, const DiscreteMeasure& omega,
                               const FracParams& p, double gamma) {
  if (gamma < 2) throw std::invalid_argument("energy_reversal_check: gamma must be >= 2");
  require_outside(mu, j.dilated(gamma), "energy_reversal_check");
  Reversal r;
  double e = energy(j, omega);
  double pj = poisson_standard(j, mu, p);
  r.lhs = e * e * pj * pj;
  DiscreteMeasure w = omega.restricted(j);
  double mass = w.total_mass();
  if (mass > 0 && !mu.empty()) {
    std::vector<Point> t;
    Point mean = Point::zero(omega.dim());
    for (const auto& a : w.atoms()) {
      t.push_back(riesz_potential(mu, a.x, p));
      mean = mean + (a.mass / mass) * t.back();
    }
    for (std::size_t a = 0; a < w.size(); ++a) r.rhs += w[a].mass * norm2(t[a] - mean);
    r.rhs /= mass;
  }
  if (r.rhs > 0) r.ratio = r.lhs / r.rhs;
  else if (r.lhs > 0) r.ratio = std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace tw
