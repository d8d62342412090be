#include "twoweight/funcenergy.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <stdexcept>

namespace tw {

UpperMeasure build_upper_measure(const StoppingForest& forest, const WeightPair& w, const GoodnessCache& good) {
  UpperMeasure u;
  u.dim = w.grid().dim();
  const auto& grid = w.grid();
  for (std::size_t f = 0; f < forest.size(); ++f) {
    const CubeIndex& F = forest.cubes()[f];
    CubeFilter keep = [&](const CubeIndex& jp) {
      return forest.owner(jp) == static_cast<int>(f) && good.good(jp);
    };
    for (const auto& j : energetic_deep_subcubes(w, F, good.deep()).cubes) {
      UpperAtom a;
      const QuasiCube q = grid.cube(j);
      a.c = q.center();
      a.t = q.side();
      a.weight = w.energy_omega().projection(j, keep);
      a.j = j;
      a.f = static_cast<int>(f);
      u.atoms.push_back(a);
    }
  }
  return u;
}

bool in_tent(const QuasiCube& i, const Point& x, double t) { return t > 0 && t <= i.side() && i.contains(x); }

double poisson_extension(const DiscreteMeasure& nu, const Point& x, double t, const FracParams& p) {
  double s = 0;
  for (const auto& a : nu.atoms()) s += a.mass * t / std::pow(t * t + norm2(x - a.x), 0.5 * (p.n + 1 - p.alpha));
  return s;
}

double poisson_extension(const DiscreteMeasure& nu, const QuasiCube& q, const Point& x, double t, const FracParams& p) {
  double s = 0;
  for (const auto& a : nu.atoms())
    if (q.contains(a.x)) s += a.mass * t / std::pow(t * t + norm2(x - a.x), 0.5 * (p.n + 1 - p.alpha));
  return s;
}

double dual_poisson(const UpperMeasure& upper, const QuasiCube& i, const Point& x, const FracParams& p) {
  double s = 0;
  for (const auto& a : upper.atoms) {
    if (!in_tent(i, a.c, a.t)) continue;
    s += a.t * a.t / std::pow(a.t * a.t + norm2(x - a.c), 0.5 * (p.n + 1 - p.alpha)) * UpperMeasure::bar(a);
  }
  return s;
}

ForwardTesting forward_testing(const CubeIndex& i, const DyadicGrid& grid, const DiscreteMeasure& sigma,
                               const UpperMeasure& upper, const FracParams& p) {
  ForwardTesting r;
  const QuasiCube q = grid.cube(i);
  for (const auto& a : upper.atoms) {
    double pe = poisson_extension(sigma, q, a.c, a.t, p);
    double v = pe * pe * UpperMeasure::bar(a);
    if (grid.contains(i, a.j))
      r.local += v;
    else
      r.global += v;
  }
  r.total = r.local + r.global;
  return r;
}

double backward_testing(const CubeIndex& i, const DyadicGrid& grid, const DiscreteMeasure& sigma,
                        const UpperMeasure& upper, const FracParams& p) {
  const QuasiCube q = grid.cube(i);
  double s = 0;
  for (const auto& a : sigma.atoms()) {
    double v = dual_poisson(upper, q, a.x, p);
    s += a.mass * v * v;
  }
  return s;
}

double mu_hat_tent(const CubeIndex& i, const DyadicGrid& grid, const UpperMeasure& upper) {
  const QuasiCube q = grid.cube(i);
  double s = 0;
  for (const auto& a : upper.atoms)
    if (in_tent(q, a.c, a.t)) s += a.t * a.t * UpperMeasure::bar(a);
  return s;
}

double mu_hat_combinatorial(const CubeIndex& i, const DyadicGrid& grid, const UpperMeasure& upper) {
  double s = 0;
  for (const auto& a : upper.atoms)
    if (grid.contains(i, a.j)) s += a.weight;
  return s;
}

int tau_overlap_count(const CubeIndex& i0, const StoppingForest& forest, const UpperMeasure& upper,
                      const DyadicGrid& grid) {
  std::set<int> fs;
  for (const auto& a : upper.atoms) {
    if (a.weight <= 0 || a.f < 0) continue;
    const auto& F = forest.cubes()[static_cast<std::size_t>(a.f)];
    if (F == i0 || !grid.contains(F, i0)) continue;
    if (grid.contains(i0, a.j)) fs.insert(a.f);
  }
  return static_cast<int>(fs.size());
}

namespace {

double local_term(const Cube& outer, const WeightPair& w, const UpperAtom& a, const FracParams& p) {
  double s = 0;
  const auto& map = w.grid().map();
  for (const auto& at : w.sigma().atoms()) {
    if (!outer.contains(map.inverse(at.x))) continue;
    s += at.mass * a.t / std::pow(a.t + dist(at.x, a.c), p.n + 1 - p.alpha);
  }
  s /= a.t;
  return s * s * a.weight;
}

}  // namespace

double local_sum(const Cube& outer, const WeightPair& w, const UpperMeasure& upper, const FracParams& p) {
  double s = 0;
  const auto& grid = w.grid();
  for (const auto& a : upper.atoms) {
    if (a.weight <= 0 || !outer.contains(grid.base_cube(a.j))) continue;
    s += local_term(outer, w, a, p);
  }
  return s;
}

double refined_b(const AlternateCube& i, const WeightPair& w, const StoppingForest& forest, const UpperMeasure& upper,
                 const FracParams& p) {
  const auto& grid = w.grid();
  const int n = grid.dim();
  const Cube outer = grid.base_cube(i);
  const auto comps = alternate_components(i, n);
  double s = 0;
  for (const auto& a : upper.atoms) {
    if (a.weight <= 0 || !alternate_contains(i, a.j, n)) continue;
    const auto& F = forest.cubes()[static_cast<std::size_t>(a.f)];
    bool above = false;
    for (const auto& c : comps)
      if (!(F == c) && grid.contains(F, c)) above = true;
    if (above) s += local_term(outer, w, a, p);
  }
  return s;
}

FunctionalEnergy functional_energy(const DiscreteMeasure& sigma, const UpperMeasure& upper, const FracParams& p,
                                   int max_iter, double tol) {
  FunctionalEnergy r;
  const auto ns = static_cast<Eigen::Index>(sigma.size());
  const auto nu = static_cast<Eigen::Index>(upper.atoms.size());
  r.h.assign(sigma.size(), 0.0);
  if (ns == 0 || nu == 0) return r;
  // A maps l2 coordinates g = sqrt(m) h to sqrt(mu-bar) P(h sigma)
  Eigen::MatrixXd A(nu, ns);
  for (Eigen::Index u = 0; u < nu; ++u) {
    const auto& a = upper.atoms[static_cast<std::size_t>(u)];
    const double wu = std::sqrt(UpperMeasure::bar(a));
    for (Eigen::Index y = 0; y < ns; ++y) {
      const Atom& at = sigma[static_cast<std::size_t>(y)];
      A(u, y) = wu * std::sqrt(at.mass) * a.t / std::pow(a.t * a.t + norm2(a.c - at.x), 0.5 * (p.n + 1 - p.alpha));
    }
  }
  const Eigen::MatrixXd G = A.transpose() * A;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(ns).normalized();
  double lambda = 0;
  for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
    Eigen::VectorXd nv = G * v;
    double nl = nv.norm();
    if (nl == 0) break;
    nv /= nl;
    double diff = (nv - v).norm();
    v = nv;
    bool done = std::abs(nl - lambda) <= tol * nl && diff <= 1e-10;
    lambda = nl;
    if (done) break;
  }
  r.value = std::sqrt(std::max(0.0, v.dot(G * v)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  r.eigen_value = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  for (Eigen::Index y = 0; y < ns; ++y)
    r.h[static_cast<std::size_t>(y)] = v(y) / std::sqrt(sigma[static_cast<std::size_t>(y)].mass);
  return r;
}

}  // namespace tw
