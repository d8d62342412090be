#pragma once

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "twoweight/measure.hpp"
#include "twoweight/quasigeom.hpp"

namespace tw::test {

inline Point random_point(int n, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Point p = Point::zero(n);
  for (int i = 0; i < n; ++i) p[i] = u(rng);
  return p;
}

inline DiscreteMeasure random_measure(int n, int count, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> m(0.1, 2.0);
  std::vector<Atom> atoms;
  for (int i = 0; i < count; ++i) atoms.push_back({random_point(n, rng, lo, hi), m(rng)});
  return DiscreteMeasure(n, std::move(atoms));
}

// sigma and omega sharing `shared` atoms copied bitwise
inline std::pair<DiscreteMeasure, DiscreteMeasure> random_pair(int n, int ns, int nw, int shared, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> m(0.1, 2.0);
  std::vector<Atom> s, w;
  for (int i = 0; i < ns; ++i) s.push_back({random_point(n, rng), m(rng)});
  for (int i = 0; i < nw; ++i) w.push_back({random_point(n, rng), m(rng)});
  for (int i = 0; i < shared; ++i) {
    Point x = random_point(n, rng);
    s.push_back({x, m(rng)});
    w.push_back({x, m(rng)});
  }
  return {DiscreteMeasure(n, std::move(s)), DiscreteMeasure(n, std::move(w))};
}

inline DyadicGrid unit_grid(int n, int depth) {
  return DyadicGrid(BiLipschitzMap::identity(n), Point::zero(n), 1.0, depth);
}

// inf over k-planes of sum m dist(x, plane)^2 for k = 1 or k = n-1, by random orientations
// followed by a pattern search; independent of any eigen solver
inline double plane_fit_cost(const DiscreteMeasure& mu, const Point& xbar, const std::array<double, 3>& v, bool normal) {
  double s = 0;
  for (const auto& a : mu.atoms()) {
    double d2 = 0, dv = 0;
    for (int i = 0; i < mu.dim(); ++i) {
      double d = a.x[i] - xbar[i];
      d2 += d * d;
      dv += d * v[static_cast<std::size_t>(i)];
    }
    s += a.mass * (normal ? dv * dv : d2 - dv * dv);
  }
  return s;
}

inline std::array<double, 3> sphere_dir(int n, double th, double ph) {
  if (n == 2) return {std::cos(th), std::sin(th), 0};
  return {std::sin(ph) * std::cos(th), std::sin(ph) * std::sin(th), std::cos(ph)};
}

inline double brute_force_M(const DiscreteMeasure& mu, int k, std::mt19937_64& rng, int samples = 10000) {
  const int n = mu.dim();
  if (mu.empty()) return 0.0;
  Point xbar = Point::zero(n);
  double mass = mu.total_mass();
  for (const auto& a : mu.atoms()) xbar = xbar + (a.mass / mass) * a.x;
  if (k == 0) return std::sqrt(plane_fit_cost(mu, xbar, {0, 0, 0}, false));
  const bool normal = (k == n - 1);  // otherwise k = 1 < n - 1: fit a line
  std::uniform_real_distribution<double> u(0, 1);
  auto cost = [&](double th, double ph) { return plane_fit_cost(mu, xbar, sphere_dir(n, th, ph), normal); };
  double best = 1e300, bt = 0, bp = 0;
  for (int s = 0; s < samples; ++s) {
    double th = 2 * M_PI * u(rng), ph = std::acos(2 * u(rng) - 1);
    double c = cost(th, ph);
    if (c < best) best = c, bt = th, bp = ph;
  }
  for (double step = 0.05; step > 1e-12; step *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (auto [dt, dp] : {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
        double c = cost(bt + dt, bp + dp);
        if (c < best) best = c, bt += dt, bp += dp, moved = true;
      }
    }
  }
  return std::sqrt(std::max(0.0, best));
}

}  // namespace tw::test
