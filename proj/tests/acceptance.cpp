// Acceptance run: one line per criterion with pass/fail and wall time.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "support.hpp"
#include "twoweight/cli.hpp"

using namespace tw;

namespace {

struct Outcome {
  bool pass = true;
  std::string note;
};

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (dt > limit_s) {
    o.pass = false;
    o.note += " (over the " + std::to_string(static_cast<int>(limit_s)) + " s budget)";
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %-34s %8.2f s  %s\n", o.pass ? "PASS" : "FAIL", id, title, dt, o.note.c_str());
  std::fflush(stdout);
}

cli::Scenario scenario(int n, double alpha, int depth, const std::string& map = "identity", double param = 0.0) {
  cli::Scenario s;
  s.dim = n;
  s.alpha = alpha;
  s.grid.depth = depth;
  s.map = map;
  s.map_param = param;
  s.goodness = GoodnessParams(3, 0.5, 1, 8.0);
  return s;
}

// fold a suite report into an outcome, keeping the worst asserted ratio for the note
void absorb(const cli::SuiteReport& r, Outcome& o, std::string& worst_note, double& worst_ratio) {
  for (const auto& c : r.checks) {
    if (!c.asserted) continue;
    if (!c.passed) {
      o.pass = false;
      o.note += "[" + c.name + " failed: " + c.witness.dump() + "] ";
    }
    double ratio = c.bound > 0 ? c.worst / c.bound : c.worst;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_note = c.name;
    }
  }
}

std::string fmt(const char* f, double a) {
  char b[128];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

// ---- 1 ----
Outcome haar_suite() {
  Outcome o;
  std::string wn;
  double wr = 0;
  int measures = 0;
  for (int n = 1; n <= 3; ++n) {
    const int depth = n == 3 ? 4 : 6;
    for (const std::string gen : {"uniform-atoms", "separated-at-depth"}) {
      cli::CorpusSpec spec;
      spec.generator = gen;
      spec.seed = 100 + static_cast<std::uint64_t>(n);
      spec.count = n == 1 ? 34 : 33;
      spec.sigma_atoms = gen == "uniform-atoms" ? 200 : (n == 3 ? 60 : 100);
      spec.omega_atoms = 0;
      auto pairs = cli::generate_corpus(spec, n);
      measures += static_cast<int>(pairs.size());
      absorb(cli::run_suite("haar", scenario(n, 0.0, depth), pairs), o, wn, wr);
    }
  }
  o.note += std::to_string(measures) + " measures; worst ratio to bound " + fmt("%.3g", wr) + " (" + wn + ")";
  return o;
}

// ---- 2 ----
Outcome energy_a2() {
  Outcome o;
  std::string wn;
  double wr = 0;
  int pairs_total = 0;
  struct Group {
    int n;
    double alpha;
    std::string map;
    double param;
  };
  const Group groups[] = {{1, 0.0, "identity", 0},  {1, 0.5, "identity", 0},  {2, 0.0, "identity", 0},
                          {2, 1.2, "identity", 0},  {2, 0.5, "shear", 0.25},  {2, 1.0, "spiral", 0.05},
                          {3, 0.0, "identity", 0},  {3, 1.5, "identity", 0},  {3, 2.5, "identity", 0},
                          {2, 1.7, "shear", 0.2}};
  std::uint64_t seed = 200;
  for (const auto& g : groups) {
    cli::CorpusSpec spec;
    spec.generator = "common-atoms";
    spec.count = 50;
    spec.seed = seed++;
    spec.sigma_atoms = 10;
    spec.omega_atoms = 10;
    spec.common = 6;
    auto pairs = cli::generate_corpus(spec, g.n);
    pairs_total += static_cast<int>(pairs.size());
    absorb(cli::run_suite("lemma-energy-a2", scenario(g.n, g.alpha, g.n == 3 ? 4 : 5, g.map, g.param), pairs), o, wn, wr);
  }
  o.note += std::to_string(pairs_total) + " pairs; worst energy/bound ratio " + fmt("%.3g", wr);
  return o;
}

// ---- 3 ----
Outcome variance_identity() {
  Outcome o;
  std::mt19937_64 rng(300);
  double worst = 0;
  for (auto [n, k] : {std::pair{2, 1}, {3, 1}, {3, 2}})
    for (int t = 0; t < 100; ++t) {
      auto mu = test::random_measure(n, 4 + t % 12, rng);
      const double m = moment_spectrum(mu).M[static_cast<std::size_t>(k)];
      const double b = test::brute_force_M(mu, k, rng, 10000);
      worst = std::max(worst, std::abs(m - b));
    }
  o.pass = worst <= 1e-6;
  o.note = "300 instances; max |M_k - oracle| " + fmt("%.3g", worst);
  return o;
}

// ---- 4 ----
double fd_laplacian(const Point& x, double beta, int ell) {
  auto f = [&](const Point& y) { return std::pow(norm(y), beta); };
  double s = 0;
  for (int i = 0; i < ell; ++i) {
    const double h = 1e-3 * std::max(1.0, std::abs(x[i]));
    Point a = x, b = x, c = x, d = x;
    a[i] += 2 * h;
    b[i] += h;
    c[i] -= h;
    d[i] -= 2 * h;
    s += (-f(a) + 16 * f(b) - 30 * f(x) + 16 * f(c) - f(d)) / (12 * h * h);
  }
  return s;
}

Outcome semiharmonicity() {
  Outcome o;
  std::mt19937_64 rng(400);
  double worst = 0;
  int configs = 0;
  for (int n = 2; n <= 3; ++n)
    for (int ell = 2; ell <= n; ++ell)
      for (double alpha = 0.0; alpha < n; alpha += 0.25) {
        if (!semiharmonic_admissible(n, ell, alpha)) continue;
        ++configs;
        const FracParams p(n, alpha);
        const double beta = alpha - n + 1;
        for (int t = 0; t < 100; ++t) {
          Point x = test::random_point(n, rng, -2, 2);
          while (norm(x) < 0.5) x = test::random_point(n, rng, -2, 2);
          const double cf = semiharmonic_laplacian(x, p, ell);
          const double fd = fd_laplacian(x, beta, ell);
          worst = std::max(worst, std::abs(cf - fd) / std::max(std::abs(cf), 1e-300));
        }
      }
  o.pass = worst <= 1e-6;
  o.note = std::to_string(configs) + " (n,ell,alpha) configs x 100 points; max relative error " + fmt("%.3g", worst);
  return o;
}

// ---- 5 ----
Outcome truncation() {
  Outcome o;
  std::mt19937_64 rng(500);
  std::uniform_real_distribution<double> u(0, 1);
  long exact_misses = 0, majorant_violations = 0;
  double root_err = 0;
  for (int c = 0; c < 20; ++c) {
    const int n = 1 + c % 3;
    const FracParams p(n, u(rng) * (n - 0.1));
    const double delta = 0.01 + 0.1 * u(rng), R = delta * (5 + 50 * u(rng));
    auto prof = TruncationProfile::tangent(p, delta, R);
    for (int t = 0; t < 1000; ++t) {
      const double r = delta + (R - delta) * u(rng);
      if (prof(r) != std::pow(r, p.alpha - p.n)) ++exact_misses;
    }
    if (prof(delta) != std::pow(delta, p.alpha - p.n) || prof(R) != std::pow(R, p.alpha - p.n)) ++exact_misses;
    // zero of the outer tangent piece by bisection on profile values
    const double r1 = R * (1 + 1e-3), r2 = R * (1 + 0.5 / (p.n - p.alpha));
    const double f1 = prof(r1), f2 = prof(r2);
    auto line = [&](double r) { return f1 + (f2 - f1) * (r - r1) / (r2 - r1); };
    double lo = R, hi = 10 * R * (p.n - p.alpha + 1) / (p.n - p.alpha) + 10 * R;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (line(mid) > 0 ? lo : hi) = mid;
    }
    const double formula = R * (p.n - p.alpha + 1) / (p.n - p.alpha);
    root_err = std::max(root_err, std::abs(lo - formula) / formula);
    root_err = std::max(root_err, std::abs(prof.S() - formula) / formula);
    for (int t = 0; t < 5000; ++t) {
      const double r = std::exp(std::log(delta / 20) + u(rng) * std::log(20 * prof.S() / (delta / 20)));
      Point w = test::random_point(n, rng, -1, 1);
      double len = norm(w);
      if (len == 0) continue;
      w = (r / len) * w;
      auto b = truncation_difference_bound(w, prof);
      if (b.lhs > b.rhs * (1 + 1e-12)) ++majorant_violations;
    }
  }
  o.pass = exact_misses == 0 && majorant_violations == 0 && root_err <= 1e-12;
  o.note = "exact misses " + std::to_string(exact_misses) + ", root rel err " + fmt("%.2g", root_err) +
           ", majorant violations " + std::to_string(majorant_violations) + " / 100000";
  return o;
}

// ---- 6 ----
Outcome monotonicity() {
  Outcome o;
  std::mt19937_64 rng(600);
  std::uniform_real_distribution<double> u(0, 1);
  int violations = 0;
  double worst = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + t % 3;
    const FracParams p(n, u(rng) * (n - 0.1));
    auto s = test::random_measure(n, 6, rng), w = test::random_measure(n, 6, rng);
    auto lat = default_lattice(s, w, 6);
    const double base = operator_norm(s, w, p, lat).value;
    std::uniform_int_distribution<std::size_t> pick(0, 5);
    const std::size_t i = pick(rng);
    const double f = 0.05 + 0.9 * u(rng);
    const double after = (t % 2 == 0) ? operator_norm(s.with_mass(i, s[i].mass * f), w, p, lat).value
                                      : operator_norm(s, w.with_mass(i, w[i].mass * f), p, lat).value;
    worst = std::max(worst, (after - base) / base);
    if (after > base * (1 + 1e-10)) ++violations;
  }
  o.pass = violations == 0;
  o.note = "200 trials; violations " + std::to_string(violations) + ", max relative increase " + fmt("%.2g", worst);
  return o;
}

// ---- 7 ----
Outcome depoint() {
  Outcome o;
  std::string wn;
  double wr = 0;
  for (int n = 1; n <= 3; ++n) {
    cli::CorpusSpec spec;
    spec.generator = "common-atoms";
    spec.seed = 700 + static_cast<std::uint64_t>(n);
    spec.count = n == 1 ? 168 : 166;
    spec.sigma_atoms = 20;
    spec.omega_atoms = 20;
    spec.common = 50;
    absorb(cli::run_suite("greedy-depoint", scenario(n, 0.0, 3), cli::generate_corpus(spec, n)), o, wn, wr);
  }
  o.note += "500 instances, up to 50 common atoms; worst required/kept " + fmt("%.3g", wr);
  return o;
}

// ---- 8 ----
Outcome corona() {
  Outcome o;
  std::string wn;
  double wr = 0;
  int nontrivial_full = 0, nontrivial_free = 0, total = 0;
  for (int n = 1; n <= 2; ++n)
    for (const std::string gen : {"uniform-atoms", "stopping-stress"}) {
      cli::CorpusSpec spec;
      spec.generator = gen;
      spec.seed = 800 + static_cast<std::uint64_t>(n);
      spec.count = 25;
      spec.sigma_atoms = 12;
      spec.omega_atoms = 16;
      auto r = cli::run_suite("corona", scenario(n, n == 1 ? 0.0 : 0.5, n == 1 ? 8 : 5), cli::generate_corpus(spec, n));
      absorb(r, o, wn, wr);
      for (const auto& inst : r.values["instances"]) {
        ++total;
        if (inst["energy_stopping_cubes"]["full"].get<int>() > 1) ++nontrivial_full;
        if (inst["energy_stopping_cubes"]["no_A2"].get<int>() > 1) ++nontrivial_free;
      }
    }
  o.note += std::to_string(total) + " instances; energy stops beyond S0 in " + std::to_string(nontrivial_full) +
            " (full threshold) / " + std::to_string(nontrivial_free) + " (without A2 terms)";
  return o;
}

// ---- 9 ----
double fwd_oracle(const QuasiCube& I, const DiscreteMeasure& sigma, const UpperMeasure& u, const FracParams& p) {
  auto k = [&](double t, const Point& x, const Point& y) {
    double d2 = 0;
    for (int i = 0; i < x.dim; ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
    return t / std::pow(t * t + d2, (p.n + 1 - p.alpha) / 2);
  };
  double s = 0;
  for (const auto& a : u.atoms)
    for (const auto& y : sigma.atoms())
      for (const auto& z : sigma.atoms())
        if (I.base.contains(y.x) && I.base.contains(z.x))
          s += y.mass * z.mass * k(a.t, a.c, y.x) * k(a.t, a.c, z.x) * a.weight / (a.t * a.t);
  return s;
}

double bwd_oracle(const QuasiCube& I, const DiscreteMeasure& sigma, const UpperMeasure& u, const FracParams& p) {
  auto k = [&](double t, const Point& x, const Point& y) {
    double d2 = 0;
    for (int i = 0; i < x.dim; ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
    return t * t / std::pow(t * t + d2, (p.n + 1 - p.alpha) / 2);
  };
  auto inside = [&](const UpperAtom& a) { return I.base.contains(a.c) && a.t <= I.base.side; };
  double s = 0;
  for (const auto& y : sigma.atoms())
    for (const auto& a : u.atoms)
      for (const auto& b : u.atoms)
        if (inside(a) && inside(b))
          s += y.mass * k(a.t, y.x, a.c) * a.weight / (a.t * a.t) * k(b.t, y.x, b.c) * b.weight / (b.t * b.t);
  return s;
}

Outcome funcenergy() {
  Outcome o;
  long tent_mismatch = 0, pairs = 0;
  for (int n = 1; n <= 3; ++n) {
    const int depth = n == 3 ? 4 : 6;
    auto grid = test::unit_grid(n, depth);
    std::vector<CubeIndex> all;
    std::vector<QuasiCube> q;
    for (int l = 0; l <= depth; ++l)
      for (const auto& c : grid.cubes_at(l)) {
        all.push_back(c);
        q.push_back(grid.cube(c));
      }
    std::vector<Point> centers;
    for (const auto& c : q) centers.push_back(c.center());
    for (std::size_t i = 0; i < all.size(); ++i)
      for (std::size_t j = 0; j < all.size(); ++j) {
        ++pairs;
        if (in_tent(q[i], centers[j], q[j].side()) != grid.contains(all[i], all[j])) ++tent_mismatch;
      }
  }
  std::mt19937_64 rng(900);
  double mu_err = 0, fwd_err = 0, bwd_err = 0;
  int nontrivial = 0;
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + t % 2;
    const FracParams p(n, 0.4 * (t % 3));
    auto grid = test::unit_grid(n, n == 1 ? 7 : 5);
    auto sigma = test::random_measure(n, 8 + t % 12, rng);
    auto omega = test::random_measure(n, 20, rng);
    WeightPair w(grid, sigma, omega);
    GoodnessCache good(w.grid(), GoodnessParams(3, 0.5, 1, 8.0).deep());
    std::vector<double> f(sigma.size());
    std::exponential_distribution<double> ex(1.0);
    for (auto& x : f) x = std::pow(ex(rng), 3);
    auto forest = cz_stopping(f, w.occ_sigma(), 2.0);
    auto upper = build_upper_measure(forest, w, good);
    if (mu_hat_combinatorial(w.grid().top_index(), w.grid(), upper) > 0) ++nontrivial;
    for (int l = 0; l <= w.grid().depth(); ++l)
      for (const auto& I : w.grid().cubes_at(l)) {
        const double a = mu_hat_tent(I, w.grid(), upper), b = mu_hat_combinatorial(I, w.grid(), upper);
        mu_err = std::max(mu_err, std::abs(a - b) / std::max(1.0, b));
        if (l > 2) continue;
        const QuasiCube qi = w.grid().cube(I);
        const auto fw = forward_testing(I, w.grid(), sigma, upper, p);
        const double fo = fwd_oracle(qi, sigma, upper, p);
        fwd_err = std::max(fwd_err, std::abs(fw.total - fo) / std::max(1.0, fo));
        const double bo = bwd_oracle(qi, sigma, upper, p);
        bwd_err = std::max(bwd_err, std::abs(backward_testing(I, w.grid(), sigma, upper, p) - bo) / std::max(1.0, bo));
      }
  }
  o.pass = tent_mismatch == 0 && mu_err <= 1e-10 && fwd_err <= 1e-9 && bwd_err <= 1e-9 && nontrivial >= 25;
  o.note = "tent mismatches " + std::to_string(tent_mismatch) + "/" + std::to_string(pairs) + "; mu-hat err " +
           fmt("%.2g", mu_err) + "; forward err " + fmt("%.2g", fwd_err) + "; backward err " + fmt("%.2g", bwd_err) +
           "; nonzero upper measures " + std::to_string(nontrivial) + "/50";
  return o;
}

// ---- 10 ----
Outcome reversal() {
  Outcome o;
  std::string worst_all;
  for (auto [n, k] : {std::pair{2, 1}, {3, 1}, {3, 2}}) {
    const double c0 = cli::frozen_reversal_c0(n, k);
    const QuasiCube J{Cube{Point::zero(n), 1.0}, BiLipschitzMap::identity(n)};
    double worst = 0, contrast = 0;
    int dispersed = 0;
    for (const auto& in : cli::reversal_corpus(n, k, "isotropic-dispersed", 100, 1000 + static_cast<std::uint64_t>(n * 10 + k))) {
      auto d = is_k_energy_dispersed(in.omega, k, 0.3, CubeFamily{{J}, "J"});
      if (!d.ok) continue;
      ++dispersed;
      auto r = energy_reversal_check(J, in.mu, in.omega, FracParams(n, in.alpha), 8.0);
      worst = std::max(worst, r.ratio);
    }
    for (const auto& in : cli::reversal_corpus(n, k, "line-concentrated", 100, 1100 + static_cast<std::uint64_t>(n * 10 + k))) {
      auto r = energy_reversal_check(J, in.mu, in.omega, FracParams(n, in.alpha), 8.0);
      contrast = std::max(contrast, r.ratio);
    }
    if (!(worst <= c0) || dispersed < 100) o.pass = false;
    worst_all += "(n=" + std::to_string(n) + ",k=" + std::to_string(k) + ") " + std::to_string(dispersed) +
                 " dispersed, max " + fmt("%.3g", worst) + " <= C0 " + fmt("%.4g", c0) + ", line corpus max " +
                 fmt("%.3g", contrast) + "; ";
  }
  o.note = worst_all;
  return o;
}

// ---- 11 ----
Outcome necessity() {
  Outcome o;
  std::string note;
  for (int n = 1; n <= 3; ++n) {
    const double c = cli::frozen_necessity_c(n);
    auto corpus = cli::necessity_corpus(n, 200, 1200 + static_cast<std::uint64_t>(n));
    std::vector<double> r(corpus.size());
    cli::parallel_for(corpus.size(), [&](std::size_t i) { r[i] = cli::necessity_ratio(corpus[i], n == 3 ? 3 : 5); });
    double worst = 0;
    for (double x : r) worst = std::max(worst, x);
    if (!(worst <= c)) o.pass = false;
    note += "n=" + std::to_string(n) + ": max " + fmt("%.3g", worst) + " <= C " + fmt("%.4g", c) + "; ";
  }
  o.note = "200 pairs per n; " + note;
  return o;
}

}  // namespace

int main() {
  criterion(1, "Haar suite", 60, haar_suite);
  criterion(2, "Lemma energy A2 (max{n,3})", 120, energy_a2);
  criterion(3, "Variance identity M_k", 120, variance_identity);
  criterion(4, "Semi-harmonicity", 30, semiharmonicity);
  criterion(5, "Truncation suite", 30, truncation);
  criterion(6, "Operator-norm monotonicity", 60, monotonicity);
  criterion(7, "Greedy depoint", 30, depoint);
  criterion(8, "Corona suite", 120, corona);
  criterion(9, "Functional-energy identities", 60, funcenergy);
  criterion(10, "Reversal suite", 120, reversal);
  criterion(11, "Necessity direction", 120, necessity);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
