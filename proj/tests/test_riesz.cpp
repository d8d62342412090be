#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "twoweight/energy.hpp"
#include "twoweight/riesz.hpp"

using namespace tw;

namespace {
DiscreteMeasure at1(double x, double m = 1.0) { return DiscreteMeasure(1, {{Point{x}, m}}); }
QuasiCube unit1(double corner = 0.0) { return {Cube{Point{corner}, 1.0}, BiLipschitzMap::identity(1)}; }
const TruncationLattice kWide{{1e-6, 1e6}};
}  // namespace

TEST_CASE("kernel examples") {
  FracParams p1(1, 0.0), p2(2, 0.0);
  CHECK(riesz_kernel(Point{1.0}, p1)[0] == doctest::Approx(1.0));
  auto k = riesz_kernel(Point{3.0, 4.0}, p2);
  CHECK(k[0] == doctest::Approx(3.0 / 125));
  CHECK(k[1] == doctest::Approx(4.0 / 125));
  std::mt19937_64 rng(1);
  FracParams p3(3, 1.7);
  for (int t = 0; t < 100; ++t) {
    Point w = test::random_point(3, rng, -2, 2);
    auto a = riesz_kernel(w, p3), b = riesz_kernel(-1.0 * w, p3);
    for (int i = 0; i < 3; ++i) CHECK(a[i] == doctest::Approx(-b[i]));
    double r = norm(w);
    CHECK(norm(a) <= kernel_size_constant(p3) * std::pow(r, p3.alpha - 3) * (1 + 1e-12));
    CHECK(riesz_kernel_gradient(w, p3).norm() >= 0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(riesz_kernel_gradient(w, p3));
    CHECK(svd.singularValues()(0) <= kernel_smoothness_constant(p3) * std::pow(r, p3.alpha - 4) * (1 + 1e-12));
  }
}

TEST_CASE("tangent truncation examples") {
  FracParams p(1, 0.0);
  auto prof = TruncationProfile::tangent(p, 0.1, 1.0);
  CHECK(prof.S() == doctest::Approx(2.0));
  CHECK(prof(1.5) == doctest::Approx(0.5));
  CHECK(prof(2.0) == doctest::Approx(0.0));
  CHECK(prof(0.0) == 0.0);
  for (double r : {0.1, 0.3, 0.77, 1.0}) CHECK(prof(r) == 1.0 / r);
  FracParams q(3, 1.2);
  auto pq = TruncationProfile::tangent(q, 0.05, 2.0);
  for (double r : {0.05, 0.5, 2.0}) CHECK(pq(r) == std::pow(r, q.alpha - q.n));
  CHECK(std::abs(pq(pq.S())) < 1e-15);
}

TEST_CASE("truncation difference bound") {
  FracParams p(2, 0.5);
  auto prof = TruncationProfile::tangent(p, 0.1, 1.0);
  CHECK(truncation_difference_bound(Point{0.5, 0.0}, prof).lhs == 0.0);
  CHECK(truncation_difference_bound(Point{0.0, prof.S() * 1.01}, prof).lhs == 0.0);
  auto b = truncation_difference_bound(Point{1.5, 0.0}, prof);
  CHECK(b.lhs == doctest::Approx(prof(1.5)));
  CHECK(b.lhs <= b.rhs);
}

TEST_CASE("apply truncated and operator matrix") {
  FracParams p(1, 0.0);
  auto prof = TruncationProfile::tangent(p, 0.1, 10.0);
  CHECK(apply_truncated(DiscreteMeasure(1), Point{0.3}, prof, 0) == 0.0);
  CHECK(apply_truncated(at1(1.0, 2.0), Point{0.5}, prof, 0) == doctest::Approx(-4.0));
  CHECK(apply_truncated(at1(1.0, 6.0), Point{0.5}, prof, 0) == doctest::Approx(-12.0));
  auto m = operator_matrix(at1(0.0), at1(1.0), prof);
  CHECK(m.a.rows() == 1);
  CHECK(m.a(0, 0) == doctest::Approx(1.0));
  CHECK(m.norm() == doctest::Approx(1.0));
  CHECK(operator_matrix(at1(0.0), DiscreteMeasure(1), prof).norm() == 0.0);
}

TEST_CASE("testing and weak boundedness examples") {
  FracParams p(1, 0.0);
  CubeFamily fam{{unit1()}, "unit"};
  CHECK(testing_constant(at1(0.5), at1(0.75), p, kWide, fam).value == doctest::Approx(16.0));
  CHECK(testing_constant(at1(0.5), at1(1.75), p, kWide, fam).value == 0.0);
  CHECK(testing_constant_dual(at1(0.75), at1(0.5), p, kWide, fam).value == doctest::Approx(16.0));
  PairFamily pairs{{unit1(0.0), unit1(1.0)}};
  CHECK(weak_boundedness(DiscreteMeasure(1), DiscreteMeasure(1), p, kWide, pairs).value == 0.0);
  CHECK(weak_boundedness(at1(1.5), at1(0.5), p, kWide, pairs).value == doctest::Approx(1.0));
  Cube a{Point{0.0}, 1.0}, b{Point{1.0}, 1.0};
  CHECK(wbp_admissible(a, b, 2.0) == wbp_admissible(b, a, 2.0));
  CHECK_FALSE(wbp_admissible(a, a, 2.0));
}

TEST_CASE("property: operator norm is monotone in masses") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 30; ++t) {
    int n = 1 + t % 3;
    FracParams p(n, 0.4 * (t % 2));
    auto s = test::random_measure(n, 6, rng), w = test::random_measure(n, 6, rng);
    auto lat = default_lattice(s, w, 4);
    double base = operator_norm(s, w, p, lat).value;
    std::uniform_int_distribution<std::size_t> pick(0, 5);
    std::size_t i = pick(rng);
    CHECK(operator_norm(s.with_mass(i, s[i].mass * 0.5), w, p, lat).value <= base * (1 + 1e-10));
    CHECK(operator_norm(s, w.with_mass(i, w[i].mass * 0.3), p, lat).value <= base * (1 + 1e-10));
  }
}

TEST_CASE("monotonicity functional and pivotal bound") {
  FracParams p(1, 0.0);
  auto grid = test::unit_grid(1, 3);
  DiscreteMeasure w(1, {{Point{0.25}, 1}, {Point{0.75}, 1}});
  GridOccupancy occ(grid, w);
  auto m = monotonicity_functional(grid.top_index(), occ, at1(5.0), p);
  double P = 1 / (5.5 * 5.5), P2 = 1 / (5.5 * 5.5 * 5.5);
  CHECK(m.haar_term == doctest::Approx(P * P * 0.125));
  CHECK(m.moment_term == doctest::Approx(P2 * P2 * 0.125));
  auto m3 = monotonicity_functional(grid.top_index(), occ, at1(5.0, 3.0), p);
  CHECK(m3.phi == doctest::Approx(3 * m.phi));
  GridOccupancy occ1(grid, at1(0.3));
  CHECK(monotonicity_functional(grid.top_index(), occ1, at1(5.0), p).phi == 0.0);
  CHECK_THROWS(monotonicity_functional(grid.top_index(), occ, at1(1.2), p));

  std::vector<double> psi{1.0};
  CHECK(pivotal_bound_check(unit1(), psi, at1(0.5), at1(10.0), p, 8.0) == doctest::Approx(10.5 * 10.5 / 9.5));
  std::vector<double> zero{0.0};
  CHECK(pivotal_bound_check(unit1(), zero, at1(0.5), at1(10.0), p, 8.0) == 0.0);
  CHECK(pivotal_bound_check(unit1(), psi, at1(0.5), DiscreteMeasure(1), p, 8.0) == 0.0);
}

TEST_CASE("semiharmonicity") {
  CHECK(semiharmonic_laplacian(Point{1.0, 0.0}, FracParams(2, 0.5), 2) == doctest::Approx(0.25));
  CHECK(semiharmonic_laplacian(Point{0.3, -0.7, 0.2}, FracParams(3, 2.0), 2) == 0.0);
  CHECK(reversal_admissible(2, 1, 0.5));
  CHECK_FALSE(reversal_admissible(2, 1, 1.0));
  CHECK(reversal_admissible(3, 1, 2.5));
  CHECK_FALSE(reversal_admissible(3, 1, 1.5));
  CHECK(reversal_admissible(3, 2, 1.5));
  CHECK_FALSE(reversal_admissible(3, 2, 2.0));
  // sign constancy for 2 <= ell <= n-1 inside the admissible set
  std::mt19937_64 rng(3);
  FracParams p(3, 2.4);
  int sgn = 0;
  for (int t = 0; t < 200; ++t) {
    double v = semiharmonic_laplacian(test::random_point(3, rng, -1, 1), p, 2);
    int s = v > 0 ? 1 : -1;
    if (sgn == 0) sgn = s;
    CHECK(s == sgn);
  }
}

TEST_CASE("riesz gradient") {
  FracParams p(3, 1.5);
  DiscreteMeasure mu(3, {{Point{2.0, 0.0, 0.0}, 1.0}});
  auto g = riesz_gradient(Point::zero(3), mu, p);
  CHECK((g.m - g.m.transpose()).norm() <= 1e-12);
  // w = (-2,0,0): diag(r^-e - e r^-e, r^-e, r^-e) with e = 2.5
  double r = 2.0, e = 2.5;
  std::vector<double> expect{std::pow(r, -e), std::pow(r, -e), (1 - e) * std::pow(r, -e)};
  std::vector<double> got = g.eigenvalues;
  std::sort(got.begin(), got.end());
  std::sort(expect.begin(), expect.end());
  for (int i = 0; i < 3; ++i) CHECK(got[static_cast<std::size_t>(i)] == doctest::Approx(expect[static_cast<std::size_t>(i)]));

  std::mt19937_64 rng(5);
  FracParams q(3, 0.7);
  auto nu = test::random_measure(3, 5, rng, 2, 3);
  Point z = test::random_point(3, rng, -0.5, 0.5);
  auto gg = riesz_gradient(z, nu, q);
  const double beta = q.alpha + 1 - q.n;
  for (int ell = 1; ell <= 3; ++ell) {
    double tr = 0, closed = 0;
    for (int i = 0; i < ell; ++i) tr += gg.m(i, i);
    for (const auto& a : nu.atoms()) closed += a.mass * semiharmonic_laplacian(z - a.x, q, ell) / beta;
    CHECK(tr == doctest::Approx(closed).epsilon(1e-10));
  }
}

TEST_CASE("energy reversal examples") {
  FracParams p(2, 1.5);
  QuasiCube J{Cube{Point{-0.5, -0.5}, 1.0}, BiLipschitzMap::identity(2)};
  DiscreteMeasure mu(2, {{Point{20.0, 3.0}, 1.0}});
  auto single = energy_reversal_check(J, mu, DiscreteMeasure(2, {{Point{0.1, 0.1}, 1}}), p, 8.0);
  CHECK(single.lhs == 0.0);
  CHECK(single.ratio == 0.0);
  DiscreteMeasure iso(2, {{Point{-0.25, -0.25}, 1}, {Point{0.25, -0.25}, 1}, {Point{-0.25, 0.25}, 1}, {Point{0.25, 0.25}, 1}});
  auto none = energy_reversal_check(J, DiscreteMeasure(2), iso, p, 8.0);
  CHECK(none.ratio == 0.0);
  auto r = energy_reversal_check(J, mu, iso, p, 8.0);
  CHECK(r.lhs > 0);
  CHECK(r.rhs > 0);
  CHECK(std::isfinite(r.ratio));
  CHECK_THROWS(energy_reversal_check(J, DiscreteMeasure(2, {{Point{1.0, 1.0}, 1.0}}), iso, p, 8.0));
}
