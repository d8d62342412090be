#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "twoweight/poisson.hpp"

using namespace tw;

namespace {
QuasiCube unit1(double corner = 0.0, double side = 1.0) { return {Cube{Point{corner}, side}, BiLipschitzMap::identity(1)}; }
DiscreteMeasure at1(double x, double m = 1.0) { return DiscreteMeasure(1, {{Point{x}, m}}); }
}  // namespace

TEST_CASE("Poisson integral examples") {
  FracParams p(1, 0.0);
  QuasiCube q = unit1(-0.5);
  CHECK(poisson_standard(q, at1(0.0), p) == doctest::Approx(1.0));
  CHECK(poisson_standard(q, at1(2.0), p) == doctest::Approx(1.0 / 9));
  CHECK(poisson_standard(q, at1(2.0, 3.0), p) == doctest::Approx(3.0 / 9));
  CHECK(poisson_reproducing(q, at1(0.0), p) == doctest::Approx(1.0));
  CHECK(poisson_reproducing(q, at1(2.0), p) == doctest::Approx(1.0 / 9));
  CHECK(poisson_m_weighted(q, at1(2.0), p, 1.0) == doctest::Approx(1.0 / 9));
  CHECK(poisson_m_weighted(q, at1(0.0), p, 2.0) == doctest::Approx(1.0));
  CHECK(poisson_m_weighted(q, at1(2.0), p, 2.0) == doctest::Approx(1.0 / 27));
  FracParams p3(3, 1.3);
  QuasiCube q3{Cube{Point{0.0, 0.0, 0.0}, 1.0}, BiLipschitzMap::identity(3)};
  CHECK(poisson_standard(q3, DiscreteMeasure(3, {{Point{0.5, 0.5, 0.5}, 1}}), p3) == doctest::Approx(1.0));
}

TEST_CASE("property: standard and reproducing kernels coincide for n=1, alpha=0") {
  std::mt19937_64 rng(4);
  FracParams p(1, 0.0);
  for (int t = 0; t < 100; ++t) {
    auto mu = test::random_measure(1, 10, rng, -3, 3);
    QuasiCube q = unit1(test::random_point(1, rng)[0], 0.1 + test::random_point(1, rng)[0]);
    CHECK(poisson_reproducing(q, mu, p) == doctest::Approx(poisson_standard(q, mu, p)).epsilon(1e-12));
  }
}

TEST_CASE("offset A2 examples") {
  FracParams p(1, 0.0);
  auto grid = test::unit_grid(1, 0);
  auto r = offset_A2(at1(0.25), at1(1.5), p, grid, 0, 0);
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(offset_A2(at1(0.25), DiscreteMeasure(1), p, grid, 0, 0).value == 0.0);
  CHECK(offset_A2(at1(0.25, 2.0), at1(1.5), p, grid, 0, 0).value == doctest::Approx(2.0));
}

TEST_CASE("one-tailed A2 examples") {
  FracParams p(1, 0.0);
  QuasiCube q = unit1(-0.5);
  CHECK(one_tailed_A2_term(at1(0.0), at1(0.1), p, q) == 0.0);
  CHECK(one_tailed_A2_term(at1(2.0), at1(0.1), p, q) == doctest::Approx(1.0 / 9));
  CubeFamily fam{{q}, "single"};
  CHECK(one_tailed_A2_dual(at1(0.1), at1(2.0), p, fam).value == doctest::Approx(1.0 / 9));
}

TEST_CASE("punctured A2 examples") {
  FracParams p(1, 0.0);
  QuasiCube q = unit1();
  CubeFamily fam{{q}, "single"};
  CHECK(punctured_A2(at1(0.0), at1(0.0), p, fam).value == 0.0);
  DiscreteMeasure s(1, {{Point{0.0}, 1}, {Point{0.5}, 1}}), w(1, {{Point{0.0}, 1}, {Point{0.25}, 1}});
  CHECK(punctured_A2_term(s, w, common_point_masses(s, w), p, q) == doctest::Approx(2.0));
  // no common atoms: classical ratio
  DiscreteMeasure w2(1, {{Point{0.1}, 1}, {Point{0.25}, 1}});
  CHECK(punctured_A2_term(s, w2, common_point_masses(s, w2), p, q) == doctest::Approx(4.0));
}

TEST_CASE("energy A2 examples") {
  FracParams p(1, 0.0);
  auto grid = test::unit_grid(1, 4);
  {
    WeightPair w(grid, at1(0.75, 2.0), at1(0.3));
    CHECK(energy_A2(w, p).value == 0.0);
  }
  WeightPair w(grid, at1(0.75, 2.0), DiscreteMeasure(1, {{Point{0.0}, 1}, {Point{0.5}, 1}}));
  CHECK(energy_A2_term(w, p, grid.top_index()) == doctest::Approx(0.25));
  CHECK(energy_A2(w, p).value == doctest::Approx(0.25));
  WeightPair w0(test::unit_grid(1, 0), at1(0.75, 2.0), DiscreteMeasure(1, {{Point{0.0}, 1}, {Point{0.5}, 1}}));
  CHECK(energy_A2(w0, p).value <= energy_A2(w, p).value);
  WeightPair c(grid, at1(0.5, 2.0), DiscreteMeasure(1, {{Point{0.0}, 1}, {Point{0.5}, 1}}));
  CHECK(plugged_energy_A2(c, p).value == doctest::Approx(0.25));
}

TEST_CASE("property: energy A2 lemma, identity map") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 1 + trial % 3;
    FracParams p(n, 0.5 * (trial % (2 * n)));
    auto [s, w] = test::random_pair(n, 6, 6, trial % 4, rng);
    auto grid = test::unit_grid(n, 3);
    WeightPair wp(grid, s, w);
    auto fam = wp.cube_family();
    double punct = punctured_A2(s, w, p, fam).value;
    double bound = std::max(n, 3) * punct;
    for (const auto& q : wp.family()) CHECK(energy_A2_term(wp, p, q) <= bound * (1 + 1e-9) + 1e-300);
  }
}

TEST_CASE("property: Poisson comparability constants") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + trial % 2;  // h < 1 needs n <= 3; n=3 gives h close to 1
    FracParams p(n, 0.3 * (trial % 3));
    auto c = poisson_comparability_constant(p);
    Cube K{Point::zero(n), 1.0};
    std::uniform_real_distribution<double> u(0, 1);
    double side = std::ldexp(1.0, -(1 + trial % 3));
    Point corner = Point::zero(n);
    for (int i = 0; i < n; ++i) corner[i] = std::floor(u(rng) / side) * side;
    Cube J{corner, side};
    // measure outside 2K centred at K's centre
    std::vector<Atom> atoms;
    for (int k = 0; k < 5; ++k) {
      Point x = test::random_point(n, rng, -4, 5);
      bool inside = true;
      for (int i = 0; i < n; ++i) inside = inside && x[i] >= -0.5 && x[i] < 1.5;
      if (!inside) atoms.push_back({x, 1.0});
    }
    if (atoms.empty()) continue;
    DiscreteMeasure mu(n, atoms);
    auto id = BiLipschitzMap::identity(n);
    double pj = poisson_standard({J, id}, mu, p) / J.side, pk = poisson_standard({K, id}, mu, p) / K.side;
    CHECK(pj <= c.upper * pk * (1 + 1e-12));
    CHECK(pj >= c.lower * pk * (1 - 1e-12));
    CHECK(pk <= c.one_sided * pj * (1 + 1e-12));
  }
}
