#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "twoweight/cli.hpp"

namespace tw::cli {

namespace {

// one check evaluated on one instance; passes iff value <= bound (with the given tolerance)
struct Item {
  std::string name;
  bool asserted = true;
  bool applies = true;
  bool passed = true;
  double value = 0.0;
  double bound = 0.0;
  std::string family;
  std::string detail;
};

struct InstanceOut {
  std::vector<Item> items;
  Json values = Json::object();
};

Item le(std::string name, double value, double bound, double rel_tol = 0.0) {
  Item it;
  it.name = std::move(name);
  it.value = value;
  it.bound = bound;
  it.passed = std::isfinite(value) && value <= bound + rel_tol * std::abs(bound);
  return it;
}

double severity(const Item& it) {
  if (!it.passed) return std::numeric_limits<double>::infinity();
  if (it.bound > 0) return it.value / it.bound;
  return it.value;
}

Json num(double v) { return std::isfinite(v) ? Json(v) : Json("inf"); }

SuiteReport aggregate(const std::string& suite, const std::vector<InstanceOut>& outs,
                      const std::vector<MeasurePair>& pairs) {
  SuiteReport r;
  r.name = suite;
  std::vector<std::string> order;
  for (const auto& o : outs)
    for (const auto& it : o.items)
      if (std::find(order.begin(), order.end(), it.name) == order.end()) order.push_back(it.name);
  for (const auto& name : order) {
    Check c;
    c.name = name;
    long worst = -1;
    double sev = -1;
    std::size_t applied = 0;
    for (std::size_t i = 0; i < outs.size(); ++i)
      for (const auto& it : outs[i].items) {
        if (it.name != name) continue;
        c.asserted = it.asserted;
        c.family = it.family;
        if (!it.applies) continue;
        ++applied;
        if (!it.passed) c.passed = false;
        double s = severity(it);
        if (worst < 0 || s > sev) {
          sev = s;
          worst = static_cast<long>(i);
          c.worst = it.value;
          c.bound = it.bound;
          c.witness = Json{{"instance", i}, {"detail", it.detail}};
        }
      }
    if (worst >= 0 && !c.passed) {
      const auto& p = pairs[static_cast<std::size_t>(worst)];
      c.witness["sigma"] = measure_to_json(p.sigma);
      c.witness["omega"] = measure_to_json(p.omega);
    }
    if (worst < 0) c.witness = Json{{"instance", nullptr}, {"detail", "no applicable instance"}};
    c.witness["applicable_instances"] = applied;
    r.checks.push_back(std::move(c));
  }
  Json per = Json::array();
  for (const auto& o : outs) per.push_back(o.values);
  r.values["instances"] = per;
  return r;
}

std::mt19937_64 instance_rng(const Scenario& s, std::size_t i, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint64_t>(s.corpus.seed), static_cast<std::uint64_t>(i), salt};
  return std::mt19937_64(seq);
}

std::string describe_lattice(const Scenario& s) {
  if (!s.lattice.empty()) return "explicit lattice of " + std::to_string(s.lattice.size()) + " (delta,R) pairs";
  return "log lattice " + std::to_string(s.lattice_per_axis) + " per axis, delta < R";
}

TruncationLattice lattice_for(const Scenario& s, const MeasurePair& pr) {
  return s.lattice.empty() ? default_lattice(pr.sigma, pr.omega, s.lattice_per_axis) : s.lattice;
}

// ---- constants -------------------------------------------------------------

InstanceOut constants_instance(const Scenario& s, const MeasurePair& pr, std::size_t idx) {
  InstanceOut o;
  const FracParams p(s.dim, s.alpha);
  Json v;
  double vals[12] = {};
  double fe_gap = 0;
  if (pr.sigma.empty() || pr.omega.empty()) {
    // every constant pairs sigma mass with omega mass
    v = Json{{"muckenhoupt", {{"offset_A2", 0.0}, {"one_tailed_A2", 0.0}, {"one_tailed_A2_dual", 0.0},
                              {"punct_A2", 0.0}, {"punct_A2_dual", 0.0}, {"energy_A2", 0.0}, {"energy_A2_dual", 0.0},
                              {"plugged_energy_A2", 0.0}, {"plugged_energy_A2_dual", 0.0}, {"family", "empty"}}},
             {"strong_energy_sq", {{"value", 0.0}, {"family", "empty"}}},
             {"strong_energy_dual_sq", {{"value", 0.0}, {"family", "empty"}}},
             {"testing_sq", {{"value", 0.0}, {"family", "empty"}}},
             {"testing_dual_sq", {{"value", 0.0}, {"family", "empty"}}},
             {"weak_boundedness", {{"value", 0.0}, {"family", "empty"}}},
             {"operator_norm", {{"value", 0.0}, {"family", "empty"}}},
             {"functional_energy", {{"value", 0.0}, {"eigen", 0.0}, {"family", "empty"}}}};
  } else {
    const DyadicGrid grid = scenario_grid(s, pr);
    WeightPair w(grid, pr.sigma, pr.omega);
    auto mr = muckenhoupt_report(w, p);
    StrongEnergyOptions opt;
    opt.seed = s.corpus.seed + idx;
    auto e = strong_energy_constant(w, p, s.goodness, opt);
    auto ed = strong_energy_constant_dual(w.grid(), pr.sigma, pr.omega, p, s.goodness, opt);
    auto lat = lattice_for(s, pr);
    auto fam = w.cube_family();
    auto t = testing_constant(pr.sigma, pr.omega, p, lat, fam);
    auto td = testing_constant_dual(pr.sigma, pr.omega, p, lat, fam);
    auto wbp = weak_boundedness(pr.sigma, pr.omega, p, lat, wbp_pair_family(w, 2.0));
    auto nn = operator_norm(pr.sigma, pr.omega, p, lat);
    GoodnessCache good(w.grid(), s.goodness.deep());
    StoppingForest top({w.grid().top_index()}, {1.0}, w.grid());
    auto upper = build_upper_measure(top, w, good);
    auto fe = functional_energy(pr.sigma, upper, p);
    fe_gap = std::abs(fe.value - fe.eigen_value) / std::max(1e-300, fe.eigen_value);
    if (fe.eigen_value == 0) fe_gap = fe.value;
    const std::string ld = describe_lattice(s);
    v = Json{{"muckenhoupt",
              {{"offset_A2", mr.offset_A2},
               {"one_tailed_A2", mr.one_tailed_A2},
               {"one_tailed_A2_dual", mr.one_tailed_A2_dual},
               {"punct_A2", mr.punct_A2},
               {"punct_A2_dual", mr.punct_A2_dual},
               {"energy_A2", mr.energy_A2},
               {"energy_A2_dual", mr.energy_A2_dual},
               {"plugged_energy_A2", mr.plugged_energy_A2},
               {"plugged_energy_A2_dual", mr.plugged_energy_A2_dual},
               {"family", mr.cube_family_descriptor}}},
             {"strong_energy_sq", {{"value", e.value}, {"witness", e.witness}, {"family", e.family_descriptor}}},
             {"strong_energy_dual_sq", {{"value", ed.value}, {"witness", ed.witness}, {"family", ed.family_descriptor}}},
             {"testing_sq", {{"value", t.value}, {"witness", t.witness}, {"family", fam.descriptor + "; " + ld}}},
             {"testing_dual_sq", {{"value", td.value}, {"witness", td.witness}, {"family", fam.descriptor + "; " + ld}}},
             {"weak_boundedness", {{"value", wbp.value}, {"witness", wbp.witness}, {"family", "admissible pairs C=2; " + ld}}},
             {"operator_norm", {{"value", nn.value}, {"witness", nn.witness}, {"family", ld}}},
             {"functional_energy",
              {{"value", fe.value}, {"eigen", fe.eigen_value}, {"family", "upper measure of the single-corona forest"}}}};
    double tmp[12] = {mr.offset_A2, mr.one_tailed_A2, mr.punct_A2, mr.energy_A2, mr.plugged_energy_A2, e.value,
                      ed.value,     t.value,          td.value,    wbp.value,    nn.value,             fe.value};
    std::copy(std::begin(tmp), std::end(tmp), std::begin(vals));
  }
  double bad = 0;
  for (double x : vals)
    if (!std::isfinite(x) || x < 0) bad += 1;
  Item fin = le("constants finite and nonnegative", bad, 0.0);
  fin.family = "all reported constants";
  fin.detail = bad > 0 ? "non-finite or negative constant" : "";
  o.items.push_back(fin);
  Item gap = le("functional energy: power iteration vs eigensolver", fe_gap, 1e-6);
  gap.family = "upper measure of the single-corona forest";
  o.items.push_back(gap);
  o.values = v;
  return o;
}

// ---- lemma energy A2 --------------------------------------------------------

InstanceOut energy_a2_instance(const Scenario& s, const MeasurePair& pr, std::size_t) {
  InstanceOut o;
  const FracParams p(s.dim, s.alpha);
  const DyadicGrid grid = scenario_grid(s, pr);
  WeightPair w(grid, pr.sigma, pr.omega);
  auto fam = w.cube_family();
  const double c = std::max(s.dim, 3);
  auto ea = energy_A2(w, p);
  auto pa = punctured_A2(pr.sigma, pr.omega, p, fam);
  auto ead = energy_A2_dual(w, p);
  auto pad = punctured_A2_dual(pr.sigma, pr.omega, p, fam);
  Item a = le("energy A2 <= max(n,3) punctured A2", ea.value, c * pa.value, 1e-9);
  a.family = fam.descriptor;
  a.detail = ea.witness;
  Item b = le("dual energy A2 <= max(n,3) dual punctured A2", ead.value, c * pad.value, 1e-9);
  b.family = fam.descriptor;
  b.detail = ead.witness;
  o.items = {a, b};
  o.values = Json{{"energy_A2", ea.value}, {"punct_A2", pa.value}, {"energy_A2_dual", ead.value},
                  {"punct_A2_dual", pad.value}, {"common_points", w.common().points.size()}};
  return o;
}

// ---- reversal ---------------------------------------------------------------

}  // namespace

DiscreteMeasure exterior_measure(const DiscreteMeasure& sigma, const QuasiCube& j, double gamma) {
  const int n = sigma.dim();
  const Point c = j.center();
  std::vector<Atom> out;
  for (const auto& a : sigma.atoms()) {
    Point d = a.x - c;
    double len = norm(d);
    if (len == 0) {
      d = Point::zero(n);
      d[0] = 1;
      len = 1;
    }
    const double R = 0.5 * gamma * std::sqrt(static_cast<double>(n)) * j.side() * (1.5 + len / j.side());
    out.push_back({c + (R / len) * d, a.mass});
  }
  return DiscreteMeasure(n, std::move(out));
}

namespace {

InstanceOut reversal_instance(const Scenario& s, const MeasurePair& pr, std::size_t) {
  InstanceOut o;
  const FracParams p(s.dim, s.alpha);
  const DyadicGrid grid = scenario_grid(s, pr);
  const QuasiCube J = grid.cube(grid.top_index());
  DiscreteMeasure omega = pr.omega.restricted(J);
  DiscreteMeasure mu = exterior_measure(pr.sigma, J, s.goodness.gamma);
  auto disp = is_k_energy_dispersed(omega, s.k, s.dispersion_threshold, CubeFamily{{J}, "top quasicube"});
  auto rv = energy_reversal_check(J, mu, omega, p, s.goodness.gamma);
  const double c0 = s.reversal_c0 > 0 ? s.reversal_c0 : frozen_reversal_c0(s.dim, s.k);
  Item a = le("reversal ratio, k-energy-dispersed omega", rv.ratio, c0);
  a.applies = disp.ok;
  a.family = "J = top quasicube, mu outside gamma J";
  std::ostringstream d;
  d << "dispersion ratio " << disp.worst_ratio << ", lhs " << rv.lhs << ", rhs " << rv.rhs;
  a.detail = d.str();
  Item b = a;
  b.name = "reversal ratio, non-dispersed omega (reported)";
  b.asserted = false;
  b.applies = !disp.ok;
  b.passed = true;
  o.items = {a, b};
  o.values = Json{{"ratio", num(rv.ratio)}, {"lhs", rv.lhs}, {"rhs", rv.rhs}, {"dispersion", disp.worst_ratio},
                  {"dispersed", disp.ok}};
  return o;
}

// ---- greedy depoint ---------------------------------------------------------

InstanceOut depoint_instance(const Scenario& s, const MeasurePair& pr, std::size_t) {
  InstanceOut o;
  const DyadicGrid grid = scenario_grid(s, pr);
  const QuasiCube Q = grid.cube(grid.top_index());
  auto r = greedy_depoint(pr.sigma, pr.omega, Q);
  const double ms = cube_mass(pr.sigma, Q), mw = cube_mass(pr.omega, Q);
  double max_common = 0;
  for (const auto& a : pr.omega.restricted(Q).atoms())
    if (pr.sigma.find(a.x) >= 0) max_common = std::max(max_common, a.mass);
  Item a = le("depointed sigma keeps half of |Q|_sigma", 0.5 * ms, r.sigma.total_mass(), 1e-12);
  Item b = le("depointed omega keeps half of |Q|_omega minus largest common atom", 0.5 * (mw - max_common),
              r.omega.total_mass(), 1e-12);
  double shared = static_cast<double>(common_point_masses(r.sigma, r.omega).points.size());
  Item c = le("depointed measures share no atom", shared, 0.0);
  for (Item* it : {&a, &b, &c}) it->family = "Q = top quasicube";
  o.items = {a, b, c};
  o.values = Json{{"sigma_kept", r.sigma.total_mass()}, {"sigma_total", ms}, {"omega_kept", r.omega.total_mass()},
                  {"omega_total", mw}, {"common_points", common_point_masses(pr.sigma, pr.omega).points.size()}};
  return o;
}

// ---- haar -------------------------------------------------------------------

struct HaarStats {
  double parseval = 0.0, telescope = 0.0, useful = 0.0;
};

HaarStats haar_stats(const DyadicGrid& grid, const DiscreteMeasure& mu, std::mt19937_64& rng) {
  HaarStats h;
  if (mu.empty()) return h;
  GridOccupancy occ(grid, mu);
  std::normal_distribution<double> g(0.0, 1.0);
  Values f(mu.size());
  for (auto& x : f) x = g(rng);
  const auto top = grid.top_index();
  const auto* cell = occ.find(top);
  if (!cell) return h;
  double lhs = 0;
  for (int a : cell->atoms) lhs += f[static_cast<std::size_t>(a)] * f[static_cast<std::size_t>(a)] * mu[static_cast<std::size_t>(a)].mass;
  const double e = average(f, top, occ);
  double rhs = e * e * occ.mass(top);
  for (int level = 0; level < grid.depth(); ++level)
    for (const auto& q : occ.occupied(level)) {
      if (!grid.contains(top, q)) continue;
      auto b = build_haar_basis(q, occ);
      for (double cf : haar_coefficients(b, f, occ)) rhs += cf * cf;
      for (std::size_t a = 0; a < b.dimension(); ++a)
        for (std::size_t c = 0; c < b.children.size(); ++c)
          h.useful = std::max(h.useful, std::abs(b.functions[a][c]) * std::sqrt(b.child_mass[c]));
    }
  // remainder below the finest level
  for (const auto& k : occ.occupied(grid.depth())) {
    if (!grid.contains(top, k)) continue;
    const double ek = average(f, k, occ);
    for (int a : occ.find(k)->atoms) {
      double d = f[static_cast<std::size_t>(a)] - ek;
      rhs += d * d * mu[static_cast<std::size_t>(a)].mass;
    }
  }
  h.parseval = std::abs(lhs - rhs) / std::max(lhs, 1e-300);
  std::uniform_int_distribution<int> pick(0, 1 << 20);
  for (int level = 1; level <= grid.depth(); ++level)
    for (const auto& q0 : occ.occupied(level)) {
      if (!grid.contains(top, q0)) continue;
      const CubeIndex q1 = grid.parent(q0);
      const CubeIndex q2 = grid.ancestor(q1, pick(rng) % (q1.level + 1));
      h.telescope = std::max(h.telescope, telescoping_check(q0, q1, q2, f, occ));
    }
  return h;
}

InstanceOut haar_instance(const Scenario& s, const MeasurePair& pr, std::size_t idx) {
  InstanceOut o;
  const DyadicGrid grid = scenario_grid(s, pr);
  auto rng = instance_rng(s, idx, 0x4a);
  HaarStats hs = haar_stats(grid, pr.sigma, rng), hw = haar_stats(grid, pr.omega, rng);
  Item a = le("Parseval relative residual", std::max(hs.parseval, hw.parseval), 1e-9);
  Item b = le("telescoping residual", std::max(hs.telescope, hw.telescope), 1e-10);
  Item c = le("useful Haar estimate |h| sqrt(|I'|)", std::max(hs.useful, hw.useful), 1.0, 1e-12);
  for (Item* it : {&a, &b, &c}) it->family = "occupied grid cubes to depth " + std::to_string(grid.depth());
  o.items = {a, b, c};
  o.values = Json{{"parseval", std::max(hs.parseval, hw.parseval)}, {"telescope", std::max(hs.telescope, hw.telescope)},
                  {"useful", std::max(hs.useful, hw.useful)}};
  return o;
}

// ---- corona -----------------------------------------------------------------

// max over S of X^2(C_S) / threshold, X^2 taken over the whole corona including S
double stopping_bound_ratio(const EnergyStopping& st, const WeightPair& w, const FracParams& p,
                            const GoodnessCache& good, double gamma) {
  const auto& grid = w.grid();
  double worst = 0;
  for (std::size_t si = 0; si < st.cubes.size(); ++si) {
    const auto& S = st.cubes[si];
    std::vector<CubeIndex> corona;
    for (const auto& i : w.occ_sigma().occupied_in_top()) {
      if (!grid.contains(S, i)) continue;
      bool below = false;
      for (std::size_t sj = 0; sj < st.cubes.size() && !below; ++sj)
        if (sj != si && !(st.cubes[sj] == S) && grid.contains(S, st.cubes[sj]) && grid.contains(st.cubes[sj], i))
          below = true;
      if (!below) corona.push_back(i);
    }
    const double x = stopping_energy(corona, S, w, p, good, gamma).value_sq;
    if (st.threshold > 0) worst = std::max(worst, x / st.threshold);
    else if (x > 0) worst = std::numeric_limits<double>::infinity();
  }
  return worst;
}

InstanceOut corona_instance(const Scenario& s, const MeasurePair& pr, std::size_t idx) {
  InstanceOut o;
  const FracParams p(s.dim, s.alpha);
  const DyadicGrid grid = scenario_grid(s, pr);
  WeightPair w(grid, pr.sigma, pr.omega);
  const auto top = w.grid().top_index();
  if (!w.occ_sigma().find(top)) {
    o.values = Json{{"skipped", "sigma has no mass in the top cube"}};
    return o;
  }
  auto rng = instance_rng(s, idx, 0xc0);
  std::exponential_distribution<double> ex(1.0);
  Values f(pr.sigma.size());
  for (auto& x : f) x = std::pow(ex(rng), 3) * (ex(rng) > 1 ? -1 : 1);
  const double C = 2.0;
  auto forest = cz_stopping(f, w.occ_sigma(), C);
  auto v = validate_stopping_data(forest, f, w.occ_sigma(), cz_stopping_C0(C));
  const double c0 = cz_stopping_C0(C);
  auto flag = [](std::string n, bool ok, const std::string& wit) {
    Item it = le(std::move(n), ok ? 0.0 : 1.0, 0.0);
    it.detail = wit;
    return it;
  };
  std::vector<Item> items;
  items.push_back(flag("stopping data: corona average bound", v.corona_average, v.witness_average));
  Item car = le("stopping data: Carleson sum <= C0 |F|", v.worst_carleson, c0, 1e-12);
  car.detail = v.witness_carleson;
  items.push_back(car);
  items.push_back(le("stopping data: quasi-orthogonality <= C0^2", v.quasi_ratio, c0 * c0, 1e-12));
  items.push_back(flag("stopping data: monotone alpha", v.monotone, v.witness_monotone));
  double fmax = 0;
  for (double x : f) fmax = std::max(fmax, std::abs(x));
  items.push_back(le("reconstruction residual", corona_reconstruction_residual(forest, f, w.occ_sigma()),
                     1e-10 * std::max(1.0, fmax)));

  auto fam = w.cube_family();
  const double a2 = offset_A2(w, p).value, punct = punctured_A2(pr.sigma, pr.omega, p, fam).value;
  GoodnessCache good(w.grid(), s.goodness.deep());
  StrongEnergyOptions opt;
  opt.seed = s.corpus.seed + idx;
  Json stops = Json::object();
  for (int variant = 0; variant < 2; ++variant) {
    const std::string tag = variant == 0 ? "full threshold" : "threshold without A2 terms";
    auto cert = certified_energy_stopping(top, w, p, s.goodness, 4.0, variant == 0 ? a2 : 0.0,
                                          variant == 0 ? punct : 0.0, opt);
    Item conv = flag("energy stopping certified (" + tag + ")", cert.converged,
                     "rounds " + std::to_string(cert.rounds));
    items.push_back(conv);
    Item cl = le("energy stopping Carleson ratio <= 2 (" + tag + ")", carleson_check(cert.stopping.cubes, w.occ_sigma()),
                 2.0, 1e-12);
    cl.detail = std::to_string(cert.stopping.cubes.size()) + " stopping cubes";
    items.push_back(cl);
    items.push_back(le("stopping energy bound X^2 <= threshold (" + tag + ")",
                       stopping_bound_ratio(cert.stopping, w, p, good, s.goodness.gamma), 1.0, 1e-12));
    stops[variant == 0 ? "full" : "no_A2"] = cert.stopping.cubes.size();
  }
  for (auto& it : items) it.family = "occupied grid cubes to depth " + std::to_string(w.grid().depth());
  o.items = items;
  o.values = Json{{"cz_stopping_cubes", forest.size()}, {"energy_stopping_cubes", stops}, {"offset_A2", a2},
                  {"punct_A2", punct}};
  return o;
}

// ---- necessity --------------------------------------------------------------

InstanceOut necessity_instance(const Scenario& s, const MeasurePair& pr, std::size_t) {
  InstanceOut o;
  const FracParams p(s.dim, s.alpha);
  const DyadicGrid grid = scenario_grid(s, pr);
  WeightPair w(grid, pr.sigma, pr.omega);
  double a2 = 0, nn = 0;
  if (!pr.sigma.empty() && !pr.omega.empty()) {
    a2 = offset_A2(w, p).value;
    nn = operator_norm(pr.sigma, pr.omega, p, lattice_for(s, pr)).value;
  }
  const double c = s.necessity_c > 0 ? s.necessity_c : frozen_necessity_c(s.dim);
  Item it = le("sqrt(offset A2) <= C * operator norm", std::sqrt(a2), c * nn, 1e-12);
  it.family = "grid neighbour pairs; " + describe_lattice(s);
  o.items = {it};
  o.values = Json{{"sqrt_offset_A2", std::sqrt(a2)}, {"operator_norm", nn},
                  {"ratio", nn > 0 ? num(std::sqrt(a2) / nn) : num(a2 > 0 ? INFINITY : 0.0)}};
  return o;
}

}  // namespace

namespace {

double admissible_alpha(int n, int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, static_cast<double>(n));
  for (;;) {
    const double a = u(rng);
    if (!reversal_admissible(n, k, a)) continue;
    bool near = false;
    for (double b = 0.0; b <= n; b += 0.05)
      if (!reversal_admissible(n, k, b) && std::abs(a - b) < 0.15) near = true;
    if (!near) return a;
  }
}

}  // namespace

std::vector<ReversalInstance> reversal_corpus(int n, int k, const std::string& generator, int count,
                                              std::uint64_t seed, double gamma) {
  CorpusSpec spec;
  spec.generator = generator;
  spec.count = count;
  spec.seed = seed;
  spec.sigma_atoms = 3;
  spec.omega_atoms = 8;
  auto pairs = generate_corpus(spec, n);
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  const QuasiCube J{Cube{Point::zero(n), 1.0}, BiLipschitzMap::identity(n)};
  std::vector<ReversalInstance> out;
  for (auto& p : pairs)
    out.push_back({admissible_alpha(n, k, rng), p.omega.restricted(J), exterior_measure(p.sigma, J, gamma)});
  return out;
}

std::vector<NecessityInstance> necessity_corpus(int n, int count, std::uint64_t seed) {
  std::vector<NecessityInstance> out;
  std::mt19937_64 rng(seed ^ 0x4eccULL);
  std::uniform_real_distribution<double> a(0.0, n - 0.25);
  for (const std::string gen : {"uniform-atoms", "common-atoms"}) {
    CorpusSpec spec;
    spec.generator = gen;
    spec.count = count / 2 + (gen == "uniform-atoms" ? count % 2 : 0);
    spec.seed = seed;
    spec.sigma_atoms = 10;
    spec.omega_atoms = 10;
    spec.common = 4;
    for (auto& p : generate_corpus(spec, n)) out.push_back({a(rng), std::move(p)});
  }
  return out;
}

double necessity_ratio(const NecessityInstance& inst, int depth, int lattice_per_axis) {
  const int n = inst.pair.sigma.dim();
  const FracParams p(n, inst.alpha);
  DyadicGrid grid(BiLipschitzMap::identity(n), Point::zero(n), 1.0, depth);
  WeightPair w(grid, inst.pair.sigma, inst.pair.omega);
  const double a2 = offset_A2(w, p).value;
  const double nn = operator_norm(inst.pair.sigma, inst.pair.omega, p,
                                  default_lattice(inst.pair.sigma, inst.pair.omega, lattice_per_axis))
                        .value;
  if (a2 == 0) return 0.0;
  return nn > 0 ? std::sqrt(a2) / nn : std::numeric_limits<double>::infinity();
}

// corpus maxima from twoweight_calibrate (seed 20240611), times 2
double frozen_reversal_c0(int n, int k) {
  if (n == 2 && k == 1) return 121.937;
  if (n == 3 && k == 1) return 7.76023;
  if (n == 3 && k == 2) return 30.7029;
  throw std::invalid_argument("no frozen reversal constant for this (n, k)");
}

double frozen_necessity_c(int n) {
  static const double c[] = {1.68934, 6.37751, 10.09};
  if (n < 1 || n > 3) throw std::invalid_argument("no frozen necessity constant for this n");
  return c[n - 1];
}

SuiteReport run_suite(const std::string& name, const Scenario& s, const std::vector<MeasurePair>& pairs) {
  using Fn = InstanceOut (*)(const Scenario&, const MeasurePair&, std::size_t);
  Fn fn = nullptr;
  if (name == "constants") fn = constants_instance;
  else if (name == "lemma-energy-a2") fn = energy_a2_instance;
  else if (name == "reversal-k1") fn = reversal_instance;
  else if (name == "greedy-depoint") fn = depoint_instance;
  else if (name == "haar") fn = haar_instance;
  else if (name == "corona") fn = corona_instance;
  else if (name == "necessity") fn = necessity_instance;
  else throw std::invalid_argument("unknown suite " + name);
  std::vector<InstanceOut> outs(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) { outs[i] = fn(s, pairs[i], i); });
  return aggregate(name, outs, pairs);
}

}  // namespace tw::cli
