#include "twoweight/cli.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace tw::cli {

namespace {

Point uniform_point(int n, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Point p = Point::zero(n);
  for (int i = 0; i < n; ++i) p[i] = u(rng);
  return p;
}

double draw_mass(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.1, 2.0)(rng); }

DiscreteMeasure uniform_measure(int n, int count, std::mt19937_64& rng) {
  std::vector<Atom> a;
  for (int i = 0; i < count; ++i) {
    Point x = uniform_point(n, rng);
    a.push_back({x, draw_mass(rng)});
  }
  return DiscreteMeasure(n, std::move(a));
}

Eigen::MatrixXd random_rotation(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

// omega along a random line through the center, transverse jitter 1e-4
DiscreteMeasure line_measure(int n, int count, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> s(-0.45, 0.45);
  Point v = Point::zero(n);
  double len = 0;
  while (len < 1e-3) {
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    len = norm(v);
  }
  v = (1.0 / len) * v;
  std::vector<Atom> a;
  for (int i = 0; i < count; ++i) {
    Point x = Point::filled(n, 0.5) + s(rng) * v;
    for (int d = 0; d < n; ++d) x[d] += 1e-4 * g(rng);
    a.push_back({x, draw_mass(rng)});
  }
  return DiscreteMeasure(n, std::move(a));
}

// rotated cross of 2n near-equal atoms plus a lighter uniform cloud; resampled until
// every M_k / M_0 is at least 0.35
DiscreteMeasure isotropic_measure(int n, int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> m(0.8, 1.2), r(0.2, 0.35);
  for (int attempt = 0;; ++attempt) {
    Eigen::MatrixXd rot = random_rotation(n, rng);
    const double rad = r(rng);
    std::vector<Atom> a;
    for (int i = 0; i < n; ++i)
      for (int sgn : {1, -1}) {
        Point x = Point::filled(n, 0.5);
        for (int d = 0; d < n; ++d) x[d] += sgn * rad * rot(d, i);
        a.push_back({x, m(rng)});
      }
    for (int i = 2 * n; i < count; ++i) a.push_back({uniform_point(n, rng, 0.2, 0.8), 0.2 * m(rng)});
    DiscreteMeasure mu(n, std::move(a));
    auto s = moment_spectrum(mu);
    bool ok = true;
    for (int k = 1; k < n; ++k)
      if (s.M[static_cast<std::size_t>(k)] < 0.35 * s.M[0]) ok = false;
    if (ok || attempt > 100) return mu;
  }
}

// every atom of both measures alone in its own cell at a level fine enough for all of them
MeasurePair separated_pair(int n, int ns, int nw, std::mt19937_64& rng) {
  const int total = ns + nw;
  int level = 1;
  while (std::pow(2.0, n * level) < 4.0 * std::max(total, 1)) ++level;
  const auto cells = static_cast<std::int64_t>(std::llround(std::pow(2.0, level)));
  const double side = 1.0 / static_cast<double>(cells);
  std::uniform_int_distribution<std::int64_t> pick(0, cells - 1);
  std::uniform_real_distribution<double> jit(0.25, 0.75);
  std::set<std::vector<std::int64_t>> used;
  auto draw = [&]() {
    std::vector<std::int64_t> c(static_cast<std::size_t>(n));
    do {
      for (auto& v : c) v = pick(rng);
    } while (!used.insert(c).second);
    Point x = Point::zero(n);
    for (int d = 0; d < n; ++d) x[d] = (static_cast<double>(c[static_cast<std::size_t>(d)]) + jit(rng)) * side;
    return x;
  };
  std::vector<Atom> s, w;
  for (int i = 0; i < ns; ++i) {
    Point x = draw();
    s.push_back({x, draw_mass(rng)});
  }
  for (int i = 0; i < nw; ++i) {
    Point x = draw();
    w.push_back({x, draw_mass(rng)});
  }
  return {DiscreteMeasure(n, std::move(s)), DiscreteMeasure(n, std::move(w))};
}

// omega clustered around light sigma atoms, heavy sigma mass farther away: energy
// sums over the cluster are large relative to the local sigma mass
MeasurePair stress_pair(int n, int ns, int nw, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point c = uniform_point(n, rng, 0.15, 0.85);
  const double rad = 0.03 + 0.07 * u(rng);
  std::vector<Atom> s, w;
  const int light = std::max(1, ns / 3);
  for (int i = 0; i < ns; ++i) {
    if (i < light) {
      Point x = c + rad * (uniform_point(n, rng, -1.0, 1.0));
      s.push_back({x, 1e-3 + 1e-2 * u(rng)});
    } else {
      Point x;
      do {
        x = uniform_point(n, rng);
      } while (dist(x, c) < 0.3);
      s.push_back({x, 10.0 + 40.0 * u(rng)});
    }
  }
  for (int i = 0; i < nw; ++i) {
    Point x = c + rad * (uniform_point(n, rng, -1.0, 1.0));
    w.push_back({x, draw_mass(rng)});
  }
  return {DiscreteMeasure(n, std::move(s)), DiscreteMeasure(n, std::move(w))};
}

const Json& require(const Json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path + key, "missing");
  return j.at(key);
}

double get_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "not finite");
  return v;
}

int get_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<int>();
}

std::string get_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_vector(const Json& j, const std::string& path, int dim) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  if (static_cast<int>(j.size()) != dim) throw ConfigError(path, "expected " + std::to_string(dim) + " entries");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path.substr(0, path.size() - 1), "expected an object");
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError(path + k, "unknown field");
}

Point to_point(const std::vector<double>& v) {
  Point p = Point::zero(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<int>(i)] = v[i];
  return p;
}

}  // namespace

const std::vector<std::string>& generator_names() {
  static const std::vector<std::string> g{"uniform-atoms", "common-atoms", "line-concentrated", "isotropic-dispersed",
                                          "separated-at-depth", "stopping-stress"};
  return g;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> s{"constants", "lemma-energy-a2", "reversal-k1", "greedy-depoint",
                                          "haar",      "corona",          "necessity"};
  return s;
}

std::vector<MeasurePair> generate_corpus(const CorpusSpec& spec, int dim) {
  const auto& names = generator_names();
  if (std::find(names.begin(), names.end(), spec.generator) == names.end())
    throw std::invalid_argument("unknown generator " + spec.generator);
  std::vector<MeasurePair> out;
  for (int i = 0; i < spec.count; ++i) {
    // per-instance stream so instance i does not depend on the count
    std::seed_seq seq{static_cast<std::uint64_t>(spec.seed), static_cast<std::uint64_t>(i)};
    std::mt19937_64 rng(seq);
    const int ns = spec.sigma_atoms, nw = spec.omega_atoms;
    if (spec.generator == "uniform-atoms") {
      auto s = uniform_measure(dim, ns, rng);
      out.push_back({std::move(s), uniform_measure(dim, nw, rng)});
    } else if (spec.generator == "common-atoms") {
      const auto base_s = uniform_measure(dim, ns, rng);
      const auto base_w = uniform_measure(dim, nw, rng);
      std::vector<Atom> s(base_s.atoms().begin(), base_s.atoms().end());
      std::vector<Atom> w(base_w.atoms().begin(), base_w.atoms().end());
      const int shared = std::uniform_int_distribution<int>(std::min(1, spec.common), spec.common)(rng);
      for (int c = 0; c < shared; ++c) {
        Point x = uniform_point(dim, rng);
        double ms = draw_mass(rng);
        s.push_back({x, ms});
        w.push_back({x, draw_mass(rng)});
      }
      out.push_back({DiscreteMeasure(dim, std::move(s)), DiscreteMeasure(dim, std::move(w))});
    } else if (spec.generator == "line-concentrated") {
      auto s = uniform_measure(dim, ns, rng);
      out.push_back({std::move(s), line_measure(dim, nw, rng)});
    } else if (spec.generator == "isotropic-dispersed") {
      auto s = uniform_measure(dim, ns, rng);
      out.push_back({std::move(s), isotropic_measure(dim, nw, rng)});
    } else if (spec.generator == "stopping-stress") {
      out.push_back(stress_pair(dim, ns, nw, rng));
    } else {
      out.push_back(separated_pair(dim, ns, nw, rng));
    }
  }
  return out;
}

Json measure_to_json(const DiscreteMeasure& mu) {
  Json a = Json::array();
  for (const auto& at : mu.atoms()) {
    Json x = Json::array();
    for (int i = 0; i < mu.dim(); ++i) x.push_back(at.x[i]);
    a.push_back(Json{{"x", x}, {"mass", at.mass}});
  }
  return a;
}

DiscreteMeasure measure_from_json(const Json& j, int dim, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where, "expected an array of atoms");
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = where + "[" + std::to_string(i) + "].";
    const Json& a = j[i];
    reject_unknown(a, {"x", "mass"}, p);
    Point x = to_point(get_vector(require(a, "x", p), p + "x", dim));
    double m = get_number(require(a, "mass", p), p + "mass");
    if (!(m > 0)) throw ConfigError(p + "mass", "atom mass must be positive");
    atoms.push_back({x, m});
  }
  try {
    return DiscreteMeasure(dim, std::move(atoms));
  } catch (const InvalidMass& e) {
    throw ConfigError(where + "[" + std::to_string(e.index) + "].mass", e.what());
  }
}

Scenario parse_scenario(const Json& j) {
  Scenario s;
  s.source = j;
  reject_unknown(j, {"schema", "name", "dimension", "alpha", "map", "grid", "goodness", "truncation", "corpus",
                     "measures", "suites", "reversal", "necessity"},
                 "");
  if (get_int(require(j, "schema", ""), "schema") != 1) throw ConfigError("schema", "only schema 1 is supported");
  if (j.contains("name")) s.name = get_string(j["name"], "name");
  s.dim = get_int(require(j, "dimension", ""), "dimension");
  if (s.dim < 1 || s.dim > kMaxDim) throw ConfigError("dimension", "must be in 1.." + std::to_string(kMaxDim));
  if (j.contains("alpha")) s.alpha = get_number(j["alpha"], "alpha");
  if (s.alpha < 0 || s.alpha >= s.dim) throw ConfigError("alpha", "must satisfy 0 <= alpha < dimension");

  if (j.contains("map")) {
    const Json& m = j["map"];
    reject_unknown(m, {"name", "param"}, "map.");
    s.map = get_string(require(m, "name", "map."), "map.name");
    if (m.contains("param")) s.map_param = get_number(m["param"], "map.param");
    try {
      (void)BiLipschitzMap::from_name(s.map, s.dim, s.map_param);
    } catch (const std::exception& e) {
      throw ConfigError("map", e.what());
    }
  }

  if (j.contains("grid")) {
    const Json& g = j["grid"];
    reject_unknown(g, {"corner", "side", "depth", "offset"}, "grid.");
    if (g.contains("corner")) s.grid.corner = get_vector(g["corner"], "grid.corner", s.dim);
    if (g.contains("side")) s.grid.side = get_number(g["side"], "grid.side");
    if (!(s.grid.side > 0)) throw ConfigError("grid.side", "must be positive");
    if (g.contains("depth")) s.grid.depth = get_int(g["depth"], "grid.depth");
    if (s.grid.depth < 1 || s.grid.depth > 14) throw ConfigError("grid.depth", "must be in 1..14");
    if (g.contains("offset")) s.grid.offset = get_vector(g["offset"], "grid.offset", s.dim);
  }

  if (j.contains("goodness")) {
    const Json& g = j["goodness"];
    reject_unknown(g, {"r", "eps", "tau", "gamma"}, "goodness.");
    int r = g.contains("r") ? get_int(g["r"], "goodness.r") : 3;
    double eps = g.contains("eps") ? get_number(g["eps"], "goodness.eps") : 0.5;
    int tau = g.contains("tau") ? get_int(g["tau"], "goodness.tau") : 1;
    double gamma = g.contains("gamma") ? get_number(g["gamma"], "goodness.gamma") : 8.0;
    try {
      s.goodness = GoodnessParams(r, eps, tau, gamma);
    } catch (const std::exception& e) {
      throw ConfigError("goodness", e.what());
    }
  }

  if (j.contains("truncation")) {
    const Json& t = j["truncation"];
    reject_unknown(t, {"lattice", "per_axis"}, "truncation.");
    if (t.contains("per_axis")) s.lattice_per_axis = get_int(t["per_axis"], "truncation.per_axis");
    if (s.lattice_per_axis < 2) throw ConfigError("truncation.per_axis", "must be at least 2");
    if (t.contains("lattice")) {
      const Json& l = t["lattice"];
      if (!l.is_array()) throw ConfigError("truncation.lattice", "expected an array of [delta, R] pairs");
      for (std::size_t i = 0; i < l.size(); ++i) {
        auto v = get_vector(l[i], "truncation.lattice[" + std::to_string(i) + "]", 2);
        if (!(v[0] > 0 && v[0] < v[1]))
          throw ConfigError("truncation.lattice[" + std::to_string(i) + "]", "need 0 < delta < R");
        s.lattice.emplace_back(v[0], v[1]);
      }
    }
  }

  if (j.contains("corpus")) {
    const Json& c = j["corpus"];
    reject_unknown(c, {"generator", "count", "seed", "sigma_atoms", "omega_atoms", "common"}, "corpus.");
    if (c.contains("generator")) s.corpus.generator = get_string(c["generator"], "corpus.generator");
    const auto& names = generator_names();
    if (std::find(names.begin(), names.end(), s.corpus.generator) == names.end())
      throw ConfigError("corpus.generator", "unknown generator '" + s.corpus.generator + "'");
    if (c.contains("count")) s.corpus.count = get_int(c["count"], "corpus.count");
    if (s.corpus.count < 0) throw ConfigError("corpus.count", "must be nonnegative");
    if (c.contains("seed")) {
      if (!c["seed"].is_number_unsigned() && !(c["seed"].is_number_integer() && c["seed"].get<long long>() >= 0))
        throw ConfigError("corpus.seed", "expected a nonnegative integer");
      s.corpus.seed = c["seed"].get<std::uint64_t>();
    }
    if (c.contains("sigma_atoms")) s.corpus.sigma_atoms = get_int(c["sigma_atoms"], "corpus.sigma_atoms");
    if (c.contains("omega_atoms")) s.corpus.omega_atoms = get_int(c["omega_atoms"], "corpus.omega_atoms");
    if (c.contains("common")) s.corpus.common = get_int(c["common"], "corpus.common");
    if (s.corpus.sigma_atoms < 0) throw ConfigError("corpus.sigma_atoms", "must be nonnegative");
    if (s.corpus.omega_atoms < 0) throw ConfigError("corpus.omega_atoms", "must be nonnegative");
    if (s.corpus.common < 0) throw ConfigError("corpus.common", "must be nonnegative");
  }

  if (j.contains("measures")) {
    const Json& m = j["measures"];
    if (!m.is_array()) throw ConfigError("measures", "expected an array of {sigma, omega}");
    for (std::size_t i = 0; i < m.size(); ++i) {
      const std::string p = "measures[" + std::to_string(i) + "].";
      reject_unknown(m[i], {"sigma", "omega"}, p);
      s.inline_pairs.push_back({measure_from_json(require(m[i], "sigma", p), s.dim, p + "sigma"),
                                measure_from_json(require(m[i], "omega", p), s.dim, p + "omega")});
    }
  }

  if (j.contains("suites")) {
    const Json& su = j["suites"];
    if (!su.is_array()) throw ConfigError("suites", "expected an array of suite names");
    s.suites.clear();
    for (std::size_t i = 0; i < su.size(); ++i) {
      std::string n = get_string(su[i], "suites[" + std::to_string(i) + "]");
      const auto& names = suite_names();
      if (std::find(names.begin(), names.end(), n) == names.end())
        throw ConfigError("suites[" + std::to_string(i) + "]", "unknown suite '" + n + "'");
      s.suites.push_back(n);
    }
  }

  if (j.contains("reversal")) {
    const Json& r = j["reversal"];
    reject_unknown(r, {"k", "c0", "dispersion"}, "reversal.");
    if (r.contains("k")) s.k = get_int(r["k"], "reversal.k");
    if (r.contains("c0")) s.reversal_c0 = get_number(r["c0"], "reversal.c0");
    if (r.contains("dispersion")) s.dispersion_threshold = get_number(r["dispersion"], "reversal.dispersion");
    if (s.reversal_c0 < 0) throw ConfigError("reversal.c0", "must be nonnegative");
  }
  if (std::find(s.suites.begin(), s.suites.end(), "reversal-k1") != s.suites.end()) {
    if (s.k < 1 || s.k > s.dim - 1) throw ConfigError("reversal.k", "must be in 1..dimension-1");
    if (!reversal_admissible(s.dim, s.k, s.alpha)) throw ConfigError("alpha", "not admissible for the reversal lemma at this (dimension, k)");
  }
  if (j.contains("necessity")) {
    const Json& r = j["necessity"];
    reject_unknown(r, {"c"}, "necessity.");
    if (r.contains("c")) s.necessity_c = get_number(r["c"], "necessity.c");
    if (s.necessity_c < 0) throw ConfigError("necessity.c", "must be nonnegative");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(j);
}

DyadicGrid scenario_grid(const Scenario& s, const MeasurePair&) {
  Point corner = s.grid.corner.empty() ? Point::zero(s.dim) : to_point(s.grid.corner);
  DyadicGrid g(BiLipschitzMap::from_name(s.map, s.dim, s.map_param), corner, s.grid.side, s.grid.depth);
  if (!s.grid.offset.empty()) g = g.shifted(to_point(s.grid.offset));
  return g;
}

bool SuiteReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return !c.asserted || c.passed; });
}

unsigned thread_count() {
  if (const char* e = std::getenv("TWOWEIGHT_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(e, &end, 10);
    if (end != e && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const unsigned t = static_cast<unsigned>(std::min<std::size_t>(thread_count(), count));
  if (t <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < t; ++k)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < count;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

namespace {

Json check_json(const Check& c) {
  Json j{{"name", c.name}, {"asserted", c.asserted}, {"passed", c.passed}};
  j["worst"] = std::isfinite(c.worst) ? Json(c.worst) : Json("inf");
  j["bound"] = std::isfinite(c.bound) ? Json(c.bound) : Json("inf");
  j["family"] = c.family;
  j["witness"] = c.witness;
  return j;
}

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string fmt(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) {
    std::ostringstream os;
    os << std::setprecision(6) << v.get<double>();
    return os.str();
  }
  return v.dump();
}

}  // namespace

Report run_scenario(const Scenario& s) {
  std::vector<MeasurePair> pairs = s.inline_pairs;
  for (auto& p : generate_corpus(s.corpus, s.dim)) pairs.push_back(std::move(p));
  Report r;
  Json suites = Json::array();
  for (const auto& name : s.suites) {
    SuiteReport sr = run_suite(name, s, pairs);
    Json js{{"name", sr.name}, {"ok", sr.ok()}};
    Json checks = Json::array();
    for (const auto& c : sr.checks) checks.push_back(check_json(c));
    js["checks"] = checks;
    js["values"] = sr.values;
    r.ok = r.ok && sr.ok();
    suites.push_back(js);
  }
  r.json = Json{{"schema", 1},
                {"scenario", s.name},
                {"timestamp", utc_timestamp()},
                {"seed", s.corpus.seed},
                {"instances", pairs.size()},
                {"ok", r.ok},
                {"config", s.source},
                {"suites", suites}};
  return r;
}

std::string markdown(const Json& report) {
  std::ostringstream os;
  os << "# Report: " << fmt(report.value("scenario", Json("?"))) << "\n\n";
  os << "- schema: " << fmt(report["schema"]) << "\n";
  os << "- timestamp: " << fmt(report["timestamp"]) << "\n";
  os << "- seed: " << fmt(report["seed"]) << "\n";
  os << "- instances: " << fmt(report["instances"]) << "\n";
  os << "- ok: " << (report["ok"].get<bool>() ? "yes" : "NO") << "\n\n";
  os << "| suite | check | asserted | passed | worst | bound | family |\n";
  os << "|---|---|---|---|---|---|---|\n";
  for (const auto& su : report["suites"])
    for (const auto& c : su["checks"])
      os << "| " << fmt(su["name"]) << " | " << fmt(c["name"]) << " | " << (c["asserted"].get<bool>() ? "yes" : "no")
         << " | " << (c["passed"].get<bool>() ? "pass" : "FAIL") << " | " << fmt(c["worst"]) << " | "
         << fmt(c["bound"]) << " | " << fmt(c["family"]) << " |\n";
  return os.str();
}

}  // namespace tw::cli
