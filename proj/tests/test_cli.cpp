#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <set>

#include "twoweight/cli.hpp"
#include "twoweight/energy.hpp"

using namespace tw;
using cli::Json;

namespace {

std::string scenario_dir() { return std::string(TW_SOURCE_DIR) + "/scenarios/"; }

std::string config_error_path(const Json& j) {
  try {
    (void)cli::parse_scenario(j);
  } catch (const cli::ConfigError& e) {
    return e.path;
  }
  return "<no error>";
}

Json strip_timestamp(Json j) {
  j.erase("timestamp");
  return j;
}

Json base() { return Json{{"schema", 1}, {"dimension", 2}, {"alpha", 0.5}}; }

}  // namespace

TEST_CASE("corpus generation") {
  cli::CorpusSpec spec;
  spec.count = 0;
  CHECK(cli::generate_corpus(spec, 2).empty());

  spec.count = 5;
  spec.seed = 42;
  for (const auto& g : cli::generator_names()) {
    spec.generator = g;
    spec.common = 3;
    auto a = cli::generate_corpus(spec, 2), b = cli::generate_corpus(spec, 2);
    REQUIRE(a.size() == 5);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(cli::measure_to_json(a[i].sigma) == cli::measure_to_json(b[i].sigma));
      CHECK(cli::measure_to_json(a[i].omega) == cli::measure_to_json(b[i].omega));
    }
    // instance i does not depend on the count
    auto spec3 = spec;
    spec3.count = 3;
    CHECK(cli::measure_to_json(cli::generate_corpus(spec3, 2)[2].omega) == cli::measure_to_json(a[2].omega));
  }
  spec.generator = "uniform-atoms";
  auto c = cli::generate_corpus(spec, 2);
  spec.seed = 43;
  CHECK(cli::measure_to_json(cli::generate_corpus(spec, 2)[0].sigma) != cli::measure_to_json(c[0].sigma));
}

TEST_CASE("generator properties") {
  cli::CorpusSpec spec;
  spec.count = 20;
  spec.seed = 9;
  spec.generator = "line-concentrated";
  for (const auto& p : cli::generate_corpus(spec, 2)) {
    auto s = moment_spectrum(p.omega);
    CHECK(s.M[1] / s.M[0] < 0.01);
  }
  spec.generator = "isotropic-dispersed";
  for (int n : {2, 3})
    for (const auto& p : cli::generate_corpus(spec, n)) {
      auto s = moment_spectrum(p.omega);
      for (int k = 1; k < n; ++k) CHECK(s.M[static_cast<std::size_t>(k)] / s.M[0] >= 0.3);
    }
  spec.generator = "common-atoms";
  spec.common = 4;
  for (const auto& p : cli::generate_corpus(spec, 2)) {
    auto cp = common_point_masses(p.sigma, p.omega);
    CHECK(cp.points.size() >= 1);
    CHECK(cp.points.size() <= 4);
  }
  spec.generator = "separated-at-depth";
  for (const auto& p : cli::generate_corpus(spec, 2)) {
    std::set<Point> seen;
    for (const auto& a : p.sigma.atoms()) seen.insert(a.x);
    for (const auto& a : p.omega.atoms()) CHECK(seen.insert(a.x).second);
  }
}

TEST_CASE("measure json") {
  DiscreteMeasure mu(2, {{Point{0.1, 0.2}, 1.5}, {Point{0.7, 0.3}, 0.25}});
  auto back = cli::measure_from_json(cli::measure_to_json(mu), 2);
  REQUIRE(back.size() == 2);
  CHECK(back[1].x == mu[1].x);
  CHECK(back[1].mass == mu[1].mass);
  Json bad = Json::parse(R"([{"x":[0.1,0.2],"mass":1},{"x":[0.3,0.4],"mass":-2}])");
  try {
    (void)cli::measure_from_json(bad, 2, "sigma");
    FAIL("expected an error");
  } catch (const cli::ConfigError& e) {
    CHECK(e.path == "sigma[1].mass");
  }
  Json shortx = Json::parse(R"([{"x":[0.1],"mass":1}])");
  CHECK_THROWS_AS(cli::measure_from_json(shortx, 2, "sigma"), cli::ConfigError);
}

TEST_CASE("scenario diagnostics name the field") {
  CHECK(config_error_path(Json{{"schema", 1}}) == "dimension");
  CHECK(config_error_path(Json{{"dimension", 2}}) == "schema");
  auto j = base();
  j["alpha"] = 2.0;
  CHECK(config_error_path(j) == "alpha");
  j = base();
  j["goodness"] = {{"r", 1}};
  CHECK(config_error_path(j) == "goodness");
  j = base();
  j["grid"] = {{"depth", "deep"}};
  CHECK(config_error_path(j) == "grid.depth");
  j = base();
  j["corpus"] = {{"generator", "nope"}};
  CHECK(config_error_path(j) == "corpus.generator");
  j = base();
  j["suites"] = {"haar", "bogus"};
  CHECK(config_error_path(j) == "suites[1]");
  j = base();
  j["colour"] = "blue";
  CHECK(config_error_path(j) == "colour");
  j = base();
  j["measures"] = Json::parse(R"([{"sigma":[{"x":[0.1,0.1],"mass":1}],"omega":[{"x":[0.1,0.1],"mass":0}]}])");
  CHECK(config_error_path(j) == "measures[0].omega[0].mass");
  j = base();
  j["alpha"] = 1.0;
  j["suites"] = {"reversal-k1"};
  CHECK(config_error_path(j) == "alpha");
  j = base();
  j["map"] = {{"name", "twist"}};
  CHECK(config_error_path(j) == "map");
  CHECK(config_error_path(base()) == "<no error>");
  CHECK_THROWS_AS(cli::load_scenario(scenario_dir() + "does-not-exist.json"), cli::ConfigError);
}

TEST_CASE("empty scenario gives an all-zero report") {
  auto r = cli::run_scenario(cli::load_scenario(scenario_dir() + "empty.json"));
  CHECK(r.ok);
  const auto& inst = r.json["suites"][0]["values"]["instances"][0];
  for (const auto& [k, v] : inst.items()) {
    if (v.contains("value")) CHECK(v["value"].get<double>() == 0.0);
    if (k == "muckenhoupt")
      for (const auto& [kk, vv] : v.items())
        if (vv.is_number()) CHECK(vv.get<double>() == 0.0);
  }
  CHECK(r.json["schema"] == 1);
}

TEST_CASE("bundled scenarios") {
  auto a = cli::run_scenario(cli::load_scenario(scenario_dir() + "lemma-energy-a2.json"));
  CHECK(a.ok);
  auto r = cli::run_scenario(cli::load_scenario(scenario_dir() + "reversal-k1.json"));
  CHECK(r.ok);
  for (const auto& inst : r.json["suites"][0]["values"]["instances"]) CHECK(inst["ratio"].is_number());
}

TEST_CASE("replay determinism across thread counts") {
  auto s = cli::load_scenario(scenario_dir() + "lemma-energy-a2.json");
  s.suites = {"constants", "corona", "haar", "necessity"};
  s.corpus.count = 6;
  setenv("TWOWEIGHT_THREADS", "1", 1);
  auto one = cli::run_scenario(s);
  setenv("TWOWEIGHT_THREADS", "4", 1);
  auto four = cli::run_scenario(s);
  auto again = cli::run_scenario(s);
  unsetenv("TWOWEIGHT_THREADS");
  CHECK(strip_timestamp(one.json).dump() == strip_timestamp(four.json).dump());
  CHECK(strip_timestamp(four.json).dump() == strip_timestamp(again.json).dump());
  auto md = cli::markdown(one.json);
  CHECK(md.find("| suite | check |") != std::string::npos);
  CHECK(md.find("timestamp") != std::string::npos);
  for (const auto& su : one.json["suites"])
    for (const auto& c : su["checks"]) CHECK(md.find(c["name"].get<std::string>()) != std::string::npos);
}

TEST_CASE("failing check serializes a replayable witness") {
  auto j = base();
  j["corpus"] = {{"count", 3}, {"seed", 2}};
  j["suites"] = {"necessity"};
  j["necessity"] = {{"c", 1e-9}};
  auto r = cli::run_scenario(cli::parse_scenario(j));
  CHECK_FALSE(r.ok);
  const auto& w = r.json["suites"][0]["checks"][0]["witness"];
  REQUIRE(w.contains("sigma"));
  auto sigma = cli::measure_from_json(w["sigma"], 2);
  CHECK(sigma.size() == 8);
}

TEST_CASE("thread count") {
  setenv("TWOWEIGHT_THREADS", "3", 1);
  CHECK(cli::thread_count() == 3);
  setenv("TWOWEIGHT_THREADS", "junk", 1);
  CHECK(cli::thread_count() >= 1);
  unsetenv("TWOWEIGHT_THREADS");
  std::vector<int> v(100, 0);
  cli::parallel_for(v.size(), [&](std::size_t i) { v[i] = static_cast<int>(i); });
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == static_cast<int>(i));
}
