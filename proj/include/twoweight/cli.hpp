#pragma once

#include <cstdint>
#include <functional>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "twoweight/funcenergy.hpp"
#include "twoweight/riesz.hpp"

namespace tw::cli {

using Json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what) : std::runtime_error(path + ": " + what), path(std::move(path)) {}
  std::string path;
};

struct CorpusSpec {
  std::string generator = "uniform-atoms";
  int count = 0;
  std::uint64_t seed = 1;
  int sigma_atoms = 8;
  int omega_atoms = 8;
  int common = 0;  // upper bound on shared points (common-atoms)
};

struct MeasurePair {
  DiscreteMeasure sigma;
  DiscreteMeasure omega;
};

const std::vector<std::string>& generator_names();
std::vector<MeasurePair> generate_corpus(const CorpusSpec& spec, int dim);

struct GridSpec {
  std::vector<double> corner;  // empty: origin
  double side = 1.0;
  int depth = 5;
  std::vector<double> offset;  // empty: no shift
};

struct Scenario {
  std::string name = "scenario";
  int dim = 1;
  double alpha = 0.0;
  std::string map = "identity";
  double map_param = 0.0;
  GridSpec grid;
  GoodnessParams goodness;
  TruncationLattice lattice;  // empty: default lattice per instance
  int lattice_per_axis = 8;
  CorpusSpec corpus;
  std::vector<MeasurePair> inline_pairs;
  std::vector<std::string> suites{"constants"};
  int k = 1;                          // reversal dimension
  double reversal_c0 = 0.0;           // 0: built-in frozen constant
  double necessity_c = 0.0;           // 0: built-in frozen constant
  double dispersion_threshold = 0.3;  // reversal instances below this are reported only
  Json source;
};

const std::vector<std::string>& suite_names();

// throws ConfigError naming the offending field path
Scenario parse_scenario(const Json& j);
Scenario load_scenario(const std::string& path);

Json measure_to_json(const DiscreteMeasure& mu);
// throws ConfigError with paths like "<where>[3].mass"
DiscreteMeasure measure_from_json(const Json& j, int dim, const std::string& where = "atoms");

DyadicGrid scenario_grid(const Scenario& s, const MeasurePair& pair);

struct Check {
  std::string name;
  bool asserted = true;
  bool passed = true;
  double worst = 0.0;
  double bound = 0.0;
  std::string family;
  Json witness;
};

struct SuiteReport {
  std::string name;
  std::vector<Check> checks;
  Json values = Json::object();
  bool ok() const;
};

// TWOWEIGHT_THREADS, else hardware concurrency
unsigned thread_count();
// runs body(i) for i in [0, count); results must be written to slot i
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

SuiteReport run_suite(const std::string& name, const Scenario& s, const std::vector<MeasurePair>& pairs);

struct Report {
  Json json;
  bool ok = true;
};
Report run_scenario(const Scenario& s);
std::string markdown(const Json& report);

// mu for the reversal lemma: sigma pushed radially outside gamma J
DiscreteMeasure exterior_measure(const DiscreteMeasure& sigma, const QuasiCube& j, double gamma);

struct ReversalInstance {
  double alpha = 0.0;
  DiscreteMeasure omega;  // inside the unit cube J
  DiscreteMeasure mu;     // outside gamma J
};
// alpha drawn from the admissible set for (n, k), at least 0.15 away from excluded values
std::vector<ReversalInstance> reversal_corpus(int n, int k, const std::string& generator, int count,
                                              std::uint64_t seed, double gamma = 8.0);

struct NecessityInstance {
  double alpha = 0.0;
  MeasurePair pair;
};
std::vector<NecessityInstance> necessity_corpus(int n, int count, std::uint64_t seed);
// sqrt(offset A2) / operator norm on the unit grid of the given depth (0 when both vanish)
double necessity_ratio(const NecessityInstance& inst, int depth, int lattice_per_axis = 8);

// frozen calibration constants (corpus maximum times 2)
double frozen_reversal_c0(int n, int k);
double frozen_necessity_c(int n);

}  // namespace tw::cli
