#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "twoweight/poisson.hpp"

namespace tw {

// E(J, omega): normalized standard deviation of position under 1_J omega
double energy(const QuasiCube& j, const DiscreteMeasure& omega);

struct MomentSpectrum {
  double mass = 0.0;
  Point center_of_mass;
  std::vector<double> eigenvalues;  // ascending, of sum m (x - xbar)(x - xbar)^T
  std::vector<double> M;            // M[k] for k = 0..n-1
};

MomentSpectrum moment_spectrum(const DiscreteMeasure& mu);
MomentSpectrum moment_spectrum(const QuasiCube& j, const DiscreteMeasure& mu);

struct Dispersion {
  bool ok = true;
  double worst_ratio = 1.0;  // min M_k / M_0 over cubes with M_0 > 0
  std::string witness;
};
Dispersion is_k_energy_dispersed(const DiscreteMeasure& mu, int k, double c, const CubeFamily& family);

class GoodnessCache {
 public:
  GoodnessCache(const DyadicGrid& grid, DeepParams deep) : grid_(&grid), deep_(deep) {}
  bool good(const CubeIndex& j) const;
  const DeepParams& deep() const { return deep_; }

 private:
  const DyadicGrid* grid_;
  DeepParams deep_;
  mutable std::unordered_map<CubeIndex, bool, CubeIndexHash> cache_;
};

// Deep subcubes of K that can carry omega energy (at least two omega atoms).
DeepSubcubes energetic_deep_subcubes(const WeightPair& w, const CubeIndex& k, const DeepParams& deep);
DeepSubcubes energetic_deep_subcubes(const WeightPair& w, const AlternateCube& k, const DeepParams& deep);

// One candidate in the strong energy supremum: an outer cube I (grid or alternate)
// with the collection of J carrying the sum.
struct EnergyCandidate {
  std::string label;
  Cube outer;                   // preimage cube I for 1_I sigma and |I|_sigma
  std::vector<CubeIndex> deep;  // the J's
};

// (1/|I|_sigma) sum_J (P(J, 1_I sigma)/|J|^{1/n})^2 ||P_J^omega x||^2
double candidate_energy(const WeightPair& w, const FracParams& p, const EnergyCandidate& c);

EnergyCandidate partition_candidate(const WeightPair& w, const CubeIndex& outer, const std::vector<CubeIndex>& pieces,
                                    const DeepParams& deep);

struct StrongEnergy {
  double value = 0.0;  // certified lower bound for the squared strong energy constant
  std::string witness;
  std::size_t candidates = 0;
  std::string family_descriptor;
};

struct StrongEnergyOptions {
  int partition_budget = 4;
  std::uint64_t seed = 1;
  bool alternates = true;
};

StrongEnergy strong_energy_constant(const WeightPair& w, const FracParams& p, const GoodnessParams& g,
                                    const StrongEnergyOptions& opt,
                                    const std::vector<EnergyCandidate>& extra = {});
StrongEnergy strong_energy_constant_dual(const DyadicGrid& grid, const DiscreteMeasure& sigma,
                                         const DiscreteMeasure& omega, const FracParams& p, const GoodnessParams& g,
                                         const StrongEnergyOptions& opt);

// sum_{J in M_deep(I)} (P(J, 1_{S \ gamma J} sigma)/|J|^{1/n})^2 ||P_J^{subgood,omega} x||^2
double stopping_sum(const WeightPair& w, const FracParams& p, const GoodnessCache& good, double gamma,
                    const CubeIndex& s, const CubeIndex& i);

struct StoppingEnergy {
  double value_sq = 0.0;  // X^2
  std::string witness;
};
StoppingEnergy stopping_energy(const std::vector<CubeIndex>& corona, const CubeIndex& s, const WeightPair& w,
                               const FracParams& p, const GoodnessCache& good, double gamma);

}  // namespace tw
