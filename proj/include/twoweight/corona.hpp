#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "twoweight/energy.hpp"
#include "twoweight/haar.hpp"

namespace tw {

// Stopping cubes with data alpha; cubes are stored parents before children.
class StoppingForest {
 public:
  StoppingForest() = default;
  StoppingForest(std::vector<CubeIndex> cubes, std::vector<double> alpha, const DyadicGrid& grid);

  std::size_t size() const { return cubes_.size(); }
  const std::vector<CubeIndex>& cubes() const { return cubes_; }
  const std::vector<double>& alpha() const { return alpha_; }
  const std::vector<int>& parent() const { return parent_; }
  double alpha_of(const CubeIndex& f) const;
  int find(const CubeIndex& f) const;
  // index of the smallest stopping cube containing i (the corona owner), or -1
  int owner(const CubeIndex& i) const;
  // occupied cubes of the corona C_F
  std::vector<CubeIndex> corona(std::size_t f, const GridOccupancy& occ) const;
  std::vector<CubeIndex> frontier;  // stops that would need a deeper grid

 private:
  std::vector<CubeIndex> cubes_;
  std::vector<double> alpha_;
  std::vector<int> parent_;
  const DyadicGrid* grid_ = nullptr;
  std::unordered_map<CubeIndex, int, CubeIndexHash> index_;
};

// Calderon-Zygmund stopping: children are maximal F' with E_{F'}|f| > C E_F|f|.
// Data alpha(F) = C E_F|f| so that the corona average bound holds.
StoppingForest cz_stopping(std::span<const double> f, const GridOccupancy& sigma, double C,
                           const CubeIndex& top = CubeIndex{});
// C0 guaranteed for the CZ forest: Carleson constant C/(C-1), embedding 4 C/(C-1)
double cz_stopping_C0(double C);

struct StoppingValidation {
  bool corona_average = true, carleson = true, quasi_orthogonal = true, monotone = true;
  std::string witness_average, witness_carleson, witness_monotone;
  double worst_carleson = 0.0;  // max over F of sum_{F' <= F}|F'| / |F|
  double quasi_ratio = 0.0;     // sum alpha^2 |F| / ||f||^2
  bool ok() const { return corona_average && carleson && quasi_orthogonal && monotone; }
  double measured_C0() const;
};
StoppingValidation validate_stopping_data(const StoppingForest& forest, std::span<const double> f,
                                          const GridOccupancy& sigma, double C0);

// ||sum_F alpha(F) 1_F||^2 / ||f||^2
double quasi_orthogonality_check(const StoppingForest& forest, std::span<const double> f, const GridOccupancy& sigma);

// P_{C_F} f per atom
Values corona_projection(const StoppingForest& forest, std::size_t f_index, std::span<const double> f,
                         const GridOccupancy& sigma);
// max over atoms in the top cube of |f - E_top f - sum_F P_{C_F} f|
double corona_reconstruction_residual(const StoppingForest& forest, std::span<const double> f,
                                      const GridOccupancy& sigma);

// inner[i] is the forest K(F) for F = forest.cubes()[i], rooted at F
StoppingForest iterate_coronas(const StoppingForest& forest, const std::vector<StoppingForest>& inner,
                               const DyadicGrid& grid);

struct EnergyStopping {
  std::vector<CubeIndex> cubes;  // S0 first, parents before children
  std::vector<int> parent;
  double threshold = 0.0;        // C_energy (E^2 + A2 + A2punct)
};

EnergyStopping energy_stopping(const CubeIndex& s0, const WeightPair& w, const FracParams& p,
                               const GoodnessCache& good, double gamma, double c_energy, double e_hat_sq, double a2,
                               double a2_punct);

// S's stopping children plus complementary maximal grid cubes, as a partition of S
std::vector<CubeIndex> stopping_partition(const EnergyStopping& st, std::size_t s_index, const DyadicGrid& grid);

struct CertifiedEnergyStopping {
  EnergyStopping stopping;
  StrongEnergy e_hat;  // final strong energy lower bound (squared)
  std::vector<EnergyCandidate> extra;
  int rounds = 0;
  bool converged = false;
};
// Iterates strong-energy estimation and energy stopping until the stopping partitions
// are inside the strong-energy family.
CertifiedEnergyStopping certified_energy_stopping(const CubeIndex& s0, const WeightPair& w, const FracParams& p,
                                                  const GoodnessParams& g, double c_energy, double a2, double a2_punct,
                                                  const StrongEnergyOptions& opt, int max_rounds = 20);

// max over occupied cubes I of sum_{S in collection, S ⊂ I} |S|_sigma / |I|_sigma
double carleson_check(const std::vector<CubeIndex>& collection, const GridOccupancy& sigma);

}  // namespace tw
