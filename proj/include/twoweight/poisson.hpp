#pragma once

#include <string>
#include <vector>

#include "twoweight/haar.hpp"
#include "twoweight/measure.hpp"

namespace tw {

struct FracParams {
  int n = 1;
  double alpha = 0.0;
  double delta_cz = 1.0;  // kernel smoothness order

  FracParams() = default;
  FracParams(int n, double alpha, double delta_cz = 1.0);  // validates 0 <= alpha < n
  double codim() const { return n - alpha; }                // |Q|^{1-alpha/n} = side^{n-alpha}
};

struct CubeFamily {
  std::vector<QuasiCube> cubes;
  std::string descriptor;
};

// Measures plus their grid bookkeeping. Not copyable: occupancies point into it.
class WeightPair {
 public:
  WeightPair(const DyadicGrid& grid, DiscreteMeasure sigma, DiscreteMeasure omega);
  WeightPair(const WeightPair&) = delete;
  WeightPair& operator=(const WeightPair&) = delete;

  const DyadicGrid& grid() const { return grid_; }
  const DiscreteMeasure& sigma() const { return sigma_; }
  const DiscreteMeasure& omega() const { return omega_; }
  const GridOccupancy& occ_sigma() const { return occ_sigma_; }
  const GridOccupancy& occ_omega() const { return occ_omega_; }
  const HaarEnergyTable& energy_sigma() const { return energy_sigma_; }
  const HaarEnergyTable& energy_omega() const { return energy_omega_; }
  const CommonPointSet& common() const { return common_; }
  // occupied (by either measure) lattice cubes inside the top cube, coarse to fine
  const std::vector<CubeIndex>& family() const { return family_; }
  CubeFamily cube_family() const;

 private:
  DyadicGrid grid_;
  DiscreteMeasure sigma_, omega_;
  GridOccupancy occ_sigma_, occ_omega_;
  HaarEnergyTable energy_sigma_, energy_omega_;
  CommonPointSet common_;
  std::vector<CubeIndex> family_;
};

double poisson_standard(const QuasiCube& q, const DiscreteMeasure& mu, const FracParams& p);
double poisson_reproducing(const QuasiCube& q, const DiscreteMeasure& mu, const FracParams& p);
double poisson_m_weighted(const QuasiCube& j, const DiscreteMeasure& mu, const FracParams& p, double m);
// standard Poisson integral restricted to atoms selected by a predicate on the point
template <class Pred>
double poisson_standard_if(const QuasiCube& q, const DiscreteMeasure& mu, const FracParams& p, Pred keep) {
  const double l = q.side();
  const Point c = q.center();
  double s = 0;
  for (const auto& a : mu.atoms())
    if (keep(a.x)) s += a.mass * l / std::pow(l + dist(a.x, c), p.n + 1 - p.alpha);
  return s;
}

struct SupResult {
  double value = 0.0;
  std::string witness;  // cube (or pair) attaining the sup
  bool empty_family = false;
};

std::string describe(const QuasiCube& q);
std::string describe(const CubeIndex& k);

SupResult offset_A2(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                    const DyadicGrid& grid, int level_lo, int level_hi);
SupResult offset_A2(const WeightPair& w, const FracParams& p);
// explicit pair family
SupResult offset_A2(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                    const std::vector<std::pair<QuasiCube, QuasiCube>>& pairs);

double one_tailed_A2_term(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                          const QuasiCube& q);
SupResult one_tailed_A2(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                        const CubeFamily& family);
SupResult one_tailed_A2_dual(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                             const CubeFamily& family);

double punctured_A2_term(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const CommonPointSet& common,
                         const FracParams& p, const QuasiCube& q);
SupResult punctured_A2(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                       const CubeFamily& family);
SupResult punctured_A2_dual(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                            const CubeFamily& family);

// ||P_Q^omega x / l(Q)||^2 / |Q|^{1-a/n} * |Q|_sigma / |Q|^{1-a/n}
double energy_A2_term(const WeightPair& w, const FracParams& p, const CubeIndex& q);
double energy_A2_dual_term(const WeightPair& w, const FracParams& p, const CubeIndex& q);
SupResult energy_A2(const WeightPair& w, const FracParams& p);
SupResult energy_A2_dual(const WeightPair& w, const FracParams& p);
SupResult plugged_energy_A2(const WeightPair& w, const FracParams& p);
SupResult plugged_energy_A2_dual(const WeightPair& w, const FracParams& p);

struct MuckenhouptReport {
  double offset_A2 = 0, one_tailed_A2 = 0, one_tailed_A2_dual = 0, punct_A2 = 0, punct_A2_dual = 0;
  double energy_A2 = 0, energy_A2_dual = 0, plugged_energy_A2 = 0, plugged_energy_A2_dual = 0;
  std::string cube_family_descriptor;
};
MuckenhouptReport muckenhoupt_report(const WeightPair& w, const FracParams& p);

// Analytic comparability constants for measures supported outside I (identity map):
// two-sided when J ⊂ K ⊂ 2K ⊂ I, one-sided P(K)/l(K) <= C P(J)/l(J) when J ⊂ K.
struct PoissonComparability {
  double lower;  // P(J)/l(J) >= lower * P(K)/l(K)
  double upper;  // P(J)/l(J) <= upper * P(K)/l(K)
  double one_sided;
};
PoissonComparability poisson_comparability_constant(const FracParams& p);

}  // namespace tw
