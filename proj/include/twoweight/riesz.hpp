#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "twoweight/poisson.hpp"

namespace tw {

// K(w) = w / |w|^{n+1-alpha}; K(0) = 0
Point riesz_kernel(const Point& w, const FracParams& p);
// analytic constants: |K(w)| <= C |w|^{a-n}, |grad K(w)| <= C |w|^{a-n-1}
double kernel_size_constant(const FracParams& p);
double kernel_smoothness_constant(const FracParams& p);
// d K_i / d w_j
Eigen::MatrixXd riesz_kernel_gradient(const Point& w, const FracParams& p);

enum class TruncationKind { tangent, cutoff, smooth };

class TruncationProfile {
 public:
  static TruncationProfile tangent(const FracParams& p, double delta, double R);
  static TruncationProfile cutoff(const FracParams& p, double delta, double R);
  // r^{a-n} times a C-infinity bump: equals r^{a-n} on [2 delta, R], zero below delta and above 2R
  static TruncationProfile smooth(const FracParams& p, double delta, double R);

  double operator()(double r) const;
  double delta() const { return delta_; }
  double R() const { return R_; }
  double S() const { return S_; }
  TruncationKind kind() const { return kind_; }
  const FracParams& params() const { return p_; }

 private:
  TruncationProfile(TruncationKind k, const FracParams& p, double delta, double R);
  TruncationKind kind_;
  FracParams p_;
  double delta_, R_, S_;
};

double tangent_truncation(double r, const TruncationProfile& profile);

struct DifferenceBound {
  double lhs = 0.0;
  double rhs = 0.0;
};
// constant multiplying the dyadic majorant, derived from the piecewise-linear profile
double truncation_majorant_constant(const FracParams& p);
DifferenceBound truncation_difference_bound(const Point& w, const TruncationProfile& profile);

// sum over atoms of Omega_l(x - y) psi(|x - y|) mass f(y); f defaults to 1
double apply_truncated(const DiscreteMeasure& mu, const Point& x, const TruncationProfile& profile, int component,
                       std::span<const double> f = {});
Point apply_truncated(const DiscreteMeasure& mu, const Point& x, const TruncationProfile& profile,
                      std::span<const double> f = {});

// Stacked per-component matrix mapping l^2 coefficients of L^2(sigma) to L^2(omega).
struct OperatorMatrix {
  Eigen::MatrixXd a;  // rows: component * |omega| + i, cols: sigma atoms
  double norm() const;
};
OperatorMatrix operator_matrix(const DiscreteMeasure& sigma, const DiscreteMeasure& omega,
                               const TruncationProfile& profile);

using TruncationLattice = std::vector<std::pair<double, double>>;  // (delta, R), delta < R
TruncationLattice default_lattice(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, int per_axis = 8);

SupResult operator_norm(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                        const TruncationLattice& lattice, TruncationKind kind = TruncationKind::tangent);

// sup (1/|Q|_sigma) int_Q |T(1_Q sigma)|^2 d omega over family and lattice (squared testing constant)
SupResult testing_constant(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                           const TruncationLattice& lattice, const CubeFamily& family,
                           TruncationKind kind = TruncationKind::tangent);
SupResult testing_constant_dual(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                                const TruncationLattice& lattice, const CubeFamily& family,
                                TruncationKind kind = TruncationKind::tangent);

bool wbp_admissible(const Cube& q, const Cube& qp, double C);
using PairFamily = std::vector<std::pair<QuasiCube, QuasiCube>>;
PairFamily wbp_pair_family(const WeightPair& w, double C);
SupResult weak_boundedness(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                           const TruncationLattice& lattice, const PairFamily& pairs,
                           TruncationKind kind = TruncationKind::tangent);

// untruncated R mu at x
Point riesz_potential(const DiscreteMeasure& mu, const Point& x, const FracParams& p);

struct Monotonicity {
  double phi = 0.0;
  double haar_term = 0.0;    // (P/|J|^{1/n})^2 ||Delta_J x||^2
  double moment_term = 0.0;  // (P_{1+delta}/|J|^{1/n})^2 ||x - m_J||^2
};
// requires mu supported outside 2J
Monotonicity monotonicity_functional(const CubeIndex& j, const GridOccupancy& omega, const DiscreteMeasure& mu,
                                     const FracParams& p);
// ||Delta_J^omega R mu||, all components
double delta_of_riesz(const CubeIndex& j, const GridOccupancy& omega, const DiscreteMeasure& mu, const FracParams& p);

// |<T nu, Psi>_omega| / (||Psi|| P(J,|nu|) sqrt(|J|_omega)); Psi given per omega atom
double pivotal_bound_check(const QuasiCube& j, std::span<const double> psi, const DiscreteMeasure& omega,
                           const DiscreteMeasure& nu, const FracParams& p, double gamma);

// Laplacian in the first ell variables of |x|^beta, beta = alpha - n + 1
double semiharmonic_laplacian(const Point& x, const FracParams& p, int ell);
bool semiharmonic_admissible(int n, int ell, double alpha);  // (either or)
bool reversal_admissible(int n, int k, double alpha);        // (either or'), k = ell - 1

struct RieszGradient {
  Eigen::MatrixXd m;
  std::vector<double> eigenvalues;  // sorted by magnitude, ascending
};
RieszGradient riesz_gradient(const Point& z, const DiscreteMeasure& mu, const FracParams& p);

struct Reversal {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};
Reversal energy_reversal_check(const QuasiCube& j, const DiscreteMeasure& mu, const DiscreteMeasure& omega,
                               const FracParams& p, double gamma);

}  // namespace tw
