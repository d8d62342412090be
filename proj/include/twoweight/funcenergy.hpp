#pragma once

#include <vector>

#include "twoweight/corona.hpp"

namespace tw {

// Dirac mass at (c_J, l(J)) in the upper half space with weight ||P_{F,J} x||^2.
struct UpperAtom {
  Point c;
  double t = 0.0;
  double weight = 0.0;
  CubeIndex j;
  int f = -1;  // index into the forest
};

struct UpperMeasure {
  int dim = 1;
  std::vector<UpperAtom> atoms;
  // weight of the companion measure mu-bar (weight / t^2)
  static double bar(const UpperAtom& a) { return a.weight / (a.t * a.t); }
};

// P_{F,J} sums Delta_{J'} over J' ⊂ J with J' good and in the corona of F.
UpperMeasure build_upper_measure(const StoppingForest& forest, const WeightPair& w, const GoodnessCache& good);

// (x, t) in the closed tent over the quasicube i
bool in_tent(const QuasiCube& i, const Point& x, double t);

double poisson_extension(const DiscreteMeasure& nu, const Point& x, double t, const FracParams& p);
// same with nu restricted to the quasicube q
double poisson_extension(const DiscreteMeasure& nu, const QuasiCube& q, const Point& x, double t, const FracParams& p);
// Q(t 1_{I-hat} mu-bar)(x)
double dual_poisson(const UpperMeasure& upper, const QuasiCube& i, const Point& x, const FracParams& p);

struct ForwardTesting {
  double local = 0.0;
  double global = 0.0;
  double total = 0.0;
};
// int P(1_I sigma)^2 d mu-bar, split by J ⊂ I
ForwardTesting forward_testing(const CubeIndex& i, const DyadicGrid& grid, const DiscreteMeasure& sigma,
                               const UpperMeasure& upper, const FracParams& p);
// int |Q(t 1_{I-hat} mu-bar)|^2 d sigma
double backward_testing(const CubeIndex& i, const DyadicGrid& grid, const DiscreteMeasure& sigma,
                        const UpperMeasure& upper, const FracParams& p);

// int_{I-hat} t^2 d mu-bar, by tent geometry and by J ⊂ I
double mu_hat_tent(const CubeIndex& i, const DyadicGrid& grid, const UpperMeasure& upper);
double mu_hat_combinatorial(const CubeIndex& i, const DyadicGrid& grid, const UpperMeasure& upper);

// #{F : J ⊂ I0 ⊊ F, J in M_deep(F), P_{F,J} x != 0}
int tau_overlap_count(const CubeIndex& i0, const StoppingForest& forest, const UpperMeasure& upper,
                      const DyadicGrid& grid);

// sum over upper atoms with J ⊂ outer of (P(J, 1_outer sigma)/|J|^{1/n})^2 weight
double local_sum(const Cube& outer, const WeightPair& w, const UpperMeasure& upper, const FracParams& p);
// B(I) for an alternate cube: F ⊋ some component of I, J ⊂ I
double refined_b(const AlternateCube& i, const WeightPair& w, const StoppingForest& forest, const UpperMeasure& upper,
                 const FracParams& p);

struct FunctionalEnergy {
  double value = 0.0;          // sqrt of the top eigenvalue (power iteration)
  double eigen_value = 0.0;    // same from a dense eigensolver
  std::vector<double> h;       // maximizing h, ||h||_sigma = 1
  int iterations = 0;
};
// sup over ||h||_{L2(sigma)} = 1 of ||P(h sigma)||_{L2(mu-bar)}
FunctionalEnergy functional_energy(const DiscreteMeasure& sigma, const UpperMeasure& upper, const FracParams& p,
                                   int max_iter = 1000, double tol = 1e-13);

}  // namespace tw
