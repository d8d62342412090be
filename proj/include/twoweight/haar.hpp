#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "twoweight/measure.hpp"

namespace tw {

// Orthonormal mean-zero child-constant system on one cube.
struct HaarBasis {
  CubeIndex cube;
  double mass = 0.0;
  std::vector<CubeIndex> children;            // children with positive mass, lexicographic
  std::vector<double> child_mass;
  std::vector<std::vector<double>> functions;  // functions[a][c]: value on children[c]

  std::size_t dimension() const { return functions.size(); }
  // which entry of `children` holds the given child, or -1
  int child_slot(const CubeIndex& c) const;
};

HaarBasis build_haar_basis(const CubeIndex& q, const GridOccupancy& occ);

using Values = std::vector<double>;  // per-atom function values

double average(std::span<const double> f, const CubeIndex& q, const GridOccupancy& occ);
// <f, h_Q^a> for every a
std::vector<double> haar_coefficients(const HaarBasis& b, std::span<const double> f, const GridOccupancy& occ);
// value of h_Q^a at a given atom (0 outside Q)
double haar_value(const HaarBasis& b, std::size_t a, std::size_t atom, const GridOccupancy& occ);

Values delta_projection(std::span<const double> f, const CubeIndex& q, const GridOccupancy& occ);

struct Projection {
  Values values;
  double norm2 = 0.0;
};
// P_K f = sum of Delta_J f over grid cubes J ⊂ K down to grid depth
Projection cube_projection(std::span<const double> f, const CubeIndex& k, const GridOccupancy& occ);

// sup over atoms in q0 of |sum_{Q in [q1,q2]} Delta_Q f - (E_{q0} f - E_{q2} f)|
double telescoping_check(const CubeIndex& q0, const CubeIndex& q1, const CubeIndex& q2, std::span<const double> f,
                         const GridOccupancy& occ);

// coordinate function i of the atoms (image space)
Values coordinate(const DiscreteMeasure& mu, int i);

// ||Delta_J x||^2 summed over coordinates, for every occupied cube, with subtree sums.
class HaarEnergyTable {
 public:
  explicit HaarEnergyTable(const GridOccupancy& occ);

  double delta(const CubeIndex& j) const;
  // sum of delta over occupied J' ⊂ j (including j) accepted by keep
  double projection(const CubeIndex& j, const CubeFilter& keep = {}) const;
  const GridOccupancy& occupancy() const { return *occ_; }

 private:
  double subtree(const CubeIndex& j) const;
  const GridOccupancy* occ_;
  std::unordered_map<CubeIndex, double, CubeIndexHash> delta_;
  mutable std::unordered_map<CubeIndex, double, CubeIndexHash> subtree_;
};

}  // namespace tw
