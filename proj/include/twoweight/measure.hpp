#pragma once

#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "twoweight/point.hpp"
#include "twoweight/quasigeom.hpp"

namespace tw {

struct Atom {
  Point x;
  double mass = 0.0;
};

class InvalidMass : public std::invalid_argument {
 public:
  InvalidMass(std::size_t index, double mass);
  std::size_t index;
};

// Finite positive atomic measure. Atoms with identical coordinates are merged;
// first-occurrence order is preserved.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  explicit DiscreteMeasure(int dim) : dim_(dim) {}
  DiscreteMeasure(int dim, std::vector<Atom> atoms);

  int dim() const { return dim_; }
  std::span<const Atom> atoms() const { return atoms_; }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  double total_mass() const;
  std::vector<Point> points() const;

  DiscreteMeasure scaled(double c) const;
  DiscreteMeasure with_mass(std::size_t i, double m) const;
  DiscreteMeasure without(std::size_t i) const;
  DiscreteMeasure restricted(const QuasiCube& q) const;
  DiscreteMeasure outside(const QuasiCube& q) const;
  // index of the atom at exactly x, or -1
  long find(const Point& x) const;

 private:
  int dim_ = 1;
  std::vector<Atom> atoms_;
};

struct CommonPointSet {
  std::vector<Point> points;
  bool contains(const Point& p) const;
};

double cube_mass(const DiscreteMeasure& mu, const QuasiCube& q);
CommonPointSet common_point_masses(const DiscreteMeasure& sigma, const DiscreteMeasure& omega);
double punctured_mass(const DiscreteMeasure& mu, const QuasiCube& q, const CommonPointSet& p);
DiscreteMeasure remove_largest_common_atom(const DiscreteMeasure& mu, const QuasiCube& q, const CommonPointSet& p);

struct DepointResult {
  DiscreteMeasure sigma;
  DiscreteMeasure omega;
};
DepointResult greedy_depoint(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const QuasiCube& q);

// Atoms of one measure bucketed by lattice cube at every level 0..depth.
class GridOccupancy {
 public:
  struct Cell {
    double mass = 0.0;
    std::vector<int> atoms;
  };

  GridOccupancy(const DyadicGrid& grid, const DiscreteMeasure& mu);

  const Cell* find(const CubeIndex& k) const;
  double mass(const CubeIndex& k) const;
  std::size_t count(const CubeIndex& k) const;
  // occupied cubes at a level, sorted
  const std::vector<CubeIndex>& occupied(int level) const { return sorted_[static_cast<std::size_t>(level)]; }
  // occupied cubes inside the top cube across all levels, coarse to fine
  std::vector<CubeIndex> occupied_in_top() const;
  const CubeIndex& atom_cell(std::size_t atom, int level) const;

  const DyadicGrid& grid() const { return *grid_; }
  const DiscreteMeasure& measure() const { return *mu_; }

 private:
  const DyadicGrid* grid_;
  const DiscreteMeasure* mu_;
  std::vector<std::unordered_map<CubeIndex, Cell, CubeIndexHash>> cells_;
  std::vector<std::vector<CubeIndex>> sorted_;
  std::vector<std::vector<CubeIndex>> atom_cells_;  // [atom][level]
};

}  // namespace tw
