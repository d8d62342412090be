#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "twoweight/point.hpp"

namespace tw {

enum class MapKind { identity, shear, spiral };

// Globally biLipschitz map from the built-in catalog.
//   identity
//   shear:  (x1, x') -> (x1, x' + a sin(x1))
//   spiral: z -> z |z|^{2 i eps}  (n = 2 only; fails sector separation)
class BiLipschitzMap {
 public:
  BiLipschitzMap() = default;
  static BiLipschitzMap identity(int dim);
  static BiLipschitzMap shear(int dim, double amplitude);
  static BiLipschitzMap spiral(double eps);
  static BiLipschitzMap from_name(std::string_view name, int dim, double param);

  Point forward(const Point& x) const;
  Point inverse(const Point& y) const;
  double lip_bound() const;
  bool sector_separation() const { return kind_ != MapKind::spiral; }

  MapKind kind() const { return kind_; }
  double param() const { return param_; }
  int dim() const { return dim_; }
  std::string name() const;

  bool operator==(const BiLipschitzMap&) const = default;

 private:
  BiLipschitzMap(MapKind k, int dim, double p) : kind_(k), dim_(dim), param_(p) {}
  MapKind kind_ = MapKind::identity;
  int dim_ = 1;
  double param_ = 0.0;
};

// Half-open axis-parallel cube [corner, corner + side).
struct Cube {
  Point corner;
  double side = 1.0;

  static Cube from_center(const Point& c, double side);
  Point center() const;
  int dim() const { return corner.dim; }
  bool contains(const Point& u) const;
  bool contains(const Cube& inner) const;
  Cube dilated(double r) const;  // same center, side r*side
  bool operator==(const Cube&) const = default;
};

double box_distance(const Cube& a, const Cube& b);
// distance from an inner cube to the boundary of an outer cube; 0 unless inner is inside outer
double boundary_distance(const Cube& inner, const Cube& outer);
bool is_neighbour_pair(const Cube& k, const Cube& kp);

struct QuasiCube {
  Cube base;
  BiLipschitzMap map;

  bool contains(const Point& x) const { return base.contains(map.inverse(x)); }
  Point center() const { return map.forward(base.center()); }
  double side() const { return base.side; }
  int dim() const { return base.dim(); }
  // catalog maps are volume preserving, so |Q| = side^n
  double volume() const;
  QuasiCube dilated(double r) const { return {base.dilated(r), map}; }
};

double qdist(const QuasiCube& e, const QuasiCube& f);
double qdist(const std::vector<Point>& e, const std::vector<Point>& f, const BiLipschitzMap& map);

struct CubeIndex {
  int level = 0;
  std::array<std::int64_t, kMaxDim> idx{};

  bool operator==(const CubeIndex&) const = default;
  auto operator<=>(const CubeIndex&) const = default;
};

struct CubeIndexHash {
  std::size_t operator()(const CubeIndex& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.level) * 0x9E3779B97F4A7C15ULL;
    for (auto v : k.idx) {
      h ^= static_cast<std::uint64_t>(v) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

// Union of 2^n lattice cubes at `level` whose lowest member has index `corner`.
struct AlternateCube {
  int level = 0;
  std::array<std::int64_t, kMaxDim> corner{};
  bool operator==(const AlternateCube&) const = default;
};

// Dyadic lattice anchored at the top cube. Cubes are addressed by (level, index);
// the lattice extends past the top cube, the top cube bounds enumerated families.
class DyadicGrid {
 public:
  DyadicGrid(BiLipschitzMap map, Point origin, double side, int depth);

  int dim() const { return map_.dim(); }
  int depth() const { return depth_; }
  const BiLipschitzMap& map() const { return map_; }
  const Point& origin() const { return origin_; }
  double top_side() const { return side_; }
  double side_at(int level) const;

  CubeIndex top_index() const { return CubeIndex{}; }
  Cube base_cube(const CubeIndex& k) const;
  QuasiCube cube(const CubeIndex& k) const { return {base_cube(k), map_}; }
  Cube base_cube(const AlternateCube& a) const;
  QuasiCube cube(const AlternateCube& a) const { return {base_cube(a), map_}; }

  CubeIndex locate_preimage(const Point& u, int level) const;
  CubeIndex locate(const Point& x, int level) const { return locate_preimage(map_.inverse(x), level); }

  CubeIndex parent(const CubeIndex& k) const;
  CubeIndex ancestor(const CubeIndex& k, int level) const;
  std::vector<CubeIndex> children(const CubeIndex& k) const;
  bool contains(const CubeIndex& outer, const CubeIndex& inner) const;  // outer ⊇ inner
  bool in_top(const CubeIndex& k) const;
  std::vector<CubeIndex> cubes_at(int level) const;  // lattice cubes inside the top cube

  DyadicGrid shifted(const Point& offset) const;

 private:
  BiLipschitzMap map_;
  Point origin_;
  double side_;
  int depth_;
};

// Returns a grid whose origin is nudged until no atom preimage sits on a
// cube face at any level up to depth.
DyadicGrid avoid_boundaries(const DyadicGrid& grid, const std::vector<Point>& points);

struct DeepParams {
  int r = 3;
  double eps = 0.5;
};

struct GoodnessParams {
  int r = 3;
  double eps = 0.5;
  int tau = 1;
  double gamma = 8.0;

  GoodnessParams() = default;
  GoodnessParams(int r, double eps, int tau, double gamma);  // validates
  DeepParams deep() const { return {r, eps}; }
  double delta() const { return (r * eps - 1.0) / (r + tau); }
};

bool is_deeply_embedded(const Cube& j, const Cube& k, const DeepParams& p);
bool is_deeply_embedded(const QuasiCube& j, const QuasiCube& k, const DeepParams& p);

// Goodness scans superquasicubes only up to level 0 of the grid.
bool is_good(const CubeIndex& j, const DyadicGrid& grid, const DeepParams& p);
bool is_tau_good(const CubeIndex& j, const DyadicGrid& grid, const DeepParams& p, int tau);

struct DeepSubcubes {
  std::vector<CubeIndex> cubes;
  bool truncated = false;  // some branch reached grid depth without qualifying
};

// keep(J) == false prunes J and all its descendants from the search.
using CubeFilter = std::function<bool(const CubeIndex&)>;

DeepSubcubes maximal_deep_subcubes(const CubeIndex& k, const DyadicGrid& grid, const DeepParams& p,
                                   const CubeFilter& keep = {});
DeepSubcubes maximal_deep_subcubes(const AlternateCube& k, const DyadicGrid& grid, const DeepParams& p,
                                   const CubeFilter& keep = {});

std::vector<AlternateCube> alternate_quasicubes(const DyadicGrid& grid, int level);
std::vector<CubeIndex> alternate_components(const AlternateCube& a, int dim);
bool alternate_contains(const AlternateCube& a, const CubeIndex& k, int dim);

std::vector<std::pair<CubeIndex, CubeIndex>> neighbour_pairs(const DyadicGrid& grid, int level);
bool are_neighbours(const CubeIndex& a, const CubeIndex& b, int dim);

// Offsets in {-1,0,1}^n minus the origin.
std::vector<std::array<std::int64_t, kMaxDim>> neighbour_offsets(int dim);

}  // namespace tw
