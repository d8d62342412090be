#include "twoweight/quasigeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tw {

BiLipschitzMap BiLipschitzMap::identity(int dim) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("map: dimension must be 1..3");
  return {MapKind::identity, dim, 0.0};
}

BiLipschitzMap BiLipschitzMap::shear(int dim, double amplitude) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("map: dimension must be 1..3");
  if (!std::isfinite(amplitude) || amplitude < 0) throw std::invalid_argument("shear: amplitude must be >= 0");
  return {MapKind::shear, dim, amplitude};
}

BiLipschitzMap BiLipschitzMap::spiral(double eps) {
  if (!std::isfinite(eps) || eps < 0) throw std::invalid_argument("spiral: eps must be >= 0");
  return {MapKind::spiral, 2, eps};
}

BiLipschitzMap BiLipschitzMap::from_name(std::string_view name, int dim, double param) {
  if (name == "identity") return identity(dim);
  if (name == "shear") return shear(dim, param);
  if (name == "spiral") {
    if (dim != 2) throw std::invalid_argument("spiral map requires dim 2");
    return spiral(param);
  }
  throw std::invalid_argument("unknown map: " + std::string(name));
}

std::string BiLipschitzMap::name() const {
  switch (kind_) {
    case MapKind::identity: return "identity";
    case MapKind::shear: return "shear";
    case MapKind::spiral: return "spiral";
  }
  return "?";
}

namespace {

Point rotate(const Point& z, double theta) {
  double cs = std::cos(theta), sn = std::sin(theta);
  Point w = z;
  w[0] = cs * z[0] - sn * z[1];
  w[1] = sn * z[0] + cs * z[1];
  return w;
}

}  // namespace

Point BiLipschitzMap::forward(const Point& x) const {
  require_same_dim(x.dim, dim_);
  switch (kind_) {
    case MapKind::identity: return x;
    case MapKind::shear: {
      Point y = x;
      double s = param_ * std::sin(x[0]);
      for (int i = 1; i < dim_; ++i) y[i] += s;
      return y;
    }
    case MapKind::spiral: {
      double r2 = norm2(x);
      if (r2 == 0) return x;
      return rotate(x, param_ * std::log(r2));
    }
  }
  return x;
}

Point BiLipschitzMap::inverse(const Point& y) const {
  require_same_dim(y.dim, dim_);
  switch (kind_) {
    case MapKind::identity: return y;
    case MapKind::shear: {
      Point x = y;
      double s = param_ * std::sin(y[0]);
      for (int i = 1; i < dim_; ++i) x[i] -= s;
      return x;
    }
    case MapKind::spiral: {
      double r2 = norm2(y);
      if (r2 == 0) return y;
      return rotate(y, -param_ * std::log(r2));
    }
  }
  return y;
}

double BiLipschitzMap::lip_bound() const {
  switch (kind_) {
    case MapKind::identity: return 1.0;
    // Jacobian I + u e1^T with |u| <= a sqrt(n-1)
    case MapKind::shear: return 1.0 + param_ * std::sqrt(static_cast<double>(dim_ - 1));
    // |f_z| + |f_zbar| = sqrt(1+eps^2) + eps
    case MapKind::spiral: return std::sqrt(1.0 + param_ * param_) + param_;
  }
  return 1.0;
}

Cube Cube::from_center(const Point& c, double side) {
  if (!(side > 0)) throw std::invalid_argument("Cube: side must be positive");
  Point corner = c;
  for (int i = 0; i < c.dim; ++i) corner[i] -= side / 2;
  return {corner, side};
}

Point Cube::center() const {
  Point c = corner;
  for (int i = 0; i < c.dim; ++i) c[i] += side / 2;
  return c;
}

bool Cube::contains(const Point& u) const {
  require_same_dim(u.dim, corner.dim);
  for (int i = 0; i < u.dim; ++i) {
    if (!(u[i] >= corner[i] && u[i] < corner[i] + side)) return false;
  }
  return true;
}

bool Cube::contains(const Cube& inner) const {
  require_same_dim(inner.dim(), dim());
  for (int i = 0; i < dim(); ++i) {
    if (inner.corner[i] < corner[i] || inner.corner[i] + inner.side > corner[i] + side) return false;
  }
  return true;
}

Cube Cube::dilated(double r) const { return from_center(center(), r * side); }

double box_distance(const Cube& a, const Cube& b) {
  require_same_dim(a.dim(), b.dim());
  double s = 0;
  for (int i = 0; i < a.dim(); ++i) {
    double gap = std::max({0.0, a.corner[i] - (b.corner[i] + b.side), b.corner[i] - (a.corner[i] + a.side)});
    s += gap * gap;
  }
  return std::sqrt(s);
}

double boundary_distance(const Cube& inner, const Cube& outer) {
  if (!outer.contains(inner)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < inner.dim(); ++i) {
    d = std::min(d, inner.corner[i] - outer.corner[i]);
    d = std::min(d, (outer.corner[i] + outer.side) - (inner.corner[i] + inner.side));
  }
  return d;
}

bool is_neighbour_pair(const Cube& k, const Cube& kp) {
  if (k.side != kp.side || k == kp) return false;
  Cube t = kp.dilated(3.0), tk = k.dilated(3.0);
  if (!t.contains(k) || !tk.contains(kp)) return false;
  // disjoint: some coordinate gap
  for (int i = 0; i < k.dim(); ++i) {
    if (k.corner[i] >= kp.corner[i] + kp.side || kp.corner[i] >= k.corner[i] + k.side) return true;
  }
  return false;
}

double QuasiCube::volume() const { return std::pow(base.side, base.dim()); }

double qdist(const QuasiCube& e, const QuasiCube& f) {
  if (!(e.map == f.map)) throw std::invalid_argument("qdist: maps differ");
  return box_distance(e.base, f.base);
}

double qdist(const std::vector<Point>& e, const std::vector<Point>& f, const BiLipschitzMap& map) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& a : e) {
    Point ua = map.inverse(a);
    for (const auto& b : f) d = std::min(d, dist(ua, map.inverse(b)));
  }
  return d;
}

DyadicGrid::DyadicGrid(BiLipschitzMap map, Point origin, double side, int depth)
    : map_(map), origin_(origin), side_(side), depth_(depth) {
  require_same_dim(origin.dim, map.dim());
  if (!(side > 0)) throw std::invalid_argument("grid: side must be positive");
  if (depth < 0 || depth > 40) throw std::invalid_argument("grid: depth must be in 0..40");
}

double DyadicGrid::side_at(int level) const { return std::ldexp(side_, -level); }

Cube DyadicGrid::base_cube(const CubeIndex& k) const {
  double s = side_at(k.level);
  Point c = origin_;
  for (int i = 0; i < dim(); ++i) c[i] += static_cast<double>(k.idx[i]) * s;
  return {c, s};
}

Cube DyadicGrid::base_cube(const AlternateCube& a) const {
  double s = side_at(a.level);
  Point c = origin_;
  for (int i = 0; i < dim(); ++i) c[i] += static_cast<double>(a.corner[i]) * s;
  return {c, 2 * s};
}

CubeIndex DyadicGrid::locate_preimage(const Point& u, int level) const {
  require_same_dim(u.dim, dim());
  CubeIndex k;
  k.level = level;
  double s = side_at(level);
  for (int i = 0; i < dim(); ++i) {
    double t = std::floor((u[i] - origin_[i]) / s);
    auto v = static_cast<std::int64_t>(t);
    // keep floor consistent with half-open containment test on the cube itself
    double lo = origin_[i] + static_cast<double>(v) * s;
    if (u[i] < lo) --v;
    else if (u[i] >= origin_[i] + static_cast<double>(v + 1) * s) ++v;
    k.idx[i] = v;
  }
  return k;
}

namespace {
std::int64_t floor_div2(std::int64_t v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }
}  // namespace

CubeIndex DyadicGrid::parent(const CubeIndex& k) const {
  if (k.level == 0) throw std::invalid_argument("parent of level 0 cube");
  CubeIndex p;
  p.level = k.level - 1;
  for (int i = 0; i < dim(); ++i) p.idx[i] = floor_div2(k.idx[i]);
  return p;
}

CubeIndex DyadicGrid::ancestor(const CubeIndex& k, int level) const {
  if (level > k.level) throw std::invalid_argument("ancestor level below cube level");
  CubeIndex a = k;
  while (a.level > level) a = parent(a);
  return a;
}

std::vector<CubeIndex> DyadicGrid::children(const CubeIndex& k) const {
  const int n = dim();
  std::vector<CubeIndex> out;
  out.reserve(std::size_t{1} << n);
  for (int mask = 0; mask < (1 << n); ++mask) {
    CubeIndex c;
    c.level = k.level + 1;
    // lexicographic order: first coordinate most significant
    for (int i = 0; i < n; ++i) c.idx[i] = 2 * k.idx[i] + ((mask >> (n - 1 - i)) & 1);
    out.push_back(c);
  }
  return out;
}

bool DyadicGrid::contains(const CubeIndex& outer, const CubeIndex& inner) const {
  if (inner.level < outer.level) return false;
  return ancestor(inner, outer.level) == outer;
}

bool DyadicGrid::in_top(const CubeIndex& k) const {
  std::int64_t m = std::int64_t{1} << k.level;
  for (int i = 0; i < dim(); ++i)
    if (k.idx[i] < 0 || k.idx[i] >= m) return false;
  return true;
}

std::vector<CubeIndex> DyadicGrid::cubes_at(int level) const {
  const int n = dim();
  std::int64_t m = std::int64_t{1} << level;
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= m;
  std::vector<CubeIndex> out;
  out.reserve(static_cast<std::size_t>(total));
  for (std::int64_t t = 0; t < total; ++t) {
    CubeIndex k;
    k.level = level;
    std::int64_t r = t;
    for (int i = n - 1; i >= 0; --i) {
      k.idx[i] = r % m;
      r /= m;
    }
    out.push_back(k);
  }
  return out;
}

DyadicGrid DyadicGrid::shifted(const Point& offset) const {
  return DyadicGrid(map_, origin_ + offset, side_, depth_);
}

DyadicGrid avoid_boundaries(const DyadicGrid& grid, const std::vector<Point>& points) {
  DyadicGrid g = grid;
  double fine = grid.side_at(grid.depth());
  for (int attempt = 0; attempt < 64; ++attempt) {
    bool hit = false;
    for (const auto& x : points) {
      Point u = g.map().inverse(x);
      for (int i = 0; i < u.dim && !hit; ++i) {
        double t = (u[i] - g.origin()[i]) / fine;
        hit = (t == std::floor(t));
      }
      if (hit) break;
    }
    if (!hit) return g;
    // irrational-ish fraction of the finest side
    Point off = Point::filled(grid.dim(), fine * 0.0137 * (attempt + 1) * 0.6180339887);
    g = grid.shifted(off);
  }
  return g;
}

GoodnessParams::GoodnessParams(int r_, double eps_, int tau_, double gamma_)
    : r(r_), eps(eps_), tau(tau_), gamma(gamma_) {
  if (r < 3) throw std::invalid_argument("goodness: r must be >= 3");
  if (!(eps > 1.0 / r && eps < 1.0 - 1.0 / r)) throw std::invalid_argument("goodness: need 1/r < eps < 1 - 1/r");
  if (tau < 1) throw std::invalid_argument("goodness: tau must be >= 1");
  if (!(gamma >= 2)) throw std::invalid_argument("goodness: gamma must be >= 2");
  if (!(delta() > 0)) throw std::invalid_argument("goodness: derived delta must be positive");
}

bool is_deeply_embedded(const Cube& j, const Cube& k, const DeepParams& p) {
  if (!k.contains(j)) return false;
  if (j.side > std::ldexp(k.side, -p.r)) return false;
  double need = 0.5 * std::pow(j.side, p.eps) * std::pow(k.side, 1.0 - p.eps);
  return boundary_distance(j, k) >= need;
}

bool is_deeply_embedded(const QuasiCube& j, const QuasiCube& k, const DeepParams& p) {
  if (!(j.map == k.map)) throw std::invalid_argument("is_deeply_embedded: maps differ");
  return is_deeply_embedded(j.base, k.base, p);
}

bool is_good(const CubeIndex& j, const DyadicGrid& grid, const DeepParams& p) {
  Cube jb = grid.base_cube(j);
  for (int lvl = j.level - p.r; lvl >= 0; --lvl) {
    CubeIndex i = grid.ancestor(j, lvl);
    if (!is_deeply_embedded(jb, grid.base_cube(i), p)) return false;
  }
  return true;
}

bool is_tau_good(const CubeIndex& j, const DyadicGrid& grid, const DeepParams& p, int tau) {
  for (const auto& c : grid.children(j))
    if (!is_good(c, grid, p)) return false;
  CubeIndex a = j;
  for (int l = 0; l <= tau; ++l) {
    if (!is_good(a, grid, p)) return false;
    if (a.level == 0) break;
    a = grid.parent(a);
  }
  return true;
}

namespace {

void deep_descend(const CubeIndex& j, const Cube& kb, const DyadicGrid& grid, const DeepParams& p,
                  const CubeFilter& keep, DeepSubcubes& out) {
  if (keep && !keep(j)) return;
  if (is_deeply_embedded(grid.base_cube(j), kb, p)) {
    out.cubes.push_back(j);
    return;
  }
  if (j.level >= grid.depth()) {
    out.truncated = true;
    return;
  }
  for (const auto& c : grid.children(j)) deep_descend(c, kb, grid, p, keep, out);
}

DeepSubcubes deep_from_components(const std::vector<CubeIndex>& comps, const Cube& kb, const DyadicGrid& grid,
                                  const DeepParams& p, const CubeFilter& keep) {
  DeepSubcubes out;
  for (const auto& c : comps) {
    if (c.level > grid.depth()) {
      out.truncated = true;
      continue;
    }
    deep_descend(c, kb, grid, p, keep, out);
  }
  std::sort(out.cubes.begin(), out.cubes.end());
  return out;
}

}  // namespace

DeepSubcubes maximal_deep_subcubes(const CubeIndex& k, const DyadicGrid& grid, const DeepParams& p,
                                   const CubeFilter& keep) {
  return deep_from_components(grid.children(k), grid.base_cube(k), grid, p, keep);
}

DeepSubcubes maximal_deep_subcubes(const AlternateCube& k, const DyadicGrid& grid, const DeepParams& p,
                                   const CubeFilter& keep) {
  return deep_from_components(alternate_components(k, grid.dim()), grid.base_cube(k), grid, p, keep);
}

std::vector<CubeIndex> alternate_components(const AlternateCube& a, int dim) {
  std::vector<CubeIndex> out;
  for (int mask = 0; mask < (1 << dim); ++mask) {
    CubeIndex c;
    c.level = a.level;
    for (int i = 0; i < dim; ++i) c.idx[i] = a.corner[i] + ((mask >> (dim - 1 - i)) & 1);
    out.push_back(c);
  }
  return out;
}

bool alternate_contains(const AlternateCube& a, const CubeIndex& k, int dim) {
  if (k.level < a.level) return false;
  int shift = k.level - a.level;
  for (int i = 0; i < dim; ++i) {
    std::int64_t v = k.idx[i] >> shift;  // arithmetic shift = floor division by 2^shift
    if (v < a.corner[i] || v > a.corner[i] + 1) return false;
  }
  return true;
}

std::vector<AlternateCube> alternate_quasicubes(const DyadicGrid& grid, int level) {
  // every alternate meeting the top cube: corner index in [-1, 2^level - 1]^n
  const int n = grid.dim();
  std::int64_t m = (std::int64_t{1} << level) + 1;
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= m;
  std::vector<AlternateCube> out;
  out.reserve(static_cast<std::size_t>(total));
  for (std::int64_t t = 0; t < total; ++t) {
    AlternateCube a;
    a.level = level;
    std::int64_t r = t;
    for (int i = n - 1; i >= 0; --i) {
      a.corner[i] = r % m - 1;
      r /= m;
    }
    out.push_back(a);
  }
  return out;
}

std::vector<std::array<std::int64_t, kMaxDim>> neighbour_offsets(int dim) {
  std::vector<std::array<std::int64_t, kMaxDim>> out;
  int total = 1;
  for (int i = 0; i < dim; ++i) total *= 3;
  for (int t = 0; t < total; ++t) {
    std::array<std::int64_t, kMaxDim> o{};
    int r = t;
    bool zero = true;
    for (int i = dim - 1; i >= 0; --i) {
      o[i] = r % 3 - 1;
      r /= 3;
      zero = zero && o[i] == 0;
    }
    if (!zero) out.push_back(o);
  }
  return out;
}

bool are_neighbours(const CubeIndex& a, const CubeIndex& b, int dim) {
  if (a.level != b.level || a == b) return false;
  for (int i = 0; i < dim; ++i) {
    auto d = a.idx[i] - b.idx[i];
    if (d < -1 || d > 1) return false;
  }
  return true;
}

std::vector<std::pair<CubeIndex, CubeIndex>> neighbour_pairs(const DyadicGrid& grid, int level) {
  std::vector<std::pair<CubeIndex, CubeIndex>> out;
  auto offs = neighbour_offsets(grid.dim());
  for (const auto& k : grid.cubes_at(level)) {
    for (const auto& o : offs) {
      CubeIndex kp = k;
      for (int i = 0; i < grid.dim(); ++i) kp.idx[i] += o[i];
      out.emplace_back(k, kp);
    }
  }
  return out;
}

}  // namespace tw
