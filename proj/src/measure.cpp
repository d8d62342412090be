#include "twoweight/measure.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace tw {

InvalidMass::InvalidMass(std::size_t i, double mass)
    : std::invalid_argument("atom " + std::to_string(i) + ": mass must be > 0 (got " + std::to_string(mass) + ")"),
      index(i) {}

DiscreteMeasure::DiscreteMeasure(int dim, std::vector<Atom> atoms) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("measure: dimension must be 1..3");
  std::map<Point, std::size_t> seen;
  atoms_.reserve(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& a = atoms[i];
    require_same_dim(a.x.dim, dim);
    if (!(a.mass > 0) || !std::isfinite(a.mass)) throw InvalidMass(i, a.mass);
    if (!is_finite(a.x)) throw std::invalid_argument("atom " + std::to_string(i) + ": non-finite coordinate");
    auto [it, fresh] = seen.emplace(a.x, atoms_.size());
    if (fresh) atoms_.push_back(a);
    else atoms_[it->second].mass += a.mass;
  }
}

double DiscreteMeasure::total_mass() const {
  double s = 0;
  for (const auto& a : atoms_) s += a.mass;
  return s;
}

std::vector<Point> DiscreteMeasure::points() const {
  std::vector<Point> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_) out.push_back(a.x);
  return out;
}

DiscreteMeasure DiscreteMeasure::scaled(double c) const {
  DiscreteMeasure m(dim_);
  if (c <= 0) return m;
  m.atoms_ = atoms_;
  for (auto& a : m.atoms_) a.mass *= c;
  return m;
}

DiscreteMeasure DiscreteMeasure::with_mass(std::size_t i, double mass) const {
  if (mass <= 0) return without(i);
  DiscreteMeasure m = *this;
  m.atoms_.at(i).mass = mass;
  return m;
}

DiscreteMeasure DiscreteMeasure::without(std::size_t i) const {
  DiscreteMeasure m = *this;
  m.atoms_.erase(m.atoms_.begin() + static_cast<std::ptrdiff_t>(i));
  return m;
}

DiscreteMeasure DiscreteMeasure::restricted(const QuasiCube& q) const {
  DiscreteMeasure m(dim_);
  for (const auto& a : atoms_)
    if (q.contains(a.x)) m.atoms_.push_back(a);
  return m;
}

DiscreteMeasure DiscreteMeasure::outside(const QuasiCube& q) const {
  DiscreteMeasure m(dim_);
  for (const auto& a : atoms_)
    if (!q.contains(a.x)) m.atoms_.push_back(a);
  return m;
}

long DiscreteMeasure::find(const Point& x) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (atoms_[i].x == x) return static_cast<long>(i);
  return -1;
}

bool CommonPointSet::contains(const Point& p) const {
  return std::find(points.begin(), points.end(), p) != points.end();
}

double cube_mass(const DiscreteMeasure& mu, const QuasiCube& q) {
  require_same_dim(mu.dim(), q.dim());
  double s = 0;
  for (const auto& a : mu.atoms())
    if (q.contains(a.x)) s += a.mass;
  return s;
}

CommonPointSet common_point_masses(const DiscreteMeasure& sigma, const DiscreteMeasure& omega) {
  require_same_dim(sigma.dim(), omega.dim());
  std::set<Point> in_omega;
  for (const auto& a : omega.atoms()) in_omega.insert(a.x);
  CommonPointSet out;
  for (const auto& a : sigma.atoms())
    if (in_omega.count(a.x)) out.points.push_back(a.x);
  return out;
}

namespace {

// index of the heaviest atom of mu in q at a common point; ties -> lexicographically smallest point
long heaviest_common(const DiscreteMeasure& mu, const QuasiCube& q, const CommonPointSet& p) {
  long best = -1;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Atom& a = mu[i];
    if (!q.contains(a.x) || !p.contains(a.x)) continue;
    if (best < 0) {
      best = static_cast<long>(i);
      continue;
    }
    const Atom& b = mu[static_cast<std::size_t>(best)];
    if (a.mass > b.mass || (a.mass == b.mass && a.x < b.x)) best = static_cast<long>(i);
  }
  return best;
}

}  // namespace

double punctured_mass(const DiscreteMeasure& mu, const QuasiCube& q, const CommonPointSet& p) {
  double total = cube_mass(mu, q);
  long k = heaviest_common(mu, q, p);
  return k < 0 ? total : total - mu[static_cast<std::size_t>(k)].mass;
}

DiscreteMeasure remove_largest_common_atom(const DiscreteMeasure& mu, const QuasiCube& q, const CommonPointSet& p) {
  long k = heaviest_common(mu, q, p);
  return k < 0 ? mu : mu.without(static_cast<std::size_t>(k));
}

DepointResult greedy_depoint(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const QuasiCube& q) {
  DiscreteMeasure s = sigma.restricted(q), w = omega.restricted(q);
  CommonPointSet common = common_point_masses(s, w);
  struct Pair {
    double ms, mw;
    Point x;
  };
  std::vector<Pair> pts;
  for (const auto& x : common.points) {
    pts.push_back({s[static_cast<std::size_t>(s.find(x))].mass, w[static_cast<std::size_t>(w.find(x))].mass, x});
  }
  // alternate: odd picks maximize sigma mass (kept by sigma), even picks maximize omega (kept by omega)
  std::vector<bool> used(pts.size(), false);
  std::vector<Point> drop_from_sigma, drop_from_omega;
  for (std::size_t step = 0; step < pts.size(); ++step) {
    bool sigma_turn = (step % 2 == 0);
    long best = -1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (used[i]) continue;
      double v = sigma_turn ? pts[i].ms : pts[i].mw;
      if (best < 0 || v > (sigma_turn ? pts[static_cast<std::size_t>(best)].ms : pts[static_cast<std::size_t>(best)].mw))
        best = static_cast<long>(i);
    }
    used[static_cast<std::size_t>(best)] = true;
    if (sigma_turn) drop_from_omega.push_back(pts[static_cast<std::size_t>(best)].x);
    else drop_from_sigma.push_back(pts[static_cast<std::size_t>(best)].x);
  }
  auto strip = [](const DiscreteMeasure& m, const std::vector<Point>& drop) {
    std::vector<Atom> keep;
    for (const auto& a : m.atoms())
      if (std::find(drop.begin(), drop.end(), a.x) == drop.end()) keep.push_back(a);
    return DiscreteMeasure(m.dim(), std::move(keep));
  };
  return {strip(s, drop_from_sigma), strip(w, drop_from_omega)};
}

GridOccupancy::GridOccupancy(const DyadicGrid& grid, const DiscreteMeasure& mu) : grid_(&grid), mu_(&mu) {
  require_same_dim(grid.dim(), mu.dim());
  const int depth = grid.depth();
  cells_.resize(static_cast<std::size_t>(depth) + 1);
  sorted_.resize(static_cast<std::size_t>(depth) + 1);
  atom_cells_.resize(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    Point u = grid.map().inverse(mu[i].x);
    auto& cells = atom_cells_[i];
    cells.resize(static_cast<std::size_t>(depth) + 1);
    cells[static_cast<std::size_t>(depth)] = grid.locate_preimage(u, depth);
    for (int lvl = depth - 1; lvl >= 0; --lvl)
      cells[static_cast<std::size_t>(lvl)] = grid.parent(cells[static_cast<std::size_t>(lvl) + 1]);
    for (int lvl = 0; lvl <= depth; ++lvl) {
      Cell& c = cells_[static_cast<std::size_t>(lvl)][cells[static_cast<std::size_t>(lvl)]];
      c.mass += mu[i].mass;
      c.atoms.push_back(static_cast<int>(i));
    }
  }
  for (int lvl = 0; lvl <= depth; ++lvl) {
    auto& v = sorted_[static_cast<std::size_t>(lvl)];
    for (const auto& [k, c] : cells_[static_cast<std::size_t>(lvl)]) v.push_back(k);
    std::sort(v.begin(), v.end());
  }
}

const GridOccupancy::Cell* GridOccupancy::find(const CubeIndex& k) const {
  if (k.level < 0 || k.level > grid_->depth()) return nullptr;
  const auto& m = cells_[static_cast<std::size_t>(k.level)];
  auto it = m.find(k);
  return it == m.end() ? nullptr : &it->second;
}

double GridOccupancy::mass(const CubeIndex& k) const {
  const Cell* c = find(k);
  return c ? c->mass : 0.0;
}

std::size_t GridOccupancy::count(const CubeIndex& k) const {
  const Cell* c = find(k);
  return c ? c->atoms.size() : 0;
}

std::vector<CubeIndex> GridOccupancy::occupied_in_top() const {
  std::vector<CubeIndex> out;
  for (const auto& level : sorted_)
    for (const auto& k : level)
      if (grid_->in_top(k)) out.push_back(k);
  return out;
}

const CubeIndex& GridOccupancy::atom_cell(std::size_t atom, int level) const {
  return atom_cells_[atom][static_cast<std::size_t>(level)];
}

}  // namespace tw
