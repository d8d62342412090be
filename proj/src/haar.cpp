#include "twoweight/haar.hpp"

#include <algorithm>
#include <cmath>

namespace tw {

int HaarBasis::child_slot(const CubeIndex& c) const {
  auto it = std::find(children.begin(), children.end(), c);
  return it == children.end() ? -1 : static_cast<int>(it - children.begin());
}

HaarBasis build_haar_basis(const CubeIndex& q, const GridOccupancy& occ) {
  HaarBasis b;
  b.cube = q;
  b.mass = occ.mass(q);
  if (b.mass <= 0 || q.level >= occ.grid().depth()) return b;
  for (const auto& c : occ.grid().children(q)) {
    double m = occ.mass(c);
    if (m > 0) {
      b.children.push_back(c);
      b.child_mass.push_back(m);
    }
  }
  const std::size_t k = b.children.size();
  if (k < 2) return b;
  double total = 0;
  for (double m : b.child_mass) total += m;
  auto ip = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0;
    for (std::size_t c = 0; c < k; ++c) s += b.child_mass[c] * u[c] * v[c];
    return s;
  };
  // modified Gram-Schmidt (two passes) on the mean-removed tensor sign patterns;
  // for equal child masses this is the standard Haar system
  const int n = occ.grid().dim();
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<double> v(k);
    for (std::size_t c = 0; c < k; ++c) {
      double s = 1.0;
      for (int i = 0; i < n; ++i)
        if (((mask >> i) & 1) && (b.children[c].idx[i] & 1)) s = -s;
      v[c] = s;
    }
    double mean = ip(v, std::vector<double>(k, 1.0)) / total;
    for (auto& x : v) x -= mean;
    double before = std::sqrt(ip(v, v));
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& h : b.functions) {
        double t = ip(v, h);
        for (std::size_t c = 0; c < k; ++c) v[c] -= t * h[c];
      }
    }
    double nv = std::sqrt(ip(v, v));
    if (nv < 1e-12 * std::sqrt(total) || nv < 1e-10 * before) continue;
    for (auto& x : v) x /= nv;
    b.functions.push_back(std::move(v));
    if (b.functions.size() == k - 1) break;
  }
  return b;
}

double average(std::span<const double> f, const CubeIndex& q, const GridOccupancy& occ) {
  const auto* cell = occ.find(q);
  if (!cell || cell->mass <= 0) return 0.0;
  double s = 0;
  for (int a : cell->atoms) s += occ.measure()[static_cast<std::size_t>(a)].mass * f[static_cast<std::size_t>(a)];
  return s / cell->mass;
}

std::vector<double> haar_coefficients(const HaarBasis& b, std::span<const double> f, const GridOccupancy& occ) {
  std::vector<double> out(b.dimension(), 0.0);
  if (b.dimension() == 0) return out;
  // integrate f over each child, then pair with the child-constant functions
  std::vector<double> child_integral(b.children.size(), 0.0);
  const auto* cell = occ.find(b.cube);
  for (int a : cell->atoms) {
    int slot = b.child_slot(occ.atom_cell(static_cast<std::size_t>(a), b.cube.level + 1));
    child_integral[static_cast<std::size_t>(slot)] +=
        occ.measure()[static_cast<std::size_t>(a)].mass * f[static_cast<std::size_t>(a)];
  }
  for (std::size_t i = 0; i < b.dimension(); ++i)
    for (std::size_t c = 0; c < b.children.size(); ++c) out[i] += b.functions[i][c] * child_integral[c];
  return out;
}

double haar_value(const HaarBasis& b, std::size_t a, std::size_t atom, const GridOccupancy& occ) {
  if (occ.atom_cell(atom, b.cube.level) != b.cube) return 0.0;
  int slot = b.child_slot(occ.atom_cell(atom, b.cube.level + 1));
  return slot < 0 ? 0.0 : b.functions[a][static_cast<std::size_t>(slot)];
}

namespace {

void add_delta(std::span<const double> f, const HaarBasis& b, const GridOccupancy& occ, Values& out) {
  if (b.dimension() == 0) return;
  auto coef = haar_coefficients(b, f, occ);
  for (int a : occ.find(b.cube)->atoms) {
    auto ua = static_cast<std::size_t>(a);
    int slot = b.child_slot(occ.atom_cell(ua, b.cube.level + 1));
    double v = 0;
    for (std::size_t i = 0; i < coef.size(); ++i) v += coef[i] * b.functions[i][static_cast<std::size_t>(slot)];
    out[ua] += v;
  }
}

}  // namespace

Values delta_projection(std::span<const double> f, const CubeIndex& q, const GridOccupancy& occ) {
  Values out(occ.measure().size(), 0.0);
  add_delta(f, build_haar_basis(q, occ), occ, out);
  return out;
}

Projection cube_projection(std::span<const double> f, const CubeIndex& k, const GridOccupancy& occ) {
  Projection p;
  p.values.assign(occ.measure().size(), 0.0);
  std::vector<CubeIndex> stack{k};
  while (!stack.empty()) {
    CubeIndex j = stack.back();
    stack.pop_back();
    if (occ.count(j) < 2) continue;
    HaarBasis b = build_haar_basis(j, occ);
    for (double c : haar_coefficients(b, f, occ)) p.norm2 += c * c;
    add_delta(f, b, occ, p.values);
    if (j.level < occ.grid().depth())
      for (const auto& c : occ.grid().children(j)) stack.push_back(c);
  }
  return p;
}

double telescoping_check(const CubeIndex& q0, const CubeIndex& q1, const CubeIndex& q2, std::span<const double> f,
                         const GridOccupancy& occ) {
  const auto& grid = occ.grid();
  if (q0.level != q1.level + 1 || grid.parent(q0) != q1) throw std::invalid_argument("telescope: q0 must be a child of q1");
  if (!grid.contains(q2, q1)) throw std::invalid_argument("telescope: q1 must lie in q2");
  Values sum(occ.measure().size(), 0.0);
  for (CubeIndex q = q1;; q = grid.parent(q)) {
    add_delta(f, build_haar_basis(q, occ), occ, sum);
    if (q.level == q2.level) break;
  }
  const auto* cell = occ.find(q0);
  if (!cell) return 0.0;
  double target = average(f, q0, occ) - average(f, q2, occ);
  double worst = 0;
  for (int a : cell->atoms) worst = std::max(worst, std::abs(sum[static_cast<std::size_t>(a)] - target));
  return worst;
}

Values coordinate(const DiscreteMeasure& mu, int i) {
  Values v(mu.size());
  for (std::size_t a = 0; a < mu.size(); ++a) v[a] = mu[a].x[i];
  return v;
}

HaarEnergyTable::HaarEnergyTable(const GridOccupancy& occ) : occ_(&occ) {
  const int n = occ.measure().dim();
  std::vector<Values> xs;
  for (int i = 0; i < n; ++i) xs.push_back(coordinate(occ.measure(), i));
  for (int lvl = 0; lvl < occ.grid().depth(); ++lvl) {
    for (const auto& j : occ.occupied(lvl)) {
      if (occ.count(j) < 2) continue;
      HaarBasis b = build_haar_basis(j, occ);
      double e = 0;
      for (const auto& x : xs)
        for (double c : haar_coefficients(b, x, occ)) e += c * c;
      if (e > 0) delta_[j] = e;
    }
  }
}

double HaarEnergyTable::delta(const CubeIndex& j) const {
  auto it = delta_.find(j);
  return it == delta_.end() ? 0.0 : it->second;
}

double HaarEnergyTable::subtree(const CubeIndex& j) const {
  if (occ_->count(j) < 2) return 0.0;
  auto it = subtree_.find(j);
  if (it != subtree_.end()) return it->second;
  double s = delta(j);
  if (j.level < occ_->grid().depth())
    for (const auto& c : occ_->grid().children(j)) s += subtree(c);
  subtree_[j] = s;
  return s;
}

double HaarEnergyTable::projection(const CubeIndex& j, const CubeFilter& keep) const {
  if (!keep) return subtree(j);
  if (occ_->count(j) < 2) return 0.0;
  double s = keep(j) ? delta(j) : 0.0;
  if (j.level < occ_->grid().depth())
    for (const auto& c : occ_->grid().children(j)) s += projection(c, keep);
  return s;
}

}  // namespace tw
