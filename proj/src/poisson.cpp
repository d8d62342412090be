#include "twoweight/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tw {

FracParams::FracParams(int n_, double alpha_, double delta_cz_) : n(n_), alpha(alpha_), delta_cz(delta_cz_) {
  if (n < 1 || n > kMaxDim) throw std::invalid_argument("params: n must be 1..3");
  if (!(alpha >= 0 && alpha < n)) throw std::invalid_argument("params: need 0 <= alpha < n");
  if (!(delta_cz > 0)) throw std::invalid_argument("params: delta_cz must be positive");
}

WeightPair::WeightPair(const DyadicGrid& grid, DiscreteMeasure sigma, DiscreteMeasure omega)
    : grid_(grid),
      sigma_(std::move(sigma)),
      omega_(std::move(omega)),
      occ_sigma_(grid_, sigma_),
      occ_omega_(grid_, omega_),
      energy_sigma_(occ_sigma_),
      energy_omega_(occ_omega_),
      common_(common_point_masses(sigma_, omega_)) {
  auto a = occ_sigma_.occupied_in_top();
  auto b = occ_omega_.occupied_in_top();
  family_.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(family_));
  family_.erase(std::unique(family_.begin(), family_.end()), family_.end());
}

CubeFamily WeightPair::cube_family() const {
  CubeFamily f;
  for (const auto& k : family_) f.cubes.push_back(grid_.cube(k));
  std::ostringstream os;
  os << "grid cubes occupied by sigma+omega inside the top cube, levels 0.." << grid_.depth() << ", map "
     << grid_.map().name() << " (" << family_.size() << " cubes)";
  f.descriptor = os.str();
  return f;
}

double poisson_standard(const QuasiCube& q, const DiscreteMeasure& mu, const FracParams& p) {
  require_same_dim(q.dim(), mu.dim());
  return poisson_standard_if(q, mu, p, [](const Point&) { return true; });
}

double poisson_reproducing(const QuasiCube& q, const DiscreteMeasure& mu, const FracParams& p) {
  require_same_dim(q.dim(), mu.dim());
  const double l = q.side();
  const Point c = q.center();
  double s = 0;
  for (const auto& a : mu.atoms()) {
    double r = l + dist(a.x, c);
    s += a.mass * std::pow(l / (r * r), p.n - p.alpha);
  }
  return s;
}

double poisson_m_weighted(const QuasiCube& j, const DiscreteMeasure& mu, const FracParams& p, double m) {
  require_same_dim(j.dim(), mu.dim());
  if (!(m > 0)) throw std::invalid_argument("poisson_m_weighted: m must be positive");
  const double l = j.side();
  const Point c = j.center();
  double s = 0;
  for (const auto& a : mu.atoms()) s += a.mass * std::pow(l, m) / std::pow(l + dist(a.x, c), p.n + m - p.alpha);
  return s;
}

std::string describe(const QuasiCube& q) {
  std::ostringstream os;
  os << "cube[corner=(";
  for (int i = 0; i < q.dim(); ++i) os << (i ? "," : "") << q.base.corner[i];
  os << "),side=" << q.side() << "]";
  return os.str();
}

std::string describe(const CubeIndex& k) {
  std::ostringstream os;
  os << "L" << k.level << "(";
  for (int i = 0; i < kMaxDim; ++i) os << (i ? "," : "") << k.idx[i];
  os << ")";
  return os.str();
}

namespace {

void take(SupResult& r, double v, const std::string& w) {
  if (v > r.value) {
    r.value = v;
    r.witness = w;
  }
}

template <class F>
SupResult sup_over(const CubeFamily& family, F term) {
  SupResult r;
  r.empty_family = family.cubes.empty();
  for (const auto& q : family.cubes) {
    double v = term(q);
    if (v > r.value) {
      r.value = v;
      r.witness = describe(q);
    }
  }
  return r;
}

}  // namespace

SupResult offset_A2(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                    const DyadicGrid& grid, int level_lo, int level_hi) {
  require_same_dim(sigma.dim(), omega.dim());
  GridOccupancy os(grid, sigma), ow(grid, omega);
  SupResult r;
  auto offs = neighbour_offsets(grid.dim());
  level_hi = std::min(level_hi, grid.depth());
  r.empty_family = level_lo > level_hi;
  for (int lvl = std::max(level_lo, 0); lvl <= level_hi; ++lvl) {
    double norm = std::pow(grid.side_at(lvl), 2 * p.codim());
    for (const auto& q : os.occupied(lvl)) {
      double ms = os.mass(q);
      for (const auto& o : offs) {
        CubeIndex qp = q;
        for (int i = 0; i < grid.dim(); ++i) qp.idx[i] += o[i];
        if (!grid.in_top(q) && !grid.in_top(qp)) continue;
        double mw = ow.mass(qp);
        if (mw > 0) take(r, ms * mw / norm, describe(q) + "~" + describe(qp));
      }
    }
  }
  return r;
}

SupResult offset_A2(const WeightPair& w, const FracParams& p) {
  return offset_A2(w.sigma(), w.omega(), p, w.grid(), 0, w.grid().depth());
}

SupResult offset_A2(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                    const std::vector<std::pair<QuasiCube, QuasiCube>>& pairs) {
  SupResult r;
  r.empty_family = pairs.empty();
  for (const auto& [q, qp] : pairs) {
    double norm = std::pow(q.side(), 2 * p.codim());
    take(r, cube_mass(sigma, q) * cube_mass(omega, qp) / norm, describe(q) + "~" + describe(qp));
  }
  return r;
}

double one_tailed_A2_term(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                          const QuasiCube& q) {
  double mw = cube_mass(omega, q);
  if (mw <= 0) return 0.0;
  const double l = q.side();
  const Point c = q.center();
  double tail = 0;
  for (const auto& a : sigma.atoms()) {
    if (q.contains(a.x)) continue;
    double r = l + dist(a.x, c);
    tail += a.mass * std::pow(l / (r * r), p.n - p.alpha);
  }
  return tail * mw / std::pow(l, p.codim());
}

SupResult one_tailed_A2(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                        const CubeFamily& family) {
  return sup_over(family, [&](const QuasiCube& q) { return one_tailed_A2_term(sigma, omega, p, q); });
}

SupResult one_tailed_A2_dual(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                             const CubeFamily& family) {
  return one_tailed_A2(omega, sigma, p, family);
}

double punctured_A2_term(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const CommonPointSet& common,
                         const FracParams& p, const QuasiCube& q) {
  double ms = cube_mass(sigma, q);
  if (ms <= 0) return 0.0;
  return punctured_mass(omega, q, common) * ms / std::pow(q.side(), 2 * p.codim());
}

SupResult punctured_A2(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                       const CubeFamily& family) {
  CommonPointSet common = common_point_masses(sigma, omega);
  return sup_over(family, [&](const QuasiCube& q) { return punctured_A2_term(sigma, omega, common, p, q); });
}

SupResult punctured_A2_dual(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const FracParams& p,
                            const CubeFamily& family) {
  return punctured_A2(omega, sigma, p, family);
}

namespace {

double energy_term(const HaarEnergyTable& proj, const GridOccupancy& other, const DyadicGrid& grid,
                   const FracParams& p, const CubeIndex& q) {
  double m = other.mass(q);
  if (m <= 0) return 0.0;
  double l = grid.side_at(q.level);
  return proj.projection(q) / (l * l) * m / std::pow(l, 2 * p.codim());
}

template <class F>
SupResult sup_over_grid(const WeightPair& w, F term) {
  SupResult r;
  r.empty_family = w.family().empty();
  for (const auto& q : w.family()) take(r, term(q), describe(q));
  return r;
}

}  // namespace

double energy_A2_term(const WeightPair& w, const FracParams& p, const CubeIndex& q) {
  return energy_term(w.energy_omega(), w.occ_sigma(), w.grid(), p, q);
}

double energy_A2_dual_term(const WeightPair& w, const FracParams& p, const CubeIndex& q) {
  return energy_term(w.energy_sigma(), w.occ_omega(), w.grid(), p, q);
}

SupResult energy_A2(const WeightPair& w, const FracParams& p) {
  return sup_over_grid(w, [&](const CubeIndex& q) { return energy_A2_term(w, p, q); });
}

SupResult energy_A2_dual(const WeightPair& w, const FracParams& p) {
  return sup_over_grid(w, [&](const CubeIndex& q) { return energy_A2_dual_term(w, p, q); });
}

SupResult plugged_energy_A2(const WeightPair& w, const FracParams& p) {
  return sup_over_grid(w, [&](const CubeIndex& q) {
    double l = w.grid().side_at(q.level);
    double e = w.energy_omega().projection(q);
    if (e <= 0) return 0.0;
    return e / (l * l) / std::pow(l, p.codim()) * poisson_reproducing(w.grid().cube(q), w.sigma(), p);
  });
}

SupResult plugged_energy_A2_dual(const WeightPair& w, const FracParams& p) {
  return sup_over_grid(w, [&](const CubeIndex& q) {
    double l = w.grid().side_at(q.level);
    double e = w.energy_sigma().projection(q);
    if (e <= 0) return 0.0;
    return e / (l * l) / std::pow(l, p.codim()) * poisson_reproducing(w.grid().cube(q), w.omega(), p);
  });
}

MuckenhouptReport muckenhoupt_report(const WeightPair& w, const FracParams& p) {
  MuckenhouptReport r;
  CubeFamily fam = w.cube_family();
  r.cube_family_descriptor = fam.descriptor;
  r.offset_A2 = offset_A2(w, p).value;
  r.one_tailed_A2 = one_tailed_A2(w.sigma(), w.omega(), p, fam).value;
  r.one_tailed_A2_dual = one_tailed_A2_dual(w.sigma(), w.omega(), p, fam).value;
  r.punct_A2 = punctured_A2(w.sigma(), w.omega(), p, fam).value;
  r.punct_A2_dual = punctured_A2_dual(w.sigma(), w.omega(), p, fam).value;
  r.energy_A2 = energy_A2(w, p).value;
  r.energy_A2_dual = energy_A2_dual(w, p).value;
  r.plugged_energy_A2 = plugged_energy_A2(w, p).value;
  r.plugged_energy_A2_dual = plugged_energy_A2_dual(w, p).value;
  return r;
}

PoissonComparability poisson_comparability_constant(const FracParams& p) {
  // y outside 2K: |y - c_K| >= l_K; |c_J - c_K| <= sqrt(n) l_K / 2
  const double h = std::sqrt(static_cast<double>(p.n)) / 2;
  const double e = p.n + 1 - p.alpha;
  PoissonComparability c{};
  c.upper = h < 1 ? std::pow(2.0 / (1.0 - h), e) : std::numeric_limits<double>::infinity();
  c.lower = std::pow(1.0 / (2.0 + h), e);
  c.one_sided = std::pow(1.0 + h, e);
  return c;
}

}  // namespace tw
