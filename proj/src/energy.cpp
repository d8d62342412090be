#include "twoweight/energy.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace tw {

double energy(const QuasiCube& j, const DiscreteMeasure& omega) {
  MomentSpectrum s = moment_spectrum(j, omega);
  if (s.mass <= 0) return 0.0;
  double l = j.side();
  return std::sqrt(s.M[0] * s.M[0] / (s.mass * l * l));
}

MomentSpectrum moment_spectrum(const DiscreteMeasure& mu) {
  const int n = mu.dim();
  MomentSpectrum s;
  s.center_of_mass = Point::zero(n);
  s.eigenvalues.assign(static_cast<std::size_t>(n), 0.0);
  s.M.assign(static_cast<std::size_t>(n), 0.0);
  for (const auto& a : mu.atoms()) s.mass += a.mass;
  if (s.mass <= 0) return s;
  for (const auto& a : mu.atoms()) s.center_of_mass = s.center_of_mass + (a.mass / s.mass) * a.x;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
  for (const auto& a : mu.atoms()) {
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = a.x[i] - s.center_of_mass[i];
    cov += a.mass * d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
  for (int i = 0; i < n; ++i) s.eigenvalues[static_cast<std::size_t>(i)] = std::max(0.0, es.eigenvalues()(i));
  // M_k^2 = sum of the n-k smallest eigenvalues
  for (int k = 0; k < n; ++k) {
    double t = 0;
    for (int i = 0; i < n - k; ++i) t += s.eigenvalues[static_cast<std::size_t>(i)];
    s.M[static_cast<std::size_t>(k)] = std::sqrt(t);
  }
  return s;
}

MomentSpectrum moment_spectrum(const QuasiCube& j, const DiscreteMeasure& mu) {
  require_same_dim(j.dim(), mu.dim());
  return moment_spectrum(mu.restricted(j));
}

Dispersion is_k_energy_dispersed(const DiscreteMeasure& mu, int k, double c, const CubeFamily& family) {
  if (k < 0 || k >= mu.dim()) throw std::invalid_argument("dispersion: need 0 <= k < n");
  Dispersion d;
  for (const auto& q : family.cubes) {
    MomentSpectrum s = moment_spectrum(q, mu);
    if (s.M[0] <= 0) continue;
    double r = s.M[static_cast<std::size_t>(k)] / s.M[0];
    if (r < d.worst_ratio) {
      d.worst_ratio = r;
      d.witness = describe(q);
    }
  }
  d.ok = d.worst_ratio >= c;
  return d;
}

bool GoodnessCache::good(const CubeIndex& j) const {
  auto it = cache_.find(j);
  if (it != cache_.end()) return it->second;
  bool g = is_good(j, *grid_, deep_);
  cache_.emplace(j, g);
  return g;
}

namespace {

CubeFilter energetic(const WeightPair& w) {
  return [&w](const CubeIndex& j) { return w.occ_omega().count(j) >= 2; };
}

double poisson_term(const WeightPair& w, const FracParams& p, const CubeIndex& j, const std::vector<int>& atoms) {
  const QuasiCube q = w.grid().cube(j);
  const double l = q.side();
  const Point c = q.center();
  double s = 0;
  for (int a : atoms) {
    const Atom& at = w.sigma()[static_cast<std::size_t>(a)];
    s += at.mass * l / std::pow(l + dist(at.x, c), p.n + 1 - p.alpha);
  }
  return s;
}

std::vector<int> sigma_atoms_in(const WeightPair& w, const Cube& outer) {
  std::vector<int> out;
  for (std::size_t a = 0; a < w.sigma().size(); ++a)
    if (outer.contains(w.grid().map().inverse(w.sigma()[a].x))) out.push_back(static_cast<int>(a));
  return out;
}

}  // namespace

DeepSubcubes energetic_deep_subcubes(const WeightPair& w, const CubeIndex& k, const DeepParams& deep) {
  return maximal_deep_subcubes(k, w.grid(), deep, energetic(w));
}

DeepSubcubes energetic_deep_subcubes(const WeightPair& w, const AlternateCube& k, const DeepParams& deep) {
  return maximal_deep_subcubes(k, w.grid(), deep, energetic(w));
}

double candidate_energy(const WeightPair& w, const FracParams& p, const EnergyCandidate& c) {
  std::vector<int> atoms = sigma_atoms_in(w, c.outer);
  double mass = 0;
  for (int a : atoms) mass += w.sigma()[static_cast<std::size_t>(a)].mass;
  if (mass <= 0) return 0.0;
  double s = 0;
  for (const auto& j : c.deep) {
    double e = w.energy_omega().projection(j);
    if (e <= 0) continue;
    double l = w.grid().side_at(j.level);
    double pj = poisson_term(w, p, j, atoms) / l;
    s += pj * pj * e;
  }
  return s / mass;
}

EnergyCandidate partition_candidate(const WeightPair& w, const CubeIndex& outer, const std::vector<CubeIndex>& pieces,
                                    const DeepParams& deep) {
  EnergyCandidate c;
  c.label = "partition of " + describe(outer) + " into " + std::to_string(pieces.size());
  c.outer = w.grid().base_cube(outer);
  for (const auto& piece : pieces) {
    auto d = energetic_deep_subcubes(w, piece, deep);
    c.deep.insert(c.deep.end(), d.cubes.begin(), d.cubes.end());
  }
  return c;
}

namespace {

void random_partition(const WeightPair& w, const CubeIndex& q, std::mt19937_64& rng, std::vector<CubeIndex>& out) {
  std::bernoulli_distribution split(0.5);
  if (q.level < w.grid().depth() && w.occ_omega().count(q) >= 2 && split(rng)) {
    for (const auto& c : w.grid().children(q)) random_partition(w, c, rng, out);
  } else {
    out.push_back(q);
  }
}

std::vector<AlternateCube> occupied_alternates(const WeightPair& w, int level) {
  const int n = w.grid().dim();
  std::set<std::array<std::int64_t, kMaxDim>> corners;
  for (const auto& k : w.occ_sigma().occupied(level)) {
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::array<std::int64_t, kMaxDim> c{};
      for (int i = 0; i < n; ++i) c[i] = k.idx[i] - ((mask >> i) & 1);
      corners.insert(c);
    }
  }
  std::vector<AlternateCube> out;
  for (const auto& c : corners) {
    AlternateCube a;
    a.level = level;
    a.corner = c;
    // keep alternates meeting the top cube
    bool meets = false;
    for (const auto& comp : alternate_components(a, n)) meets = meets || w.grid().in_top(comp);
    if (meets) out.push_back(a);
  }
  return out;
}

// Refinement collection M^l(K) for an alternate K: J deep in pi^l K' for a component K',
// and contained in some deep cube of K.
std::vector<CubeIndex> alternate_refinement(const WeightPair& w, const AlternateCube& a, int ell,
                                            const DeepParams& deep, const std::vector<CubeIndex>& deep_of_a) {
  const auto& grid = w.grid();
  std::set<CubeIndex> out;
  for (const auto& comp : alternate_components(a, grid.dim())) {
    if (comp.level - ell < 0) continue;
    CubeIndex anc = grid.ancestor(comp, comp.level - ell);
    auto d = energetic_deep_subcubes(w, anc, deep);
    for (const auto& j : d.cubes) {
      for (const auto& l : deep_of_a) {
        if (grid.contains(l, j)) {
          out.insert(j);
          break;
        }
      }
    }
  }
  return {out.begin(), out.end()};
}

std::string alternate_label(const AlternateCube& a, int ell) {
  std::ostringstream os;
  os << "alternate L" << a.level << "(" << a.corner[0] << "," << a.corner[1] << "," << a.corner[2] << ") refinement "
     << ell;
  return os.str();
}

}  // namespace

StrongEnergy strong_energy_constant(const WeightPair& w, const FracParams& p, const GoodnessParams& g,
                                    const StrongEnergyOptions& opt, const std::vector<EnergyCandidate>& extra) {
  StrongEnergy r;
  const DeepParams deep = g.deep();
  auto consider = [&](const EnergyCandidate& c) {
    double v = candidate_energy(w, p, c);
    ++r.candidates;
    if (v > r.value) {
      r.value = v;
      r.witness = c.label;
    }
  };
  for (const auto& q : w.family()) {
    if (w.occ_sigma().mass(q) <= 0) continue;
    EnergyCandidate trivial = partition_candidate(w, q, {q}, deep);
    trivial.label = "trivial " + describe(q);
    consider(trivial);
    for (int b = 0; b < opt.partition_budget; ++b) {
      std::seed_seq seq{opt.seed, static_cast<std::uint64_t>(CubeIndexHash{}(q)), static_cast<std::uint64_t>(b)};
      std::mt19937_64 rng(seq);
      std::vector<CubeIndex> pieces;
      random_partition(w, q, rng, pieces);
      consider(partition_candidate(w, q, pieces, deep));
    }
  }
  if (opt.alternates) {
    for (int level = 0; level <= w.grid().depth(); ++level) {
      for (const auto& a : occupied_alternates(w, level)) {
        auto deep_a = energetic_deep_subcubes(w, a, deep).cubes;
        if (deep_a.empty()) continue;
        for (int ell = 0; ell <= g.tau; ++ell) {
          EnergyCandidate c;
          c.label = alternate_label(a, ell);
          c.outer = w.grid().base_cube(a);
          c.deep = alternate_refinement(w, a, ell, deep, deep_a);
          if (!c.deep.empty()) consider(c);
        }
      }
    }
  }
  for (const auto& c : extra) consider(c);
  std::ostringstream os;
  os << "trivial + " << opt.partition_budget << " random partitions per occupied grid cube"
     << (opt.alternates ? ", alternates with refinements 0.." + std::to_string(g.tau) : "") << ", " << extra.size()
     << " extra partitions; " << r.candidates << " candidates";
  r.family_descriptor = os.str();
  return r;
}

StrongEnergy strong_energy_constant_dual(const DyadicGrid& grid, const DiscreteMeasure& sigma,
                                         const DiscreteMeasure& omega, const FracParams& p, const GoodnessParams& g,
                                         const StrongEnergyOptions& opt) {
  WeightPair swapped(grid, omega, sigma);
  return strong_energy_constant(swapped, p, g, opt);
}

double stopping_sum(const WeightPair& w, const FracParams& p, const GoodnessCache& good, double gamma,
                    const CubeIndex& s, const CubeIndex& i) {
  const auto* cell = w.occ_sigma().find(s);
  if (!cell) return 0.0;
  const auto& grid = w.grid();
  auto deep = energetic_deep_subcubes(w, i, good.deep());
  CubeFilter keep = [&good](const CubeIndex& j) { return good.good(j); };
  double total = 0;
  for (const auto& j : deep.cubes) {
    double e = w.energy_omega().projection(j, keep);
    if (e <= 0) continue;
    Cube hole = grid.base_cube(j).dilated(gamma);
    QuasiCube qj = grid.cube(j);
    const double l = qj.side();
    const Point c = qj.center();
    double pj = 0;
    for (int a : cell->atoms) {
      const Atom& at = w.sigma()[static_cast<std::size_t>(a)];
      if (hole.contains(grid.map().inverse(at.x))) continue;
      pj += at.mass * l / std::pow(l + dist(at.x, c), p.n + 1 - p.alpha);
    }
    pj /= l;
    total += pj * pj * e;
  }
  return total;
}

StoppingEnergy stopping_energy(const std::vector<CubeIndex>& corona, const CubeIndex& s, const WeightPair& w,
                               const FracParams& p, const GoodnessCache& good, double gamma) {
  StoppingEnergy r;
  for (const auto& i : corona) {
    double m = w.occ_sigma().mass(i);
    if (m <= 0) continue;
    double v = stopping_sum(w, p, good, gamma, s, i) / m;
    if (v > r.value_sq) {
      r.value_sq = v;
      r.witness = describe(i);
    }
  }
  return r;
}

}  // namespace tw
