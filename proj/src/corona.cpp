#include "twoweight/corona.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace tw {

namespace {

double abs_average(std::span<const double> f, const CubeIndex& q, const GridOccupancy& occ) {
  const auto* cell = occ.find(q);
  if (!cell || cell->mass <= 0) return 0.0;
  double s = 0;
  for (int a : cell->atoms) s += std::abs(f[static_cast<std::size_t>(a)]) * occ.measure()[static_cast<std::size_t>(a)].mass;
  return s / cell->mass;
}

bool level_sorted_before(const CubeIndex& a, const CubeIndex& b) {
  if (a.level != b.level) return a.level < b.level;
  return a < b;
}

void check_size(std::span<const double> f, const GridOccupancy& occ) {
  if (f.size() != occ.measure().size()) throw std::invalid_argument("function size does not match measure");
}

}  // namespace

StoppingForest::StoppingForest(std::vector<CubeIndex> cubes, std::vector<double> alpha, const DyadicGrid& grid)
    : cubes_(std::move(cubes)), alpha_(std::move(alpha)), grid_(&grid) {
  if (cubes_.size() != alpha_.size()) throw std::invalid_argument("forest: cubes and alpha differ in length");
  std::vector<std::size_t> order(cubes_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return level_sorted_before(cubes_[a], cubes_[b]); });
  std::vector<CubeIndex> c;
  std::vector<double> al;
  for (auto i : order) {
    if (index_.count(cubes_[i])) throw std::invalid_argument("forest: duplicate cube " + describe(cubes_[i]));
    index_[cubes_[i]] = static_cast<int>(c.size());
    c.push_back(cubes_[i]);
    al.push_back(alpha_[i]);
  }
  cubes_ = std::move(c);
  alpha_ = std::move(al);
  parent_.assign(cubes_.size(), -1);
  for (std::size_t i = 0; i < cubes_.size(); ++i) {
    const auto& k = cubes_[i];
    for (int l = k.level - 1; l >= 0; --l) {
      auto it = index_.find(grid.ancestor(k, l));
      if (it != index_.end()) {
        parent_[i] = it->second;
        break;
      }
    }
  }
}

int StoppingForest::find(const CubeIndex& f) const {
  auto it = index_.find(f);
  return it == index_.end() ? -1 : it->second;
}

double StoppingForest::alpha_of(const CubeIndex& f) const {
  int i = find(f);
  if (i < 0) throw std::out_of_range("not a stopping cube: " + describe(f));
  return alpha_[static_cast<std::size_t>(i)];
}

int StoppingForest::owner(const CubeIndex& i) const {
  if (!grid_) return -1;
  for (int l = i.level; l >= 0; --l) {
    auto it = index_.find(l == i.level ? i : grid_->ancestor(i, l));
    if (it != index_.end()) return it->second;
  }
  return -1;
}

std::vector<CubeIndex> StoppingForest::corona(std::size_t f, const GridOccupancy& occ) const {
  std::vector<CubeIndex> out;
  const auto& root = cubes_.at(f);
  std::deque<CubeIndex> q{root};
  while (!q.empty()) {
    auto k = q.front();
    q.pop_front();
    if (occ.mass(k) <= 0) continue;
    if (!(k == root) && index_.count(k)) continue;
    out.push_back(k);
    if (k.level < occ.grid().depth())
      for (const auto& c : occ.grid().children(k)) q.push_back(c);
  }
  return out;
}

StoppingForest cz_stopping(std::span<const double> f, const GridOccupancy& sigma, double C, const CubeIndex& top) {
  check_size(f, sigma);
  if (!(C > 1.0)) throw std::invalid_argument("cz_stopping: C must exceed 1");
  if (sigma.mass(top) <= 0) throw std::invalid_argument("cz_stopping: top cube has no sigma mass");
  const auto& grid = sigma.grid();
  std::vector<CubeIndex> cubes{top};
  std::vector<double> alpha{C * abs_average(f, top, sigma)};
  std::deque<std::size_t> pending{0};
  while (!pending.empty()) {
    std::size_t fi = pending.front();
    pending.pop_front();
    const CubeIndex root = cubes[fi];
    const double avg = abs_average(f, root, sigma);
    std::deque<CubeIndex> q;
    if (root.level < grid.depth())
      for (const auto& c : grid.children(root)) q.push_back(c);
    while (!q.empty()) {
      auto k = q.front();
      q.pop_front();
      if (sigma.mass(k) <= 0) continue;
      double a = abs_average(f, k, sigma);
      if (a > C * avg) {
        cubes.push_back(k);
        alpha.push_back(C * a);
        pending.push_back(cubes.size() - 1);
      } else if (k.level < grid.depth()) {
        for (const auto& c : grid.children(k)) q.push_back(c);
      }
    }
  }
  return StoppingForest(std::move(cubes), std::move(alpha), grid);
}

double cz_stopping_C0(double C) {
  const double A = C / (C - 1.0);
  return std::max({4.0, A, 2.0 * C * std::sqrt(A)});
}

double StoppingValidation::measured_C0() const {
  return std::max({4.0, worst_carleson, std::sqrt(quasi_ratio)});
}

double quasi_orthogonality_check(const StoppingForest& forest, std::span<const double> f, const GridOccupancy& sigma) {
  check_size(f, sigma);
  const auto& mu = sigma.measure();
  double fn = 0;
  for (std::size_t a = 0; a < mu.size(); ++a) fn += f[a] * f[a] * mu[a].mass;
  std::vector<double> g(mu.size(), 0.0);
  for (std::size_t i = 0; i < forest.size(); ++i) {
    const auto* cell = sigma.find(forest.cubes()[i]);
    if (!cell) continue;
    for (int a : cell->atoms) g[static_cast<std::size_t>(a)] += forest.alpha()[i];
  }
  double gn = 0;
  for (std::size_t a = 0; a < mu.size(); ++a) gn += g[a] * g[a] * mu[a].mass;
  if (fn <= 0) return gn > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  return gn / fn;
}

StoppingValidation validate_stopping_data(const StoppingForest& forest, std::span<const double> f,
                                          const GridOccupancy& sigma, double C0) {
  check_size(f, sigma);
  StoppingValidation v;
  const double tol = 1e-12;
  for (std::size_t i = 0; i < forest.size(); ++i) {
    const double a = forest.alpha()[i];
    for (const auto& k : forest.corona(i, sigma)) {
      double avg = abs_average(f, k, sigma);
      if (avg > a * (1 + tol) + tol && v.corona_average) {
        v.corona_average = false;
        std::ostringstream os;
        os << "E_I|f| = " << avg << " > alpha = " << a << " at " << describe(k);
        v.witness_average = os.str();
      }
    }
    const auto& fi = forest.cubes()[i];
    double total = 0;
    for (std::size_t j = 0; j < forest.size(); ++j)
      if (sigma.grid().contains(fi, forest.cubes()[j])) total += sigma.mass(forest.cubes()[j]);
    double m = sigma.mass(fi);
    double ratio = m > 0 ? total / m : 0.0;
    if (ratio > v.worst_carleson) {
      v.worst_carleson = ratio;
      if (ratio > C0 * (1 + tol)) {
        v.carleson = false;
        v.witness_carleson = "Carleson ratio " + std::to_string(ratio) + " at " + describe(fi);
      }
    }
    int par = forest.parent()[i];
    if (par >= 0 && forest.alpha()[static_cast<std::size_t>(par)] > a * (1 + tol) + tol && v.monotone) {
      v.monotone = false;
      v.witness_monotone = "alpha decreases from " + describe(forest.cubes()[static_cast<std::size_t>(par)]) +
                           " to " + describe(fi);
    }
  }
  const auto& mu = sigma.measure();
  double fn = 0;
  for (std::size_t a = 0; a < mu.size(); ++a) fn += f[a] * f[a] * mu[a].mass;
  double s = 0;
  for (std::size_t i = 0; i < forest.size(); ++i) s += forest.alpha()[i] * forest.alpha()[i] * sigma.mass(forest.cubes()[i]);
  v.quasi_ratio = fn > 0 ? s / fn : (s > 0 ? std::numeric_limits<double>::infinity() : 0.0);
  v.quasi_orthogonal = v.quasi_ratio <= C0 * C0 * (1 + tol);
  return v;
}

Values corona_projection(const StoppingForest& forest, std::size_t f_index, std::span<const double> f,
                         const GridOccupancy& sigma) {
  check_size(f, sigma);
  Values out(f.size(), 0.0);
  for (const auto& k : forest.corona(f_index, sigma)) {
    if (sigma.count(k) < 2) continue;
    auto d = delta_projection(f, k, sigma);
    for (std::size_t a = 0; a < out.size(); ++a) out[a] += d[a];
  }
  return out;
}

double corona_reconstruction_residual(const StoppingForest& forest, std::span<const double> f,
                                      const GridOccupancy& sigma) {
  check_size(f, sigma);
  if (forest.size() == 0) return 0.0;
  const auto& top = forest.cubes().front();
  const auto* cell = sigma.find(top);
  if (!cell) return 0.0;
  Values g(f.size(), 0.0);
  for (std::size_t i = 0; i < forest.size(); ++i) {
    auto p = corona_projection(forest, i, f, sigma);
    for (std::size_t a = 0; a < g.size(); ++a) g[a] += p[a];
  }
  // atoms sharing a finest cell cannot be separated by Haar differences
  const int depth = sigma.grid().depth();
  double e = average(f, top, sigma);
  double worst = 0;
  for (int a : cell->atoms) {
    auto ua = static_cast<std::size_t>(a);
    double fine = average(f, sigma.atom_cell(ua, depth), sigma);
    worst = std::max(worst, std::abs(fine - e - g[ua]));
  }
  return worst;
}

StoppingForest iterate_coronas(const StoppingForest& forest, const std::vector<StoppingForest>& inner,
                               const DyadicGrid& grid) {
  if (inner.size() != forest.size()) throw std::invalid_argument("iterate_coronas: one inner forest per cube");
  std::vector<CubeIndex> cubes;
  std::vector<double> alpha;
  for (std::size_t i = 0; i < forest.size(); ++i) {
    const auto& F = forest.cubes()[i];
    const double aF = forest.alpha()[i];
    const auto& K = inner[i];
    if (K.size() == 0 || !(K.cubes().front() == F))
      throw std::invalid_argument("iterate_coronas: inner forest not rooted at " + describe(F));
    cubes.push_back(F);
    alpha.push_back(std::max(aF, K.alpha().front()));
    for (std::size_t j = 1; j < K.size(); ++j) {
      const auto& k = K.cubes()[j];
      if (forest.owner(k) != static_cast<int>(i)) continue;
      if (K.alpha()[j] < aF) continue;
      cubes.push_back(k);
      alpha.push_back(K.alpha()[j]);
    }
  }
  return StoppingForest(std::move(cubes), std::move(alpha), grid);
}

EnergyStopping energy_stopping(const CubeIndex& s0, const WeightPair& w, const FracParams& p,
                               const GoodnessCache& good, double gamma, double c_energy, double e_hat_sq, double a2,
                               double a2_punct) {
  EnergyStopping st;
  st.threshold = c_energy * (e_hat_sq + a2 + a2_punct);
  const auto& grid = w.grid();
  const auto& occ = w.occ_sigma();
  if (occ.mass(s0) <= 0) throw std::invalid_argument("energy_stopping: S0 has no sigma mass");
  st.cubes.push_back(s0);
  st.parent.push_back(-1);
  for (std::size_t si = 0; si < st.cubes.size(); ++si) {
    const CubeIndex s = st.cubes[si];
    std::deque<CubeIndex> q;
    if (s.level < grid.depth())
      for (const auto& c : grid.children(s)) q.push_back(c);
    while (!q.empty()) {
      auto i = q.front();
      q.pop_front();
      double m = occ.mass(i);
      if (m <= 0) continue;
      double sum = stopping_sum(w, p, good, gamma, s, i);
      if (sum > 0 && sum >= st.threshold * m) {
        st.cubes.push_back(i);
        st.parent.push_back(static_cast<int>(si));
      } else if (i.level < grid.depth()) {
        for (const auto& c : grid.children(i)) q.push_back(c);
      }
    }
  }
  return st;
}

std::vector<CubeIndex> stopping_partition(const EnergyStopping& st, std::size_t s_index, const DyadicGrid& grid) {
  std::vector<CubeIndex> kids;
  for (std::size_t i = 0; i < st.cubes.size(); ++i)
    if (st.parent[i] == static_cast<int>(s_index)) kids.push_back(st.cubes[i]);
  std::vector<CubeIndex> out;
  std::deque<CubeIndex> q{st.cubes.at(s_index)};
  while (!q.empty()) {
    auto x = q.front();
    q.pop_front();
    bool is_kid = std::find(kids.begin(), kids.end(), x) != kids.end();
    bool has_kid = std::any_of(kids.begin(), kids.end(), [&](const CubeIndex& k) { return grid.contains(x, k); });
    if (is_kid || !has_kid || x.level >= grid.depth()) {
      out.push_back(x);
    } else {
      for (const auto& c : grid.children(x)) q.push_back(c);
    }
  }
  return out;
}

CertifiedEnergyStopping certified_energy_stopping(const CubeIndex& s0, const WeightPair& w, const FracParams& p,
                                                  const GoodnessParams& g, double c_energy, double a2, double a2_punct,
                                                  const StrongEnergyOptions& opt, int max_rounds) {
  if (!(c_energy >= 2.0)) throw std::invalid_argument("certified_energy_stopping: C_energy must be at least 2");
  CertifiedEnergyStopping out;
  GoodnessCache good(w.grid(), g.deep());
  for (out.rounds = 1; out.rounds <= max_rounds; ++out.rounds) {
    out.e_hat = strong_energy_constant(w, p, g, opt, out.extra);
    out.stopping = energy_stopping(s0, w, p, good, g.gamma, c_energy, out.e_hat.value, a2, a2_punct);
    bool grew = false;
    for (std::size_t si = 0; si < out.stopping.cubes.size(); ++si) {
      auto pieces = stopping_partition(out.stopping, si, w.grid());
      if (pieces.size() <= 1) continue;
      auto c = partition_candidate(w, out.stopping.cubes[si], pieces, g.deep());
      c.label = "stopping partition of " + describe(out.stopping.cubes[si]);
      double v = candidate_energy(w, p, c);
      if (v > out.e_hat.value * (1 + 1e-12)) {
        out.extra.push_back(std::move(c));
        grew = true;
      }
    }
    if (!grew) {
      out.converged = true;
      return out;
    }
  }
  out.rounds = max_rounds;
  return out;
}

double carleson_check(const std::vector<CubeIndex>& collection, const GridOccupancy& sigma) {
  double worst = 0;
  const auto& grid = sigma.grid();
  for (const auto& i : sigma.occupied_in_top()) {
    double m = sigma.mass(i);
    if (m <= 0) continue;
    double s = 0;
    for (const auto& k : collection)
      if (grid.contains(i, k)) s += sigma.mass(k);
    worst = std::max(worst, s / m);
  }
  return worst;
}

}  // namespace tw
