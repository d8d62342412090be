// Recomputes the frozen calibration constants: corpus maximum times 2.
#include <algorithm>
#include <cstdio>
#include <cstdlib>

#include "twoweight/cli.hpp"

using namespace tw;

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20240611;
  for (auto [n, k] : {std::pair{2, 1}, {3, 1}, {3, 2}}) {
    double worst = 0;
    for (const auto& in : cli::reversal_corpus(n, k, "isotropic-dispersed", 400, seed)) {
      auto r = energy_reversal_check(QuasiCube{Cube{Point::zero(n), 1.0}, BiLipschitzMap::identity(n)}, in.mu,
                                     in.omega, FracParams(n, in.alpha), 8.0);
      worst = std::max(worst, r.ratio);
    }
    std::printf("reversal n=%d k=%d: corpus max %.6g, frozen %.6g\n", n, k, worst, 2 * worst);
  }
  for (int n = 1; n <= 3; ++n) {
    double worst = 0;
    auto corpus = cli::necessity_corpus(n, 200, seed);
    std::vector<double> r(corpus.size());
    cli::parallel_for(corpus.size(), [&](std::size_t i) { r[i] = cli::necessity_ratio(corpus[i], n == 3 ? 3 : 5); });
    for (double x : r) worst = std::max(worst, x);
    std::printf("necessity n=%d: corpus max %.6g, frozen %.6g\n", n, worst, 2 * worst);
  }
}
