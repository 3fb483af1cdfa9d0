#pragma once

// Seeded random dyadic instances: atoms uniform in the root region, weights
// log-uniform in [2^-8, 2^8], n in {1, 2}, depth <= 8, at most 200 atoms per
// measure. The kernel is either Riesz with random alpha or a random table.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wolff/dyadic_kernel.hpp"
#include "wolff/lattice.hpp"
#include "wolff/measures.hpp"
#include "wolff/random.hpp"

namespace wolff {

struct InstanceLimits {
  int max_dimension = 2;
  int max_depth = 8;
  int max_atoms = 200;
  bool allow_table = true;
  bool allow_multi_root = true;
};

struct RandomInstance {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  LatticeWindow window;
  AtomicMeasure sigma;
  AtomicMeasure mu;
  DyadicKernelMap kernel;
  std::string description;
};

inline AtomicMeasure random_measure(Rng& rng, const LatticeWindow& w, int atoms) {
  AtomicMeasure m(w.dimension());
  const auto lo = w.root_box_lo();
  const auto hi = w.root_box_hi();
  std::vector<double> x(lo.size());
  for (int a = 0; a < atoms; ++a) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = rng.uniform(lo[i], hi[i]);
      if (x[i] >= hi[i]) x[i] = lo[i];
    }
    m.add(x, rng.log_uniform2(-8.0, 8.0));
  }
  return m;
}

// Log-uniform values in [2^-8, 2^8] on every window cube.
inline DyadicKernelMap random_kernel_table(Rng& rng, const LatticeWindow& w) {
  std::map<std::vector<Index>, double> values;
  for (std::size_t id = 0; id < w.cube_count(); ++id) {
    const DyadicCube q = w.cube(id);
    std::vector<Index> key{q.level};
    key.insert(key.end(), q.index.begin(), q.index.end());
    values[key] = rng.log_uniform2(-8.0, 8.0);
  }
  return DyadicKernelMap::table(w.dimension(), std::move(values));
}

inline RandomInstance random_instance(std::uint64_t seed, std::uint64_t trial,
                                      const InstanceLimits& lim = {}) {
  Rng rng = Rng::stream(seed, trial);
  const int n = rng.integer(1, lim.max_dimension);
  // Keep the leaf count moderate in two dimensions.
  const int depth_cap = n == 1 ? lim.max_depth : std::min(lim.max_depth, 6);
  const int depth = rng.integer(1, depth_cap);
  std::vector<double> lo(n, 0.0), hi(n, 1.0);
  if (lim.allow_multi_root) {
    for (int i = 0; i < n; ++i) hi[i] = rng.integer(1, 2);
  }
  LatticeWindow w = LatticeWindow::from_box(0, depth, lo, hi, std::vector<double>(n, 0.0));
  AtomicMeasure sigma = random_measure(rng, w, rng.integer(1, lim.max_atoms));
  AtomicMeasure mu = random_measure(rng, w, rng.integer(1, lim.max_atoms));
  std::string desc = "n=" + std::to_string(n) + " depth=" + std::to_string(depth) +
                     " sigma_atoms=" + std::to_string(sigma.size()) +
                     " mu_atoms=" + std::to_string(mu.size());
  const bool table = lim.allow_table && rng.uniform() < 0.5;
  if (table) {
    DyadicKernelMap k = random_kernel_table(rng, w);
    desc += " kernel=table";
    return {seed, trial, std::move(w), std::move(sigma), std::move(mu), std::move(k), desc};
  }
  const double alpha = rng.uniform(0.1, n - 0.1);
  desc += " kernel=riesz(alpha=" + std::to_string(alpha) + ")";
  DyadicKernelMap k = DyadicKernelMap::radial(RadialKernel::riesz(alpha, n));
  return {seed, trial, std::move(w), std::move(sigma), std::move(mu), std::move(k), desc};
}

}  // namespace wolff
