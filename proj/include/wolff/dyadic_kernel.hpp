#pragma once

// Dyadic kernels K(Q) and the bar-kernel
//   Kbar(Q)(x) = (1/sigma(Q)) sum_{Q' subset Q} K(Q') sigma(Q') chi_{Q'}(x)
// realized through root-prefix sums along the window tree.

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wolff/errors.hpp"
#include "wolff/extended.hpp"
#include "wolff/lattice.hpp"
#include "wolff/measures.hpp"
#include "wolff/radial_kernel.hpp"

namespace wolff {

class DyadicKernelMap {
 public:
  // K(Q) = k(scale * r_Q).
  static DyadicKernelMap radial(RadialKernel k, double scale = 1.0) {
    if (!(scale > 0.0)) throw InvalidArgument("kernel scale must be positive");
    DyadicKernelMap m;
    m.radial_ = std::move(k);
    m.scale_ = scale;
    m.dim_ = m.radial_->dimension();
    return m;
  }

  // Explicit values keyed by (level, index...); cubes not listed get 0.
  static DyadicKernelMap table(int dimension, std::map<std::vector<Index>, double> values) {
    if (dimension < 1) throw InvalidArgument("table dimension must be >= 1");
    for (const auto& [key, v] : values) {
      if (static_cast<int>(key.size()) != dimension + 1) {
        throw DimensionMismatch("kernel table key needs level plus " + std::to_string(dimension) +
                                " index components");
      }
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InvalidArgument("kernel table values must be finite and >= 0");
      }
    }
    DyadicKernelMap m;
    m.dim_ = dimension;
    m.table_ = std::move(values);
    return m;
  }

  // CSV rows "level,index_1,...,index_n,value"; blank lines and lines
  // starting with '#' are skipped, as is a header row starting with "level".
  static DyadicKernelMap from_csv(const std::string& path, int dimension) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open kernel table " + path);
    std::map<std::vector<Index>, double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#' || line.rfind("level", 0) == 0) continue;
      std::stringstream ss(line);
      std::string cell;
      std::vector<std::string> cells;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (static_cast<int>(cells.size()) != dimension + 2) {
        throw InvalidArgument(path + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(dimension + 2) + " columns");
      }
      std::vector<Index> key;
      try {
        for (int i = 0; i <= dimension; ++i) key.push_back(std::stoll(cells[i]));
        values[key] = std::stod(cells.back());
      } catch (const std::logic_error&) {
        throw InvalidArgument(path + ":" + std::to_string(line_no) + ": malformed number");
      }
    }
    return table(dimension, std::move(values));
  }

  int dimension() const { return dim_; }
  bool is_radial() const { return radial_.has_value(); }
  const RadialKernel* radial_kernel() const { return radial_ ? &*radial_ : nullptr; }
  double scale() const { return scale_; }

  double operator()(const DyadicCube& q) const {
    require_dimension(dim_, q.dimension(), "kernel cube");
    if (radial_) return (*radial_)(scale_ * q.side());
    std::vector<Index> key;
    key.reserve(q.index.size() + 1);
    key.push_back(q.level);
    key.insert(key.end(), q.index.begin(), q.index.end());
    auto it = table_.find(key);
    return it == table_.end() ? 0.0 : it->second;
  }

  // K over every window cube, indexed by id.
  std::vector<double> on(const LatticeWindow& w) const {
    require_dimension(dim_, w.dimension(), "kernel window");
    std::vector<double> out(w.cube_count());
    if (radial_) {
      for (int l = w.coarse_level(); l <= w.fine_level(); ++l) {
        const double v = (*radial_)(scale_ * std::ldexp(1.0, -l));
        std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(w.level_offset(l)), w.level_size(l),
                    v);
      }
    } else {
      for (std::size_t id = 0; id < out.size(); ++id) out[id] = (*this)(w.cube(id));
    }
    return out;
  }

 private:
  DyadicKernelMap() = default;

  int dim_ = 0;
  std::optional<RadialKernel> radial_;
  double scale_ = 1.0;
  std::map<std::vector<Index>, double> table_;
};

// Parent id per cube (roots map to themselves); saves repeated id decoding.
inline std::vector<std::size_t> parent_table(const LatticeWindow& w) {
  std::vector<std::size_t> parent(w.cube_count());
  const std::size_t roots = w.root_count();
  for (std::size_t id = 0; id < roots; ++id) parent[id] = id;
  for (std::size_t id = roots; id < parent.size(); ++id) parent[id] = w.parent_id(id);
  return parent;
}

class BarField {
 public:
  BarField(LatticeWindow window, std::vector<double> kernel, std::vector<double> sigma)
      : window_(std::move(window)), kernel_(std::move(kernel)), sigma_(std::move(sigma)) {
    const std::size_t n = window_.cube_count();
    if (kernel_.size() != n || sigma_.size() != n) {
      throw InvalidArgument("bar field needs one kernel value and one mass per cube");
    }
    parent_ = parent_table(window_);
    prefix_.resize(n);
    above_.resize(n);
    for (std::size_t id = 0; id < n; ++id) {
      if (id >= window_.root_count()) above_[id] = prefix_[parent_[id]];
      prefix_[id] = above_[id];
      prefix_[id] += mul0(kernel_[id], sigma_[id]);
    }
  }

  const LatticeWindow& window() const { return window_; }
  const std::vector<double>& kernel() const { return kernel_; }
  const std::vector<double>& sigma() const { return sigma_; }
  const std::vector<std::size_t>& parents() const { return parent_; }

  // P(Q) and P(parent(Q)) (zero for roots).
  const Compensated& prefix(std::size_t id) const { return prefix_[id]; }
  const Compensated& above(std::size_t id) const { return above_[id]; }

  // sigma(Q) Kbar(Q)(x) for x in `leaf`; `leaf` must lie below `cube`.
  double weighted(std::size_t cube, std::size_t leaf) const {
    return difference(prefix_[leaf], above_[cube]);
  }

  double value(std::size_t cube, std::size_t leaf) const {
    if (sigma_[cube] == 0.0) return 0.0;
    return weighted(cube, leaf) / sigma_[cube];
  }

  // Kbar(Q)(x); zero when x is not in Q.
  double value(const DyadicCube& q, PointView x) const {
    const std::size_t id = window_.id_of(q);
    if (!window_.contains(q, x)) return 0.0;
    return value(id, *window_.leaf_id(x));
  }

 private:
  LatticeWindow window_;
  std::vector<double> kernel_;
  std::vector<double> sigma_;
  std::vector<std::size_t> parent_;
  std::vector<Compensated> prefix_;
  std::vector<Compensated> above_;
};

inline BarField bar_field(const DyadicKernelMap& k, const AtomicMeasure& sigma,
                          const LatticeWindow& w) {
  return BarField(w, k.on(w), window_masses(sigma, w));
}

// Brute-force double sum over all Q' subset Q containing x, with cube
// masses found by scanning every atom. Test oracle.
class NaiveBarField {
 public:
  NaiveBarField(const DyadicKernelMap& k, const AtomicMeasure& sigma, const LatticeWindow& w)
      : k_(k), sigma_(sigma), window_(w) {}

  double value(const DyadicCube& q, PointView x) const {
    if (!window_.contains_cube(q)) throw RangeError("cube is not part of the window");
    if (!window_.contains(q, x)) return 0.0;
    const double sq = cube_mass(sigma_, q, window_.shift());
    if (sq == 0.0) return 0.0;
    double s = 0.0;
    for (int l = q.level; l <= window_.fine_level(); ++l) {
      const DyadicCube c = window_.cube_at(x, l);
      s += mul0(k_(c), cube_mass(sigma_, c, window_.shift()));
    }
    return s / sq;
  }

 private:
  DyadicKernelMap k_;
  AtomicMeasure sigma_;
  LatticeWindow window_;
};

// DLBO constant: max over cubes with sigma(Q) > 0 of
// sup_{x in Q} Kbar(Q)(x) / inf_{x in Q} Kbar(Q)(x).
// Kbar(Q) is constant on finest cells, so sup and inf run over the leaves
// below Q; P(leaf) determines the value.
inline double dlbo_constant(const BarField& f) {
  const auto& w = f.window();
  const std::size_t n = w.cube_count();
  std::vector<std::size_t> lo(n), hi(n);
  const std::size_t first_leaf = w.level_offset(w.fine_level());
  auto less = [&](std::size_t a, std::size_t b) {
    const Compensated& pa = f.prefix(a);
    const Compensated& pb = f.prefix(b);
    return difference(pa, pb) < 0.0;
  };
  for (std::size_t id = 0; id < n; ++id) lo[id] = hi[id] = (id >= first_leaf) ? id : n;
  for (std::size_t id = n; id-- > w.root_count();) {
    const std::size_t p = f.parents()[id];
    if (lo[p] == n || less(lo[id], lo[p])) lo[p] = lo[id];
    if (hi[p] == n || less(hi[p], hi[id])) hi[p] = hi[id];
  }
  double worst = 0.0;
  bool any = false;
  for (std::size_t id = 0; id < n; ++id) {
    if (f.sigma()[id] <= 0.0) continue;
    any = true;
    const double top = f.weighted(id, hi[id]);
    const double bottom = f.weighted(id, lo[id]);
    if (top == bottom) {
      worst = std::max(worst, 1.0);
    } else if (bottom <= 0.0) {
      return kInf;
    } else {
      worst = std::max(worst, top / bottom);
    }
  }
  if (!any) throw DegenerateInputError("every window cube has zero sigma mass");
  return worst;
}

inline double dlbo_constant(const DyadicKernelMap& k, const AtomicMeasure& sigma,
                            const LatticeWindow& w) {
  return dlbo_constant(bar_field(k, sigma, w));
}

}  // namespace wolff
