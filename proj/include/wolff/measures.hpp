#pragma once

// Finite atomic measures standing in for sigma, mu and nu.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "wolff/errors.hpp"
#include "wolff/extended.hpp"
#include "wolff/lattice.hpp"

namespace wolff {

class AtomicMeasure {
 public:
  explicit AtomicMeasure(int dimension) : dim_(dimension) {
    if (dim_ < 1) throw InvalidArgument("measure dimension must be >= 1");
  }

  void add(PointView position, double weight) {
    require_dimension(dim_, static_cast<int>(position.size()), "atom position");
    if (!(weight >= 0.0) || !std::isfinite(weight)) {
      throw InvalidArgument("atom weight must be finite and nonnegative");
    }
    for (double c : position) {
      if (!std::isfinite(c)) throw InvalidArgument("atom position must be finite");
    }
    coords_.insert(coords_.end(), position.begin(), position.end());
    weights_.push_back(weight);
  }
  void add(std::initializer_list<double> position, double weight) {
    add(PointView(position.begin(), position.size()), weight);
  }

  int dimension() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }
  PointView position(std::size_t i) const {
    return PointView(coords_.data() + i * static_cast<std::size_t>(dim_),
                     static_cast<std::size_t>(dim_));
  }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }

  double total_mass() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
  }

  AtomicMeasure scaled(double c) const {
    if (!(c >= 0.0)) throw InvalidArgument("scale factor must be nonnegative");
    AtomicMeasure out = *this;
    for (double& w : out.weights_) w *= c;
    return out;
  }

  // f dm for a density f sampled on the atoms: weights w_i f_i.
  AtomicMeasure reweighted(std::span<const double> density) const {
    if (density.size() != size()) throw InvalidArgument("density needs one value per atom");
    AtomicMeasure out(dim_);
    for (std::size_t i = 0; i < size(); ++i) out.add(position(i), mul0(weights_[i], density[i]));
    return out;
  }

  friend AtomicMeasure operator+(const AtomicMeasure& a, const AtomicMeasure& b) {
    require_dimension(a.dim_, b.dim_, "measure sum");
    AtomicMeasure out = a;
    out.coords_.insert(out.coords_.end(), b.coords_.begin(), b.coords_.end());
    out.weights_.insert(out.weights_.end(), b.weights_.begin(), b.weights_.end());
    return out;
  }

 private:
  int dim_;
  std::vector<double> coords_;
  std::vector<double> weights_;
};

// Mass of the half-open cube in the lattice with the given shift.
inline double cube_mass(const AtomicMeasure& m, const DyadicCube& q,
                        const std::vector<double>& shift) {
  require_dimension(m.dimension(), q.dimension(), "cube_mass");
  require_dimension(m.dimension(), static_cast<int>(shift.size()), "cube_mass shift");
  double s = 0.0;
  for (std::size_t a = 0; a < m.size(); ++a) {
    const PointView x = m.position(a);
    bool inside = true;
    for (int i = 0; i < m.dimension() && inside; ++i) {
      inside = lattice_coordinate(x[i], shift[i], q.level) == q.index[i];
    }
    if (inside) s += m.weight(a);
  }
  return s;
}

inline double cube_mass(const AtomicMeasure& m, const DyadicCube& q) {
  return cube_mass(m, q, std::vector<double>(static_cast<std::size_t>(m.dimension()), 0.0));
}

inline double squared_distance(PointView a, PointView b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double distance(PointView a, PointView b) { return std::sqrt(squared_distance(a, b)); }

// Closed Euclidean ball.
inline double ball_mass(const AtomicMeasure& m, PointView center, double radius) {
  require_dimension(m.dimension(), static_cast<int>(center.size()), "ball_mass");
  if (!(radius > 0.0)) throw InvalidArgument("ball radius must be positive");
  double s = 0.0;
  for (std::size_t a = 0; a < m.size(); ++a) {
    if (distance(m.position(a), center) <= radius) s += m.weight(a);
  }
  return s;
}

// Per-cube masses of a window, indexed by cube id. Atoms outside the root
// region fall in no window cube and are ignored.
inline std::vector<double> window_masses(const AtomicMeasure& m, const LatticeWindow& w) {
  require_dimension(w.dimension(), m.dimension(), "window_masses");
  std::vector<double> mass(w.cube_count(), 0.0);
  for (std::size_t a = 0; a < m.size(); ++a) {
    if (auto leaf = w.leaf_id(m.position(a))) mass[*leaf] += m.weight(a);
  }
  const std::size_t first_non_root = w.level_size(w.coarse_level());
  for (std::size_t id = w.cube_count(); id-- > first_non_root;) mass[w.parent_id(id)] += mass[id];
  return mass;
}

// One atom at the center of every level-`level` cell of the unshifted
// lattice inside [lo, hi), weight = cell volume.
inline AtomicMeasure lebesgue_grid(const std::vector<double>& lo, const std::vector<double>& hi,
                                   int level) {
  const int n = static_cast<int>(lo.size());
  require_dimension(n, static_cast<int>(hi.size()), "lebesgue_grid box");
  std::vector<Index> first(n), count(n);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    const double a = std::ldexp(lo[i], level);
    const double b = std::ldexp(hi[i], level);
    if (a != std::floor(a) || b != std::floor(b) || b <= a) {
      throw InvalidArgument("lebesgue_grid box is not aligned to level " + std::to_string(level) +
                            " cells in axis " + std::to_string(i));
    }
    first[i] = static_cast<Index>(a);
    count[i] = static_cast<Index>(b - a);
    total *= static_cast<std::size_t>(count[i]);
  }
  if (total > (std::size_t{1} << 26)) throw InvalidArgument("lebesgue_grid has too many cells");
  AtomicMeasure m(n);
  const double w = std::ldexp(1.0, -n * level);
  std::vector<Index> k(first);
  std::vector<double> x(n);
  for (std::size_t c = 0; c < total; ++c) {
    for (int i = 0; i < n; ++i) x[i] = std::ldexp(double(k[i]) + 0.5, -level);
    m.add(x, w);
    for (int i = n - 1; i >= 0; --i) {
      if (++k[i] < first[i] + count[i]) break;
      k[i] = first[i];
    }
  }
  return m;
}

// Multiplicative cascade on [0,1)^n down to `depth`: at every split the
// lowest-index child receives the fraction theta = 2^-gamma of its parent
// and the other 2^n - 1 children share the rest equally. With 0 < gamma <= n
// every child carries at most theta of its parent, so
//   sigma(2^j Q) >= 2^(j gamma) sigma(Q)
// with constant exactly 1. Atoms sit at the centers of the depth-level cells.
inline AtomicMeasure bernoulli_cascade(int dimension, double gamma, int depth) {
  if (dimension < 1) throw InvalidArgument("cascade dimension must be >= 1");
  if (!(gamma > 0.0) || gamma > dimension) {
    throw InvalidArgument("cascade gamma must lie in (0, n]");
  }
  if (depth < 0 || depth * dimension > 24) throw InvalidArgument("cascade depth out of range");
  const double theta = std::exp2(-gamma);
  const int children = 1 << dimension;
  const double rest = (1.0 - theta) / double(children - 1);

  AtomicMeasure m(dimension);
  const std::size_t cells = std::size_t{1} << (dimension * depth);
  std::vector<double> x(dimension);
  for (std::size_t c = 0; c < cells; ++c) {
    // Digits of c in base 2^n from coarse to fine give the child choices.
    double weight = 1.0;
    std::vector<Index> idx(dimension, 0);
    for (int l = 0; l < depth; ++l) {
      const int shift = dimension * (depth - 1 - l);
      const auto digit = static_cast<int>((c >> shift) & static_cast<std::size_t>(children - 1));
      weight *= (digit == 0) ? theta : rest;
      for (int i = 0; i < dimension; ++i) {
        const int bit = (digit >> (dimension - 1 - i)) & 1;
        idx[i] = 2 * idx[i] + bit;
      }
    }
    for (int i = 0; i < dimension; ++i) x[i] = std::ldexp(double(idx[i]) + 0.5, -depth);
    m.add(x, weight);
  }
  return m;
}

struct ReverseDoublingResult {
  bool holds = false;
  double best_constant = 0.0;
};

// Largest C with sigma(2^j Q) >= C 2^(j gamma) sigma(Q) over all window
// cubes of positive mass and all j keeping 2^j Q inside the window. On a
// finite window C is always positive, so `holds` compares it to `floor`.
inline ReverseDoublingResult reverse_doubling_check(const AtomicMeasure& m,
                                                    const LatticeWindow& w, double gamma,
                                                    double floor = 1e-3) {
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  const auto mass = window_masses(m, w);
  double best = kInf;
  bool any = false;
  for (std::size_t id = 0; id < w.cube_count(); ++id) {
    if (mass[id] <= 0.0) continue;
    any = true;
    best = std::min(best, 1.0);  // j = 0
    std::size_t anc = id;
    const int level = w.level_of(id);
    for (int j = 1; level - j >= w.coarse_level(); ++j) {
      anc = w.parent_id(anc);
      best = std::min(best, mass[anc] / (std::exp2(j * gamma) * mass[id]));
    }
  }
  if (!any) throw DegenerateInputError("no window cube carries positive mass");
  return {best >= floor, best};
}

// max sigma(B(x,2r)) / sigma(B(x,r)) over sampled (x, r); zero-mass pairs skipped.
inline double doubling_constant(const AtomicMeasure& m, const std::vector<Point>& samples,
                                const std::vector<double>& radii) {
  double worst = 0.0;
  bool any = false;
  for (const auto& x : samples) {
    for (double r : radii) {
      const double inner = ball_mass(m, x, r);
      if (inner <= 0.0) continue;
      any = true;
      worst = std::max(worst, ball_mass(m, x, 2.0 * r) / inner);
    }
  }
  if (!any) throw DegenerateInputError("every sampled ball has zero mass");
  return worst;
}

}  // namespace wolff
