#pragma once

// Dyadic cubes, shifted lattices and finite level windows.
//
// A cube is stored as integers (level, index); as a point set it is
//   z + prod_i [index_i * 2^-level, (index_i + 1) * 2^-level)
// where z is the lattice shift carried by the window. Containment and
// ancestry are integer operations; the shift only enters when a point is
// located.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wolff/errors.hpp"

namespace wolff {

using Index = std::int64_t;
using Point = std::vector<double>;
using PointView = std::span<const double>;

struct DyadicCube {
  int level = 0;
  std::vector<Index> index;

  int dimension() const { return static_cast<int>(index.size()); }
  double side() const { return std::ldexp(1.0, -level); }

  // True when `other` is this cube or one of its descendants.
  bool contains(const DyadicCube& other) const {
    if (other.level < level || other.dimension() != dimension()) return false;
    const int bits = other.level - level;
    for (std::size_t i = 0; i < index.size(); ++i) {
      if ((other.index[i] >> bits) != index[i]) return false;
    }
    return true;
  }

  DyadicCube parent() const {
    DyadicCube p{level - 1, index};
    for (auto& v : p.index) v >>= 1;
    return p;
  }

  friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
};

// Lattice index of coordinate `x` at `level` for shift `z`: floor((x - z) 2^level).
inline Index lattice_coordinate(double x, double z, int level) {
  return static_cast<Index>(std::floor(std::ldexp(x - z, level)));
}

class LatticeWindow {
 public:
  // Root region: the box of coarse cubes with indices root_lo[i] <= k_i <
  // root_lo[i] + root_extent[i].
  LatticeWindow(int dimension, int coarse_level, int fine_level, std::vector<Index> root_lo,
                std::vector<Index> root_extent, std::vector<double> shift = {})
      : dim_(dimension),
        coarse_(coarse_level),
        fine_(fine_level),
        root_lo_(std::move(root_lo)),
        root_extent_(std::move(root_extent)),
        shift_(std::move(shift)) {
    if (dim_ < 1) throw InvalidArgument("window dimension must be >= 1");
    if (coarse_ > fine_) throw InvalidArgument("window coarse_level must be <= fine_level");
    if (fine_ - coarse_ > 40) throw InvalidArgument("window depth above 40 levels is not supported");
    if (shift_.empty()) shift_.assign(dim_, 0.0);
    require_dimension(dim_, static_cast<int>(root_lo_.size()), "window root_lo");
    require_dimension(dim_, static_cast<int>(root_extent_.size()), "window root_extent");
    require_dimension(dim_, static_cast<int>(shift_.size()), "window shift");
    for (Index e : root_extent_) {
      if (e < 1) throw InvalidArgument("window root extent must be >= 1 in every axis");
    }
    build_levels();
  }

  // Root region given as a box [lo, hi) that must be a union of coarse
  // cubes of the shifted lattice.
  static LatticeWindow from_box(int coarse_level, int fine_level, const std::vector<double>& lo,
                                const std::vector<double>& hi, std::vector<double> shift = {}) {
    const int n = static_cast<int>(lo.size());
    require_dimension(n, static_cast<int>(hi.size()), "window box");
    if (shift.empty()) shift.assign(n, 0.0);
    require_dimension(n, static_cast<int>(shift.size()), "window shift");
    std::vector<Index> root_lo(n), extent(n);
    for (int i = 0; i < n; ++i) {
      const double a = std::ldexp(lo[i] - shift[i], coarse_level);
      const double b = std::ldexp(hi[i] - shift[i], coarse_level);
      if (a != std::floor(a) || b != std::floor(b)) {
        throw InvalidArgument("window box is not aligned to the coarse lattice in axis " +
                              std::to_string(i));
      }
      if (b <= a) throw InvalidArgument("window box is empty in axis " + std::to_string(i));
      root_lo[i] = static_cast<Index>(a);
      extent[i] = static_cast<Index>(b - a);
    }
    return LatticeWindow(n, coarse_level, fine_level, std::move(root_lo), std::move(extent),
                         std::move(shift));
  }

  int dimension() const { return dim_; }
  int coarse_level() const { return coarse_; }
  int fine_level() const { return fine_; }
  int depth() const { return fine_ - coarse_; }
  const std::vector<double>& shift() const { return shift_; }
  const std::vector<Index>& root_lo() const { return root_lo_; }
  const std::vector<Index>& root_extent() const { return root_extent_; }

  std::size_t root_count() const { return levels_.front().size; }
  std::size_t cube_count() const { return levels_.back().offset + levels_.back().size; }
  std::size_t level_offset(int level) const { return at(level).offset; }
  std::size_t level_size(int level) const { return at(level).size; }

  // Bounds of the root region in point coordinates.
  std::vector<double> root_box_lo() const {
    std::vector<double> v(dim_);
    for (int i = 0; i < dim_; ++i) v[i] = shift_[i] + std::ldexp(double(root_lo_[i]), -coarse_);
    return v;
  }
  std::vector<double> root_box_hi() const {
    std::vector<double> v(dim_);
    for (int i = 0; i < dim_; ++i) {
      v[i] = shift_[i] + std::ldexp(double(root_lo_[i] + root_extent_[i]), -coarse_);
    }
    return v;
  }

  bool in_root(PointView x) const {
    require_dimension(dim_, static_cast<int>(x.size()), "point");
    for (int i = 0; i < dim_; ++i) {
      const Index k = lattice_coordinate(x[i], shift_[i], coarse_);
      if (k < root_lo_[i] || k >= root_lo_[i] + root_extent_[i]) return false;
    }
    return true;
  }

  bool has_level(int level) const { return level >= coarse_ && level <= fine_; }

  DyadicCube cube_at(PointView x, int level) const {
    if (!has_level(level)) {
      throw RangeError("level " + std::to_string(level) + " outside window [" +
                       std::to_string(coarse_) + ", " + std::to_string(fine_) + "]");
    }
    if (!in_root(x)) throw OutOfWindowError("point lies outside the window root region");
    DyadicCube q{level, std::vector<Index>(dim_)};
    for (int i = 0; i < dim_; ++i) q.index[i] = lattice_coordinate(x[i], shift_[i], level);
    return q;
  }

  // Id of the finest window cube containing x, or nullopt outside the root.
  std::optional<std::size_t> leaf_id(PointView x) const {
    if (!in_root(x)) return std::nullopt;
    const Level& lv = levels_.back();
    std::size_t local = 0;
    for (int i = 0; i < dim_; ++i) {
      local += static_cast<std::size_t>(lattice_coordinate(x[i], shift_[i], fine_) - lv.lo[i]) *
               lv.stride[i];
    }
    return lv.offset + local;
  }

  // Ids of the window cubes containing x, coarse to fine. Empty when x is
  // outside the root region.
  void chain(PointView x, std::vector<std::size_t>& ids) const {
    ids.clear();
    const auto leaf = leaf_id(x);
    if (!leaf) return;
    chain_of_leaf(*leaf, ids);
  }

  void chain_of_leaf(std::size_t leaf, std::vector<std::size_t>& ids) const {
    ids.resize(static_cast<std::size_t>(depth()) + 1);
    std::size_t id = leaf;
    for (int l = depth(); l >= 0; --l) {
      ids[static_cast<std::size_t>(l)] = id;
      if (l > 0) id = parent_id(id);
    }
  }

  bool contains_cube(const DyadicCube& q) const {
    if (q.dimension() != dim_ || !has_level(q.level)) return false;
    const Level& lv = at(q.level);
    for (int i = 0; i < dim_; ++i) {
      if (q.index[i] < lv.lo[i] || q.index[i] >= lv.lo[i] + lv.extent[i]) return false;
    }
    return true;
  }

  std::size_t id_of(const DyadicCube& q) const {
    if (!contains_cube(q)) throw RangeError("cube is not part of the window");
    const Level& lv = at(q.level);
    std::size_t local = 0;
    for (int i = 0; i < dim_; ++i) {
      local += static_cast<std::size_t>(q.index[i] - lv.lo[i]) * lv.stride[i];
    }
    return lv.offset + local;
  }

  int level_of(std::size_t id) const {
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), id);
    return coarse_ + static_cast<int>(it - offsets_.begin()) - 1;
  }

  DyadicCube cube(std::size_t id) const {
    const int level = level_of(id);
    const Level& lv = at(level);
    std::size_t local = id - lv.offset;
    DyadicCube q{level, std::vector<Index>(dim_)};
    for (int i = 0; i < dim_; ++i) {
      q.index[i] = lv.lo[i] + static_cast<Index>(local / lv.stride[i]);
      local %= lv.stride[i];
    }
    return q;
  }

  std::size_t parent_id(std::size_t id) const {
    const int level = level_of(id);
    if (level <= coarse_) throw RangeError("root cubes have no parent inside the window");
    const Level& lv = at(level);
    const Level& up = at(level - 1);
    std::size_t local = id - lv.offset;
    std::size_t parent_local = 0;
    for (int i = 0; i < dim_; ++i) {
      const Index k = lv.lo[i] + static_cast<Index>(local / lv.stride[i]);
      local %= lv.stride[i];
      parent_local += static_cast<std::size_t>((k >> 1) - up.lo[i]) * up.stride[i];
    }
    return up.offset + parent_local;
  }

  // 2^j Q: the ancestor of side 2^j r_Q.
  DyadicCube ancestor_pow2(const DyadicCube& q, int j) const {
    if (j < 0) throw InvalidArgument("ancestor step must be >= 0");
    if (q.level - j < coarse_) {
      throw RangeError("ancestor 2^" + std::to_string(j) + "Q would leave the window");
    }
    DyadicCube a{q.level - j, q.index};
    for (auto& v : a.index) v >>= j;
    return a;
  }

  // Point membership; agrees with cube_at by construction.
  bool contains(const DyadicCube& q, PointView x) const {
    require_dimension(dim_, static_cast<int>(x.size()), "point");
    for (int i = 0; i < dim_; ++i) {
      if (lattice_coordinate(x[i], shift_[i], q.level) != q.index[i]) return false;
    }
    return true;
  }

  std::vector<double> lower_corner(const DyadicCube& q) const {
    std::vector<double> c(dim_);
    for (int i = 0; i < dim_; ++i) c[i] = shift_[i] + std::ldexp(double(q.index[i]), -q.level);
    return c;
  }

  std::vector<double> center(const DyadicCube& q) const {
    std::vector<double> c(dim_);
    for (int i = 0; i < dim_; ++i) {
      c[i] = shift_[i] + std::ldexp(double(q.index[i]) + 0.5, -q.level);
    }
    return c;
  }

  // Coarse-to-fine, lexicographic index order; position == cube id.
  std::vector<DyadicCube> cubes() const {
    std::vector<DyadicCube> out;
    out.reserve(cube_count());
    for (std::size_t id = 0; id < cube_count(); ++id) out.push_back(cube(id));
    return out;
  }

 private:
  struct Level {
    std::vector<Index> lo;
    std::vector<Index> extent;
    std::vector<std::size_t> stride;
    std::size_t offset = 0;
    std::size_t size = 0;
  };

  const Level& at(int level) const {
    if (!has_level(level)) throw RangeError("level outside window");
    return levels_[static_cast<std::size_t>(level - coarse_)];
  }

  void build_levels() {
    std::size_t offset = 0;
    for (int l = coarse_; l <= fine_; ++l) {
      Level lv;
      const int bits = l - coarse_;
      lv.lo.resize(dim_);
      lv.extent.resize(dim_);
      lv.stride.resize(dim_);
      for (int i = 0; i < dim_; ++i) {
        lv.lo[i] = root_lo_[i] * (Index{1} << bits);
        lv.extent[i] = root_extent_[i] << bits;
      }
      std::size_t stride = 1;
      for (int i = dim_ - 1; i >= 0; --i) {
        lv.stride[i] = stride;
        stride *= static_cast<std::size_t>(lv.extent[i]);
      }
      lv.size = stride;
      lv.offset = offset;
      offset += stride;
      if (offset > (std::size_t{1} << 34)) throw InvalidArgument("window has too many cubes");
      offsets_.push_back(lv.offset);
      levels_.push_back(std::move(lv));
    }
  }

  int dim_;
  int coarse_;
  int fine_;
  std::vector<Index> root_lo_;
  std::vector<Index> root_extent_;
  std::vector<double> shift_;
  std::vector<Level> levels_;
  std::vector<std::size_t> offsets_;
};

}  // namespace wolff
