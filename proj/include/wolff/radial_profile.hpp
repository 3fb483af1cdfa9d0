#pragma once

// The continuous bar-kernel
//   kbar(r)(x) = (1/sigma(B(x,r))) int_0^r k(s) sigma(B(x,s)) ds/s.
// For atomic sigma, s -> sigma(B(x,s)) is a right-continuous step function,
// so the integral is the finite sum  sum_{d_j <= r} w_j int_{d_j}^r k(s) ds/s.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "wolff/errors.hpp"
#include "wolff/extended.hpp"
#include "wolff/measures.hpp"
#include "wolff/radial_kernel.hpp"

namespace wolff {

// Atom distances from a center, sorted, with prefix masses and prefix sums
// of w G(d). Answers sigma(B(x,r)) and kbar(r)(x) in O(log m) per radius.
class RadialProfile {
 public:
  RadialProfile(const RadialKernel& k, const AtomicMeasure& m, PointView center) : k_(&k) {
    require_dimension(m.dimension(), static_cast<int>(center.size()), "radial profile center");
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(m.size());
    for (std::size_t a = 0; a < m.size(); ++a) {
      if (m.weight(a) > 0.0) atoms.emplace_back(distance(m.position(a), center), m.weight(a));
    }
    std::sort(atoms.begin(), atoms.end());
    const bool g0_infinite = std::isinf(k.antiderivative(0.0));
    dist_.reserve(atoms.size());
    mass_.reserve(atoms.size());
    gsum_.reserve(atoms.size());
    double mass = 0.0;
    Compensated g;
    for (const auto& [d, w] : atoms) {
      mass += w;
      if (d == 0.0 && g0_infinite) {
        singular_ = true;
      } else {
        g += w * k.antiderivative(d);
      }
      dist_.push_back(d);
      mass_.push_back(mass);
      gsum_.push_back(g);
    }
  }

  const std::vector<double>& distances() const { return dist_; }
  std::size_t size() const { return dist_.size(); }

  // Number of atoms in the closed ball of radius r.
  std::size_t count(double r) const {
    return static_cast<std::size_t>(std::upper_bound(dist_.begin(), dist_.end(), r) -
                                    dist_.begin());
  }
  double mass_of_first(std::size_t c) const { return c == 0 ? 0.0 : mass_[c - 1]; }
  double ball_mass(double r) const { return mass_of_first(count(r)); }

  // Mean of G(d) over the first c atoms; -inf when an atom sits at the
  // center and G(0) = -inf.
  double mean_g(std::size_t c) const {
    if (c == 0) return 0.0;
    if (singular_) return -kInf;
    return gsum_[c - 1].value() / mass_[c - 1];
  }

  // kbar(r) evaluated with the first c atoms and G(r) supplied, so that a
  // caller sweeping segments can reuse both.
  double bar_with(std::size_t c, double g_r) const {
    if (c == 0) return 0.0;
    if (singular_) return kInf;
    return std::max(0.0, g_r - mean_g(c));
  }

  double bar(double r) const {
    if (!(r > 0.0)) throw InvalidArgument("bar kernel radius must be positive");
    return bar_with(count(r), k_->antiderivative(r));
  }

  bool singular() const { return singular_; }

 private:
  const RadialKernel* k_;
  std::vector<double> dist_;
  std::vector<double> mass_;
  std::vector<Compensated> gsum_;
  bool singular_ = false;
};

// kbar(r)(x) by direct summation of log_primitive over the atoms of B(x,r).
inline double bar_k(const RadialKernel& k, const AtomicMeasure& sigma, PointView x, double r) {
  require_dimension(sigma.dimension(), static_cast<int>(x.size()), "bar_k point");
  if (!(r > 0.0)) throw InvalidArgument("bar_k radius must be positive");
  double mass = 0.0;
  double integral = 0.0;
  for (std::size_t a = 0; a < sigma.size(); ++a) {
    const double w = sigma.weight(a);
    if (w == 0.0) continue;
    const double d = distance(sigma.position(a), x);
    if (d > r) continue;
    mass += w;
    integral += mul0(w, k.log_primitive(d, r));
  }
  if (mass == 0.0) return 0.0;
  return integral / mass;
}

struct LboSample {
  Point x;
  double r = 0.0;
  std::vector<Point> ys;  // points of B(x, r) at which kbar(r) is compared
};

// Empirical LBO constant: max over samples of sup_y kbar(r)(y) / inf_y kbar(r)(y).
// Samples whose ball B(x,r) carries no sigma mass are skipped, as are probe
// points y whose own ball is empty.
inline double lbo_constant(const RadialKernel& k, const AtomicMeasure& sigma,
                           const std::vector<LboSample>& samples) {
  double worst = 0.0;
  bool any = false;
  for (const auto& s : samples) {
    if (ball_mass(sigma, s.x, s.r) <= 0.0) continue;
    double hi = 0.0;
    double lo = kInf;
    bool seen = false;
    for (const auto& y : s.ys) {
      if (distance(y, s.x) > s.r) throw InvalidArgument("lbo probe point lies outside its ball");
      const double v = bar_k(k, sigma, y, s.r);
      if (v == 0.0) continue;
      seen = true;
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    if (!seen) continue;
    any = true;
    if (std::isinf(hi)) {
      worst = std::max(worst, std::isinf(lo) ? 1.0 : kInf);
    } else {
      worst = std::max(worst, hi / lo);
    }
  }
  if (!any) throw DegenerateInputError("every lbo sample is degenerate");
  return worst;
}

}  // namespace wolff
