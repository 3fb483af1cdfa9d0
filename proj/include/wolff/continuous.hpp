#pragma once

// Continuous radial potentials against atomic measures:
//   T_k^R[nu](x) = int_{|x-y| <= R} k(|x-y|) dnu(y)
//   W^R(x)       = int_0^R k(r) sigma(B(x,r)) (int_{B(x,r)} kbar(r)(y) dmu(y))^{p'-1} dr/r
//   M_k(x)       = sup_r kbar(r)(x) mu(B(x,r))
//
// Between consecutive jump radii every ball mass is constant and
// kbar(r)(y) = G(r) - mean_{B(y,r)} G(d), so the inner integral is
// A G(r) + B and the Wolff segment integral is
//   sigma_x [(A G + B)^{p'}]_a^b / (A p').

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "wolff/errors.hpp"
#include "wolff/extended.hpp"
#include "wolff/measures.hpp"
#include "wolff/radial_kernel.hpp"
#include "wolff/radial_profile.hpp"

namespace wolff {

inline double t_continuous_trunc(const RadialKernel& k, const AtomicMeasure& nu, double radius,
                                 PointView x) {
  require_dimension(nu.dimension(), static_cast<int>(x.size()), "t_continuous point");
  if (!(radius > 0.0)) throw InvalidArgument("truncation radius must be positive");
  double s = 0.0;
  for (std::size_t a = 0; a < nu.size(); ++a) {
    const double d = distance(nu.position(a), x);
    if (d <= radius) s += mul0(nu.weight(a), k(d));
  }
  return s;
}

inline double energy_continuous(const RadialKernel& k, const AtomicMeasure& mu,
                                const AtomicMeasure& sigma, double p_prime) {
  require_dimension(mu.dimension(), sigma.dimension(), "energy_continuous");
  double e = 0.0;
  for (std::size_t a = 0; a < sigma.size(); ++a) {
    if (sigma.weight(a) == 0.0) continue;
    const double t = t_continuous_trunc(k, mu, kInf, sigma.position(a));
    e += mul0(sigma.weight(a), pow0(t, p_prime));
  }
  return e;
}

namespace detail {

// Sorted, deduplicated positive radii <= limit, with `limit` appended when finite.
inline std::vector<double> breakpoints(std::vector<double> r, double limit) {
  r.erase(std::remove_if(r.begin(), r.end(), [&](double v) { return !(v > 0.0) || v > limit; }),
          r.end());
  if (std::isfinite(limit)) r.push_back(limit);
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

}  // namespace detail

inline double wolff_continuous(const RadialKernel& k, const AtomicMeasure& sigma,
                               const AtomicMeasure& mu, double p_prime, PointView x,
                               double radius = kInf) {
  require_dimension(sigma.dimension(), mu.dimension(), "wolff_continuous");
  require_dimension(sigma.dimension(), static_cast<int>(x.size()), "wolff_continuous point");
  if (!(radius > 0.0)) throw InvalidArgument("truncation radius must be positive");
  if (!(p_prime > 1.0)) throw InvalidArgument("p' must exceed 1");

  const RadialProfile px(k, sigma, x);
  struct Active {
    double dist;
    double weight;
    RadialProfile profile;
  };
  std::vector<Active> atoms;
  std::vector<double> radii(px.distances());
  for (std::size_t a = 0; a < mu.size(); ++a) {
    const double d = distance(mu.position(a), x);
    if (mu.weight(a) == 0.0 || d > radius) continue;
    atoms.push_back({d, mu.weight(a), RadialProfile(k, sigma, mu.position(a))});
    radii.push_back(d);
    for (double e : atoms.back().profile.distances()) {
      if (e > d) radii.push_back(e);
    }
  }
  if (atoms.empty() || px.size() == 0) return 0.0;
  std::sort(atoms.begin(), atoms.end(), [](const Active& a, const Active& b) { return a.dist < b.dist; });
  if (auto c = k.cutoff()) radii.push_back(*c);
  const auto bp = detail::breakpoints(std::move(radii), radius);

  // Segments [bp[i], bp[i+1]) plus the tail [bp.back(), radius) when radius = inf.
  double total = 0.0;
  double g_lo = k.antiderivative(bp.front());
  const std::size_t segments = std::isinf(radius) ? bp.size() : bp.size() - 1;
  for (std::size_t i = 0; i < segments; ++i) {
    const double a = bp[i];
    const double b = (i + 1 < bp.size()) ? bp[i + 1] : kInf;
    const double g_hi = (i + 1 < bp.size()) ? k.antiderivative(b) : k.antiderivative_at_infinity();
    const double g_a = g_lo;
    g_lo = g_hi;
    if (!(g_hi > g_a)) continue;  // k vanishes on the segment
    const double sx = px.ball_mass(a);
    if (sx == 0.0) continue;
    double weight = 0.0;
    double offset = 0.0;
    bool infinite = false;
    for (const auto& y : atoms) {
      if (y.dist > a) break;
      const std::size_t c = y.profile.count(a);
      if (c == 0) continue;
      if (y.profile.singular()) {
        infinite = true;
        break;
      }
      weight += y.weight;
      offset -= y.weight * y.profile.mean_g(c);
    }
    if (infinite) return kInf;
    if (weight == 0.0) continue;
    if (std::isinf(g_hi)) return kInf;
    const double lo = std::max(0.0, weight * g_a + offset);
    const double hi = std::max(0.0, weight * g_hi + offset);
    total += sx * (std::pow(hi, p_prime) - std::pow(lo, p_prime)) / (weight * p_prime);
  }
  return total;
}

inline double m_k_maximal(const RadialKernel& k, const AtomicMeasure& sigma,
                          const AtomicMeasure& mu, PointView x) {
  require_dimension(sigma.dimension(), mu.dimension(), "m_k_maximal");
  const RadialProfile ps(k, sigma, x);
  const RadialProfile pm(RadialKernel::constant(0.0, sigma.dimension()), mu, x);
  if (pm.size() == 0 || ps.size() == 0) return 0.0;
  if (ps.singular()) return kInf;
  std::vector<double> radii(ps.distances());
  radii.insert(radii.end(), pm.distances().begin(), pm.distances().end());
  if (auto c = k.cutoff()) radii.push_back(*c);
  const auto bp = detail::breakpoints(std::move(radii), kInf);

  // kbar is nondecreasing inside a segment, so each segment contributes its
  // value at the left end and its left limit at the right end.
  double best = 0.0;
  for (std::size_t i = 0; i < bp.size(); ++i) {
    const std::size_t cs = ps.count(bp[i]);
    const double mass_mu = pm.ball_mass(bp[i]);
    if (cs == 0 || mass_mu == 0.0) continue;
    const double g_a = k.antiderivative(bp[i]);
    const double g_b = (i + 1 < bp.size()) ? k.antiderivative(bp[i + 1]) : k.antiderivative_at_infinity();
    best = std::max(best, ps.bar_with(cs, g_a) * mass_mu);
    if (std::isinf(g_b)) return kInf;
    best = std::max(best, ps.bar_with(cs, g_b) * mass_mu);
  }
  return best;
}

}  // namespace wolff
