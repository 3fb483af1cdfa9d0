#pragma once

// Dyadic potentials over a finite window:
//   T[nu](x)   = sum_{Q ∋ x} K(Q) nu(Q)
//   E          = int T[mu]^{p'} dsigma
//   W(x)       = sum_{Q ∋ x} K(Q) sigma(Q) I(Q)^{p'-1},  I(Q) = int_Q Kbar(Q) dmu
//   Wbar(x)    = sum_{Q ∋ x} sigma(Q) Kbar(Q)(x) I(Q)^{p'-1}
//   M(x)       = max_{Q ∋ x} I(Q)
// Atoms outside the window root region lie in no window cube.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wolff/dyadic_kernel.hpp"
#include "wolff/errors.hpp"
#include "wolff/extended.hpp"
#include "wolff/lattice.hpp"
#include "wolff/measures.hpp"

namespace wolff {

struct Exponents {
  double p = 2.0;
  double p_prime = 2.0;
  std::optional<double> q;

  static Exponents from_p(double p, std::optional<double> q = std::nullopt) {
    if (!(p > 1.0) || !std::isfinite(p)) throw InvalidArgument("exponent p must satisfy 1 < p < inf");
    Exponents e;
    e.p = p;
    e.p_prime = p / (p - 1.0);
    e.set_q(q);
    return e;
  }

  static Exponents from_p_prime(double p_prime, std::optional<double> q = std::nullopt) {
    if (!(p_prime > 1.0) || !std::isfinite(p_prime)) {
      throw InvalidArgument("exponent p' must satisfy 1 < p' < inf");
    }
    Exponents e;
    e.p_prime = p_prime;
    e.p = p_prime / (p_prime - 1.0);
    e.set_q(q);
    return e;
  }

  // q(p-1)/(p-q), the Lebesgue exponent of the Wolff potential in the
  // upper triangle case.
  std::optional<double> trace_exponent() const {
    if (!q) return std::nullopt;
    return *q * (p - 1.0) / (p - *q);
  }

 private:
  void set_q(std::optional<double> value) {
    if (value && !(*value >= 1.0 && *value < p)) {
      throw InvalidArgument("exponent q must satisfy 1 <= q < p (p = " + std::to_string(p) + ")");
    }
    q = value;
  }
};

// T[nu] on every window cube's chain, evaluated at a leaf.
inline double chain_sum(const std::vector<std::size_t>& parent, std::size_t roots, std::size_t leaf,
                        const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  std::size_t id = leaf;
  for (;;) {
    s += mul0(a[id], b[id]);
    if (id < roots) break;
    id = parent[id];
  }
  return s;
}

// Per-(K, sigma, mu, window, p') precomputation; evaluations are pure.
class DyadicPotentials {
 public:
  DyadicPotentials(const DyadicKernelMap& k, const AtomicMeasure& sigma, const AtomicMeasure& mu,
                   const LatticeWindow& w, double p_prime)
      : DyadicPotentials(BarField(w, k.on(w), window_masses(sigma, w)), sigma, mu, p_prime) {}

  DyadicPotentials(BarField field, const AtomicMeasure& sigma, const AtomicMeasure& mu,
                   double p_prime)
      : field_(std::move(field)), sigma_(sigma), mu_(mu), p_prime_(p_prime) {
    if (!(p_prime > 1.0)) throw InvalidArgument("p' must exceed 1");
    const auto& w = field_.window();
    require_dimension(w.dimension(), sigma.dimension(), "sigma");
    require_dimension(w.dimension(), mu.dimension(), "mu");
    mu_mass_ = window_masses(mu, w);
    const std::size_t n = w.cube_count();
    const auto& parent = field_.parents();
    const std::size_t roots = w.root_count();

    // I(Q) sigma(Q) = sum over mu-atoms y in Q of w_y sigma(Q) Kbar(Q)(y).
    std::vector<double> weighted(n, 0.0);
    mu_leaf_.resize(mu.size());
    for (std::size_t a = 0; a < mu.size(); ++a) {
      mu_leaf_[a] = w.leaf_id(mu.position(a));
      if (!mu_leaf_[a] || mu.weight(a) == 0.0) continue;
      const std::size_t leaf = *mu_leaf_[a];
      std::size_t id = leaf;
      for (;;) {
        weighted[id] += mu.weight(a) * field_.weighted(id, leaf);
        if (id < roots) break;
        id = parent[id];
      }
    }
    inner_.assign(n, 0.0);
    inner_pow_.assign(n, 0.0);
    for (std::size_t id = 0; id < n; ++id) {
      inner_[id] = div0(weighted[id], field_.sigma()[id]);
      inner_pow_[id] = pow0(inner_[id], p_prime_ - 1.0);
    }
  }

  const BarField& field() const { return field_; }
  const LatticeWindow& window() const { return field_.window(); }
  double p_prime() const { return p_prime_; }
  const std::vector<double>& mu_mass() const { return mu_mass_; }
  const std::vector<double>& sigma_mass() const { return field_.sigma(); }
  const std::vector<double>& kernel() const { return field_.kernel(); }
  // I(Q) = int_Q Kbar(Q) dmu, per cube id.
  const std::vector<double>& inner() const { return inner_; }

  std::size_t leaf(PointView x) const {
    const auto id = window().leaf_id(x);
    if (!id) throw OutOfWindowError("query point lies outside the window root region");
    return *id;
  }

  double t(PointView x) const { return t_leaf(leaf(x)); }
  double wolff(PointView x) const { return wolff_leaf(leaf(x), field_.kernel()); }
  double wolff_bar(PointView x) const { return wolff_bar_leaf(leaf(x)); }
  double maximal(PointView x) const { return maximal_leaf(leaf(x)); }

  double t_leaf(std::size_t leaf) const {
    return chain_sum(field_.parents(), window().root_count(), leaf, field_.kernel(), mu_mass_);
  }

  // Wolff sum with an arbitrary outer kernel (e.g. K(Q) = k(c r_Q)); the
  // inner integrals keep the undilated Kbar.
  double wolff_leaf(std::size_t leaf, const std::vector<double>& outer) const {
    const auto& parent = field_.parents();
    const std::size_t roots = window().root_count();
    double s = 0.0;
    std::size_t id = leaf;
    for (;;) {
      s += mul0(mul0(outer[id], field_.sigma()[id]), inner_pow_[id]);
      if (id < roots) break;
      id = parent[id];
    }
    return s;
  }

  double wolff_bar_leaf(std::size_t leaf) const {
    const auto& parent = field_.parents();
    const std::size_t roots = window().root_count();
    double s = 0.0;
    std::size_t id = leaf;
    for (;;) {
      s += mul0(field_.weighted(id, leaf), inner_pow_[id]);
      if (id < roots) break;
      id = parent[id];
    }
    return s;
  }

  double maximal_leaf(std::size_t leaf) const {
    const auto& parent = field_.parents();
    const std::size_t roots = window().root_count();
    double m = 0.0;
    std::size_t id = leaf;
    for (;;) {
      m = std::max(m, inner_[id]);
      if (id < roots) break;
      id = parent[id];
    }
    return m;
  }

  // T[mu] at every sigma-atom (0 outside the window).
  std::vector<double> t_at_sigma() const {
    std::vector<double> out(sigma_.size(), 0.0);
    for (std::size_t a = 0; a < sigma_.size(); ++a) {
      if (auto l = window().leaf_id(sigma_.position(a))) out[a] = t_leaf(*l);
    }
    return out;
  }

  // E = sum_a w_a T(a)^{p'} over sigma-atoms.
  double energy() const {
    const auto t = t_at_sigma();
    double e = 0.0;
    for (std::size_t a = 0; a < sigma_.size(); ++a) e += mul0(sigma_.weight(a), pow0(t[a], p_prime_));
    return e;
  }

  // int T[(T mu)^{p'-1} dsigma] dmu, assembled from a separate bottom-up pass.
  double fubini_rhs() const {
    const auto t = t_at_sigma();
    std::vector<double> g(sigma_.size());
    for (std::size_t a = 0; a < sigma_.size(); ++a) g[a] = pow0(t[a], p_prime_ - 1.0);
    const auto f = window_masses(sigma_.reweighted(g), window());
    double s = 0.0;
    for (std::size_t a = 0; a < mu_.size(); ++a) {
      if (!mu_leaf_[a]) continue;
      s += mul0(mu_.weight(a),
                chain_sum(field_.parents(), window().root_count(), *mu_leaf_[a], field_.kernel(), f));
    }
    return s;
  }

  // int W dmu = sum_Q K(Q) sigma(Q) mu(Q) I(Q)^{p'-1}.
  double wolff_integral() const { return wolff_integral(field_.kernel()); }
  double wolff_integral(const std::vector<double>& outer) const {
    double s = 0.0;
    for (std::size_t id = 0; id < outer.size(); ++id) {
      s += mul0(mul0(mul0(outer[id], field_.sigma()[id]), mu_mass_[id]), inner_pow_[id]);
    }
    return s;
  }

  // W at every mu-atom (0 outside the window).
  std::vector<double> wolff_at_mu(const std::vector<double>& outer) const {
    std::vector<double> out(mu_.size(), 0.0);
    for (std::size_t a = 0; a < mu_.size(); ++a) {
      if (mu_leaf_[a]) out[a] = wolff_leaf(*mu_leaf_[a], outer);
    }
    return out;
  }
  std::vector<double> wolff_at_mu() const { return wolff_at_mu(field_.kernel()); }

  std::vector<double> wolff_bar_at_mu() const {
    std::vector<double> out(mu_.size(), 0.0);
    for (std::size_t a = 0; a < mu_.size(); ++a) {
      if (mu_leaf_[a]) out[a] = wolff_bar_leaf(*mu_leaf_[a]);
    }
    return out;
  }

  // int M^{p'} dsigma.
  double maximal_energy() const {
    double s = 0.0;
    for (std::size_t a = 0; a < sigma_.size(); ++a) {
      if (auto l = window().leaf_id(sigma_.position(a))) {
        s += mul0(sigma_.weight(a), pow0(maximal_leaf(*l), p_prime_));
      }
    }
    return s;
  }

  const AtomicMeasure& sigma_measure() const { return sigma_; }
  const AtomicMeasure& mu_measure() const { return mu_; }

 private:
  BarField field_;
  AtomicMeasure sigma_;
  AtomicMeasure mu_;
  double p_prime_;
  std::vector<double> mu_mass_;
  std::vector<std::optional<std::size_t>> mu_leaf_;
  std::vector<double> inner_;
  std::vector<double> inner_pow_;
};

inline double t_dyadic(const DyadicKernelMap& k, const AtomicMeasure& nu, const LatticeWindow& w,
                       PointView x) {
  require_dimension(w.dimension(), nu.dimension(), "nu");
  const auto leaf = w.leaf_id(x);
  if (!leaf) throw OutOfWindowError("query point lies outside the window root region");
  return chain_sum(parent_table(w), w.root_count(), *leaf, k.on(w), window_masses(nu, w));
}

inline double energy_dyadic(const DyadicKernelMap& k, const AtomicMeasure& mu,
                            const AtomicMeasure& sigma, const Exponents& e,
                            const LatticeWindow& w) {
  return DyadicPotentials(k, sigma, mu, w, e.p_prime).energy();
}

inline double wolff_dyadic(const DyadicKernelMap& k, const AtomicMeasure& sigma,
                           const AtomicMeasure& mu, const Exponents& e, const LatticeWindow& w,
                           PointView x) {
  return DyadicPotentials(k, sigma, mu, w, e.p_prime).wolff(x);
}

inline double wolff_bar_dyadic(const DyadicKernelMap& k, const AtomicMeasure& sigma,
                               const AtomicMeasure& mu, const Exponents& e,
                               const LatticeWindow& w, PointView x) {
  return DyadicPotentials(k, sigma, mu, w, e.p_prime).wolff_bar(x);
}

// M_K does not depend on p'; any valid value serves for the precomputation.
inline double maximal_dyadic(const DyadicKernelMap& k, const AtomicMeasure& sigma,
                             const AtomicMeasure& mu, const LatticeWindow& w, PointView x) {
  return DyadicPotentials(k, sigma, mu, w, 2.0).maximal(x);
}

// max over the chain of x of nu(Q)/sigma(Q), cubes with sigma(Q) = 0 skipped.
inline double hl_maximal_dyadic(const AtomicMeasure& sigma, const AtomicMeasure& nu,
                                const LatticeWindow& w, PointView x) {
  const auto leaf = w.leaf_id(x);
  if (!leaf) throw OutOfWindowError("query point lies outside the window root region");
  const auto s = window_masses(sigma, w);
  const auto v = window_masses(nu, w);
  std::vector<std::size_t> chain;
  w.chain_of_leaf(*leaf, chain);
  double best = 0.0;
  bool any = false;
  for (std::size_t id : chain) {
    if (s[id] <= 0.0) continue;
    any = true;
    best = std::max(best, v[id] / s[id]);
  }
  if (!any) throw DegenerateInputError("every cube of the chain has zero base mass");
  return best;
}

struct AFunctionals {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
};

// A1 = int (sum lambda_Q/sigma(Q) chi_Q)^s dsigma
// A2 = sum lambda_Q (Lambda(Q)/sigma(Q))^{s-1}
// A3 = int sup_{Q ∋ x} (Lambda(Q)/sigma(Q))^s dsigma
// with Lambda(Q) = sum_{Q' subset Q} lambda_{Q'}. Weights on cubes with
// sigma(Q) = 0 are set to zero (standing convention).
inline AFunctionals a_functionals(std::vector<double> lambda, const AtomicMeasure& sigma, double s,
                                  const LatticeWindow& w) {
  if (!(s > 1.0)) throw InvalidArgument("a_functionals needs s > 1");
  if (lambda.size() != w.cube_count()) throw InvalidArgument("lambda needs one weight per cube");
  const auto mass = window_masses(sigma, w);
  for (std::size_t id = 0; id < lambda.size(); ++id) {
    if (!(lambda[id] >= 0.0) || !std::isfinite(lambda[id])) {
      throw InvalidArgument("lambda weights must be finite and >= 0");
    }
    if (mass[id] == 0.0) lambda[id] = 0.0;
  }
  const auto parent = parent_table(w);
  const std::size_t roots = w.root_count();
  std::vector<double> subtree(lambda);
  for (std::size_t id = subtree.size(); id-- > roots;) subtree[parent[id]] += subtree[id];
  std::vector<double> ratio(lambda.size()), density(lambda.size());
  for (std::size_t id = 0; id < lambda.size(); ++id) {
    ratio[id] = div0(subtree[id], mass[id]);
    density[id] = div0(lambda[id], mass[id]);
  }
  AFunctionals out;
  for (std::size_t id = 0; id < lambda.size(); ++id) {
    out.a2 += mul0(lambda[id], pow0(ratio[id], s - 1.0));
  }
  for (std::size_t a = 0; a < sigma.size(); ++a) {
    const auto leaf = w.leaf_id(sigma.position(a));
    if (!leaf) continue;
    double sum = 0.0;
    double sup = 0.0;
    std::size_t id = *leaf;
    for (;;) {
      sum += density[id];
      sup = std::max(sup, ratio[id]);
      if (id < roots) break;
      id = parent[id];
    }
    out.a1 += mul0(sigma.weight(a), pow0(sum, s));
    out.a3 += mul0(sigma.weight(a), pow0(sup, s));
  }
  return out;
}

// lambda_Q = K(Q) mu(Q) sigma(Q): the substitution turning (A1, A2, A3)
// into (E, int W dmu, int M^{p'} dsigma).
inline std::vector<double> wolff_lambda(const DyadicPotentials& d) {
  std::vector<double> lambda(d.kernel().size());
  for (std::size_t id = 0; id < lambda.size(); ++id) {
    lambda[id] = mul0(mul0(d.kernel()[id], d.mu_mass()[id]), d.sigma_mass()[id]);
  }
  return lambda;
}

}  // namespace wolff
