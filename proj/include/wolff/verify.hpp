#pragma once

// Verification harness: identity checks, proof-constant checks, duality and
// trace probes, the log-kernel counterexample, shifted-lattice averaging and
// truncation sweeps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wolff/continuous.hpp"
#include "wolff/dyadic_kernel.hpp"
#include "wolff/extended.hpp"
#include "wolff/parallel.hpp"
#include "wolff/potentials.hpp"
#include "wolff/radial_profile.hpp"
#include "wolff/random.hpp"

namespace wolff {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One row of a verification report.
struct CheckReport {
  std::string name;
  std::string instance;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> values;
  double value = kNaN;
  double lower_band = kNaN;
  double upper_band = kNaN;
  bool applicable = true;
  bool pass = false;
  std::string note;
};

struct Band {
  double lower = 1e-3;
  double upper = 1e3;
  bool contains(double v) const { return std::isfinite(v) && v >= lower && v <= upper; }
};

// ---------------------------------------------------------------- identities

struct FubiniResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double error = 0.0;
  bool applicable = true;
};

inline FubiniResult check_fubini(const DyadicPotentials& d) {
  FubiniResult r;
  r.lhs = d.energy();
  r.rhs = d.fubini_rhs();
  if (!std::isfinite(r.lhs) || !std::isfinite(r.rhs)) {
    r.applicable = false;
    r.error = kNaN;
    return r;
  }
  r.error = std::fabs(r.lhs - r.rhs) / std::max(r.lhs, 1e-300);
  if (r.lhs == 0.0 && r.rhs == 0.0) r.error = 0.0;
  return r;
}

struct AChainResult {
  AFunctionals a;
  double s = 0.0;
  double a1_over_a2 = 0.0;
  double holder = 0.0;  // A2 / (A1^{1/s} A3^{1/s'})
  double a3_over_a1 = 0.0;
  double a1_over_a3 = 0.0;
  bool pass = false;
};

inline AChainResult check_a_chain(std::vector<double> lambda, const AtomicMeasure& sigma, double s,
                                  const LatticeWindow& w) {
  AChainResult r;
  r.s = s;
  r.a = a_functionals(std::move(lambda), sigma, s, w);
  if (r.a.a1 == 0.0 && r.a.a2 == 0.0 && r.a.a3 == 0.0) {
    throw DegenerateInputError("all lambda weights vanish on cubes of positive mass");
  }
  const double s_conj = s / (s - 1.0);
  r.a1_over_a2 = r.a.a1 / r.a.a2;
  r.holder = r.a.a2 / (std::pow(r.a.a1, 1.0 / s) * std::pow(r.a.a3, 1.0 / s_conj));
  r.a3_over_a1 = r.a.a3 / r.a.a1;
  r.a1_over_a3 = r.a.a1 / r.a.a3;
  const bool finite = std::isfinite(r.a1_over_a2) && std::isfinite(r.holder) &&
                      std::isfinite(r.a3_over_a1) && std::isfinite(r.a1_over_a3);
  const bool c1 = s > 2.0 || r.a1_over_a2 <= s;
  r.pass = finite && c1 && r.holder <= 1.0 + 1e-12;
  return r;
}

// E / int W dmu; nullopt when either side is zero or infinite.
inline std::optional<double> check_theorem_a(const DyadicPotentials& d) {
  const double e = d.energy();
  const double w = d.wolff_integral();
  if (!(e > 0.0) || !(w > 0.0) || !std::isfinite(e) || !std::isfinite(w)) return std::nullopt;
  return e / w;
}

// Along one chain with weights a_0 (coarsest) .. a_D (finest):
//   lhs = (sum a_i)^s,  rhs = s sum a_i (sum_{j >= i} a_j)^{s-1}.
inline std::pair<double, double> summation_by_parts(const std::vector<double>& chain, double s) {
  double tail = 0.0;
  double rhs = 0.0;
  for (std::size_t i = chain.size(); i-- > 0;) {
    tail += chain[i];
    rhs += chain[i] * std::pow(tail, s - 1.0);
  }
  return {std::pow(tail, s), s * rhs};
}

struct SummationByPartsResult {
  std::size_t points = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max lhs / rhs
};

// lambda_Q = K(Q) mu(Q) along the chain of every sigma- and mu-atom in the window.
inline SummationByPartsResult check_summation_by_parts(const DyadicPotentials& d, double s) {
  SummationByPartsResult r;
  const auto& w = d.window();
  std::vector<std::size_t> chain;
  std::vector<double> lambda;
  auto visit = [&](const AtomicMeasure& m) {
    for (std::size_t a = 0; a < m.size(); ++a) {
      const auto leaf = w.leaf_id(m.position(a));
      if (!leaf) continue;
      w.chain_of_leaf(*leaf, chain);
      lambda.clear();
      for (std::size_t id : chain) lambda.push_back(mul0(d.kernel()[id], d.mu_mass()[id]));
      const auto [lhs, rhs] = summation_by_parts(lambda, s);
      ++r.points;
      if (lhs > rhs) ++r.violations;
      if (rhs > 0.0) r.worst_ratio = std::max(r.worst_ratio, lhs / rhs);
    }
  };
  visit(d.sigma_measure());
  visit(d.mu_measure());
  return r;
}

// ---------------------------------------------------------------- trace probes

// T[f dsigma] at every mu-atom, for f sampled on sigma-atoms.
inline std::vector<double> t_of_density_at_mu(const DyadicPotentials& d, const std::vector<double>& f) {
  const auto& w = d.window();
  const auto mass = window_masses(d.sigma_measure().reweighted(f), w);
  const auto& mu = d.mu_measure();
  std::vector<double> out(mu.size(), 0.0);
  for (std::size_t a = 0; a < mu.size(); ++a) {
    if (auto l = w.leaf_id(mu.position(a))) {
      out[a] = chain_sum(d.field().parents(), w.root_count(), *l, d.kernel(), mass);
    }
  }
  return out;
}

// T[g dmu] at every sigma-atom, for g sampled on mu-atoms.
inline std::vector<double> t_of_density_at_sigma(const DyadicPotentials& d,
                                                 const std::vector<double>& g) {
  const auto& w = d.window();
  const auto mass = window_masses(d.mu_measure().reweighted(g), w);
  const auto& sigma = d.sigma_measure();
  std::vector<double> out(sigma.size(), 0.0);
  for (std::size_t a = 0; a < sigma.size(); ++a) {
    if (auto l = w.leaf_id(sigma.position(a))) {
      out[a] = chain_sum(d.field().parents(), w.root_count(), *l, d.kernel(), mass);
    }
  }
  return out;
}

inline double lebesgue_norm(const AtomicMeasure& m, const std::vector<double>& f, double p) {
  double s = 0.0;
  for (std::size_t a = 0; a < m.size(); ++a) s += mul0(m.weight(a), pow0(f[a], p));
  return pow0(s, 1.0 / p);
}

// ||T f||_{L^q(mu)} / ||f||_{L^p(sigma)}; 0 when f vanishes sigma-a.e.
inline double trace_ratio(const DyadicPotentials& d, const std::vector<double>& f, double p,
                          double q) {
  const double denom = lebesgue_norm(d.sigma_measure(), f, p);
  if (denom == 0.0) return 0.0;
  return lebesgue_norm(d.mu_measure(), t_of_density_at_mu(d, f), q) / denom;
}

inline std::vector<double> random_density(Rng& rng, std::size_t size) {
  std::vector<double> f(size);
  const bool sparse = rng.uniform() < 0.3;
  for (auto& v : f) v = (sparse && rng.uniform() < 0.8) ? 0.0 : rng.log_uniform2(-8.0, 8.0);
  return f;
}

struct Q1Duality {
  double dual_constant = 0.0;  // E^{1/p'}
  double achieved = 0.0;       // ratio at f* = (T mu)^{p'-1}
  double best_probe = 0.0;     // max ratio over random probes
  std::size_t probes = 0;
  bool energy_finite = true;
  bool pass = false;
};

inline Q1Duality trace_constant_q1(const DyadicPotentials& d, std::size_t probes,
                                   std::uint64_t seed) {
  Q1Duality r;
  const double pp = d.p_prime();
  const double p = pp / (pp - 1.0);
  const double e = d.energy();
  if (!std::isfinite(e)) {
    r.energy_finite = false;
    r.dual_constant = kInf;
    return r;
  }
  r.dual_constant = pow0(e, 1.0 / pp);
  const auto t = d.t_at_sigma();
  std::vector<double> fstar(t.size());
  for (std::size_t a = 0; a < t.size(); ++a) fstar[a] = pow0(t[a], pp - 1.0);
  r.achieved = trace_ratio(d, fstar, p, 1.0);
  r.probes = probes;
  std::vector<double> ratios(probes, 0.0);
  parallel_for(probes, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, i);
    ratios[i] = trace_ratio(d, random_density(rng, d.sigma_measure().size()), p, 1.0);
  });
  for (double v : ratios) r.best_probe = std::max(r.best_probe, v);
  const bool agree = r.dual_constant == 0.0 ? r.achieved == 0.0
                                            : rel_diff(r.achieved, r.dual_constant) <= 1e-8;
  r.pass = agree && r.best_probe <= r.dual_constant * (1.0 + 1e-10);
  return r;
}

struct UpperTriangle {
  double trace_exponent = 0.0;
  double wolff_norm = 0.0;      // ||W||_{L^t(mu)}
  double empirical_sup = 0.0;   // max probe ratio ||Tf||_{L^q(mu)} / ||f||_{L^p(sigma)}
  double normalized = 0.0;      // empirical_sup / wolff_norm^{1/p'}
  double dlbo = 0.0;
  bool pass = false;            // equivalence evidence: DLBO finite and ratio in band
};

// Dyadic Hardy-Littlewood maximal function of psi dmu relative to mu, at mu-atoms.
inline std::vector<double> hl_maximal_at_mu(const DyadicPotentials& d, const std::vector<double>& psi) {
  const auto& w = d.window();
  const auto& mu = d.mu_measure();
  const auto num = window_masses(mu.reweighted(psi), w);
  std::vector<double> out(mu.size(), 0.0);
  std::vector<std::size_t> chain;
  for (std::size_t a = 0; a < mu.size(); ++a) {
    const auto l = w.leaf_id(mu.position(a));
    if (!l) continue;
    w.chain_of_leaf(*l, chain);
    for (std::size_t id : chain) out[a] = std::max(out[a], div0(num[id], d.mu_mass()[id]));
  }
  return out;
}

inline UpperTriangle trace_test_upper_triangle(const DyadicPotentials& d, const Exponents& e,
                                               std::size_t trials, std::uint64_t seed,
                                               Band band = {}) {
  if (!e.q || !(*e.q > 1.0)) throw InvalidArgument("upper triangle trace test needs 1 < q < p");
  const double q = *e.q;
  const double p = e.p;
  const double pp = e.p_prime;
  UpperTriangle r;
  r.trace_exponent = *e.trace_exponent();
  const auto wv = d.wolff_at_mu();
  r.wolff_norm = lebesgue_norm(d.mu_measure(), wv, r.trace_exponent);
  r.dlbo = d.mu_measure().empty() ? 1.0 : dlbo_constant(d.field());

  // Primal random densities plus dual-built ones: for g on mu-atoms the
  // density f = T[g dmu]^{p'-1} is the Hoelder-optimal answer to g.
  std::vector<double> ratios(trials + 1, 0.0);
  auto dual_probe = [&](const std::vector<double>& g) {
    auto h = t_of_density_at_sigma(d, g);
    for (auto& v : h) v = pow0(v, pp - 1.0);
    return trace_ratio(d, h, p, q);
  };
  ratios[trials] = dual_probe(std::vector<double>(d.mu_measure().size(), 1.0));
  parallel_for(trials, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, i);
    if (i % 2 == 0) {
      ratios[i] = trace_ratio(d, random_density(rng, d.sigma_measure().size()), p, q);
    } else {
      auto g = hl_maximal_at_mu(d, random_density(rng, d.mu_measure().size()));
      for (auto& v : g) v = pow0(v, 1.0 / pp);
      ratios[i] = dual_probe(g);
    }
  });
  for (double v : ratios) r.empirical_sup = std::max(r.empirical_sup, v);
  if (r.wolff_norm > 0.0) r.normalized = r.empirical_sup / pow0(r.wolff_norm, 1.0 / pp);
  r.pass = std::isfinite(r.dlbo) && (r.wolff_norm == 0.0 ? r.empirical_sup == 0.0
                                                          : band.contains(r.normalized));
  return r;
}

// ---------------------------------------------------------------- counterexample

struct SeriesPair {
  double s_e = 0.0;
  double s_wbar = 0.0;
};

inline void require_counterexample_parameters(double beta, double c, int n) {
  if (!(beta > 1.0 && beta <= 1.5)) throw InvalidArgument("counterexample needs 1 < beta <= 3/2");
  if (n < 1) throw InvalidArgument("counterexample dimension must be >= 1");
  if (!(c >= std::exp(beta / n) * (1.0 - 1e-12))) {
    throw InvalidArgument("counterexample needs C >= e^(beta/n)");
  }
}

// S_E(L) = sum_{l=0}^L log^-beta(C 2^l), S_Wbar(L) = sum_{l=0}^L log^-(2 beta - 2)(C 2^l).
inline SeriesPair counterexample_series(double beta, double c, int n, long long terms) {
  require_counterexample_parameters(beta, c, n);
  if (terms < 0) throw InvalidArgument("term count must be >= 0");
  Compensated se, sw;
  const double log_c = std::log(c);
  for (long long l = 0; l <= terms; ++l) {
    const double lg = log_c + static_cast<double>(l) * std::numbers::ln2;
    se += std::pow(lg, -beta);
    sw += std::pow(lg, -(2.0 * beta - 2.0));
  }
  return {se.value(), sw.value()};
}

struct CounterexampleFields {
  int depth = 0;
  double energy = 0.0;
  double min_interior_wbar = 0.0;
  double wolff_integral = 0.0;
  std::size_t dominance_violations = 0;  // atoms with W > Wbar
};

// n = 1: sigma Lebesgue on [-1, 2), mu Lebesgue on [0, 1), both as grids at
// level D; window levels 0..D over [-1, 2); p' = 2 as in the remark.
// "Interior" atoms lie in [1/4, 3/4).
inline CounterexampleFields check_counterexample_fields(double beta, double c, int depth) {
  require_counterexample_parameters(beta, c, 1);
  if (depth < 0 || depth > 20) throw InvalidArgument("counterexample depth must lie in [0, 20]");
  const LatticeWindow w = LatticeWindow::from_box(0, depth, {-1.0}, {2.0}, {0.0});
  const AtomicMeasure sigma = lebesgue_grid({-1.0}, {2.0}, depth);
  const AtomicMeasure mu = lebesgue_grid({0.0}, {1.0}, depth);
  const DyadicPotentials d(DyadicKernelMap::radial(RadialKernel::log_kernel(beta, c, 1)), sigma,
                           mu, w, 2.0);
  CounterexampleFields r;
  r.depth = depth;
  r.energy = d.energy();
  r.wolff_integral = d.wolff_integral();
  const auto wv = d.wolff_at_mu();
  const auto wb = d.wolff_bar_at_mu();
  r.min_interior_wbar = kInf;
  for (std::size_t a = 0; a < mu.size(); ++a) {
    const double x = mu.position(a)[0];
    if (wv[a] > wb[a] * (1.0 + 1e-12)) ++r.dominance_violations;
    if (x >= 0.25 && x < 0.75) r.min_interior_wbar = std::min(r.min_interior_wbar, wb[a]);
  }
  return r;
}

struct CounterexampleSweep {
  std::vector<CounterexampleFields> rows;
  double energy_last_change = 0.0;   // relative change of E on the last step
  bool energy_stable = false;        // last change < energy_change_max
  bool wbar_increasing = false;      // strictly, across the sweep
  bool wbar_dominates_series = false;  // Wbar increments >= S_Wbar increments
  bool dominance_holds = false;
};

inline CounterexampleSweep counterexample_sweep(double beta, double c, const std::vector<int>& depths,
                                               double energy_change_max) {
  if (depths.size() < 2) throw InvalidArgument("sweep needs at least two depths");
  for (std::size_t i = 1; i < depths.size(); ++i) {
    if (depths[i] <= depths[i - 1]) throw InvalidArgument("sweep depths must increase");
  }
  CounterexampleSweep s;
  s.rows.resize(depths.size(), CounterexampleFields{});
  parallel_for(depths.size(), [&](std::size_t i) {
    s.rows[i] = check_counterexample_fields(beta, c, depths[i]);
  });
  const auto& last = s.rows.back();
  const auto& prev = s.rows[s.rows.size() - 2];
  s.energy_last_change = std::fabs(last.energy - prev.energy) / prev.energy;
  s.energy_stable = s.energy_last_change < energy_change_max;
  s.wbar_increasing = true;
  s.wbar_dominates_series = true;
  s.dominance_holds = true;
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    if (s.rows[i].dominance_violations > 0) s.dominance_holds = false;
    if (i == 0) continue;
    const double inc = s.rows[i].min_interior_wbar - s.rows[i - 1].min_interior_wbar;
    if (!(inc > 0.0)) s.wbar_increasing = false;
    const double series_inc = counterexample_series(beta, c, 1, depths[i]).s_wbar -
                              counterexample_series(beta, c, 1, depths[i - 1]).s_wbar;
    if (!(inc >= series_inc)) s.wbar_dominates_series = false;
  }
  return s;
}

// ---------------------------------------------------------------- shifted average

// Smallest j0 with 2^j0 > 2 sqrt(n) + 1.
inline int shifted_average_j0(int n) {
  const double bound = 2.0 * std::sqrt(double(n)) + 1.0;
  int j0 = 0;
  while (std::exp2(j0) <= bound) ++j0;
  return j0;
}

inline double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

// sum over all levels l of k(scale 2^-l) mu(Q_l), Q_l the cube of the
// lattice D + z at level l containing x. Fine levels stop once no atom can
// share x's cube; coarse levels stop once the mass reaches its final value
// (atoms in x's orthant relative to z), after which the remaining terms are
// summed in closed form.
inline double t_shifted_lattice(const RadialKernel& k, double scale, const AtomicMeasure& mu,
                                PointView x, const std::vector<double>& z) {
  const int n = mu.dimension();
  require_dimension(n, static_cast<int>(x.size()), "shifted T point");
  double total_w = 0.0;
  double d_min = kInf;
  double extent = 0.0;
  double final_mass = 0.0;
  for (std::size_t a = 0; a < mu.size(); ++a) {
    if (mu.weight(a) == 0.0) continue;
    const PointView y = mu.position(a);
    const double d = distance(y, x);
    if (d == 0.0) return kInf;
    d_min = std::min(d_min, d);
    total_w += mu.weight(a);
    bool same = true;
    for (int i = 0; i < n; ++i) {
      extent = std::max({extent, std::fabs(y[i] - z[i]), std::fabs(x[i] - z[i])});
      same = same && ((y[i] - z[i] >= 0.0) == (x[i] - z[i] >= 0.0));
    }
    if (same) final_mass += mu.weight(a);
  }
  if (total_w == 0.0) return 0.0;
  const int l_fine = static_cast<int>(std::ceil(std::log2(std::sqrt(double(n)) / d_min))) + 1;
  const int l_coarse = static_cast<int>(std::floor(-std::log2(extent))) - 1;
  double s = 0.0;
  for (int l = l_fine; l >= l_coarse; --l) {
    double m = 0.0;
    for (std::size_t a = 0; a < mu.size(); ++a) {
      const PointView y = mu.position(a);
      bool same = true;
      for (int i = 0; i < n && same; ++i) {
        same = lattice_coordinate(y[i], z[i], l) == lattice_coordinate(x[i], z[i], l);
      }
      if (same) m += mu.weight(a);
    }
    s += mul0(k(scale * std::ldexp(1.0, -l)), m);
  }
  if (final_mass == 0.0) return s;
  // Levels below l_coarse: side 2^-l for l = l_coarse - 1, l_coarse - 2, ...
  const double first = scale * std::ldexp(1.0, -(l_coarse - 1));
  if (auto cut = k.cutoff()) {
    for (double r = first; r <= *cut; r *= 2.0) s += k(r) * final_mass;
    return s;
  }
  switch (k.family()) {
    case RadialKernel::Family::riesz: {
      const double ratio = std::exp2(k.alpha() - k.dimension());
      return s + k(first) * final_mass / (1.0 - ratio);
    }
    case RadialKernel::Family::constant: return k.constant_value() == 0.0 ? s : kInf;
    case RadialKernel::Family::log: return s;  // vanishes beyond r = 1
  }
  return s;
}

struct ShiftedAverage {
  int j = 0;
  int j0 = 0;
  std::size_t shifts = 0;
  std::vector<double> lhs;       // T_k^{2^j}[mu](x)
  std::vector<double> estimate;  // 2^{-jn} |B| mean_z T_{Ktilde, D_z}[mu](x)
  std::vector<double> std_error; // same scale
  std::vector<double> ratio;     // lhs / (estimate - 3 std_error)
  double max_ratio = 0.0;
  bool vacuous = false;
  bool pass = false;
};

// Monte Carlo check of T_k^{2^j}[mu](x) <= C 2^{-jn} int_{|z| <= 2^{j+j0}} T_{Ktilde, D_z}[mu](x) dz
// with Ktilde(Q) = k(r_Q / 4). Shift draws are split into fixed chunks, each
// with its own stream, so results do not depend on the thread count.
inline ShiftedAverage shifted_average_check(const RadialKernel& k, const AtomicMeasure& mu, int j,
                                            std::size_t shifts, const std::vector<Point>& xs,
                                            std::uint64_t seed, double bound = 1e3) {
  if (shifts < 2) throw InvalidArgument("shifted average needs at least two shift draws");
  if (xs.empty()) throw InvalidArgument("shifted average needs sample points");
  const int n = mu.dimension();
  ShiftedAverage r;
  r.j = j;
  r.j0 = shifted_average_j0(n);
  r.shifts = shifts;
  const double radius = std::exp2(j + r.j0);
  const double volume = unit_ball_volume(n) * std::pow(radius, n);
  const double norm = std::exp2(-double(j) * n) * volume;

  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = (shifts + kChunk - 1) / kChunk;
  const std::size_t nx = xs.size();
  std::vector<double> sum(chunks * nx, 0.0), sum_sq(chunks * nx, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    Rng rng = Rng::stream(seed, c);
    std::vector<double> z(n);
    const std::size_t count = std::min(kChunk, shifts - c * kChunk);
    for (std::size_t s = 0; s < count; ++s) {
      for (;;) {
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) {
          z[i] = rng.uniform(-radius, radius);
          r2 += z[i] * z[i];
        }
        if (r2 <= radius * radius) break;
      }
      for (std::size_t i = 0; i < nx; ++i) {
        const double t = t_shifted_lattice(k, 0.25, mu, xs[i], z);
        sum[c * nx + i] += t;
        sum_sq[c * nx + i] += t * t;
      }
    }
  });
  r.vacuous = true;
  bool ok = true;
  for (std::size_t i = 0; i < nx; ++i) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) {
      s1 += sum[c * nx + i];
      s2 += sum_sq[c * nx + i];
    }
    const double m = s1 / double(shifts);
    const double var = std::max(0.0, (s2 - double(shifts) * m * m) / double(shifts - 1));
    const double se = std::sqrt(var / double(shifts));
    const double lhs = t_continuous_trunc(k, mu, std::exp2(j), xs[i]);
    r.lhs.push_back(lhs);
    r.estimate.push_back(norm * m);
    r.std_error.push_back(norm * se);
    const double lower = norm * (m - 3.0 * se);
    double ratio = 0.0;
    if (lhs == 0.0) {
      ratio = 0.0;
    } else {
      r.vacuous = false;
      ratio = (lower > 0.0 && std::isfinite(lhs)) ? lhs / lower : kInf;
    }
    r.ratio.push_back(ratio);
    r.max_ratio = std::max(r.max_ratio, ratio);
    if (!(ratio <= bound)) ok = false;
  }
  r.pass = ok;
  return r;
}

// ---------------------------------------------------------------- kernel lemmas

struct KernelDilation {
  double c = 1.0;
  double sum_ratio = 0.0;   // int W_c dmu / int W dmu
  double norm_ratio = 0.0;  // ||W_c||_{L^r(mu)} / ||W||_{L^r(mu)}
  double r = 1.0;
};

// W_c uses the outer kernel k(c r_Q) with the undilated Kbar inside.
inline KernelDilation check_kernel_dilation(const RadialKernel& k, const AtomicMeasure& sigma,
                                            const AtomicMeasure& mu, double p_prime,
                                            const LatticeWindow& w, double c, double r = 1.0) {
  if (!(c > 0.0)) throw InvalidArgument("dilation factor must be positive");
  if (!(r >= 1.0)) throw InvalidArgument("dilation norm exponent must be >= 1");
  const DyadicPotentials d(DyadicKernelMap::radial(k), sigma, mu, w, p_prime);
  const auto outer = DyadicKernelMap::radial(k, c).on(w);
  KernelDilation out;
  out.c = c;
  out.r = r;
  out.sum_ratio = div0(d.wolff_integral(outer), d.wolff_integral());
  out.norm_ratio = div0(lebesgue_norm(mu, d.wolff_at_mu(outer), r),
                        lebesgue_norm(mu, d.wolff_at_mu(), r));
  return out;
}

struct TwoSided {
  double min = kInf;
  double max = 0.0;
  std::size_t samples = 0;
  void add(double v) {
    if (!std::isfinite(v) || !(v > 0.0)) return;
    min = std::min(min, v);
    max = std::max(max, v);
    ++samples;
  }
};

struct BarLemmas {
  TwoSided reformulation;  // ball average of k / kbar(r)(x)
  TwoSided relationship;   // Kbar(Q)(x) / kbar(r_Q)(x)
  TwoSided doubling;       // kbar(r)(x) / kbar(2r)(x)
};

inline BarLemmas check_bar_lemmas(const RadialKernel& k, const AtomicMeasure& sigma,
                                  const LatticeWindow& w, const std::vector<Point>& xs,
                                  const std::vector<double>& radii) {
  BarLemmas out;
  const BarField field = bar_field(DyadicKernelMap::radial(k), sigma, w);
  for (const auto& x : xs) {
    for (double r : radii) {
      const double mass = ball_mass(sigma, x, r);
      if (mass == 0.0) continue;
      const double kb = bar_k(k, sigma, x, r);
      out.reformulation.add(t_continuous_trunc(k, sigma, r, x) / mass / kb);
      const double kb2 = bar_k(k, sigma, x, 2.0 * r);
      out.doubling.add(kb / kb2);
    }
    const auto leaf = w.leaf_id(x);
    if (!leaf) continue;
    std::vector<std::size_t> chain;
    w.chain_of_leaf(*leaf, chain);
    for (std::size_t id : chain) {
      const double kq = field.value(id, *leaf);
      const double kb = bar_k(k, sigma, x, std::ldexp(1.0, -w.level_of(id)));
      if (kb > 0.0) out.relationship.add(kq / kb);
    }
  }
  if (out.reformulation.samples == 0 && out.relationship.samples == 0) {
    throw DegenerateInputError("every bar-lemma sample is degenerate");
  }
  return out;
}

// max over xs of the c-dilated dyadic Wolff sum (c = 2 sqrt n) divided by
// the continuous Wolff potential.
inline TwoSided check_dyadic_vs_continuous(const RadialKernel& k, const AtomicMeasure& sigma,
                                           const AtomicMeasure& mu, double p_prime,
                                           const LatticeWindow& w, const std::vector<Point>& xs) {
  const DyadicPotentials d(DyadicKernelMap::radial(k), sigma, mu, w, p_prime);
  const double c = 2.0 * std::sqrt(double(w.dimension()));
  const auto outer = DyadicKernelMap::radial(k, c).on(w);
  TwoSided out;
  for (const auto& x : xs) {
    const auto leaf = w.leaf_id(x);
    if (!leaf) continue;
    const double dyadic = d.wolff_leaf(*leaf, outer);
    const double cont = wolff_continuous(k, sigma, mu, p_prime, x);
    if (dyadic == 0.0) continue;
    out.add(cont > 0.0 ? dyadic / cont : kInf);
    if (cont == 0.0) out.max = kInf;
  }
  return out;
}

// ---------------------------------------------------------------- truncation

struct SweepRow {
  int depth = 0;
  double value = 0.0;
  double rel_change = kNaN;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  bool converged = false;
};

// Re-evaluates `check(depth)` on increasing depths; converged iff the last
// successive relative change is <= tol.
inline SweepResult truncation_sweep(const std::vector<int>& depths,
                                    const std::function<double(int)>& check, double tol) {
  if (depths.empty()) throw InvalidArgument("truncation sweep needs depths");
  for (std::size_t i = 1; i < depths.size(); ++i) {
    if (depths[i] <= depths[i - 1]) throw InvalidArgument("sweep depths must increase");
  }
  SweepResult r;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    SweepRow row{depths[i], check(depths[i]), kNaN};
    if (i > 0) row.rel_change = rel_diff(row.value, r.rows.back().value);
    r.rows.push_back(row);
  }
  r.converged = r.rows.size() < 2 || r.rows.back().rel_change <= tol;
  return r;
}

}  // namespace wolff
