// Acceptance runner: `acceptance N` evaluates criterion N (1..11) and prints
// one line "criterion N: PASS|FAIL <summary>"; without arguments it runs all
// of them. Exit status is 0 iff every evaluated criterion passes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "scenario.hpp"
#include "wolff/wolff.hpp"

using namespace wolff;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    details.push_back(std::string(ok ? "  ok   " : "  FAIL ") + what);
  }
};

std::string fmt(double x) { return wolffcli::format_number(x); }

std::string fmt_short(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

constexpr std::uint64_t kSuiteSeed = 20240611;
constexpr int kSuiteInstances = 100;
const std::vector<double> kPrimes{1.5, 2.0, 3.0};

// int T[(T mu)^(p'-1) dsigma] dmu, assembled from the density route rather
// than the cube-sum identity.
double fubini_by_density(const DyadicPotentials& d) {
  auto f = d.t_at_sigma();
  for (auto& v : f) v = pow0(v, d.p_prime() - 1.0);
  const auto g = t_of_density_at_mu(d, f);
  Compensated s;
  for (std::size_t a = 0; a < d.mu_measure().size(); ++a) s += mul0(d.mu_measure().weight(a), g[a]);
  return s.value();
}

// ---------------------------------------------------------------- 1

Outcome criterion1() {
  Outcome o;
  double worst = 0.0, worst_identity = 0.0;
  std::size_t evaluated = 0;
  std::vector<double> err(kSuiteInstances, 0.0), err_identity(kSuiteInstances, 0.0);
  parallel_for(kSuiteInstances, [&](std::size_t t) {
    const auto inst = random_instance(kSuiteSeed, t);
    for (double pp : kPrimes) {
      const DyadicPotentials d(inst.kernel, inst.sigma, inst.mu, inst.window, pp);
      const double e = energy_dyadic(inst.kernel, inst.mu, inst.sigma, Exponents::from_p_prime(pp), inst.window);
      err[t] = std::max(err[t], rel_diff(e, fubini_by_density(d)));
      err_identity[t] = std::max(err_identity[t], check_fubini(d).error);
    }
  });
  for (int t = 0; t < kSuiteInstances; ++t) {
    worst = std::max(worst, err[t]);
    worst_identity = std::max(worst_identity, err_identity[t]);
    evaluated += kPrimes.size();
  }
  o.require(worst <= 1e-9, "max rel diff energy vs density route = " + fmt(worst) + " (<= 1e-9)");
  o.require(worst_identity <= 1e-9, "max rel diff energy vs cube-sum route = " + fmt(worst_identity));
  o.summary = std::to_string(evaluated) + " evaluations, max rel diff " + fmt_short(std::max(worst, worst_identity)) +
              " <= 1e-9";
  return o;
}

// ---------------------------------------------------------------- 2

Outcome criterion2() {
  Outcome o;
  std::vector<std::size_t> violations(kSuiteInstances, 0), points(kSuiteInstances, 0);
  std::vector<double> worst(kSuiteInstances, 0.0);
  parallel_for(kSuiteInstances, [&](std::size_t t) {
    const auto inst = random_instance(kSuiteSeed, t);
    for (double pp : kPrimes) {
      const DyadicPotentials d(inst.kernel, inst.sigma, inst.mu, inst.window, pp);
      for (double s : {1.5, 2.0, 3.0}) {
        const auto r = check_summation_by_parts(d, s);
        violations[t] += r.violations;
        points[t] += r.points;
        worst[t] = std::max(worst[t], r.worst_ratio);
      }
    }
  });
  std::size_t v = 0, p = 0;
  double w = 0.0;
  for (int t = 0; t < kSuiteInstances; ++t) {
    v += violations[t];
    p += points[t];
    w = std::max(w, worst[t]);
  }
  o.require(v == 0, std::to_string(v) + " violations over " + std::to_string(p) + " atom chains");
  o.summary = std::to_string(p) + " atom chains, " + std::to_string(v) + " violations, max lhs/rhs " + fmt_short(w);
  return o;
}

// ---------------------------------------------------------------- 3

Outcome criterion3() {
  Outcome o;
  struct Row {
    double a1_s_a2 = 0.0;
    double holder = 0.0;
    std::size_t evaluated = 0;
  };
  std::vector<Row> rows(kSuiteInstances);
  parallel_for(kSuiteInstances, [&](std::size_t t) {
    const auto inst = random_instance(kSuiteSeed, t);
    std::vector<std::vector<double>> lambdas;
    lambdas.push_back(wolff_lambda(DyadicPotentials(inst.kernel, inst.sigma, inst.mu, inst.window, 2.0)));
    Rng rng = Rng::stream(kSuiteSeed + 3, t);
    std::vector<double> random(inst.window.cube_count());
    for (auto& v : random) v = rng.uniform() < 0.3 ? 0.0 : rng.log_uniform2(-8.0, 8.0);
    lambdas.push_back(random);
    for (const auto& lambda : lambdas) {
      for (double s : {1.5, 2.0, 3.0}) {
        AChainResult r;
        try {
          r = check_a_chain(lambda, inst.sigma, s, inst.window);
        } catch (const DegenerateInputError&) {
          continue;
        }
        ++rows[t].evaluated;
        if (s <= 2.0) rows[t].a1_s_a2 = std::max(rows[t].a1_s_a2, r.a1_over_a2 / s);
        rows[t].holder = std::max(rows[t].holder, r.holder);
      }
    }
  });
  Row total;
  for (const auto& r : rows) {
    total.a1_s_a2 = std::max(total.a1_s_a2, r.a1_s_a2);
    total.holder = std::max(total.holder, r.holder);
    total.evaluated += r.evaluated;
  }
  o.require(total.a1_s_a2 <= 1.0, "max A1 / (s A2) over s in {1.5, 2} = " + fmt(total.a1_s_a2) + " (<= 1)");
  o.require(total.holder <= 1.0 + 1e-12,
            "max A2 / (A1^(1/s) A3^(1/s')) over s in {1.5, 2, 3} = " + fmt(total.holder) + " (<= 1 + 1e-12)");
  o.summary = std::to_string(total.evaluated) + " (lambda, s) pairs, max A1/(sA2) " + fmt_short(total.a1_s_a2) +
              ", max Hoelder ratio " + fmt_short(total.holder);
  return o;
}

// ---------------------------------------------------------------- 4

Outcome criterion4() {
  Outcome o;
  for (double pp : kPrimes) {
    std::vector<double> lo(kSuiteInstances, kInf), hi(kSuiteInstances, 0.0);
    parallel_for(kSuiteInstances, [&](std::size_t t) {
      const auto inst = random_instance(kSuiteSeed, t);
      if (const auto r = check_theorem_a(DyadicPotentials(inst.kernel, inst.sigma, inst.mu, inst.window, pp))) {
        lo[t] = *r;
        hi[t] = *r;
      }
    });
    const double mn = *std::min_element(lo.begin(), lo.end());
    const double mx = *std::max_element(hi.begin(), hi.end());
    o.require(mn >= 1e-3 && mx <= 1e3,
              "p'=" + fmt(pp) + ": E / int W dmu in [" + fmt(mn) + ", " + fmt(mx) + "] within [1e-3, 1e3]");
  }
  const auto w = LatticeWindow::from_box(0, 0, {0.0}, {1.0}, {0.0});
  AtomicMeasure mu(1);
  mu.add({0.5}, 0.7);
  const DyadicPotentials single(DyadicKernelMap::radial(RadialKernel::constant(1.0, 1)),
                                lebesgue_grid({0.0}, {1.0}, 4), mu, w, 2.0);
  const double ratio = check_theorem_a(single).value_or(kNaN);
  o.require(std::fabs(ratio - 1.0) <= 1e-12, "single cube ratio = " + fmt(ratio) + " (1 +- 1e-12)");
  o.summary = "ratios within [1e-3, 1e3] at p' in {1.5, 2, 3}; single cube ratio " + fmt(ratio);
  return o;
}

// ---------------------------------------------------------------- 5

Outcome criterion5() {
  Outcome o;
  InstanceLimits lim;
  lim.max_depth = 6;
  const int instances = 50;
  std::vector<double> worst(instances, 0.0);
  std::vector<std::size_t> compared(instances, 0);
  parallel_for(instances, [&](std::size_t t) {
    const auto inst = random_instance(kSuiteSeed + 5, t, lim);
    const auto& w = inst.window;
    const BarField fast = bar_field(inst.kernel, inst.sigma, w);
    const NaiveBarField naive(inst.kernel, inst.sigma, w);
    // Every cube of the window against every leaf below it that holds an atom.
    std::vector<std::size_t> chain;
    auto visit = [&](PointView x) {
      if (!w.in_root(x)) return;
      w.chain(x, chain);
      for (std::size_t id : chain) {
        const auto q = w.cube(id);
        worst[t] = std::max(worst[t], rel_diff(fast.value(q, x), naive.value(q, x)));
        ++compared[t];
      }
    };
    for (std::size_t a = 0; a < inst.sigma.size(); ++a) visit(inst.sigma.position(a));
    Rng rng = Rng::stream(kSuiteSeed + 55, t);
    const auto hi = w.root_box_hi();
    Point x(w.dimension());
    for (int s = 0; s < 50; ++s) {
      for (int i = 0; i < w.dimension(); ++i) x[i] = rng.uniform(0.0, hi[i]);
      visit(x);
    }
  });
  double mx = 0.0;
  std::size_t total = 0;
  for (int t = 0; t < instances; ++t) {
    mx = std::max(mx, worst[t]);
    total += compared[t];
  }
  o.require(mx <= 1e-12, "bar_field vs naive: max rel diff " + fmt(mx) + " over " + std::to_string(total) +
                             " (cube, point) pairs");
  double root_err = 0.0;
  for (int depth : {2, 4, 6, 8, 10, 12}) {
    const auto w = LatticeWindow::from_box(0, depth, {0.0}, {1.0}, {0.0});
    const BarField f = bar_field(DyadicKernelMap::radial(RadialKernel::riesz(0.5, 1)),
                                 lebesgue_grid({0.0}, {1.0}, depth), w);
    const double expected = (1.0 - std::exp2(-(depth + 1) / 2.0)) / (1.0 - std::exp2(-0.5));
    for (double x : {0.0, 0.25, 0.6180339887, 0.999}) {
      root_err = std::max(root_err, rel_diff(f.value(DyadicCube{0, {0}}, Point{x}), expected));
    }
  }
  o.require(root_err <= 1e-12, "Riesz + Lebesgue root value vs geometric series: max rel diff " + fmt(root_err));
  o.summary = "naive max rel diff " + fmt_short(mx) + ", geometric root max rel diff " + fmt_short(root_err);
  return o;
}

// ---------------------------------------------------------------- 6

Outcome criterion6() {
  Outcome o;
  const int instances = 50;
  std::vector<double> rel(instances, 0.0), probe(instances, 0.0);
  parallel_for(instances, [&](std::size_t t) {
    const auto inst = random_instance(kSuiteSeed + 6, t);
    const DyadicPotentials d(inst.kernel, inst.sigma, inst.mu, inst.window, kPrimes[t % 3]);
    const auto r = trace_constant_q1(d, 200, kSuiteSeed + t);
    rel[t] = rel_diff(r.achieved, r.dual_constant);
    probe[t] = r.best_probe / r.dual_constant;
  }, 1);
  const double mr = *std::max_element(rel.begin(), rel.end());
  const double mp = *std::max_element(probe.begin(), probe.end());
  o.require(mr <= 1e-8, "achieved ratio vs E^(1/p'): max rel diff " + fmt(mr) + " (<= 1e-8)");
  o.require(mp <= 1.0 + 1e-10, "best of 200 probes / E^(1/p'): max " + fmt(mp) + " (<= 1 + 1e-10)");
  o.summary = "max rel diff " + fmt_short(mr) + ", max probe ratio " + fmt_short(mp);
  return o;
}

// ---------------------------------------------------------------- 7

Outcome criterion7() {
  Outcome o;
  for (int n : {1, 2}) {
    const int depth = n == 1 ? 10 : 5;
    const auto w = LatticeWindow::from_box(0, depth, std::vector<double>(n, 0.0), std::vector<double>(n, 1.0));
    const double a = dlbo_constant(DyadicKernelMap::radial(RadialKernel::riesz(0.5, n)),
                                   lebesgue_grid(std::vector<double>(n, 0.0), std::vector<double>(n, 1.0), depth), w);
    o.require(std::fabs(a - 1.0) <= 1e-12, "n=" + std::to_string(n) + " Riesz + Lebesgue: A = " + fmt(a));
  }
  struct Case {
    int n;
    double alpha, gamma;
    int depth;
  };
  for (const Case c : {Case{1, 0.3, 0.8, 10}, Case{1, 0.6, 0.8, 10}, Case{1, 0.5, 1.0, 12}, Case{2, 1.0, 1.5, 5},
                       Case{2, 1.5, 1.0, 5}}) {
    const auto w = LatticeWindow::from_box(0, c.depth, std::vector<double>(c.n, 0.0), std::vector<double>(c.n, 1.0));
    const double a = dlbo_constant(DyadicKernelMap::radial(RadialKernel::riesz(c.alpha, c.n)),
                                   bernoulli_cascade(c.n, c.gamma, c.depth), w);
    const double bound = 1.0 / (1.0 - std::exp2(c.n - c.alpha - c.gamma));
    o.require(a <= bound + 1e-9, "n=" + std::to_string(c.n) + " alpha=" + fmt(c.alpha) + " gamma=" + fmt(c.gamma) +
                                     ": A = " + fmt(a) + " <= " + fmt(bound));
  }
  AtomicMeasure point(1);
  point.add({0.3}, 1.0);
  const auto w = LatticeWindow::from_box(0, 12, {0.0}, {1.0});
  const auto drd = reverse_doubling_check(point, w, 1.0, 1e-3);
  o.require(!drd.holds, "Riesz + single point mass: reverse doubling constant " + fmt(drd.best_constant) +
                            " reported as failing");
  o.summary = "Lebesgue A = 1, cascades under 1/(1-2^(n-alpha-gamma)), point mass DRD-failing";
  return o;
}

// ---------------------------------------------------------------- 8

Outcome criterion8() {
  Outcome o;
  const double beta = 1.5, c = std::exp(1.5);
  const auto lo = counterexample_series(beta, c, 1, 1000);
  const auto hi = counterexample_series(beta, c, 1, 1000000);
  // Independent summation: long double, reverse order (small terms first).
  long double se = 0.0L, sw = 0.0L;
  for (long long l = 1000000; l > 1000; --l) {
    const long double lg = std::log(static_cast<long double>(c)) + l * std::log(2.0L);
    se += std::pow(lg, -1.5L);
    sw += 1.0L / lg;
  }
  const double dw = hi.s_wbar - lo.s_wbar;
  const double de = hi.s_e - lo.s_e;
  o.require(std::fabs(dw - double(sw)) <= 1e-9 * dw && std::fabs(de - double(se)) <= 1e-9 * de,
            "series agree with the long double oracle: dWbar " + fmt(double(sw)) + ", dE " + fmt(double(se)));
  o.require(dw >= 9.0, "S_Wbar(1e6) - S_Wbar(1e3) = " + fmt(dw) + " (>= 9)");
  o.require(de <= 0.2, "S_E(1e6) - S_E(1e3) = " + fmt(de) + " (<= 0.2)");
  const auto sweep = counterexample_sweep(beta, c, {6, 10, 14}, 0.05);
  std::string energies, wbars;
  for (const auto& r : sweep.rows) {
    energies += " D=" + std::to_string(r.depth) + ":" + fmt_short(r.energy);
    wbars += " D=" + std::to_string(r.depth) + ":" + fmt_short(r.min_interior_wbar);
  }
  o.require(sweep.energy_stable, "E last-step change " + fmt(sweep.energy_last_change) + " (< 0.05);" + energies);
  o.require(sweep.wbar_increasing, "interior Wbar strictly increasing;" + wbars);
  o.require(sweep.wbar_dominates_series, "interior Wbar increments >= S_Wbar increments (unbounded trend)");
  o.require(sweep.dominance_holds, "W <= Wbar at every mu atom");
  o.summary = "dS_Wbar " + fmt_short(dw) + ", dS_E " + fmt_short(de) + ", E change D=10->14 " +
              fmt_short(sweep.energy_last_change) + " (limit 0.05), Wbar " + wbars.substr(1);
  return o;
}

// ---------------------------------------------------------------- 9

Outcome criterion9() {
  Outcome o;
  const int level = 12;
  AtomicMeasure delta(1);
  delta.add({0.0}, 1.0);
  const auto k = RadialKernel::riesz(0.5, 1, 1.0);
  const auto sigma = lebesgue_grid({-2.0}, {2.0}, level);
  double worst_bar = 0.0, worst_w = 0.0, worst_m = 0.0;
  std::string bar_fail, w_fail, m_fail;
  for (int e = 6; e >= 0; --e) {
    for (double f : {1.0, 1.5}) {
      const double r = std::ldexp(f, -e);
      if (r > 1.0) continue;
      const double exact = 2.0 / std::sqrt(r);
      const double err = std::fabs(bar_k(k, sigma, Point{0.0}, r) - exact) / exact;
      worst_bar = std::max(worst_bar, err);
      if (err > 0.02) bar_fail += " r=" + fmt_short(r) + ":" + fmt_short(err);
    }
  }
  for (int e = 5; e >= 1; --e) {
    for (double sign : {1.0, -1.0}) {
      const double x = sign * std::ldexp(1.0, -e);
      const double w_exact = 4.0 * std::log(1.0 / std::fabs(x));
      const double w_err = std::fabs(wolff_continuous(k, sigma, delta, 2.0, Point{x}) - w_exact) / w_exact;
      worst_w = std::max(worst_w, w_err);
      if (w_err > 0.05) w_fail += " x=" + fmt_short(x) + ":" + fmt_short(w_err);
      const double m_exact = 2.0 / std::sqrt(std::fabs(x));
      const double m_err = std::fabs(m_k_maximal(k, sigma, delta, Point{x}) - m_exact) / m_exact;
      worst_m = std::max(worst_m, m_err);
      if (m_err > 0.02 && sign > 0) m_fail += " x=" + fmt_short(x) + ":" + fmt_short(m_err);
    }
  }
  const auto k34 = RadialKernel::riesz(0.75, 1, 1.0);
  const double energy = energy_continuous(k34, delta, lebesgue_grid({-1.0}, {1.0}, level), 2.0);
  const double e_err = std::fabs(energy - 4.0) / 4.0;
  o.require(worst_bar <= 0.02, "kbar(r) vs 2 r^(-1/2), r in [2^-6, 1]: max rel err " + fmt(worst_bar) + bar_fail);
  o.require(worst_w <= 0.05, "W(x) vs 4 ln(1/|x|), |x| in [2^-5, 2^-1]: max rel err " + fmt(worst_w) + w_fail);
  o.require(worst_m <= 0.02, "M_k(x) vs 2 |x|^(-1/2), |x| in [2^-5, 2^-1]: max rel err " + fmt(worst_m) + m_fail);
  o.require(e_err <= 0.02, "energy alpha=3/4 = " + fmt(energy) + " vs 4: rel err " + fmt(e_err));
  o.summary = "rel errors: kbar " + fmt_short(worst_bar) + " (2%), W " + fmt_short(worst_w) + " (5%), M_k " +
              fmt_short(worst_m) + " (2%), energy " + fmt_short(e_err) + " (2%)";
  return o;
}

// ---------------------------------------------------------------- 10

Outcome criterion10() {
  Outcome o;
  const auto k = RadialKernel::riesz(0.5, 1);
  AtomicMeasure single(1);
  single.add({0.3}, 1.0);
  AtomicMeasure many(1);
  Rng rng(kSuiteSeed + 10);
  for (int i = 0; i < 10; ++i) many.add({rng.uniform()}, rng.log_uniform2(-2.0, 2.0));
  const std::vector<Point> xs{{-0.75}, {0.0}, {0.21}, {0.3001}, {0.5}, {0.77}, {1.25}, {2.5}};
  const std::size_t shifts = 10000;
  double worst = 0.0;
  std::string summary;
  for (const auto& [name, mu] : {std::pair<const char*, const AtomicMeasure&>{"single atom", single},
                                 std::pair<const char*, const AtomicMeasure&>{"10 atoms", many}}) {
    for (int j : {0, 2}) {
      std::vector<double> maxima;
      bool holds = true;
      for (std::uint64_t seed : {101u, 202u, 303u}) {
        const auto r = shifted_average_check(k, mu, j, shifts, xs, seed);
        maxima.push_back(r.max_ratio);
        holds = holds && r.pass && std::isfinite(r.max_ratio);
      }
      const double mx = *std::max_element(maxima.begin(), maxima.end());
      const double mn = *std::min_element(maxima.begin(), maxima.end());
      const double spread = (mx - mn) / mx;
      worst = std::max(worst, mx);
      const std::string tag = std::string(name) + " j=" + std::to_string(j);
      o.require(holds, tag + ": inequality holds at every x for all seeds, max ratio " + fmt(mx));
      o.require(spread < 0.2, tag + ": seed spread " + fmt(spread) + " (< 0.2)");
      summary += " " + tag + " spread " + fmt_short(spread) + ";";
    }
  }
  o.summary = std::to_string(shifts) + " shifts x 3 seeds, max ratio " + fmt_short(worst) + ";" + summary;
  return o;
}

// ---------------------------------------------------------------- 11

Outcome criterion11() {
  Outcome o;
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(WOLFF_SCENARIO_DIR)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::size_t runs = 0;
  const unsigned saved = default_threads();
  for (const auto& file : files) {
    const auto probe = wolffcli::load_scenario_file(file.string());
    std::vector<std::string> commands;
    if (probe.doc.contains("counterexample")) commands.push_back("counterexample");
    if (probe.doc.contains("checks")) commands.push_back("verify");
    const bool complete = probe.window && probe.sigma && probe.mu && probe.kernel && probe.exponents;
    if (complete) {
      commands.push_back("energy");
      if (probe.seed) commands.push_back("trace");
      if (!probe.points.empty()) {
        commands.push_back("potential");
        commands.push_back("maximal");
      }
    }
    for (const auto& cmd : commands) {
      default_threads() = saved;
      const auto a = wolffcli::serialize(
          wolffcli::run_command(cmd, wolffcli::load_scenario_file(file.string())).report);
      default_threads() = 1;
      const auto b = wolffcli::serialize(
          wolffcli::run_command(cmd, wolffcli::load_scenario_file(file.string())).report);
      default_threads() = saved;
      const auto c = wolffcli::serialize(
          wolffcli::run_command(cmd, wolffcli::load_scenario_file(file.string())).report);
      const bool same = a == b && b == c;
      o.require(same, file.filename().string() + " " + cmd + ": " + (same ? "byte-identical" : "reports differ"));
      ++runs;
    }
  }
  o.require(runs > 0, "at least one scenario found");
  o.summary = std::to_string(runs) + " (scenario, command) pairs, 3 runs each, byte-identical across thread counts";
  return o;
}

const std::vector<std::function<Outcome()>> kCriteria{criterion1, criterion2, criterion3,  criterion4,
                                                      criterion5, criterion6, criterion7,  criterion8,
                                                      criterion9, criterion10, criterion11};

bool run(int n) {
  wolffcli::Stopwatch sw;
  Outcome o;
  try {
    o = kCriteria[n - 1]();
  } catch (const std::exception& e) {
    o.pass = false;
    o.summary = std::string("exception: ") + e.what();
  }
  std::printf("criterion %d: %s %s (%.1f s)\n", n, o.pass ? "PASS" : "FAIL", o.summary.c_str(), sw.seconds());
  for (const auto& d : o.details) std::printf("%s\n", d.c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const int count = static_cast<int>(kCriteria.size());
  bool ok = true;
  if (argc < 2) {
    for (int n = 1; n <= count; ++n) ok = run(n) && ok;
    return ok ? 0 : 1;
  }
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > count) {
      std::fprintf(stderr, "criterion must be in 1..%d\n", count);
      return 2;
    }
    ok = run(n) && ok;
  }
  return ok ? 0 : 1;
}
