#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "wolff/continuous.hpp"
#include "wolff/random.hpp"

using namespace wolff;

namespace {

AtomicMeasure delta0() {
  AtomicMeasure m(1);
  m.add({0.0}, 1.0);
  return m;
}

// int_0^R k(r) sigma(B(x,r)) (int_{B(x,r)} kbar(r)(y) dmu(y))^{p'-1} dr/r by
// 20-point Gauss-Legendre in log r on every segment [a, b] between jump
// radii, with kbar from the direct log_primitive sum. The integrand may vanish
// like (t - a)^(p'-1) at a segment start; t = a + (b - a) u^2 smooths it.
double quadrature_wolff(const RadialKernel& k, const AtomicMeasure& sigma, const AtomicMeasure& mu,
                        double pp, PointView x, double radius) {
  std::vector<double> r;
  for (std::size_t a = 0; a < sigma.size(); ++a) r.push_back(distance(sigma.position(a), x));
  for (std::size_t b = 0; b < mu.size(); ++b) {
    r.push_back(distance(mu.position(b), x));
    for (std::size_t a = 0; a < sigma.size(); ++a) r.push_back(distance(sigma.position(a), mu.position(b)));
  }
  if (auto c = k.cutoff()) r.push_back(*c);
  r.push_back(radius);
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  auto integrand = [&](double t) {
    const double s = std::exp(t);
    const double sx = ball_mass(sigma, x, s);
    if (sx == 0.0) return 0.0;
    double inner = 0.0;
    for (std::size_t b = 0; b < mu.size(); ++b) {
      if (distance(mu.position(b), x) <= s) inner += mu.weight(b) * bar_k(k, sigma, mu.position(b), s);
    }
    return k(s) * sx * std::pow(inner, pp - 1.0);
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < r.size() && r[i] < radius; ++i) {
    if (r[i] <= 0.0) continue;
    const double a = std::log(r[i]);
    const double span = std::log(r[i + 1]) - a;
    auto smoothed = [&](double u) { return integrand(a + span * u * u) * 2.0 * span * u; };
    total += boost::math::quadrature::gauss<double, 20>::integrate(smoothed, 0.0, 1.0);
  }
  return total;
}

AtomicMeasure random_measure_1d(Rng& rng, int atoms, double lo, double hi) {
  AtomicMeasure m(1);
  for (int i = 0; i < atoms; ++i) m.add({rng.uniform(lo, hi)}, rng.log_uniform2(-3, 3));
  return m;
}

}  // namespace

TEST(TContinuous, Examples) {
  const auto k = RadialKernel::riesz(0.5, 1);
  const auto nu = delta0();
  EXPECT_DOUBLE_EQ(t_continuous_trunc(k, nu, 1.0, Point{0.25}), 2.0);
  EXPECT_EQ(t_continuous_trunc(k, nu, 1.0, Point{0.0}), kInf);
  EXPECT_EQ(t_continuous_trunc(k, nu, 0.1, Point{0.25}), 0.0);
  EXPECT_THROW(t_continuous_trunc(k, nu, 0.0, Point{0.25}), InvalidArgument);
}

TEST(EnergyContinuous, RieszClosedForm) {
  const auto k = RadialKernel::riesz(0.75, 1, 1.0);
  const auto sigma = lebesgue_grid({-1.0}, {1.0}, 12);
  const double e = energy_continuous(k, delta0(), sigma, 2.0);
  EXPECT_NEAR(e, 4.0, 0.02 * 4.0);
  EXPECT_EQ(energy_continuous(k, AtomicMeasure(1), sigma, 2.0), 0.0);
  EXPECT_NEAR(energy_continuous(k, delta0().scaled(3.0), sigma, 2.0), 9.0 * e, 1e-12 * e);
}

TEST(WolffContinuous, LogClosedForm) {
  const auto k = RadialKernel::riesz(0.5, 1, 1.0);
  const auto sigma = lebesgue_grid({-2.0}, {2.0}, 12);
  for (double x : {1.0 / 32, 1.0 / 8, 0.5}) {
    const double w = wolff_continuous(k, sigma, delta0(), 2.0, Point{x});
    const double exact = 4.0 * std::log(1.0 / x);
    EXPECT_NEAR(w, exact, 0.05 * exact) << x;
    EXPECT_NEAR(wolff_continuous(k, sigma, delta0(), 2.0, Point{-x}), w, 1e-12 * w);
  }
}

TEST(WolffContinuous, MatchesSegmentQuadrature) {
  Rng rng(61);
  const std::vector<RadialKernel> kernels{RadialKernel::riesz(0.5, 1, 1.5),
                                          RadialKernel::log_kernel(1.5, std::exp(1.5), 1),
                                          RadialKernel::riesz(0.3, 1)};
  for (const auto& k : kernels) {
    for (int t = 0; t < 4; ++t) {
      const auto sigma = random_measure_1d(rng, 12, -1.0, 1.0);
      const auto mu = random_measure_1d(rng, 4, -0.5, 0.5);
      const Point x{rng.uniform(-0.5, 0.5)};
      for (double pp : {1.5, 2.0, 3.0}) {
        for (double radius : {0.4, 1.2, 3.0}) {
          const double fast = wolff_continuous(k, sigma, mu, pp, x, radius);
          const double slow = quadrature_wolff(k, sigma, mu, pp, x, radius);
          EXPECT_NEAR(fast, slow, 1e-8 * (1.0 + slow)) << k.describe() << " p'=" << pp << " R=" << radius;
        }
      }
    }
  }
}

TEST(WolffContinuous, TwoDimensional) {
  Rng rng(62);
  const auto k = RadialKernel::riesz(1.2, 2, 1.0);
  AtomicMeasure sigma(2), mu(2);
  for (int i = 0; i < 10; ++i) sigma.add({rng.uniform(), rng.uniform()}, rng.uniform(0.5, 2.0));
  for (int i = 0; i < 3; ++i) mu.add({rng.uniform(), rng.uniform()}, rng.uniform(0.5, 2.0));
  const Point x{0.5, 0.5};
  const double fast = wolff_continuous(k, sigma, mu, 2.0, x, 2.0);
  EXPECT_NEAR(fast, quadrature_wolff(k, sigma, mu, 2.0, x, 2.0), 1e-8 * (1.0 + fast));
}

TEST(WolffContinuous, HomogeneityAndVanishing) {
  Rng rng(63);
  const auto k = RadialKernel::riesz(0.5, 1, 1.0);
  const auto sigma = random_measure_1d(rng, 30, -1.0, 1.0);
  const auto mu = random_measure_1d(rng, 5, -0.5, 0.5);
  for (double pp : {1.5, 3.0}) {
    const double w1 = wolff_continuous(k, sigma, mu, pp, Point{0.1});
    const double w2 = wolff_continuous(k, sigma, mu.scaled(2.0), pp, Point{0.1});
    EXPECT_NEAR(w2, std::pow(2.0, pp - 1.0) * w1, 1e-12 * w2);
  }
  AtomicMeasure far(1);
  far.add({5.0}, 1.0);
  EXPECT_EQ(wolff_continuous(k, sigma, far, 2.0, Point{0.0}), 0.0);
  EXPECT_EQ(wolff_continuous(k, sigma, far, 2.0, Point{0.0}, 2.0), 0.0);
  EXPECT_THROW(wolff_continuous(k, sigma, mu, 2.0, Point{0.0}, 0.0), InvalidArgument);
}

TEST(WolffContinuous, DivergentTailReported) {
  // Riesz without cutoff and p' = 2: the large-r tail does not converge for
  // a constant kernel, which has no decay at all.
  const auto k = RadialKernel::constant(1.0, 1);
  AtomicMeasure sigma(1);
  sigma.add({0.3}, 1.0);
  AtomicMeasure mu(1);
  mu.add({0.6}, 1.0);
  EXPECT_EQ(wolff_continuous(k, sigma, mu, 2.0, Point{0.0}), kInf);
  EXPECT_TRUE(std::isfinite(wolff_continuous(k, sigma, mu, 2.0, Point{0.0}, 4.0)));
}

TEST(MkMaximal, ClosedForm) {
  // Grid error near the center scales like sqrt(h / |x|).
  const auto k = RadialKernel::riesz(0.5, 1, 1.0);
  const int level = 12;
  const auto sigma = lebesgue_grid({-2.0}, {2.0}, level);
  for (double x : {1.0 / 32, 1.0 / 8, 0.5, 1.0}) {
    const double m = m_k_maximal(k, sigma, delta0(), Point{x});
    const double exact = 2.0 / std::sqrt(x);
    EXPECT_NEAR(m, exact, std::sqrt(std::ldexp(1.0, -level) / x) * exact) << x;
  }
}

TEST(MkMaximal, DominatesDenseRadiusScan) {
  Rng rng(64);
  for (const auto& k : {RadialKernel::riesz(0.5, 1, 1.0), RadialKernel::log_kernel(1.5, std::exp(1.5), 1)}) {
    const auto sigma = random_measure_1d(rng, 20, -1.0, 1.0);
    const auto mu = random_measure_1d(rng, 6, -1.0, 1.0);
    const Point x{0.05};
    const double m = m_k_maximal(k, sigma, mu, x);
    double scan = 0.0;
    for (int i = 0; i <= 20000; ++i) {
      const double r = std::exp(std::log(1e-4) + i * (std::log(4.0) - std::log(1e-4)) / 20000);
      scan = std::max(scan, bar_k(k, sigma, x, r) * ball_mass(mu, x, r));
    }
    EXPECT_LE(scan, m * (1.0 + 1e-12));
    EXPECT_NEAR(scan, m, 1e-3 * m) << k.describe();
  }
}

TEST(MkMaximal, EmptyAndSingular) {
  const auto k = RadialKernel::riesz(0.5, 1);
  const auto sigma = lebesgue_grid({-1.0}, {1.0}, 4);
  EXPECT_EQ(m_k_maximal(k, sigma, AtomicMeasure(1), Point{0.0}), 0.0);
  AtomicMeasure with_atom = sigma;
  with_atom.add({0.0}, 1.0);
  EXPECT_EQ(m_k_maximal(k, with_atom, delta0(), Point{0.0}), kInf);
}
