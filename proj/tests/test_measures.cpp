#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "wolff/measures.hpp"
#include "wolff/random.hpp"

using namespace wolff;

namespace {

AtomicMeasure atoms1(std::initializer_list<std::pair<double, double>> list) {
  AtomicMeasure m(1);
  for (const auto& [x, w] : list) m.add({x}, w);
  return m;
}

}  // namespace

TEST(AtomicMeasure, RejectsBadAtoms) {
  AtomicMeasure m(1);
  EXPECT_THROW(m.add({0.5}, -1.0), InvalidArgument);
  EXPECT_THROW(m.add({0.5}, std::nan("")), InvalidArgument);
  EXPECT_THROW(m.add({std::nan("")}, 1.0), InvalidArgument);
  EXPECT_THROW(m.add({0.5, 0.5}, 1.0), DimensionMismatch);
  EXPECT_THROW(AtomicMeasure(0), InvalidArgument);
}

TEST(AtomicMeasure, DuplicatesAdd) {
  const auto m = atoms1({{0.3, 1.0}, {0.3, 2.5}});
  EXPECT_EQ(cube_mass(m, DyadicCube{2, {1}}), 3.5);
  EXPECT_EQ(m.total_mass(), 3.5);
}

TEST(AtomicMeasure, DensityReweighting) {
  const auto m = atoms1({{0.1, 2.0}, {0.6, 3.0}});
  const auto f = m.reweighted(std::vector<double>{5.0, 0.0});
  EXPECT_EQ(f.weight(0), 10.0);
  EXPECT_EQ(f.weight(1), 0.0);
  EXPECT_THROW(m.reweighted(std::vector<double>{1.0}), InvalidArgument);
}

TEST(CubeMass, Examples) {
  const auto m = atoms1({{0.1, 1.0}, {0.3, 2.0}});
  EXPECT_EQ(cube_mass(m, DyadicCube{2, {1}}), 2.0);
  EXPECT_EQ(cube_mass(m, DyadicCube{1, {0}}), 3.0);
  EXPECT_EQ(cube_mass(AtomicMeasure(1), DyadicCube{0, {0}}), 0.0);
  EXPECT_THROW(cube_mass(m, DyadicCube{0, {0, 0}}), DimensionMismatch);
}

TEST(CubeMass, AdditiveOverChildren) {
  Rng rng(17);
  AtomicMeasure m(2);
  for (int i = 0; i < 300; ++i) m.add({rng.uniform(), rng.uniform()}, rng.log_uniform2(-8, 8));
  for (int l = 0; l < 5; ++l) {
    for (Index a = 0; a < (Index{1} << l); ++a) {
      for (Index b = 0; b < (Index{1} << l); ++b) {
        const DyadicCube q{l, {a, b}};
        double children = 0.0;
        for (Index i = 0; i < 2; ++i) {
          for (Index j = 0; j < 2; ++j) children += cube_mass(m, DyadicCube{l + 1, {2 * a + i, 2 * b + j}});
        }
        EXPECT_NEAR(cube_mass(m, q), children, 1e-12 * (1.0 + children));
      }
    }
  }
}

TEST(WindowMasses, MatchNaiveScan) {
  Rng rng(23);
  AtomicMeasure m(2);
  for (int i = 0; i < 150; ++i) m.add({rng.uniform(-0.5, 2.5), rng.uniform(0.0, 1.0)}, rng.uniform());
  const auto w = LatticeWindow::from_box(0, 4, {0.0, 0.0}, {2.0, 1.0}, {0.0, 0.0});
  const auto fast = window_masses(m, w);
  for (std::size_t id = 0; id < w.cube_count(); ++id) {
    EXPECT_NEAR(fast[id], cube_mass(m, w.cube(id)), 1e-12);
  }
}

TEST(BallMass, Examples) {
  const auto two = atoms1({{0.0, 2.0}});
  EXPECT_EQ(ball_mass(two, Point{0.0}, 1.0), 2.0);
  EXPECT_EQ(ball_mass(two, Point{3.0}, 1.0), 0.0);
  const auto pair = atoms1({{0.0, 1.0}, {1.0, 1.0}});
  EXPECT_EQ(ball_mass(pair, Point{0.0}, 1.0), 2.0);  // closed ball
  EXPECT_THROW(ball_mass(pair, Point{0.0}, 0.0), InvalidArgument);
  EXPECT_THROW(ball_mass(pair, Point{0.0}, -1.0), InvalidArgument);
}

TEST(BallMass, NondecreasingInRadius) {
  Rng rng(29);
  AtomicMeasure m(2);
  for (int i = 0; i < 100; ++i) m.add({rng.uniform(), rng.uniform()}, rng.uniform());
  const Point x{0.4, 0.6};
  double prev = 0.0;
  for (double r = 0.01; r < 2.0; r += 0.01) {
    const double v = ball_mass(m, x, r);
    EXPECT_GE(v, prev);
    prev = v;
  }
  EXPECT_NEAR(prev, m.total_mass(), 1e-12);
}

TEST(LebesgueGrid, Examples) {
  const auto m = lebesgue_grid({0.0}, {1.0}, 8);
  ASSERT_EQ(m.size(), 256u);
  EXPECT_EQ(m.weight(0), std::ldexp(1.0, -8));
  EXPECT_EQ(m.total_mass(), 1.0);
  EXPECT_EQ(cube_mass(m, DyadicCube{1, {0}}), 0.5);
  EXPECT_EQ(cube_mass(m, DyadicCube{2, {1}}), 0.25);
}

TEST(LebesgueGrid, ExactOnEveryWindowCube) {
  const auto m = lebesgue_grid({-1.0, 0.0}, {1.0, 1.0}, 5);
  const auto w = LatticeWindow::from_box(0, 5, {-1.0, 0.0}, {1.0, 1.0}, {0.0, 0.0});
  const auto mass = window_masses(m, w);
  for (std::size_t id = 0; id < w.cube_count(); ++id) {
    const double side = w.cube(id).side();
    EXPECT_EQ(mass[id], side * side);
  }
}

TEST(LebesgueGrid, RejectsMisalignedBox) {
  EXPECT_THROW(lebesgue_grid({0.0}, {0.3}, 2), InvalidArgument);
  EXPECT_THROW(lebesgue_grid({0.0}, {0.0}, 2), InvalidArgument);
  EXPECT_THROW(lebesgue_grid({0.0, 0.0}, {1.0}, 2), DimensionMismatch);
}

TEST(ReverseDoubling, LebesgueHasConstantOne) {
  const auto m = lebesgue_grid({0.0}, {1.0}, 6);
  const auto w = LatticeWindow::from_box(0, 6, {0.0}, {1.0}, {0.0});
  const auto r = reverse_doubling_check(m, w, 1.0);
  EXPECT_TRUE(r.holds);
  EXPECT_DOUBLE_EQ(r.best_constant, 1.0);
}

TEST(ReverseDoubling, PointMassFails) {
  const auto m = atoms1({{0.3, 1.0}});
  const auto w = LatticeWindow::from_box(0, 12, {0.0}, {1.0}, {0.0});
  const auto r = reverse_doubling_check(m, w, 1.0);
  EXPECT_FALSE(r.holds);
  EXPECT_NEAR(r.best_constant, std::exp2(-12.0), 1e-15);
}

TEST(ReverseDoubling, CascadeHoldsWithConstantOne) {
  for (double gamma : {0.4, 0.7, 1.0}) {
    const auto m = bernoulli_cascade(1, gamma, 10);
    const auto w = LatticeWindow::from_box(0, 10, {0.0}, {1.0}, {0.0});
    const auto r = reverse_doubling_check(m, w, gamma);
    EXPECT_TRUE(r.holds);
    EXPECT_NEAR(r.best_constant, 1.0, 1e-12) << "gamma " << gamma;
  }
  const auto m2 = bernoulli_cascade(2, 1.5, 5);
  const auto w2 = LatticeWindow::from_box(0, 5, {0.0, 0.0}, {1.0, 1.0}, {0.0, 0.0});
  EXPECT_NEAR(reverse_doubling_check(m2, w2, 1.5).best_constant, 1.0, 1e-12);
  EXPECT_NEAR(m2.total_mass(), 1.0, 1e-12);
}

TEST(ReverseDoubling, Errors) {
  const auto w = LatticeWindow::from_box(0, 3, {0.0}, {1.0}, {0.0});
  EXPECT_THROW(reverse_doubling_check(AtomicMeasure(1), w, 1.0), DegenerateInputError);
  EXPECT_THROW(reverse_doubling_check(atoms1({{0.5, 1.0}}), w, 0.0), InvalidArgument);
  EXPECT_THROW(bernoulli_cascade(1, 1.5, 4), InvalidArgument);
}

TEST(Doubling, Examples) {
  const auto point = atoms1({{0.0, 1.0}});
  EXPECT_EQ(doubling_constant(point, {Point{0.0}}, {0.1, 1.0, 10.0}), 1.0);
  const auto pair = atoms1({{0.0, 1.0}, {1.0, 1.0}});
  EXPECT_EQ(doubling_constant(pair, {Point{0.0}}, {0.6}), 2.0);
  const auto grid = lebesgue_grid({-4.0}, {4.0}, 10);
  const double c = doubling_constant(grid, {Point{0.1}, Point{-0.7}}, {0.05, 0.25, 1.0});
  EXPECT_NEAR(c, 2.0, 2.0 * std::ldexp(1.0, -10) / 0.05);
  EXPECT_THROW(doubling_constant(point, {Point{5.0}}, {1.0}), DegenerateInputError);
}
