#include <cmath>

#include <gtest/gtest.h>

#include "resalloc/price_update.hpp"

namespace resalloc {
namespace {

TEST(SubgradientStep, ZeroSubgradientKeepsPrices) {
  const std::vector<double> p{0.3, 1.2};
  EXPECT_EQ(subgradient_step(p, std::vector<double>{0, 0}, 5, 2.0), p);
}

TEST(SubgradientStep, ClampsAtZero) {
  EXPECT_EQ(subgradient_step(std::vector<double>{1}, std::vector<double>{2}, 1, 1.0),
            (std::vector<double>{0.0}));
}

TEST(SubgradientStep, OverusedResourceGetsMoreExpensive) {
  auto next = subgradient_step(std::vector<double>{1, 1}, std::vector<double>{-0.5, 0.5}, 1, 1.0);
  EXPECT_GT(next[0], 1.0);
  EXPECT_LT(next[1], 1.0);
}

TEST(SubgradientStep, StepDiminishesWithIteration) {
  auto a = subgradient_step(std::vector<double>{1}, std::vector<double>{-1}, 1, 1.0);
  auto b = subgradient_step(std::vector<double>{1}, std::vector<double>{-1}, 4, 1.0);
  EXPECT_DOUBLE_EQ(a[0], 2.0);
  EXPECT_DOUBLE_EQ(b[0], 1.25);
}

TEST(LbfgsHistory, EmptyHistoryGivesUnitSteepestDescent) {
  LbfgsHistory h;
  auto d = h.direction(std::vector<double>{3, -4});
  EXPECT_DOUBLE_EQ(d[0], -0.6);
  EXPECT_DOUBLE_EQ(d[1], 0.8);
  EXPECT_EQ(h.direction(std::vector<double>{0, 0}), (std::vector<double>{0, 0}));
}

TEST(LbfgsHistory, DegeneratePairIsSkipped) {
  LbfgsHistory h;
  ASSERT_TRUE(h.push(std::vector<double>{1, 0}, std::vector<double>{2, 0.5}, 1e-10));
  const std::vector<double> g{0.7, -0.2};
  const auto before = h.direction(g);
  EXPECT_FALSE(h.push(std::vector<double>{0.3, 0.1}, std::vector<double>{0, 0}, 1e-10));
  EXPECT_FALSE(h.push(std::vector<double>{1, 0}, std::vector<double>{-1, 0}, 1e-10));
  EXPECT_EQ(h.size(), 1u);
  EXPECT_EQ(h.direction(g), before);
}

TEST(LbfgsHistory, KeepsOnlyTheNewestPairs) {
  LbfgsHistory h(2);
  for (int k = 1; k <= 5; ++k) {
    h.push(std::vector<double>{double(k), 0}, std::vector<double>{double(k), 1}, 1e-10);
  }
  EXPECT_EQ(h.size(), 2u);
  h.clear();
  EXPECT_EQ(h.size(), 0u);
}

TEST(LbfgsHistory, ExactOnQuadraticAfterCurvaturePairs) {
  // f = 0.5 x^T diag(1, 4) x; two independent pairs pin the inverse Hessian.
  LbfgsHistory h;
  h.push(std::vector<double>{1, 0}, std::vector<double>{1, 0}, 1e-10);
  h.push(std::vector<double>{0, 1}, std::vector<double>{0, 4}, 1e-10);
  auto d = h.direction(std::vector<double>{2, 8});
  EXPECT_NEAR(d[0], -2.0, 1e-12);
  EXPECT_NEAR(d[1], -2.0, 1e-12);
}

double quadratic(std::span<const double> x, std::vector<double>& grad,
                 const std::vector<double>& target, const std::vector<double>& scale) {
  grad.resize(x.size());
  double f = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double r = x[j] - target[j];
    f += scale[j] * r * r;
    grad[j] = 2 * scale[j] * r;
  }
  return f;
}

TEST(LbfgsStep, ConvergesOnQuadraticWithinThirtyIterations) {
  const std::vector<double> target{0.5, 2.0, 0.0, 1.25, 3.0};
  const std::vector<double> scale{1.0, 3.0, 0.5, 10.0, 1.0};
  Objective f = [&](std::span<const double> x, std::vector<double>& g) {
    return quadratic(x, g, target, scale);
  };
  std::vector<double> x{4, 4, 4, 4, 4}, g;
  double value = f(x, g);
  LbfgsHistory history(10);
  int iters = 0;
  auto distance = [&] {
    double s = 0;
    for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - target[j]) * (x[j] - target[j]);
    return std::sqrt(s);
  };
  while (distance() > 1e-6 && iters < 30) {
    auto step = lbfgs_step(history, x, value, g, f);
    ASSERT_TRUE(step);
    x = step->point;
    value = step->value;
    g = step->gradient;
    ++iters;
  }
  EXPECT_LE(distance(), 1e-6);
  EXPECT_LE(iters, 30);
}

TEST(LbfgsStep, ProjectsOntoNonnegativeOrthant) {
  const std::vector<double> target{-1.0, 2.0};
  const std::vector<double> scale{1.0, 1.0};
  Objective f = [&](std::span<const double> x, std::vector<double>& g) {
    return quadratic(x, g, target, scale);
  };
  std::vector<double> x{1, 1}, g;
  double value = f(x, g);
  LbfgsHistory history;
  for (int k = 0; k < 30; ++k) {
    auto step = lbfgs_step(history, x, value, g, f);
    if (!step) break;
    for (double v : step->point) EXPECT_GE(v, 0.0);
    x = step->point;
    value = step->value;
    g = step->gradient;
  }
  EXPECT_NEAR(x[0], 0.0, 1e-9);
  EXPECT_NEAR(x[1], 2.0, 1e-6);
}

TEST(LbfgsStep, ReportsFailureWhenNoDecreaseExists) {
  // A wrong-signed gradient makes every trial point worse.
  Objective f = [](std::span<const double> x, std::vector<double>& g) {
    g.assign(1, 2 * x[0]);
    return x[0] * x[0];
  };
  LbfgsHistory history;
  const std::vector<double> x{1.0};
  const std::vector<double> lying{-2.0};
  EXPECT_FALSE(lbfgs_step(history, x, 1.0, lying, f));
}

}  // namespace
}  // namespace resalloc
