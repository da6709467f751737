#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "resalloc/errors.hpp"
#include "resalloc/oracle.hpp"
#include "resalloc/solver.hpp"
#include "support.hpp"

namespace resalloc {
namespace {

TEST(BruteForceCost, WorkedEnvelope) {
  const std::vector<double> a{1, 2, 3, 5}, p{1, 1, 4, 6};
  EXPECT_DOUBLE_EQ(oracle::brute_force_cost(a, p, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(oracle::brute_force_cost(a, p, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(oracle::brute_force_cost(a, p, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(oracle::brute_force_cost(a, p, 3.5), 3.5);
  EXPECT_DOUBLE_EQ(oracle::brute_force_cost(a, p, 5.0), 6.0);
  EXPECT_EQ(oracle::brute_force_cost(a, p, 5.5), INFINITY);
}

TEST(GridOracle, ZeroPricesPickLargestThroughput) {
  auto g = oracle::subproblem_grid_oracle(UtilitySpec::log(), 0, std::vector<double>{0.4, 0.9},
                                          std::vector<double>{0, 0}, 1000);
  EXPECT_DOUBLE_EQ(g.t, 0.9);
  EXPECT_DOUBLE_EQ(g.value, std::log(0.9));
}

TEST(GridOracle, WorkedEnvelopeLogOptimumIsTwo) {
  auto g = oracle::subproblem_grid_oracle(UtilitySpec::log(), 0, std::vector<double>{1, 2, 3, 5},
                                          std::vector<double>{1, 1, 4, 6}, 100'000);
  EXPECT_NEAR(g.t, 2.0, 1e-3);
  EXPECT_NEAR(g.value, std::log(2.0) - 1.0, 1e-9);
}

TEST(PrimalOracle, AbundantResourcesGiveMaxThroughput) {
  std::mt19937_64 rng(1);
  for (const auto& fam : testing::smooth_families()) {
    Problem p = testing::random_problem(rng, 5, 3, fam.spec);
    p.limits.assign(3, 10.0);
    auto r = oracle::primal_oracle(p);
    auto t = throughputs(p, r.x);
    for (std::size_t i = 0; i < 5; ++i) {
      auto a = p.efficiency.row(i);
      EXPECT_NEAR(t[i], *std::max_element(a.begin(), a.end()), 1e-4) << fam.name;
    }
  }
}

TEST(PrimalOracle, MatchesSolverOnSmallLogInstance) {
  std::mt19937_64 rng(2);
  Problem p = testing::random_problem(rng, 3, 2, UtilitySpec::log());
  auto s = solve(p);
  auto o = oracle::primal_oracle(p);
  EXPECT_LE(std::abs(o.utility - s.primal_utility), 1e-3 * 3);
  EXPECT_TRUE(check_feasibility(p, o.x).feasible);
}

TEST(PrimalOracle, LinearProgramsSolvedExactly) {
  // One job, three resources at a fifth of a unit each: the optimum must use
  // all three.
  Problem p;
  p.efficiency = Matrix::from_rows({{1, 1, 1}});
  p.limits = {0.2, 0.2, 0.2};
  p.utility = UtilitySpec::linear();
  auto o = oracle::primal_oracle(p);
  EXPECT_NEAR(o.utility, 0.6, 1e-12);
  auto s = solve(p);
  EXPECT_NEAR(s.primal_utility, 0.6, 1e-3);
}

TEST(PrimalOracle, RandomFeasiblePerturbationsDoNotImprove) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Problem p = testing::random_problem(rng, 4, 3, UtilitySpec::log());
  auto o = oracle::primal_oracle(p);
  const double base = total_utility(p, throughputs(p, o.x)).total;
  for (int k = 0; k < 100; ++k) {
    Allocation y = o.x;
    for (double& v : y.data()) v += 1e-3 * unit(rng);
    const Allocation z = oracle::project_feasible(p, y, 2000, 1e-12);
    ASSERT_TRUE(check_feasibility(p, z).feasible);
    EXPECT_LE(total_utility(p, throughputs(p, z)).total, base + 1e-6);
  }
}

TEST(ProjectFeasible, ProducesFeasiblePoint) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(-0.5, 2.0);
  Problem p = testing::random_problem(rng, 8, 3, UtilitySpec::log(), true);
  Allocation y(8, 3);
  for (double& v : y.data()) v = unit(rng);
  Allocation x = oracle::project_feasible(p, y, 2000, 1e-12);
  auto rep = check_feasibility(p, x);
  EXPECT_GE(rep.min_entry, 0.0);
  EXPECT_LE(rep.max_row_excess, 1e-6);
  EXPECT_LE(rep.max_usage_excess, 1e-6 * (1 + *std::max_element(p.limits.begin(), p.limits.end())));
}

TEST(ProjectFeasible, FeasibleInputIsFixedPoint) {
  std::mt19937_64 rng(5);
  Problem p = testing::random_problem(rng, 6, 2, UtilitySpec::log());
  Allocation y = testing::random_feasible(rng, p);
  Allocation x = oracle::project_feasible(p, y, 200, 1e-12);
  for (std::size_t k = 0; k < y.data().size(); ++k) EXPECT_NEAR(x.data()[k], y.data()[k], 1e-12);
}

TEST(ProjectFeasible, TooFewSweepsThrows) {
  Problem p;
  p.efficiency = Matrix(50, 3, 1.0);
  p.limits = {0.5, 0.5, 0.5};
  Allocation y(50, 3);
  for (std::size_t i = 0; i < 50; ++i) {
    for (std::size_t j = 0; j < 3; ++j) y(i, j) = double((i + 1) * (j + 1));
  }
  try {
    oracle::project_feasible(p, y, 1, 1e-12);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProjectionNotConverged);
  }
}

TEST(CheckKkt, SolverOutputPasses) {
  std::mt19937_64 rng(6);
  for (const auto& fam : testing::all_families()) {
    for (int trial = 0; trial < 5; ++trial) {
      Problem p = testing::random_problem(rng, 10, 3, fam.spec, trial % 2 == 1);
      auto r = solve(p);
      auto k = oracle::check_kkt(p, r.x_feasible, r.prices, 1e-3 * 10);
      EXPECT_TRUE(k.passed) << fam.name << " stationarity=" << k.stationarity
                            << " slackness=" << k.complementary_slackness;
    }
  }
}

TEST(CheckKkt, PriceOnSlackResourceViolatesSlackness) {
  Problem p;
  p.efficiency = Matrix::from_rows({{1, 0.5}});
  p.limits = {1, 10};
  Allocation x = Matrix::from_rows({{1, 0}});
  const std::vector<double> prices{0.0, 5.0};
  auto k = oracle::check_kkt(p, x, prices, 1e-3);
  EXPECT_GT(k.complementary_slackness, k.slackness_tolerance);
  EXPECT_FALSE(k.passed);
}

TEST(CheckKkt, ResourceViolationIsFlagged) {
  Problem p;
  p.efficiency = Matrix::from_rows({{1}, {1}});
  p.limits = {1};
  Allocation x = Matrix::from_rows({{1}, {1}});
  auto k = oracle::check_kkt(p, x, std::vector<double>{0.0}, 1e-3);
  EXPECT_GT(k.primal_feasibility, k.feasibility_tolerance);
  EXPECT_FALSE(k.passed);
}

TEST(CheckKkt, SuboptimalRowFailsStationarity) {
  Problem p;
  p.efficiency = Matrix::from_rows({{1, 2}});
  p.limits = {1, 1};
  Allocation x = Matrix::from_rows({{0.5, 0}});
  auto k = oracle::check_kkt(p, x, std::vector<double>{0.0, 0.0}, 1e-3);
  EXPECT_NEAR(k.stationarity, std::log(2.0) - std::log(0.5), 1e-12);
  EXPECT_FALSE(k.passed);
}

}  // namespace
}  // namespace resalloc
