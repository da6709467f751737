#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "resalloc/errors.hpp"
#include "resalloc/oracle.hpp"
#include "resalloc/subproblem.hpp"
#include "resalloc/utility.hpp"
#include "support.hpp"

namespace resalloc {
namespace {

constexpr auto kOrigin = CostEnvelope::kVirtualOrigin;

UtilitySpec tp(double w, double target) { return UtilitySpec::target_priority({w}, {target}); }

int nonzeros(std::span<const double> x) {
  return static_cast<int>(std::count_if(x.begin(), x.end(), [](double v) { return v != 0.0; }));
}

TEST(AllocationFromSegment, Endpoints) {
  const std::vector<double> a{1, 2, 3, 5};
  EXPECT_EQ(allocation_from_segment(a, 1, 3, 5.0), (std::vector<double>{0, 0, 0, 1}));
  EXPECT_EQ(allocation_from_segment(a, 1, 3, 2.0), (std::vector<double>{0, 1, 0, 0}));
}

TEST(AllocationFromSegment, Interior) {
  const std::vector<double> a{1, 2, 3, 5};
  auto x = allocation_from_segment(a, 1, 3, 3.5);
  EXPECT_DOUBLE_EQ(x[1], 0.5);
  EXPECT_DOUBLE_EQ(x[3], 0.5);
  EXPECT_EQ(x[0], 0.0);
  EXPECT_EQ(x[2], 0.0);
}

TEST(AllocationFromSegment, FromOriginUsesOneResource) {
  const std::vector<double> a{1, 2, 3, 5};
  auto x = allocation_from_segment(a, kOrigin, 1, 1.5);
  EXPECT_EQ(x, (std::vector<double>{0, 0.75, 0, 0}));
}

TEST(AllocationFromSegment, OutsideSegmentThrows) {
  const std::vector<double> a{1, 2, 3, 5};
  try {
    allocation_from_segment(a, 1, 3, 5.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTOutOfSegment);
  }
  EXPECT_THROW(allocation_from_segment(a, 1, 3, 1.9), Error);
}

TEST(MaximizeOverSegment, LogProjectsToRightEndpoint) {
  auto r = maximize_over_segment(UtilitySpec::log(), 0, 0.5, 0.0, 0.0, 2.0);
  EXPECT_DOUBLE_EQ(r.t, 2.0);
  EXPECT_DOUBLE_EQ(r.value, std::log(2.0) - 1.0);
}

TEST(MaximizeOverSegment, TargetPriorityCases) {
  EXPECT_DOUBLE_EQ(maximize_over_segment(tp(2, 0.2), 0, 1.0, 0.0, 0.1, 0.5).t, 0.2);
  EXPECT_DOUBLE_EQ(maximize_over_segment(tp(0.5, 0.2), 0, 1.0, 0.0, 0.1, 0.5).t, 0.1);
  EXPECT_DOUBLE_EQ(maximize_over_segment(tp(2, 0.9), 0, 1.0, 0.0, 0.1, 0.5).t, 0.5);
  EXPECT_DOUBLE_EQ(maximize_over_segment(tp(2, 0.05), 0, 1.0, 0.0, 0.1, 0.5).t, 0.1);
}

TEST(MaximizeOverSegment, LinearPicksEndpointBySlope) {
  EXPECT_DOUBLE_EQ(maximize_over_segment(UtilitySpec::linear(), 0, 0.7, 0, 1, 2).t, 2.0);
  EXPECT_DOUBLE_EQ(maximize_over_segment(UtilitySpec::linear(), 0, 1.3, 0, 1, 2).t, 1.0);
  EXPECT_DOUBLE_EQ(maximize_over_segment(UtilitySpec::linear(), 0, 1.0, 0, 1, 2).t, 1.0);
}

TEST(MaximizeOverSegment, LocallyAndGloballyOptimal) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto families = testing::all_families();
  for (auto& fam : families) {
    for (int trial = 0; trial < 100; ++trial) {
      if (fam.spec.family == UtilityFamily::kTargetPriority) {
        fam.spec = tp(0.5 + 2 * unit(rng), 0.1 + 2 * unit(rng));
      }
      const double lo = 0.05 + 2 * unit(rng);
      const double hi = lo + 0.01 + 2 * unit(rng);
      const double slope = 3 * unit(rng);
      const double intercept = unit(rng);
      const auto best = maximize_over_segment(fam.spec, 0, slope, intercept, lo, hi);
      auto f = [&](double t) { return evaluate(fam.spec, 0, t) - (slope * t + intercept); };
      ASSERT_GE(best.t, lo);
      ASSERT_LE(best.t, hi);
      EXPECT_DOUBLE_EQ(best.value, f(best.t));
      for (double d : {-1e-6, 1e-6}) {
        const double t = best.t + d;
        if (t >= lo && t <= hi) EXPECT_GE(best.value, f(t) - 1e-15) << fam.name;
      }
      double grid_best = -INFINITY;
      for (int k = 0; k <= 10'000; ++k) grid_best = std::max(grid_best, f(lo + (hi - lo) * k / 1e4));
      EXPECT_GE(best.value, grid_best - 1e-8) << fam.name;
    }
  }
}

TEST(SolveSubproblem, ZeroPricesTakeBestResource) {
  const std::vector<double> a{0.3, 0.9, 0.5}, p{0, 0, 0};
  for (const auto& fam : testing::smooth_families()) {
    auto s = solve_subproblem(fam.spec, 0, a, p);
    EXPECT_DOUBLE_EQ(s.t_star, 0.9);
    EXPECT_EQ(s.x_star, (std::vector<double>{0, 1, 0}));
  }
}

TEST(SolveSubproblem, LogOnWorkedEnvelope) {
  const std::vector<double> a{1, 2, 3, 5}, p{1, 1, 4, 6};
  auto s = solve_subproblem(UtilitySpec::log(), 0, a, p);
  EXPECT_DOUBLE_EQ(s.t_star, 2.0);
  EXPECT_EQ(s.x_star, (std::vector<double>{0, 1, 0, 0}));
  EXPECT_DOUBLE_EQ(s.net_utility, std::log(2.0) - 1.0);

  auto grid = oracle::subproblem_grid_oracle(UtilitySpec::log(), 0, a, p, 100'000);
  EXPECT_NEAR(grid.t, 2.0, 5.0 / 100'000);
}

TEST(SolveSubproblem, UnreachableTargetRunsFlatOut) {
  const std::vector<double> a{1, 2}, p{0.1, 0.3};
  auto s = solve_subproblem(tp(1, 10), 0, a, p);
  EXPECT_DOUBLE_EQ(s.t_star, 2.0);
  EXPECT_EQ(s.x_star, (std::vector<double>{0, 1}));
}

TEST(SolveSubproblem, ExpensiveResourcesLeaveLinearJobIdle) {
  auto s = solve_subproblem(UtilitySpec::linear(), 0, std::vector<double>{1, 2},
                            std::vector<double>{2, 5});
  EXPECT_EQ(s.t_star, 0.0);
  EXPECT_EQ(s.x_star, (std::vector<double>{0, 0}));
  EXPECT_EQ(s.net_utility, 0.0);
}

TEST(SolveSubproblem, SolutionInvariants) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto families = testing::all_families();
  for (auto& fam : families) {
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t m = 1 + trial % 8;
      std::vector<double> a(m), p(m);
      for (std::size_t j = 0; j < m; ++j) {
        a[j] = 0.05 + unit(rng);
        p[j] = 2 * unit(rng);
      }
      if (fam.spec.family == UtilityFamily::kTargetPriority) fam.spec = tp(1 + unit(rng), unit(rng));
      auto s = solve_subproblem(fam.spec, 0, a, p);
      double sum = 0.0, t = 0.0, cost = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        EXPECT_GE(s.x_star[j], 0.0);
        sum += s.x_star[j];
        t += a[j] * s.x_star[j];
        cost += p[j] * s.x_star[j];
      }
      EXPECT_LE(sum, 1.0 + 1e-12);
      EXPECT_LE(nonzeros(s.x_star), 2);
      EXPECT_NEAR(t, s.t_star, 1e-9 * (1 + s.t_star));
      EXPECT_NEAR(s.net_utility, evaluate(fam.spec, 0, s.t_star) - cost, 1e-12) << fam.name;
    }
  }
}

TEST(SolveSubproblem, AgreesWithGridOracle) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr std::size_t kGrid = 10'000;
  auto families = testing::all_families();
  for (int trial = 0; trial < 500; ++trial) {
    auto& fam = families[trial % families.size()];
    if (fam.spec.family == UtilityFamily::kTargetPriority) fam.spec = tp(1 + unit(rng), unit(rng));
    const std::size_t m = 1 + trial % 6;
    std::vector<double> a(m), p(m);
    for (std::size_t j = 0; j < m; ++j) {
      a[j] = 0.05 + unit(rng);
      p[j] = 2 * unit(rng);
    }
    auto exact = solve_subproblem(fam.spec, 0, a, p);
    auto grid = oracle::subproblem_grid_oracle(fam.spec, 0, a, p, kGrid);
    const double a_max = *std::max_element(a.begin(), a.end());
    EXPECT_LE(std::abs(grid.t - exact.t_star), a_max / kGrid * (1 + 1e-9)) << fam.name;
    EXPECT_LE(grid.value, exact.net_utility + 1e-9) << fam.name;
  }
}

TEST(SolveSubproblem, DominatesRandomThroughputs) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& fam : testing::smooth_families()) {
    for (int job = 0; job < 5; ++job) {
      std::vector<double> a(4), p(4);
      for (std::size_t j = 0; j < 4; ++j) {
        a[j] = 0.05 + unit(rng);
        p[j] = unit(rng);
      }
      auto s = solve_subproblem(fam.spec, 0, a, p);
      const double a_max = *std::max_element(a.begin(), a.end());
      for (int k = 0; k < 10'000; ++k) {
        const double t = a_max * unit(rng);
        const double v = evaluate(fam.spec, 0, t) - oracle::brute_force_cost(a, p, t);
        EXPECT_GE(s.net_utility, v - 1e-12) << fam.name;
      }
    }
  }
}

TEST(SolveSubproblem, NoUsableResourceUnderLogIsDomainViolation) {
  try {
    solve_subproblem(UtilitySpec::log(), 0, std::vector<double>{0, 0}, std::vector<double>{1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDomainViolation);
  }
}

TEST(SolveAll, SingleJobMatchesSubproblem) {
  Problem p;
  p.efficiency = Matrix::from_rows({{1, 2, 3, 5}});
  p.limits = {1, 1, 1, 1};
  const std::vector<double> prices{1, 1, 4, 6};
  auto batch = solve_all_subproblems(p, prices);
  auto single = solve_subproblem(p.utility, 0, p.efficiency.row(0), prices);
  EXPECT_EQ(std::vector<double>(batch.x.row(0).begin(), batch.x.row(0).end()), single.x_star);
  EXPECT_EQ(batch.net_utility[0], single.net_utility);
  EXPECT_EQ(batch.throughput[0], single.t_star);
}

TEST(SolveAll, DuplicateRowsGetIdenticalAllocations) {
  Problem p;
  p.efficiency = Matrix::from_rows({{0.3, 0.7, 0.5}, {0.3, 0.7, 0.5}, {0.3, 0.7, 0.5}});
  p.limits = {1, 1, 1};
  auto batch = solve_all_subproblems(p, std::vector<double>{0.2, 0.9, 0.4});
  for (std::size_t i = 1; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(batch.x(i, j), batch.x(0, j));
  }
}

TEST(SolveAll, MatchesPerJobLoopBitwise) {
  std::mt19937_64 rng(61);
  for (const auto& fam : testing::all_families()) {
    Problem p = testing::random_problem(rng, 20, 4, fam.spec);
    const std::vector<double> prices{0.3, 0.1, 0.6, 0.2};
    auto batch = solve_all_subproblems(p, prices);
    for (std::size_t i = 0; i < 20; ++i) {
      auto s = solve_subproblem(p.utility, i, p.efficiency.row(i), prices);
      for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(batch.x(i, j), s.x_star[j]);
      EXPECT_EQ(batch.net_utility[i], s.net_utility);
    }
  }
}

TEST(SolveAll, DemandsScalePrices) {
  std::mt19937_64 rng(71);
  Problem p = testing::random_problem(rng, 30, 3, UtilitySpec::log(), true);
  const std::vector<double> prices{0.5, 0.8, 0.2};
  auto batch = solve_all_subproblems(p, prices);
  for (std::size_t i = 0; i < 30; ++i) {
    std::vector<double> effective(3);
    for (std::size_t j = 0; j < 3; ++j) effective[j] = p.demands[i] * prices[j];
    auto s = solve_subproblem(p.utility, i, p.efficiency.row(i), effective);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(batch.x(i, j), s.x_star[j]);
    EXPECT_EQ(batch.net_utility[i], s.net_utility);
  }
}

TEST(SolveAll, IndependentOfThreadCountAndEnvelopeMethod) {
  std::mt19937_64 rng(81);
  Problem p = testing::random_problem(rng, 20'000, 5, UtilitySpec::alpha_fair(2.0));
  const std::vector<double> prices{0.3, 0.1, 0.6, 0.2, 0.9};
  auto one = solve_all_subproblems(p, prices, {1, EnvelopeMethod::kHull});
  auto four = solve_all_subproblems(p, prices, {4, EnvelopeMethod::kHull});
  auto pairwise = solve_all_subproblems(p, prices, {3, EnvelopeMethod::kPairwise});
  EXPECT_TRUE(one.x == four.x);
  EXPECT_EQ(one.net_utility, four.net_utility);
  EXPECT_TRUE(one.x == pairwise.x);
}

TEST(SolveAll, ErrorsNameTheJob) {
  Problem p;
  p.efficiency = Matrix::from_rows({{1, 1}, {0, 0}});
  p.limits = {1, 1};
  try {
    solve_all_subproblems(p, std::vector<double>{1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDomainViolation);
    EXPECT_NE(std::string(e.what()).find("job 1"), std::string::npos);
  }
}

}  // namespace
}  // namespace resalloc
