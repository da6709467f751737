#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "resalloc/problem.hpp"

// Reference solvers for desk-scale certification. Nothing here reuses the
// envelope or subproblem kernel except check_kkt, whose stationarity test is
// defined against the kernel's optimum.
namespace resalloc::oracle {

// Minimum cost to reach throughput t: the pointwise minimum over every pair
// of resources (including the idle origin) of the affine cost along the
// segment joining them, restricted to t within that segment. +inf if t is
// beyond max_j a_j.
double brute_force_cost(std::span<const double> a, std::span<const double> prices, double t);

struct GridOptimum {
  double t = 0.0;
  double value = 0.0;
};

// Best net utility u(t) - c(t) over grid_points + 1 uniform points on
// [0, max_j a_j], using brute_force_cost. Ties keep the smaller t.
GridOptimum subproblem_grid_oracle(const UtilitySpec& spec, std::size_t job,
                                   std::span<const double> a, std::span<const double> prices,
                                   std::size_t grid_points);

struct PrimalOracleOptions {
  int iters = 4000;
  int projection_sweeps = 200;
  double projection_tolerance = 1e-9;
  // Stops early once utility is within target_gap of this upper bound.
  std::optional<double> upper_bound;
  double target_gap = 0.0;
};

struct PrimalOracleResult {
  Allocation x;
  double utility = 0.0;
  int iterations = 0;
};

// Accelerated projected gradient ascent on the primal with a Dykstra
// projection onto {X >= 0, rows sum <= 1, usage <= R}; every iterate is made
// exactly feasible by a column-scaling polish. Linear and target-priority
// problems are linear programs and are solved exactly by a tableau simplex
// instead, since first-order ascent stalls on their degenerate optima.
PrimalOracleResult primal_oracle(const Problem& problem, const PrimalOracleOptions& options = {});

// Euclidean projection onto {X >= 0, rows sum <= 1, sum_i d_i x_i <= R}.
// Throws ProjectionNotConverged when the sweeps leave a relative column
// residual above 1e-6.
Allocation project_feasible(const Problem& problem, const Allocation& y, int sweeps,
                            double tolerance);

struct KktReport {
  double primal_feasibility = 0.0;       // largest constraint violation
  double stationarity = 0.0;             // max_i (best net_i - net_i(x_i))
  double complementary_slackness = 0.0;  // max_j |p_j (R_j - r_j)|
  double feasibility_tolerance = 0.0;
  double stationarity_tolerance = 0.0;
  double slackness_tolerance = 0.0;
  bool passed = false;
};

KktReport check_kkt(const Problem& problem, const Allocation& x, std::span<const double> prices,
                    double tol);

}  // namespace resalloc::oracle
