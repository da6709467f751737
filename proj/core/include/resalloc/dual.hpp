#pragma once

#include <span>
#include <vector>

#include "resalloc/problem.hpp"
#include "resalloc/subproblem.hpp"

namespace resalloc {

struct DualEval {
  double dual_value = 0.0;           // g(p) = p^T R + sum_i net_i
  std::vector<double> subgradient;   // q = R - r
  std::vector<double> usage;         // r = sum_i d_i x_i
  SubproblemBatch jobs;              // raw (row-feasible) allocation

  const Allocation& raw() const noexcept { return jobs.x; }
};

// Evaluates the dual function and a subgradient at prices p >= 0. The problem
// may have zero jobs, in which case g(p) = p^T R and q = R.
DualEval evaluate_dual(const Problem& problem, std::span<const double> prices,
                       const KernelOptions& options = {});
void evaluate_dual_into(const Problem& problem, std::span<const double> prices,
                        const KernelOptions& options, DualEval& out);

// Column scale factors min(1, R_j / r_j); columns with r_j == 0 keep scale 1.
std::vector<double> feasibility_scales(std::span<const double> limits,
                                       std::span<const double> usage);

// Scales each column of a row-feasible allocation down until the resource
// limits hold.
Allocation make_feasible(const Problem& problem, const Allocation& raw);

// Data-driven starting prices: the utility gradient at the uniform split
// x_i = R / n (rescaled to fit the row budget), clamped at zero.
std::vector<double> initialize_prices(const Problem& problem);

}  // namespace resalloc
