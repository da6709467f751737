#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "resalloc/dual.hpp"
#include "resalloc/problem.hpp"
#include "resalloc/subproblem.hpp"

namespace resalloc {

enum class UpdateRule { kLbfgs, kSubgradient };

// How a feasible allocation is built from the subproblem responses.
enum class PrimalRecovery {
  // Column scaling of the current response (keeps every row basic).
  kScaling,
  // Also tries the best per-job convex combination of recent responses.
  kCombination,
  // kCombination for problems with at most kCombinationMaxJobs jobs.
  kAuto,
};

inline constexpr std::size_t kCombinationMaxJobs = 256;

struct IterationRecord {
  int iter = 0;
  std::vector<double> prices;
  std::vector<double> usage;  // raw usage r at these prices
  double dual_value = 0.0;     // g(p)
  double primal_utility = 0.0; // best feasible utility found so far
  double gap = 0.0;            // dual_value - primal_utility
};

struct SolveOptions {
  // Absolute duality-gap tolerance in total-utility units; default 1e-3 * n.
  std::optional<double> tolerance;
  int max_iters = 300;
  UpdateRule update_rule = UpdateRule::kLbfgs;
  std::size_t memory = 10;
  // Base step of the diminishing schedule step0 / k; see solve() for the default.
  std::optional<double> subgradient_step0;
  std::optional<std::vector<double>> initial_prices;
  PrimalRecovery recovery = PrimalRecovery::kAuto;
  std::size_t recovery_memory = 40;  // dual evaluations kept for kCombination
  KernelOptions kernel;
  // Invoked once per iteration on the calling thread.
  std::function<void(const IterationRecord&)> on_iteration;
};

struct AllocationStats {
  double frac_two_resources = 0.0;   // rows with exactly two entries above threshold
  double frac_positive_slack = 0.0;  // rows with 1 - 1^T x_i above threshold
};

AllocationStats allocation_stats(const Allocation& x, double threshold = 1e-7);

struct SolveResult {
  Allocation x_feasible;
  std::vector<double> prices;
  std::vector<double> throughputs;
  double primal_utility = 0.0;
  double dual_value = 0.0;
  std::vector<IterationRecord> trace;
  bool converged = false;
  AllocationStats stats;  // of the raw basic allocation at the returned prices
  int dual_evaluations = 0;

  double gap() const noexcept { return dual_value - primal_utility; }
};

// Price discovery: iterate dual evaluation, primal recovery and price updates
// until g(p^k) minus the best feasible utility drops below the tolerance. On
// convergence the returned prices are p^k; otherwise they are the prices with
// the lowest dual value, returned with converged=false.
SolveResult solve(const Problem& problem, const SolveOptions& options = {});

// "iteration 03 | utility=... | dual_value=... | gap=..." with per-job averages.
std::string format_progress(const IterationRecord& record, std::size_t jobs);

}  // namespace resalloc
