#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "resalloc/envelope.hpp"
#include "resalloc/problem.hpp"

namespace resalloc {

struct KernelOptions {
  unsigned threads = 1;  // 0 = hardware concurrency
  EnvelopeMethod envelope = EnvelopeMethod::kHull;
};

struct SegmentOptimum {
  double t = 0.0;
  double value = 0.0;  // u(t) - (slope * t + intercept)
};

// Exact maximizer of u(t) - (slope * t + intercept) over [lo, hi] using the
// family's closed form; ties resolve to the smaller t.
SegmentOptimum maximize_over_segment(const UtilitySpec& spec, std::size_t job, double slope,
                                     double intercept, double lo, double hi);

// Allocation on the segment joining resources `left` and `right` (left may be
// CostEnvelope::kVirtualOrigin) that reaches throughput t. Throws
// TOutOfSegment when t is outside [a_left, a_right].
std::vector<double> allocation_from_segment(std::span<const double> a, std::size_t left,
                                            std::size_t right, double t);

struct SubproblemSolution {
  double t_star = 0.0;
  std::vector<double> x_star;
  double net_utility = 0.0;  // u(t*) - p^T x*
};

// Maximizes u(t) - c(t) over the job's envelope and maps t* back to an
// allocation with at most two nonzeros.
SubproblemSolution solve_subproblem(const UtilitySpec& spec, std::size_t job,
                                    std::span<const double> a,
                                    std::span<const double> effective_prices,
                                    EnvelopeMethod method = EnvelopeMethod::kHull);

struct SubproblemBatch {
  Allocation x;                     // n x m, row i solves job i
  std::vector<double> net_utility;  // per job
  std::vector<double> throughput;   // per job
};

// Solves every job's subproblem with effective prices d_i * p.
SubproblemBatch solve_all_subproblems(const Problem& problem, std::span<const double> prices,
                                      const KernelOptions& options = {});
void solve_all_subproblems_into(const Problem& problem, std::span<const double> prices,
                                const KernelOptions& options, SubproblemBatch& out);

}  // namespace resalloc
