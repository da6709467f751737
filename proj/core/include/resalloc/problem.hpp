#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "resalloc/matrix.hpp"

namespace resalloc {

enum class UtilityFamily { kLinear, kLog, kAlphaFair, kPower, kTargetPriority };

std::string_view to_string(UtilityFamily family);
std::optional<UtilityFamily> parse_family(std::string_view name);

// Tagged utility description shared by every job. Only target-priority
// carries per-job parameters.
struct UtilitySpec {
  UtilityFamily family = UtilityFamily::kLog;
  double alpha = 0.0;  // alpha-fair: alpha >= 0 (0 is linear, 1 is log)
  double rho = 1.0;    // power: rho in (0, 1] means t^rho, rho < 0 means -t^rho
  std::vector<double> weights;  // target-priority: w_i > 0
  std::vector<double> targets;  // target-priority: t_i^des > 0

  static UtilitySpec linear();
  static UtilitySpec log();
  static UtilitySpec alpha_fair(double alpha);
  static UtilitySpec power(double rho);
  static UtilitySpec target_priority(std::vector<double> weights, std::vector<double> targets);

  // True when u(t) -> -inf as t -> 0, so every job needs a usable resource.
  bool unbounded_at_zero() const;
  // True when u' is strictly decreasing, i.e. (u')^{-1} exists.
  bool strictly_concave() const;
};

using Allocation = Matrix;

struct Problem {
  Matrix efficiency;            // n x m, row i is a_i
  std::vector<double> limits;   // R, size m
  std::vector<double> demands;  // d, size n; empty means all ones
  UtilitySpec utility;

  std::size_t num_jobs() const noexcept { return efficiency.rows(); }
  std::size_t num_resources() const noexcept { return efficiency.cols(); }
  double demand(std::size_t job) const noexcept {
    return demands.empty() ? 1.0 : demands[job];
  }
};

// Throws Error unless every structural invariant of the problem holds.
void validate(const Problem& problem);

// t_i = a_i^T x_i.
std::vector<double> throughputs(const Problem& problem, const Allocation& x);

// r = sum_i d_i x_i.
std::vector<double> resource_usage(const Problem& problem, const Allocation& x);

struct UtilitySummary {
  double total = 0.0;
  double average = 0.0;
  // u^{-1}(U/n); present for the invertible families (not target-priority).
  std::optional<double> utility_average;
};

// Throws DomainViolation when some t_i lies outside the utility's domain.
UtilitySummary total_utility(const Problem& problem, std::span<const double> t);

// Relative slack used by the feasibility checks: 1e-9 * (1 + scale).
double feasibility_tolerance(double scale);

struct FeasibilityReport {
  double min_entry = 0.0;          // most negative entry (0 if none)
  double max_row_excess = 0.0;     // max_i (1^T x_i - 1)^+
  double max_usage_excess = 0.0;   // max_j (r_j - R_j)^+
  bool row_feasible = true;
  bool feasible = true;            // row feasible and usage within limits
};

FeasibilityReport check_feasibility(const Problem& problem, const Allocation& x);

}  // namespace resalloc
