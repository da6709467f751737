#include "recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "resalloc/utility.hpp"
#include "simplex.hpp"

namespace resalloc::detail {

namespace {

double row_utility(const Problem& problem, std::size_t job, std::span<const double> x) {
  const auto a = problem.efficiency.row(job);
  double t = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) t += a[j] * x[j];
  return evaluate(problem.utility, job, std::max(t, 0.0));
}

}  // namespace

CombinationRecovery::CombinationRecovery(const Problem& problem, std::size_t capacity)
    : problem_(problem), capacity_(std::max<std::size_t>(capacity, 1)) {}

void CombinationRecovery::add(const DualEval& eval) {
  Entry entry{eval.raw(), feasibility_scales(problem_.limits, eval.usage), 0.0};
  std::vector<double> scaled(problem_.num_resources());
  for (std::size_t i = 0; i < problem_.num_jobs(); ++i) {
    const auto raw = entry.raw.row(i);
    for (std::size_t j = 0; j < scaled.size(); ++j) scaled[j] = raw[j] * entry.scale[j];
    entry.scaled_utility += row_utility(problem_, i, scaled);
  }
  if (std::isnan(entry.scaled_utility)) {
    entry.scaled_utility = -std::numeric_limits<double>::infinity();
  }
  entries_.push_back(std::move(entry));
  if (entries_.size() > capacity_) entries_.pop_front();
}

std::optional<CombinationRecovery::Result> CombinationRecovery::combine() const {
  const std::size_t n = problem_.num_jobs();
  const std::size_t m = problem_.num_resources();
  if (entries_.empty() || n == 0) return std::nullopt;

  // The starting basis uses the best jointly feasible scaled response.
  const auto anchor = std::max_element(
      entries_.begin(), entries_.end(),
      [](const Entry& a, const Entry& b) { return a.scaled_utility < b.scaled_utility; });
  if (!std::isfinite(anchor->scaled_utility)) return std::nullopt;

  LinearProgram lp;
  lp.rows = n + m;
  lp.rhs.assign(n + m, 1.0);
  for (std::size_t j = 0; j < m; ++j) lp.rhs[n + j] = problem_.limits[j];
  std::vector<std::vector<double>> allocations;  // x for each job column
  std::vector<std::size_t> owner;
  std::vector<std::size_t> basis(n + m);

  std::vector<double> row(m);
  auto add_column = [&](std::size_t job, bool anchor_column) {
    // Reuse an identical column for the same job.
    for (std::size_t c = 0; c < allocations.size(); ++c) {
      if (owner[c] == job && allocations[c] == row) {
        if (anchor_column) basis[job] = c;
        return;
      }
    }
    const double u = row_utility(problem_, job, row);
    if (!std::isfinite(u)) return;
    std::vector<double> col(n + m, 0.0);
    col[job] = 1.0;
    for (std::size_t j = 0; j < m; ++j) col[n + j] = problem_.demand(job) * row[j];
    if (anchor_column) basis[job] = lp.columns.size();
    lp.columns.push_back(std::move(col));
    lp.cost.push_back(u);
    allocations.push_back(row);
    owner.push_back(job);
  };

  for (std::size_t i = 0; i < n; ++i) {
    const auto raw = anchor->raw.row(i);
    for (std::size_t j = 0; j < m; ++j) row[j] = raw[j] * anchor->scale[j];
    add_column(i, true);
  }
  for (const Entry& entry : entries_) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto raw = entry.raw.row(i);
      row.assign(raw.begin(), raw.end());
      add_column(i, false);
      for (std::size_t j = 0; j < m; ++j) row[j] = raw[j] * entry.scale[j];
      add_column(i, false);
    }
  }
  const std::size_t job_columns = lp.columns.size();
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> col(n + m, 0.0);
    col[n + j] = 1.0;
    basis[n + j] = lp.columns.size();
    lp.columns.push_back(std::move(col));
    lp.cost.push_back(0.0);
  }

  const auto solution = solve_lp(lp, basis, 50 * (n + m) + 1000);
  if (!solution) return std::nullopt;

  Result result{Allocation(n, m, 0.0), 0.0, std::vector<double>(m)};
  for (std::size_t j = 0; j < m; ++j) result.prices[j] = std::max(solution->duals[n + j], 0.0);
  for (std::size_t c = 0; c < job_columns; ++c) {
    const double weight = solution->x[c];
    if (weight <= 0.0) continue;
    auto out = result.x.row(owner[c]);
    for (std::size_t j = 0; j < m; ++j) out[j] += weight * allocations[c][j];
  }
  // Rounding can leave rows or columns a few ulps over their limits.
  for (std::size_t i = 0; i < n; ++i) {
    auto out = result.x.row(i);
    double sum = 0.0;
    for (double v : out) sum += v;
    if (sum > 1.0) {
      for (double& v : out) v /= sum;
    }
  }
  const auto scale = feasibility_scales(problem_.limits, resource_usage(problem_, result.x));
  for (std::size_t i = 0; i < n; ++i) {
    auto out = result.x.row(i);
    for (std::size_t j = 0; j < m; ++j) out[j] *= scale[j];
    result.utility += row_utility(problem_, i, out);
  }
  if (std::isnan(result.utility)) return std::nullopt;
  return result;
}

}  // namespace resalloc::detail
