#include "resalloc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "resalloc/errors.hpp"
#include "resalloc/parallel.hpp"
#include "resalloc/price_update.hpp"
#include "resalloc/utility.hpp"
#include "recovery.hpp"

namespace resalloc {

namespace {

double inf_norm(std::span<const double> v) {
  double out = 0.0;
  for (double x : v) out = std::max(out, std::abs(x));
  return out;
}

// Utility of the column-scaled allocation, computed without materializing it.
double scaled_utility(const Problem& problem, const Allocation& raw,
                      std::span<const double> scale, std::vector<double>& t) {
  const std::size_t n = problem.num_jobs();
  const std::size_t m = problem.num_resources();
  t.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = problem.efficiency.row(i);
    const auto x = raw.row(i);
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) sum += a[j] * x[j] * scale[j];
    t[i] = sum;
  }
  try {
    return total_utility(problem, t).total;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDomainViolation) throw;
    return -std::numeric_limits<double>::infinity();
  }
}

Allocation scale_columns(const Allocation& raw, std::span<const double> scale) {
  Allocation out = raw;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] *= scale[j];
  }
  return out;
}

// Rows mixed from several responses can carry more than two nonzeros. Drops
// the smallest entries of such rows while the total utility stays at least
// `floor`; dropping only lowers usage, so feasibility is kept.
void sparsify_rows(const Problem& problem, Allocation& x, double& utility, double floor,
                   double threshold) {
  const std::size_t m = problem.num_resources();
  std::vector<double> trial(m);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto row = x.row(i);
    std::size_t nonzero = 0;
    for (double v : row) nonzero += v > threshold ? 1 : 0;
    if (nonzero <= 2) continue;
    trial.assign(row.begin(), row.end());
    while (nonzero > 2) {
      std::size_t smallest = m;
      for (std::size_t j = 0; j < m; ++j) {
        if (trial[j] > threshold && (smallest == m || trial[j] < trial[smallest])) smallest = j;
      }
      trial[smallest] = 0.0;
      --nonzero;
    }
    const auto a = problem.efficiency.row(i);
    double before = 0.0;
    double after = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      before += a[j] * row[j];
      after += a[j] * trial[j];
    }
    const double candidate = utility - evaluate(problem.utility, i, before) +
                             evaluate(problem.utility, i, after);
    if (candidate >= floor) {
      std::copy(trial.begin(), trial.end(), row.begin());
      utility = candidate;
    }
  }
}

}  // namespace

AllocationStats allocation_stats(const Allocation& x, double threshold) {
  AllocationStats stats;
  if (x.rows() == 0) return stats;
  std::size_t two = 0;
  std::size_t slack = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::size_t nonzero = 0;
    double sum = 0.0;
    for (double v : x.row(i)) {
      nonzero += v > threshold ? 1 : 0;
      sum += v;
    }
    two += nonzero == 2 ? 1 : 0;
    slack += 1.0 - sum > threshold ? 1 : 0;
  }
  stats.frac_two_resources = static_cast<double>(two) / static_cast<double>(x.rows());
  stats.frac_positive_slack = static_cast<double>(slack) / static_cast<double>(x.rows());
  return stats;
}

std::string format_progress(const IterationRecord& record, std::size_t jobs) {
  const double n = static_cast<double>(std::max<std::size_t>(jobs, 1));
  char line[160];
  std::snprintf(line, sizeof(line), "iteration %02d | utility=%.6g | dual_value=%.6g | gap=%.2e",
                record.iter, record.primal_utility / n, record.dual_value / n, record.gap / n);
  return line;
}

SolveResult solve(const Problem& problem, const SolveOptions& options) {
  validate(problem);
  if (options.max_iters < 1) {
    throw Error(ErrorCode::kInvalidOption, "max_iters must be at least 1");
  }
  const std::size_t n = problem.num_jobs();
  const std::size_t m = problem.num_resources();
  const double tolerance = options.tolerance.value_or(1e-3 * static_cast<double>(std::max<std::size_t>(n, 1)));
  if (!(tolerance > 0.0)) throw Error(ErrorCode::kInvalidOption, "tolerance must be positive");
  if (options.update_rule == UpdateRule::kLbfgs && options.memory < 1) {
    throw Error(ErrorCode::kInvalidOption, "L-BFGS memory must be at least 1");
  }

  std::vector<double> prices =
      options.initial_prices ? *options.initial_prices : initialize_prices(problem);
  if (prices.size() != m) {
    throw Error(ErrorCode::kDimensionMismatch, "initial prices must have one entry per resource");
  }
  for (double& p : prices) p = std::max(p, 0.0);

  const bool combine = options.recovery == PrimalRecovery::kCombination ||
                       (options.recovery == PrimalRecovery::kAuto && n <= kCombinationMaxJobs);
  std::optional<detail::CombinationRecovery> pool;
  if (combine) pool.emplace(problem, options.recovery_memory);

  SolveResult result;
  DualEval current;
  DualEval trial;
  auto evaluate = [&](std::span<const double> p, DualEval& out) {
    evaluate_dual_into(problem, p, options.kernel, out);
    ++result.dual_evaluations;
    if (pool) pool->add(out);
  };
  evaluate(prices, current);

  // The L-BFGS objective is g itself; its gradient is q = R - r.
  const Objective objective = [&](std::span<const double> p, std::vector<double>& grad) {
    evaluate(p, trial);
    grad.assign(trial.subgradient.begin(), trial.subgradient.end());
    return trial.dual_value;
  };

  LbfgsOptions lbfgs;
  lbfgs.memory = options.memory;
  LbfgsHistory history(options.memory);

  std::optional<double> step0 = options.subgradient_step0;
  int subgradient_steps = 0;
  int increases = 0;
  auto take_subgradient_step = [&] {
    if (!step0) {
      // p^1 carries the price scale and q^1 the usage scale; their ratio keeps
      // the first move at a tenth of the largest price.
      const double p_scale = std::max(inf_norm(prices), 1e-12);
      const double q_scale = std::max(inf_norm(current.subgradient), 1e-12);
      step0 = p_scale / (10.0 * q_scale);
    }
    prices = subgradient_step(prices, current.subgradient, ++subgradient_steps, *step0);
    evaluate(prices, current);
  };

  // Best feasible allocation found so far, and the lowest dual bound.
  Allocation best_x;
  double best_primal = -std::numeric_limits<double>::infinity();
  std::vector<double> best_prices = prices;
  double best_dual = std::numeric_limits<double>::infinity();
  AllocationStats best_stats;

  std::vector<double> scratch_t;
  std::optional<std::vector<double>> master_prices;
  DualEval master;
  for (int iter = 0; iter < options.max_iters; ++iter) {
    const auto scale = feasibility_scales(problem.limits, current.usage);
    const double scaled = scaled_utility(problem, current.raw(), scale, scratch_t);
    if (scaled > best_primal || best_x.empty()) {
      best_primal = scaled;
      best_x = scale_columns(current.raw(), scale);
    }
    master_prices.reset();
    if (pool && current.dual_value - best_primal > tolerance) {
      if (auto mixed = pool->combine()) {
        master_prices = std::move(mixed->prices);
        if (mixed->utility > best_primal) {
          best_primal = mixed->utility;
          best_x = std::move(mixed->x);
        }
      }
    }

    if (pool && current.dual_value - best_primal <= tolerance) {
      sparsify_rows(problem, best_x, best_primal, current.dual_value - tolerance, 1e-7);
    }

    IterationRecord record;
    record.iter = iter;
    record.prices = prices;
    record.usage = current.usage;
    record.dual_value = current.dual_value;
    record.primal_utility = best_primal;
    record.gap = current.dual_value - best_primal;
    if (options.on_iteration) options.on_iteration(record);
    result.trace.push_back(record);

    const bool converged = record.gap <= tolerance;
    if (converged || current.dual_value < best_dual) {
      best_dual = current.dual_value;
      best_prices = prices;
      best_stats = allocation_stats(current.raw());
    }
    if (converged) {
      result.converged = true;
      break;
    }
    if (iter + 1 == options.max_iters) break;

    const double previous_dual = current.dual_value;
    if (master_prices) {
      // The master program's resource duals are a cutting-plane candidate; on
      // piecewise-linear duals they often beat the quasi-Newton step.
      evaluate(*master_prices, master);
      if (master.dual_value < current.dual_value) {
        prices = std::move(*master_prices);
        std::swap(current, master);
        history.clear();
        increases = 0;
        continue;
      }
    }
    if (options.update_rule == UpdateRule::kSubgradient) {
      take_subgradient_step();
      continue;
    }
    auto step =
        lbfgs_step(history, prices, current.dual_value, current.subgradient, objective, lbfgs);
    if (!step) {
      history.clear();
      take_subgradient_step();
      continue;
    }
    prices = std::move(step->point);
    std::swap(current, trial);
    increases = current.dual_value > previous_dual ? increases + 1 : 0;
    if (increases >= 2) {
      history.clear();
      increases = 0;
      take_subgradient_step();
    }
  }

  result.prices = std::move(best_prices);
  result.x_feasible = std::move(best_x);
  result.throughputs = throughputs(problem, result.x_feasible);
  result.primal_utility = best_primal;
  result.dual_value = best_dual;
  result.stats = best_stats;
  return result;
}

}  // namespace resalloc
