#include "resalloc/dual.hpp"

#include <algorithm>
#include <string>

#include "resalloc/errors.hpp"
#include "resalloc/parallel.hpp"
#include "resalloc/utility.hpp"

namespace resalloc {

void evaluate_dual_into(const Problem& problem, std::span<const double> prices,
                        const KernelOptions& options, DualEval& out) {
  const std::size_t m = problem.limits.size();
  const std::size_t n = problem.num_jobs();
  if (prices.size() != m) {
    throw Error(ErrorCode::kDimensionMismatch, "price vector length does not match resources");
  }
  for (double p : prices) {
    if (!(p >= 0.0)) throw Error(ErrorCode::kDomainViolation, "prices must be nonnegative");
  }

  double price_of_limits = 0.0;
  for (std::size_t j = 0; j < m; ++j) price_of_limits += prices[j] * problem.limits[j];

  out.usage.assign(m, 0.0);
  out.subgradient.assign(m, 0.0);
  if (n == 0) {
    out.jobs = {};
    out.jobs.x.resize(0, m);
    out.dual_value = price_of_limits;
    out.subgradient.assign(problem.limits.begin(), problem.limits.end());
    return;
  }

  solve_all_subproblems_into(problem, prices, options, out.jobs);

  const std::size_t chunks = chunk_count(n);
  // Per chunk: m usage partials followed by the net-utility partial.
  std::vector<double> partial(chunks * (m + 1), 0.0);
  for_each_chunk(n, options.threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
    double* acc = partial.data() + c * (m + 1);
    for (std::size_t i = begin; i < end; ++i) {
      const double d = problem.demand(i);
      const auto xi = out.jobs.x.row(i);
      for (std::size_t j = 0; j < m; ++j) acc[j] += d * xi[j];
      acc[m] += out.jobs.net_utility[i];
    }
  });

  double net = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    const double* acc = partial.data() + c * (m + 1);
    for (std::size_t j = 0; j < m; ++j) out.usage[j] += acc[j];
    net += acc[m];
  }
  out.dual_value = price_of_limits + net;
  for (std::size_t j = 0; j < m; ++j) out.subgradient[j] = problem.limits[j] - out.usage[j];
}

DualEval evaluate_dual(const Problem& problem, std::span<const double> prices,
                       const KernelOptions& options) {
  DualEval out;
  evaluate_dual_into(problem, prices, options, out);
  return out;
}

std::vector<double> feasibility_scales(std::span<const double> limits,
                                       std::span<const double> usage) {
  std::vector<double> scale(limits.size(), 1.0);
  for (std::size_t j = 0; j < limits.size(); ++j) {
    if (usage[j] > limits[j]) scale[j] = limits[j] / usage[j];
  }
  return scale;
}

Allocation make_feasible(const Problem& problem, const Allocation& raw) {
  const auto usage = resource_usage(problem, raw);
  const auto scale = feasibility_scales(problem.limits, usage);
  Allocation out = raw;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] *= scale[j];
  }
  return out;
}

std::vector<double> initialize_prices(const Problem& problem) {
  const std::size_t n = problem.num_jobs();
  const std::size_t m = problem.num_resources();
  std::vector<double> prices(m, 0.0);
  if (n == 0) return prices;

  std::vector<double> start(problem.limits.begin(), problem.limits.end());
  double budget = 0.0;
  for (double& v : start) {
    v /= static_cast<double>(n);
    budget += v;
  }
  if (budget > 1.0) {
    for (double& v : start) v /= budget;
  }

  const std::size_t chunks = chunk_count(n);
  std::vector<double> gradient(chunks * m, 0.0);
  std::vector<double> column_sum(chunks * m, 0.0);
  bool undefined = false;
  for_each_chunk(n, 1, [&](std::size_t c, std::size_t begin, std::size_t end) {
    double* g = gradient.data() + c * m;
    double* s = column_sum.data() + c * m;
    for (std::size_t i = begin; i < end; ++i) {
      const auto a = problem.efficiency.row(i);
      double t = 0.0;
      for (std::size_t j = 0; j < m; ++j) t += a[j] * start[j];
      double slope = 0.0;
      try {
        slope = derivative(problem.utility, i, t);
      } catch (const Error&) {
        undefined = true;
      }
      for (std::size_t j = 0; j < m; ++j) {
        g[j] += slope * a[j];
        s[j] += a[j];
      }
    }
  });

  // u' undefined at some starting throughput: fall back to column means of A.
  const std::vector<double>& source = undefined ? column_sum : gradient;
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t j = 0; j < m; ++j) prices[j] += source[c * m + j];
  }
  for (double& p : prices) p = std::max(0.0, p / static_cast<double>(n));
  return prices;
}

}  // namespace resalloc
