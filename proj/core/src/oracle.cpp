#include "resalloc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "resalloc/errors.hpp"
#include "resalloc/subproblem.hpp"
#include "resalloc/utility.hpp"

namespace resalloc::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Largest relative column residual the scaling polish may absorb.
constexpr double kPolishLimit = 1e-6;

double max_entry(std::span<const double> a) {
  double out = 0.0;
  for (double v : a) out = std::max(out, v);
  return out;
}

// Smoothed utility used only to drive the ascent. Target-priority's kink is
// replaced by its Moreau envelope with parameter mu; other families are exact.
struct SmoothUtility {
  const UtilitySpec& spec;
  double mu = 0.0;

  double value(std::size_t job, double t) const {
    if (spec.family != UtilityFamily::kTargetPriority) return evaluate(spec, job, t);
    const double s = t - spec.targets[job];
    const double w = spec.weights[job];
    if (s >= 0.0) return 0.0;
    if (s > -mu) return -w * s * s / (2.0 * mu);
    return w * (s + 0.5 * mu);
  }

  double slope(std::size_t job, double t) const {
    if (spec.family != UtilityFamily::kTargetPriority) {
      return derivative(spec, job, std::max(t, 1e-9));
    }
    const double s = t - spec.targets[job];
    const double w = spec.weights[job];
    if (s >= 0.0) return 0.0;
    if (s > -mu) return -w * s / mu;
    return w;
  }
};

double objective(const Problem& problem, const SmoothUtility& u, const Allocation& x) {
  double total = 0.0;
  for (std::size_t i = 0; i < problem.num_jobs(); ++i) {
    const auto a = problem.efficiency.row(i);
    const auto row = x.row(i);
    const double t = std::max(0.0, std::inner_product(a.begin(), a.end(), row.begin(), 0.0));
    total += u.value(i, t);
  }
  return std::isnan(total) ? -kInf : total;
}

double exact_utility(const Problem& problem, const Allocation& x) {
  const auto t = throughputs(problem, x);
  double total = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    total += evaluate(problem.utility, i, std::max(t[i], 0.0));
  }
  return std::isnan(total) ? -kInf : total;
}

void project_row(std::span<double> row, std::vector<double>& sorted) {
  double sum = 0.0;
  for (double& v : row) {
    v = std::max(v, 0.0);
    sum += v;
  }
  if (sum <= 1.0) return;
  sorted.assign(row.begin(), row.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    prefix += sorted[k];
    const double candidate = (prefix - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  for (double& v : row) v = std::max(v - theta, 0.0);
}

void project_columns(const Problem& problem, Allocation& x, double demand_norm2) {
  for (std::size_t j = 0; j < problem.num_resources(); ++j) {
    double usage = 0.0;
    for (std::size_t i = 0; i < problem.num_jobs(); ++i) usage += problem.demand(i) * x(i, j);
    const double excess = usage - problem.limits[j];
    if (excess <= 0.0) continue;
    const double step = excess / demand_norm2;
    for (std::size_t i = 0; i < problem.num_jobs(); ++i) x(i, j) -= step * problem.demand(i);
  }
}

double column_violation(const Problem& problem, const Allocation& x) {
  const auto r = resource_usage(problem, x);
  double worst = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) {
    worst = std::max(worst, (r[j] - problem.limits[j]) / (1.0 + problem.limits[j]));
  }
  return worst;
}


// Tableau simplex with Bland's rule for max c^T z, A z = b, z >= 0, where the
// columns listed in `basis` form an identity and b >= 0.
std::vector<double> tableau_simplex(std::vector<std::vector<double>> a, std::vector<double> b,
                                    const std::vector<double>& c, std::vector<std::size_t> basis) {
  const std::size_t rows = a.size();
  const std::size_t cols = c.size();
  for (std::size_t pivots = 0; pivots < 100000; ++pivots) {
    std::size_t entering = cols;
    for (std::size_t j = 0; j < cols && entering == cols; ++j) {
      double reduced = c[j];
      for (std::size_t i = 0; i < rows; ++i) reduced -= c[basis[i]] * a[i][j];
      if (reduced > 1e-12) entering = j;
    }
    if (entering == cols) break;
    std::size_t leaving = rows;
    double ratio = kInf;
    for (std::size_t i = 0; i < rows; ++i) {
      if (a[i][entering] <= 1e-12) continue;
      const double t = b[i] / a[i][entering];
      if (t < ratio || (t == ratio && basis[i] < basis[leaving])) {
        ratio = t;
        leaving = i;
      }
    }
    if (leaving == rows) break;  // unbounded direction; cannot happen for these programs
    const double pivot = a[leaving][entering];
    for (double& v : a[leaving]) v /= pivot;
    b[leaving] /= pivot;
    for (std::size_t i = 0; i < rows; ++i) {
      const double f = a[i][entering];
      if (i == leaving || f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[leaving][j];
      b[i] = std::max(b[i] - f * b[leaving], 0.0);
    }
    basis[leaving] = entering;
  }
  std::vector<double> z(cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) z[basis[i]] = b[i];
  return z;
}

// Linear and target-priority problems are linear programs; solve them exactly.
// Variables: x (n*m), row slacks (n), resource slacks (m), and for
// target-priority the shortfalls v_i (n) and surpluses (n) with
// a_i^T x_i + v_i - surplus_i = t_i^des.
Allocation piecewise_linear_optimum(const Problem& problem) {
  const std::size_t n = problem.num_jobs();
  const std::size_t m = problem.num_resources();
  const bool target = problem.utility.family == UtilityFamily::kTargetPriority;
  const std::size_t nx = n * m;
  const std::size_t rows = n + m + (target ? n : 0);
  const std::size_t cols = nx + n + m + (target ? 2 * n : 0);

  std::vector<std::vector<double>> a(rows, std::vector<double>(cols, 0.0));
  std::vector<double> b(rows, 0.0);
  std::vector<double> c(cols, 0.0);
  std::vector<std::size_t> basis(rows);
  for (std::size_t i = 0; i < n; ++i) {
    const auto eff = problem.efficiency.row(i);
    for (std::size_t j = 0; j < m; ++j) {
      a[i][i * m + j] = 1.0;
      a[n + j][i * m + j] = problem.demand(i);
      if (!target) c[i * m + j] = eff[j];
    }
    a[i][nx + i] = 1.0;
    b[i] = 1.0;
    basis[i] = nx + i;
  }
  for (std::size_t j = 0; j < m; ++j) {
    a[n + j][nx + n + j] = 1.0;
    b[n + j] = problem.limits[j];
    basis[n + j] = nx + n + j;
  }
  if (target) {
    const std::size_t v0 = nx + n + m;
    for (std::size_t i = 0; i < n; ++i) {
      const auto eff = problem.efficiency.row(i);
      const std::size_t r = n + m + i;
      for (std::size_t j = 0; j < m; ++j) a[r][i * m + j] = eff[j];
      a[r][v0 + i] = 1.0;
      a[r][v0 + n + i] = -1.0;
      b[r] = problem.utility.targets[i];
      c[v0 + i] = -problem.utility.weights[i];
      basis[r] = v0 + i;
    }
  }
  const auto z = tableau_simplex(std::move(a), std::move(b), c, std::move(basis));
  Allocation x(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) x(i, j) = std::max(z[i * m + j], 0.0);
  }
  return x;
}

// Clears the rounding-level excess an exact solution may carry.
void make_exactly_feasible(const Problem& problem, Allocation& x) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto row = x.row(i);
    double sum = 0.0;
    for (double v : row) sum += v;
    if (sum > 1.0) {
      for (double& v : row) v /= sum;
    }
  }
  const auto r = resource_usage(problem, x);
  for (std::size_t j = 0; j < r.size(); ++j) {
    if (r[j] <= problem.limits[j]) continue;
    const double scale = problem.limits[j] / r[j];
    for (std::size_t i = 0; i < x.rows(); ++i) x(i, j) *= scale;
  }
}

}  // namespace

double brute_force_cost(std::span<const double> a, std::span<const double> prices, double t) {
  // Index 0 is the idle origin; index k > 0 is resource k - 1.
  const std::size_t m = a.size();
  auto coord = [&](std::size_t k) { return k == 0 ? 0.0 : a[k - 1]; };
  auto price = [&](std::size_t k) { return k == 0 ? 0.0 : prices[k - 1]; };
  double best = kInf;
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = i; j <= m; ++j) {
      const double lo = std::min(coord(i), coord(j));
      const double hi = std::max(coord(i), coord(j));
      if (t < lo || t > hi) continue;
      double cost;
      if (hi == lo) {
        cost = std::min(price(i), price(j));
      } else {
        const std::size_t left = coord(i) <= coord(j) ? i : j;
        const std::size_t right = left == i ? j : i;
        const double theta = (t - lo) / (hi - lo);
        cost = (1.0 - theta) * price(left) + theta * price(right);
      }
      best = std::min(best, cost);
    }
  }
  return best;
}

GridOptimum subproblem_grid_oracle(const UtilitySpec& spec, std::size_t job,
                                   std::span<const double> a, std::span<const double> prices,
                                   std::size_t grid_points) {
  const double a_max = max_entry(a);
  GridOptimum best{0.0, -kInf};
  const std::size_t steps = std::max<std::size_t>(grid_points, 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = a_max * static_cast<double>(k) / static_cast<double>(steps);
    const double value = evaluate(spec, job, t) - brute_force_cost(a, prices, t);
    if (value > best.value) best = {t, value};
    if (a_max == 0.0) break;
  }
  return best;
}

namespace {

// Dykstra sweeps followed by a column-scaling polish; returns the relative
// column residual seen before the polish.
double project_into(const Problem& problem, Allocation& x, int sweeps, double tolerance) {
  const std::size_t n = problem.num_jobs();
  const std::size_t m = problem.num_resources();
  double demand_norm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) demand_norm2 += problem.demand(i) * problem.demand(i);

  Allocation p(n, m, 0.0);
  Allocation q(n, m, 0.0);
  Allocation b(n, m);
  std::vector<double> sorted;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t k = 0; k < x.data().size(); ++k) b.data()[k] = x.data()[k] + p.data()[k];
    project_columns(problem, b, demand_norm2);
    for (std::size_t k = 0; k < x.data().size(); ++k) {
      p.data()[k] += x.data()[k] - b.data()[k];
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto row = x.row(i);
      const auto b_row = b.row(i);
      auto q_row = q.row(i);
      std::vector<double> next(m);
      for (std::size_t j = 0; j < m; ++j) next[j] = b_row[j] + q_row[j];
      project_row(next, sorted);
      for (std::size_t j = 0; j < m; ++j) {
        q_row[j] += b_row[j] - next[j];
        change = std::max(change, std::abs(next[j] - row[j]));
        row[j] = next[j];
      }
    }
    if (change <= tolerance && column_violation(problem, x) <= tolerance) break;
  }

  // Rows are exactly feasible after the last sweep; scaling removes any
  // remaining column excess.
  const double residual = column_violation(problem, x);
  const auto r = resource_usage(problem, x);
  for (std::size_t j = 0; j < m; ++j) {
    if (r[j] <= problem.limits[j]) continue;
    const double scale = problem.limits[j] / r[j];
    for (std::size_t i = 0; i < n; ++i) x(i, j) *= scale;
  }
  return residual;
}

[[noreturn]] void projection_failed(double residual, int sweeps) {
  throw Error(ErrorCode::kProjectionNotConverged,
              "projection residual " + std::to_string(residual) + " after " +
                  std::to_string(sweeps) + " sweeps");
}

}  // namespace

Allocation project_feasible(const Problem& problem, const Allocation& y, int sweeps,
                            double tolerance) {
  Allocation x = y;
  const double residual = project_into(problem, x, sweeps, tolerance);
  if (residual > kPolishLimit) projection_failed(residual, sweeps);
  return x;
}

PrimalOracleResult primal_oracle(const Problem& problem, const PrimalOracleOptions& options) {
  validate(problem);
  const std::size_t n = problem.num_jobs();
  const std::size_t m = problem.num_resources();

  double total_demand = 0.0;
  for (std::size_t i = 0; i < n; ++i) total_demand += problem.demand(i);
  Allocation x(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      x(i, j) = std::min(1.0 / static_cast<double>(m), problem.limits[j] / total_demand);
    }
  }

  if (n > 0 && (problem.utility.family == UtilityFamily::kLinear ||
                problem.utility.family == UtilityFamily::kTargetPriority)) {
    Allocation exact = piecewise_linear_optimum(problem);
    make_exactly_feasible(problem, exact);
    const double utility = exact_utility(problem, exact);
    return {std::move(exact), utility, 1};
  }

  PrimalOracleResult best{x, exact_utility(problem, x), 0};
  auto done = [&] {
    return options.upper_bound && best.utility >= *options.upper_bound - options.target_gap;
  };
  if (n == 0 || done()) return best;

  const bool smoothed = problem.utility.family == UtilityFamily::kTargetPriority;
  const std::vector<double> schedule =
      smoothed ? std::vector<double>{1e-2, 1e-3, 1e-4, 1e-5, 1e-6} : std::vector<double>{0.0};
  const int per_phase = std::max(1, options.iters / static_cast<int>(schedule.size()));

  Allocation previous = x;
  Allocation y(n, m);
  Allocation grad(n, m);
  Allocation z(n, m);
  double lipschitz = 1.0;
  int iteration = 0;
  for (double mu : schedule) {
    const SmoothUtility u{problem.utility, mu};
    double fx = objective(problem, u, x);
    double theta = 1.0;
    previous = x;
    for (int k = 0; k < per_phase; ++k, ++iteration) {
      const double next_theta = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      const double momentum = (theta - 1.0) / next_theta;
      for (std::size_t e = 0; e < x.data().size(); ++e) {
        y.data()[e] = x.data()[e] + momentum * (x.data()[e] - previous.data()[e]);
      }
      double fy = objective(problem, u, y);
      if (!std::isfinite(fy)) {
        y = x;
        fy = fx;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const auto a = problem.efficiency.row(i);
        const auto y_row = y.row(i);
        const double t = std::max(0.0, std::inner_product(a.begin(), a.end(), y_row.begin(), 0.0));
        const double s = u.slope(i, t);
        for (std::size_t j = 0; j < m; ++j) grad(i, j) = s * a[j];
      }
      // Entries live in [0, 1]; keep the first trial step within that scale.
      double grad_scale = 0.0;
      for (double g : grad.data()) grad_scale = std::max(grad_scale, std::abs(g));
      lipschitz = std::max(lipschitz, grad_scale);

      double fz = -kInf;
      for (int trial = 0; trial < 60; ++trial) {
        for (std::size_t e = 0; e < y.data().size(); ++e) {
          z.data()[e] = y.data()[e] + grad.data()[e] / lipschitz;
        }
        project_into(problem, z, options.projection_sweeps, options.projection_tolerance);
        fz = objective(problem, u, z);
        double linear = 0.0;
        double dist2 = 0.0;
        for (std::size_t e = 0; e < z.data().size(); ++e) {
          const double d = z.data()[e] - y.data()[e];
          linear += grad.data()[e] * d;
          dist2 += d * d;
        }
        // Without momentum y == x, and the projection is only approximate, so
        // also insist on ascent; small enough steps always achieve it.
        const bool model_ok =
            fz >= fy + linear - 0.5 * lipschitz * dist2 - 1e-12 * (1.0 + std::abs(fy));
        if (model_ok && (momentum > 0.0 || fz >= fx)) break;
        lipschitz *= 2.0;
      }

      if (!(fz >= fx)) {
        // Objective went down: drop momentum and retry from x.
        theta = 1.0;
        previous = x;
        continue;
      }
      previous = x;
      x = z;
      fx = fz;
      theta = next_theta;
      lipschitz *= 0.9;

      const double exact = exact_utility(problem, x);
      if (exact > best.utility) {
        best.x = x;
        best.utility = exact;
      }
      best.iterations = iteration + 1;
      if (done()) return best;
    }
  }
  return best;
}

KktReport check_kkt(const Problem& problem, const Allocation& x, std::span<const double> prices,
                    double tol) {
  const std::size_t n = problem.num_jobs();
  const std::size_t m = problem.num_resources();
  if (x.rows() != n || x.cols() != m || prices.size() != m) {
    throw Error(ErrorCode::kDimensionMismatch, "allocation or prices do not match the problem");
  }
  KktReport report;
  const auto feas = check_feasibility(problem, x);
  report.primal_feasibility =
      std::max({-feas.min_entry, feas.max_row_excess, feas.max_usage_excess});
  report.feasibility_tolerance = feasibility_tolerance(max_entry(problem.limits));

  std::vector<double> effective(m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = problem.efficiency.row(i);
    const auto row = x.row(i);
    const double d = problem.demand(i);
    for (std::size_t j = 0; j < m; ++j) effective[j] = d * prices[j];
    const auto best = solve_subproblem(problem.utility, i, a, effective);
    const double t = std::max(0.0, std::inner_product(a.begin(), a.end(), row.begin(), 0.0));
    const double cost = std::inner_product(effective.begin(), effective.end(), row.begin(), 0.0);
    const double net = evaluate(problem.utility, i, t) - cost;
    const double deficit = std::isfinite(net) ? best.net_utility - net : kInf;
    report.stationarity = std::max(report.stationarity, deficit);
  }
  report.stationarity_tolerance = tol;

  const auto usage = resource_usage(problem, x);
  double p_norm = 0.0;
  double r_norm = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    report.complementary_slackness = std::max(
        report.complementary_slackness, std::abs(prices[j] * (problem.limits[j] - usage[j])));
    p_norm += prices[j] * prices[j];
    r_norm += problem.limits[j] * problem.limits[j];
  }
  report.slackness_tolerance = tol * (1.0 + std::sqrt(p_norm) * std::sqrt(r_norm));

  report.passed = report.primal_feasibility <= report.feasibility_tolerance &&
                  report.stationarity <= report.stationarity_tolerance &&
                  report.complementary_slackness <= report.slackness_tolerance;
  return report;
}

}  // namespace resalloc::oracle
