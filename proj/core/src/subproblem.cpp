#include "resalloc/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "resalloc/errors.hpp"
#include "resalloc/parallel.hpp"
#include "resalloc/utility.hpp"

namespace resalloc {

namespace {

double project(double t, double lo, double hi) {
  // NaN never arrives here; +inf from a vanishing slope lands on hi.
  return std::min(std::max(t, lo), hi);
}

// Stationary point of u(t) - slope * t for strictly concave families.
double stationary_point(const UtilitySpec& spec, std::size_t job, double slope, double hi) {
  if (slope <= 0.0) return hi;
  return inverse_derivative(spec, job, slope);
}

double segment_argmax(const UtilitySpec& spec, std::size_t job, double slope, double lo,
                      double hi) {
  switch (spec.family) {
    case UtilityFamily::kLinear:
      return 1.0 > slope ? hi : lo;
    case UtilityFamily::kLog:
      return project(stationary_point(spec, job, slope, hi), lo, hi);
    case UtilityFamily::kAlphaFair:
      if (spec.alpha == 0.0) return 1.0 > slope ? hi : lo;
      return project(stationary_point(spec, job, slope, hi), lo, hi);
    case UtilityFamily::kPower:
      if (spec.rho == 1.0) return 1.0 > slope ? hi : lo;
      return project(stationary_point(spec, job, slope, hi), lo, hi);
    case UtilityFamily::kTargetPriority: {
      const double w = spec.weights[job];
      const double target = spec.targets[job];
      if (w <= slope) return lo;
      if (hi <= target) return hi;
      if (lo <= target) return target;
      return lo;  // already past the target: utility is flat, cost is not
    }
  }
  throw Error(ErrorCode::kUnsupportedFamily, "unknown utility family");
}

struct RowResult {
  double t = 0.0;
  double net = 0.0;
};

// Solves one job in place: writes its allocation into x (length m).
RowResult solve_row(const UtilitySpec& spec, std::size_t job, std::span<const double> a,
                    std::span<const double> q, EnvelopeMethod method, CostEnvelope& env,
                    EnvelopeScratch& scratch, std::span<double> x) {
  build_envelope_into(a, q, method, env, scratch);
  std::fill(x.begin(), x.end(), 0.0);

  if (env.num_segments() == 0) {
    const double u0 = evaluate(spec, job, 0.0);
    if (!std::isfinite(u0)) {
      throw Error(ErrorCode::kDomainViolation,
                  "job has no usable resource and its utility is unbounded at zero");
    }
    return {0.0, u0};
  }

  std::size_t best_seg = 0;
  SegmentOptimum best{0.0, -std::numeric_limits<double>::infinity()};
  for (std::size_t k = 0; k < env.num_segments(); ++k) {
    const double lo = env.throughput[k];
    const double hi = env.throughput[k + 1];
    const double s = env.slope(k);
    const double t = segment_argmax(spec, job, s, lo, hi);
    const double value = evaluate(spec, job, t) - (env.cost[k] + s * (t - lo));
    // Strict improvement only: earlier segments (smaller t) win ties.
    if (k == 0 || value > best.value) {
      best = {t, value};
      best_seg = k;
    }
  }

  const std::size_t left = env.resource[best_seg];
  const std::size_t right = env.resource[best_seg + 1];
  const double a_left = left == CostEnvelope::kVirtualOrigin ? 0.0 : a[left];
  const double a_right = a[right];
  const double t = best.t;
  const double span_width = a_right - a_left;
  double cost = 0.0;
  if (t >= a_right) {
    x[right] = 1.0;
    cost = q[right];
  } else if (left != CostEnvelope::kVirtualOrigin && t <= a_left) {
    x[left] = 1.0;
    cost = q[left];
  } else {
    x[right] = (t - a_left) / span_width;
    cost = q[right] * x[right];
    if (left != CostEnvelope::kVirtualOrigin) {
      x[left] = (a_right - t) / span_width;
      cost += q[left] * x[left];
    }
  }
  return {t, evaluate(spec, job, t) - cost};
}

}  // namespace

SegmentOptimum maximize_over_segment(const UtilitySpec& spec, std::size_t job, double slope,
                                     double intercept, double lo, double hi) {
  const double t = segment_argmax(spec, job, slope, lo, hi);
  return {t, evaluate(spec, job, t) - (slope * t + intercept)};
}

std::vector<double> allocation_from_segment(std::span<const double> a, std::size_t left,
                                            std::size_t right, double t) {
  if (right >= a.size() || (left != CostEnvelope::kVirtualOrigin && left >= a.size())) {
    throw Error(ErrorCode::kDimensionMismatch, "segment resource index out of range");
  }
  const double a_left = left == CostEnvelope::kVirtualOrigin ? 0.0 : a[left];
  const double a_right = a[right];
  if (!(a_left < a_right) || !(t >= a_left && t <= a_right)) {
    throw Error(ErrorCode::kTOutOfSegment,
                "t=" + std::to_string(t) + " is outside [" + std::to_string(a_left) + ", " +
                    std::to_string(a_right) + "]");
  }
  std::vector<double> x(a.size(), 0.0);
  const double width = a_right - a_left;
  x[right] = (t - a_left) / width;
  if (left != CostEnvelope::kVirtualOrigin) x[left] = (a_right - t) / width;
  return x;
}

SubproblemSolution solve_subproblem(const UtilitySpec& spec, std::size_t job,
                                    std::span<const double> a,
                                    std::span<const double> effective_prices,
                                    EnvelopeMethod method) {
  if (a.size() != effective_prices.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "efficiency and price vectors differ in length");
  }
  SubproblemSolution out;
  out.x_star.assign(a.size(), 0.0);
  CostEnvelope env;
  EnvelopeScratch scratch;
  const RowResult r = solve_row(spec, job, a, effective_prices, method, env, scratch, out.x_star);
  out.t_star = r.t;
  out.net_utility = r.net;
  return out;
}

void solve_all_subproblems_into(const Problem& problem, std::span<const double> prices,
                                const KernelOptions& options, SubproblemBatch& out) {
  const std::size_t n = problem.num_jobs();
  const std::size_t m = problem.num_resources();
  if (prices.size() != m) {
    throw Error(ErrorCode::kDimensionMismatch, "price vector length does not match resources");
  }
  if (out.x.rows() != n || out.x.cols() != m) out.x.resize(n, m);
  out.net_utility.resize(n);
  out.throughput.resize(n);

  for_each_chunk(n, options.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    CostEnvelope env;
    EnvelopeScratch scratch;
    std::vector<double> q(m);
    for (std::size_t i = begin; i < end; ++i) {
      std::span<const double> effective = prices;
      if (!problem.demands.empty()) {
        const double d = problem.demands[i];
        for (std::size_t j = 0; j < m; ++j) q[j] = d * prices[j];
        effective = q;
      }
      try {
        const RowResult r = solve_row(problem.utility, i, problem.efficiency.row(i), effective,
                                      options.envelope, env, scratch, out.x.row(i));
        out.throughput[i] = r.t;
        out.net_utility[i] = r.net;
      } catch (const Error& e) {
        throw Error(e.code(), "job " + std::to_string(i) + ": " + e.what());
      }
    }
  });
}

SubproblemBatch solve_all_subproblems(const Problem& problem, std::span<const double> prices,
                                      const KernelOptions& options) {
  SubproblemBatch out;
  solve_all_subproblems_into(problem, prices, options, out);
  return out;
}

}  // namespace resalloc
