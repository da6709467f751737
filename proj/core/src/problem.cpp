#include "resalloc/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "resalloc/errors.hpp"
#include "resalloc/parallel.hpp"
#include "resalloc/utility.hpp"

namespace resalloc {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "matrix data has " + std::to_string(data_.size()) + " entries, expected " +
                    std::to_string(rows_ * cols_));
  }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix out(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      throw Error(ErrorCode::kDimensionMismatch, "ragged rows");
    }
    std::copy(rows[i].begin(), rows[i].end(), out.row(i).begin());
  }
  return out;
}

std::string_view to_string(UtilityFamily family) {
  switch (family) {
    case UtilityFamily::kLinear: return "linear";
    case UtilityFamily::kLog: return "log";
    case UtilityFamily::kAlphaFair: return "alpha-fair";
    case UtilityFamily::kPower: return "power";
    case UtilityFamily::kTargetPriority: return "target-priority";
  }
  return "unknown";
}

std::optional<UtilityFamily> parse_family(std::string_view name) {
  for (auto f : {UtilityFamily::kLinear, UtilityFamily::kLog, UtilityFamily::kAlphaFair,
                 UtilityFamily::kPower, UtilityFamily::kTargetPriority}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

UtilitySpec UtilitySpec::linear() {
  UtilitySpec spec;
  spec.family = UtilityFamily::kLinear;
  return spec;
}
UtilitySpec UtilitySpec::log() {
  UtilitySpec spec;
  spec.family = UtilityFamily::kLog;
  return spec;
}
UtilitySpec UtilitySpec::alpha_fair(double alpha) {
  UtilitySpec spec;
  spec.family = UtilityFamily::kAlphaFair;
  spec.alpha = alpha;
  return spec;
}
UtilitySpec UtilitySpec::power(double rho) {
  UtilitySpec spec;
  spec.family = UtilityFamily::kPower;
  spec.rho = rho;
  return spec;
}
UtilitySpec UtilitySpec::target_priority(std::vector<double> weights,
                                         std::vector<double> targets) {
  UtilitySpec spec;
  spec.family = UtilityFamily::kTargetPriority;
  spec.weights = std::move(weights);
  spec.targets = std::move(targets);
  return spec;
}

bool UtilitySpec::unbounded_at_zero() const {
  switch (family) {
    case UtilityFamily::kLog: return true;
    case UtilityFamily::kAlphaFair: return alpha >= 1.0;
    case UtilityFamily::kPower: return rho < 0.0;
    default: return false;
  }
}

bool UtilitySpec::strictly_concave() const {
  switch (family) {
    case UtilityFamily::kLog: return true;
    case UtilityFamily::kAlphaFair: return alpha > 0.0;
    case UtilityFamily::kPower: return rho < 1.0;
    default: return false;
  }
}

namespace {

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

void validate_utility(const UtilitySpec& u, std::size_t n) {
  const bool has_vectors = !u.weights.empty() || !u.targets.empty();
  switch (u.family) {
    case UtilityFamily::kLinear:
    case UtilityFamily::kLog:
      require(!has_vectors, ErrorCode::kInvalidUtility,
              "weights/targets are only valid for target-priority");
      break;
    case UtilityFamily::kAlphaFair:
      require(!has_vectors, ErrorCode::kInvalidUtility,
              "weights/targets are only valid for target-priority");
      require(std::isfinite(u.alpha) && u.alpha >= 0.0, ErrorCode::kInvalidUtility,
              "alpha must be >= 0");
      break;
    case UtilityFamily::kPower:
      require(!has_vectors, ErrorCode::kInvalidUtility,
              "weights/targets are only valid for target-priority");
      require(std::isfinite(u.rho) && u.rho != 0.0 && u.rho <= 1.0,
              ErrorCode::kInvalidUtility, "rho must be in (0, 1] or negative");
      break;
    case UtilityFamily::kTargetPriority:
      require(u.weights.size() == n && u.targets.size() == n, ErrorCode::kDimensionMismatch,
              "target-priority needs one weight and one target per job");
      for (std::size_t i = 0; i < n; ++i) {
        require(u.weights[i] > 0.0 && std::isfinite(u.weights[i]), ErrorCode::kInvalidUtility,
                "weight of job " + std::to_string(i) + " must be positive");
        require(u.targets[i] > 0.0 && std::isfinite(u.targets[i]), ErrorCode::kInvalidUtility,
                "target of job " + std::to_string(i) + " must be positive");
      }
      break;
  }
}

void require_shape(const Problem& problem, const Allocation& x) {
  require(x.rows() == problem.num_jobs() && x.cols() == problem.num_resources(),
          ErrorCode::kDimensionMismatch,
          "allocation is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
              ", problem is " + std::to_string(problem.num_jobs()) + "x" +
              std::to_string(problem.num_resources()));
}

}  // namespace

void validate(const Problem& problem) {
  const std::size_t n = problem.num_jobs();
  const std::size_t m = problem.num_resources();
  require(m >= 1, ErrorCode::kDimensionMismatch, "need at least one resource");
  require(problem.limits.size() == m, ErrorCode::kDimensionMismatch,
          "limits has " + std::to_string(problem.limits.size()) + " entries, expected " +
              std::to_string(m));
  require(problem.demands.empty() || problem.demands.size() == n,
          ErrorCode::kDimensionMismatch, "demands must have one entry per job");
  for (std::size_t j = 0; j < m; ++j) {
    require(problem.limits[j] > 0.0 && std::isfinite(problem.limits[j]),
            ErrorCode::kNonPositiveLimit, "limit " + std::to_string(j) + " must be positive");
  }
  for (std::size_t i = 0; i < problem.demands.size(); ++i) {
    require(problem.demands[i] > 0.0 && std::isfinite(problem.demands[i]),
            ErrorCode::kNonPositiveDemand, "demand " + std::to_string(i) + " must be positive");
  }
  validate_utility(problem.utility, n);

  const bool needs_positive_row = problem.utility.unbounded_at_zero();
  for (std::size_t i = 0; i < n; ++i) {
    bool any_positive = false;
    for (double a : problem.efficiency.row(i)) {
      require(a >= 0.0 && std::isfinite(a), ErrorCode::kNegativeEfficiency,
              "efficiency row " + std::to_string(i) + " has a negative or non-finite entry");
      any_positive = any_positive || a > 0.0;
    }
    require(any_positive || !needs_positive_row, ErrorCode::kZeroEfficiencyRowWithLogUtility,
            "job " + std::to_string(i) + " has no usable resource but its utility is "
            "unbounded below at zero throughput");
  }
}

std::vector<double> throughputs(const Problem& problem, const Allocation& x) {
  require_shape(problem, x);
  std::vector<double> t(problem.num_jobs());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto a = problem.efficiency.row(i);
    const auto xi = x.row(i);
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) sum += a[j] * xi[j];
    t[i] = sum;
  }
  return t;
}

std::vector<double> resource_usage(const Problem& problem, const Allocation& x) {
  require_shape(problem, x);
  const std::size_t m = problem.num_resources();
  const std::size_t chunks = chunk_count(problem.num_jobs());
  std::vector<double> partial(chunks * m, 0.0);
  for_each_chunk(problem.num_jobs(), 1, [&](std::size_t c, std::size_t begin, std::size_t end) {
    double* acc = partial.data() + c * m;
    for (std::size_t i = begin; i < end; ++i) {
      const double d = problem.demand(i);
      const auto xi = x.row(i);
      for (std::size_t j = 0; j < m; ++j) acc[j] += d * xi[j];
    }
  });
  std::vector<double> r(m, 0.0);
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t j = 0; j < m; ++j) r[j] += partial[c * m + j];
  }
  return r;
}

UtilitySummary total_utility(const Problem& problem, std::span<const double> t) {
  require(t.size() == problem.num_jobs(), ErrorCode::kDimensionMismatch,
          "throughput vector length does not match job count");
  const std::size_t chunks = chunk_count(t.size());
  std::vector<double> partial(chunks, 0.0);
  for_each_chunk(t.size(), 1, [&](std::size_t c, std::size_t begin, std::size_t end) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += evaluate(problem.utility, i, t[i]);
    partial[c] = acc;
  });
  UtilitySummary out;
  for (double v : partial) out.total += v;
  if (!std::isfinite(out.total)) {
    throw Error(ErrorCode::kDomainViolation, "utility is not finite at these throughputs");
  }
  if (!t.empty()) {
    out.average = out.total / static_cast<double>(t.size());
    if (problem.utility.family != UtilityFamily::kTargetPriority) {
      out.utility_average = inverse_value(problem.utility, out.average);
    }
  }
  return out;
}

double feasibility_tolerance(double scale) { return 1e-9 * (1.0 + std::abs(scale)); }

FeasibilityReport check_feasibility(const Problem& problem, const Allocation& x) {
  require_shape(problem, x);
  FeasibilityReport rep;
  const double row_tol = feasibility_tolerance(1.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double sum = 0.0;
    for (double v : x.row(i)) {
      rep.min_entry = std::min(rep.min_entry, v);
      sum += v;
    }
    rep.max_row_excess = std::max(rep.max_row_excess, sum - 1.0);
  }
  rep.row_feasible = rep.min_entry >= 0.0 && rep.max_row_excess <= row_tol;
  const auto r = resource_usage(problem, x);
  bool usage_ok = true;
  for (std::size_t j = 0; j < r.size(); ++j) {
    const double excess = r[j] - problem.limits[j];
    rep.max_usage_excess = std::max(rep.max_usage_excess, excess);
    usage_ok = usage_ok && excess <= feasibility_tolerance(problem.limits[j]);
  }
  rep.feasible = rep.row_feasible && usage_ok;
  return rep;
}

}  // namespace resalloc
