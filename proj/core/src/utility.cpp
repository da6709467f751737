#include "resalloc/utility.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "resalloc/errors.hpp"

namespace resalloc {

namespace {

[[noreturn]] void domain_error(const char* what, double value) {
  throw Error(ErrorCode::kDomainViolation, std::string(what) + " (got " +
                                               std::to_string(value) + ")");
}

}  // namespace

double evaluate(const UtilitySpec& spec, std::size_t job, double t) {
  if (!(t >= 0.0)) domain_error("throughput must be nonnegative", t);
  switch (spec.family) {
    case UtilityFamily::kLinear:
      return t;
    case UtilityFamily::kLog:
      return std::log(t);
    case UtilityFamily::kAlphaFair:
      if (spec.alpha == 1.0) return std::log(t);
      if (spec.alpha == 0.0) return t;
      return std::pow(t, 1.0 - spec.alpha) / (1.0 - spec.alpha);
    case UtilityFamily::kPower:
      return spec.rho > 0.0 ? std::pow(t, spec.rho) : -std::pow(t, spec.rho);
    case UtilityFamily::kTargetPriority:
      return spec.weights[job] * std::min(t - spec.targets[job], 0.0);
  }
  throw Error(ErrorCode::kUnsupportedFamily, "unknown utility family");
}

double derivative(const UtilitySpec& spec, std::size_t job, double t) {
  if (!(t >= 0.0)) domain_error("throughput must be nonnegative", t);
  switch (spec.family) {
    case UtilityFamily::kLinear:
      return 1.0;
    case UtilityFamily::kLog:
      if (t == 0.0) domain_error("log utility has no derivative at zero", t);
      return 1.0 / t;
    case UtilityFamily::kAlphaFair:
      if (spec.alpha == 0.0) return 1.0;
      if (t == 0.0) domain_error("alpha-fair utility has no derivative at zero", t);
      return std::pow(t, -spec.alpha);
    case UtilityFamily::kPower:
      if (spec.rho == 1.0) return 1.0;
      if (t == 0.0) domain_error("power utility has no derivative at zero", t);
      return std::abs(spec.rho) * std::pow(t, spec.rho - 1.0);
    case UtilityFamily::kTargetPriority: {
      const double w = spec.weights[job];
      const double target = spec.targets[job];
      if (t < target) return w;
      if (t > target) return 0.0;
      return 0.5 * w;
    }
  }
  throw Error(ErrorCode::kUnsupportedFamily, "unknown utility family");
}

double inverse_derivative(const UtilitySpec& spec, std::size_t /*job*/, double s) {
  if (!spec.strictly_concave()) {
    throw Error(ErrorCode::kNotStrictlyConcave,
                std::string(to_string(spec.family)) + " utility has no inverse derivative");
  }
  if (!(s > 0.0)) domain_error("inverse derivative needs a positive slope", s);
  switch (spec.family) {
    case UtilityFamily::kLog:
      return 1.0 / s;
    case UtilityFamily::kAlphaFair:
      if (spec.alpha == 1.0) return 1.0 / s;
      return std::pow(s, -1.0 / spec.alpha);
    case UtilityFamily::kPower:
      return std::pow(s / std::abs(spec.rho), 1.0 / (spec.rho - 1.0));
    default:
      break;
  }
  throw Error(ErrorCode::kUnsupportedFamily, "unknown utility family");
}

double inverse_value(const UtilitySpec& spec, double v) {
  switch (spec.family) {
    case UtilityFamily::kLinear:
      return v;
    case UtilityFamily::kLog:
      return std::exp(v);
    case UtilityFamily::kAlphaFair:
      if (spec.alpha == 1.0) return std::exp(v);
      if (spec.alpha == 0.0) return v;
      return std::pow((1.0 - spec.alpha) * v, 1.0 / (1.0 - spec.alpha));
    case UtilityFamily::kPower:
      return spec.rho > 0.0 ? std::pow(v, 1.0 / spec.rho) : std::pow(-v, 1.0 / spec.rho);
    case UtilityFamily::kTargetPriority:
      break;
  }
  throw Error(ErrorCode::kNotStrictlyConcave,
              std::string(to_string(spec.family)) + " utility is not invertible");
}

}  // namespace resalloc
