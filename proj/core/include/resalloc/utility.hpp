#pragma once

#include <cstddef>

#include "resalloc/problem.hpp"

namespace resalloc {

// Pointwise utility u_job(t). For families that are unbounded below at zero
// (log, alpha-fair with alpha >= 1, negative-exponent power) t == 0 yields
// -infinity rather than an error so batched kernels stay branch-light.
// Throws DomainViolation for t < 0 or NaN.
double evaluate(const UtilitySpec& spec, std::size_t job, double t);

// u'(t). For target-priority the supergradient at t == t_des is w/2.
// Throws DomainViolation when t <= 0 for families whose derivative blows up
// at the origin.
double derivative(const UtilitySpec& spec, std::size_t job, double t);

// The unique t with u'(t) == s, for strictly concave families only.
// Throws NotStrictlyConcave for linear and target-priority, DomainViolation
// for s <= 0.
double inverse_derivative(const UtilitySpec& spec, std::size_t job, double s);

// u^{-1}(v) for the invertible families (linear, log, alpha-fair, power).
double inverse_value(const UtilitySpec& spec, double v);

}  // namespace resalloc
