#pragma once

#include <algorithm>
#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "resalloc/problem.hpp"

namespace resalloc::testing {

struct NamedUtility {
  std::string name;
  UtilitySpec spec;  // target-priority parameters are filled per instance
};

inline std::vector<NamedUtility> all_families() {
  return {
      {"linear", UtilitySpec::linear()},
      {"log", UtilitySpec::log()},
      {"alpha_fair_0_5", UtilitySpec::alpha_fair(0.5)},
      {"alpha_fair_2", UtilitySpec::alpha_fair(2.0)},
      {"power_0_5", UtilitySpec::power(0.5)},
      {"power_neg1", UtilitySpec::power(-1.0)},
      {"target_priority", UtilitySpec::target_priority({}, {})},
  };
}

inline std::vector<NamedUtility> smooth_families() {
  return {
      {"log", UtilitySpec::log()},
      {"alpha_fair_0_5", UtilitySpec::alpha_fair(0.5)},
      {"alpha_fair_2", UtilitySpec::alpha_fair(2.0)},
      {"power_0_5", UtilitySpec::power(0.5)},
      {"power_neg1", UtilitySpec::power(-1.0)},
  };
}

// Random instance with efficiencies in [0.1, 1) and limits that bind for
// some resources and not for others.
inline Problem random_problem(std::mt19937_64& rng, std::size_t n, std::size_t m,
                              const UtilitySpec& base, bool with_demands = false) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Problem p;
  p.efficiency.resize(n, m);
  p.limits.resize(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) p.efficiency(i, j) = 0.1 + 0.9 * unit(rng);
  }
  for (std::size_t j = 0; j < m; ++j) p.limits[j] = (0.05 + 0.5 * unit(rng)) * static_cast<double>(n);
  if (with_demands) {
    p.demands.resize(n);
    for (double& d : p.demands) d = 0.5 + 1.5 * unit(rng);
  }
  p.utility = base;
  if (base.family == UtilityFamily::kTargetPriority) {
    std::vector<double> w(n), t(n);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = unit(rng) < 0.5 ? 1.0 : 2.0;
      t[i] = 0.2 + 0.6 * unit(rng);
    }
    p.utility = UtilitySpec::target_priority(std::move(w), std::move(t));
  }
  return p;
}

// Row-feasible and resource-feasible allocation drawn at random.
inline Allocation random_feasible(std::mt19937_64& rng, const Problem& p) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = p.num_jobs(), m = p.num_resources();
  Allocation x(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) sum += x(i, j) = unit(rng);
    const double budget = unit(rng);
    for (std::size_t j = 0; j < m; ++j) x(i, j) *= budget / sum;
  }
  std::vector<double> usage(m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) usage[j] += p.demand(i) * x(i, j);
  for (std::size_t j = 0; j < m; ++j) {
    if (usage[j] > p.limits[j]) {
      const double s = p.limits[j] / usage[j];
      for (std::size_t i = 0; i < n; ++i) x(i, j) *= s;
    }
  }
  return x;
}

inline double relative_error(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace resalloc::testing
