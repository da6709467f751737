#include "resalloc/generate.hpp"

#include <array>
#include <cmath>
#include <string>

#include "resalloc/errors.hpp"

namespace resalloc {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kLimitStream = 1ULL << 32;
constexpr std::uint64_t kWeightStream = (1ULL << 32) + 1;

struct Range {
  double lo;
  double hi;
};

constexpr std::array<Range, 4> kMediumColumns{{{0.1, 0.3}, {0.1, 0.5}, {0.3, 0.8}, {0.6, 1.0}}};
constexpr std::array<double, 4> kMediumLimitsPerMillion{8e5, 1e5, 1e4, 1e3};

UtilitySpec make_utility(const GeneratorSpec& spec) {
  switch (spec.utility) {
    case UtilityFamily::kLinear: return UtilitySpec::linear();
    case UtilityFamily::kLog: return UtilitySpec::log();
    case UtilityFamily::kAlphaFair: return UtilitySpec::alpha_fair(spec.alpha);
    case UtilityFamily::kPower: return UtilitySpec::power(spec.rho);
    case UtilityFamily::kTargetPriority: {
      std::vector<double> weights(spec.jobs);
      for (std::size_t i = 0; i < spec.jobs; ++i) {
        weights[i] = counter_uniform(spec.seed, kWeightStream, i) < 0.5 ? 1.0 : 2.0;
      }
      return UtilitySpec::target_priority(std::move(weights),
                                          std::vector<double>(spec.jobs, 0.2));
    }
  }
  throw Error(ErrorCode::kUnsupportedFamily, "unknown utility family");
}

}  // namespace

std::optional<GeneratorFamily> parse_generator_family(std::string_view name) {
  for (auto f : {GeneratorFamily::kMedium, GeneratorFamily::kLarge, GeneratorFamily::kScaling}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

std::string_view to_string(GeneratorFamily family) {
  switch (family) {
    case GeneratorFamily::kMedium: return "medium";
    case GeneratorFamily::kLarge: return "large";
    case GeneratorFamily::kScaling: return "scaling";
  }
  return "unknown";
}

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const std::uint64_t bits = mix64(mix64(mix64(seed) ^ stream) ^ index);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

Problem generate_problem(const GeneratorSpec& spec) {
  const std::size_t n = spec.jobs;
  const std::size_t m = spec.resources;
  if (n == 0 || m == 0) {
    throw Error(ErrorCode::kUnsupportedFamily, "generator needs at least one job and resource");
  }

  Problem problem;
  problem.efficiency.resize(n, m);
  problem.limits.resize(m);
  const double jobs = static_cast<double>(n);

  switch (spec.family) {
    case GeneratorFamily::kMedium:
    case GeneratorFamily::kLarge:
      if (m != kMediumColumns.size()) {
        throw Error(ErrorCode::kUnsupportedFamily,
                    std::string(to_string(spec.family)) + " instances have exactly 4 resources");
      }
      for (std::size_t i = 0; i < n; ++i) {
        auto row = problem.efficiency.row(i);
        for (std::size_t j = 0; j < m; ++j) {
          const auto [lo, hi] = kMediumColumns[j];
          row[j] = lo + (hi - lo) * counter_uniform(spec.seed, j, i);
        }
      }
      for (std::size_t j = 0; j < m; ++j) {
        problem.limits[j] = kMediumLimitsPerMillion[j] * jobs / 1e6;
      }
      break;
    case GeneratorFamily::kScaling:
      for (std::size_t i = 0; i < n; ++i) {
        auto row = problem.efficiency.row(i);
        for (std::size_t j = 0; j < m; ++j) {
          const double hi = 0.1 + 0.9 * static_cast<double>(j + 1) / static_cast<double>(m);
          row[j] = 0.1 + (hi - 0.1) * counter_uniform(spec.seed, j, i);
        }
      }
      for (std::size_t j = 0; j < m; ++j) {
        const double base = 0.1 + 0.9 * counter_uniform(spec.seed, kLimitStream, j);
        problem.limits[j] = base * jobs / std::pow(1.5, static_cast<double>(j));
      }
      break;
  }
  problem.utility = make_utility(spec);
  return problem;
}

}  // namespace resalloc
