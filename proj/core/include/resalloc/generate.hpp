#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "resalloc/problem.hpp"

namespace resalloc {

enum class GeneratorFamily {
  // n x 4 instance with efficiency columns U(0.1,0.3), U(0.1,0.5),
  // U(0.3,0.8), U(0.6,1.0) and limits (8e5, 1e5, 1e4, 1e3) * n / 1e6.
  kMedium,
  // Same distributions and limit density as kMedium; defaults to 5e7 jobs.
  kLarge,
  // n x m instance with column j ~ U(0.1, 0.1 + 0.9 (j+1)/m) and limits
  // R_j ~ U(0.1, 1) * n / 1.5^j.
  kScaling,
};

std::optional<GeneratorFamily> parse_generator_family(std::string_view name);
std::string_view to_string(GeneratorFamily family);

struct GeneratorSpec {
  GeneratorFamily family = GeneratorFamily::kMedium;
  std::size_t jobs = 1'000'000;
  std::size_t resources = 4;
  std::uint64_t seed = 0;
  // Utility family; target-priority gets t_des = 0.2 and w_i in {1, 2} with
  // equal probability. Other families use their scalar parameter below.
  UtilityFamily utility = UtilityFamily::kLog;
  double alpha = 2.0;
  double rho = 0.5;
};

// Uniform [0, 1) draw that depends only on (seed, stream, index), so output
// does not depend on generation order or thread count.
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Throws UnsupportedFamily when the family cannot produce the requested shape.
Problem generate_problem(const GeneratorSpec& spec);

}  // namespace resalloc
