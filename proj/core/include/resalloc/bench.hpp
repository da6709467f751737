#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "resalloc/envelope.hpp"

namespace resalloc {

// log(y) ~ intercept + exponent * log(x), by ordinary least squares.
struct PowerLawFit {
  double intercept = 0.0;
  double exponent = 0.0;
  double prefactor() const;  // exp(intercept)
};

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

enum class SweepAxis { kJobs, kResources };

struct SweepConfig {
  SweepAxis axis = SweepAxis::kJobs;
  std::vector<std::size_t> sizes;  // n values for kJobs, m values for kResources
  std::size_t fixed = 4;           // m for kJobs, n for kResources
  int repetitions = 5;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  EnvelopeMethod envelope = EnvelopeMethod::kHull;
};

struct SweepPoint {
  std::size_t jobs = 0;
  std::size_t resources = 0;
  std::vector<double> seconds;  // one per repetition
  double mean_seconds() const;
};

// Times evaluate_dual on a scaling-family instance (log utility) at the
// initial prices for every size in the sweep.
std::vector<SweepPoint> run_sweep(const SweepConfig& config);

// Fit over points whose swept size lies in [lo, hi].
PowerLawFit fit_sweep(std::span<const SweepPoint> points, SweepAxis axis, std::size_t lo,
                      std::size_t hi);

}  // namespace resalloc
