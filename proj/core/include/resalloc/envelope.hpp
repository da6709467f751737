#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace resalloc {

// Lower convex envelope c(t) of a single job's cost: the cheapest price of
// reaching throughput t with x >= 0, 1^T x <= 1. Kink k sits at
// (throughput[k], cost[k]) and is achieved by running resource[k] alone;
// resource kVirtualOrigin marks the idle point (0, 0).
struct CostEnvelope {
  static constexpr std::size_t kVirtualOrigin = static_cast<std::size_t>(-1);

  std::vector<double> throughput;
  std::vector<double> cost;
  std::vector<std::size_t> resource;

  std::size_t num_kinks() const noexcept { return throughput.size(); }
  std::size_t num_segments() const noexcept {
    return throughput.empty() ? 0 : throughput.size() - 1;
  }
  double max_throughput() const noexcept {
    return throughput.empty() ? 0.0 : throughput.back();
  }
  double slope(std::size_t segment) const {
    return (cost[segment + 1] - cost[segment]) /
           (throughput[segment + 1] - throughput[segment]);
  }
  // c(t) for t in [0, max_throughput()]; +inf outside the domain.
  double value(double t) const;

  void clear() {
    throughput.clear();
    cost.clear();
    resource.clear();
  }
};

enum class EnvelopeMethod {
  // Monotone-chain lower hull over the sorted points, O(m log m).
  kHull,
  // Vertex test against every pairwise slope, Theta(m^2). This mirrors the
  // enumerate-all-pairs kernel and exists mainly for scaling comparisons.
  kPairwise,
};

// Builds c(t) for efficiencies a and (effective) prices p, both >= 0.
// Resources with a_j == 0 never appear past the origin; among equal a_j only
// the cheapest survives (lowest index on exact ties).
CostEnvelope build_envelope(std::span<const double> a, std::span<const double> prices,
                            EnvelopeMethod method = EnvelopeMethod::kHull);

// Same as build_envelope but reuses the storage of `out` and `scratch`.
struct EnvelopeScratch {
  std::vector<std::size_t> order;
  std::vector<double> slopes;
};
void build_envelope_into(std::span<const double> a, std::span<const double> prices,
                         EnvelopeMethod method, CostEnvelope& out, EnvelopeScratch& scratch);

}  // namespace resalloc
