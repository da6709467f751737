#include "resalloc/envelope.hpp"

#include <algorithm>
#include <limits>

namespace resalloc {

double CostEnvelope::value(double t) const {
  if (throughput.empty() || t < 0.0 || t > throughput.back()) {
    return std::numeric_limits<double>::infinity();
  }
  const auto it = std::upper_bound(throughput.begin(), throughput.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - throughput.begin()) - 1;
  if (k + 1 == throughput.size() || t == throughput[k]) return cost[k];
  return cost[k] + slope(k) * (t - throughput[k]);
}

namespace {

// Candidate points sorted by throughput, with zero-efficiency resources
// dropped and equal throughputs collapsed onto the cheapest resource.
void sorted_candidates(std::span<const double> a, std::span<const double> p,
                       std::vector<std::size_t>& order) {
  order.clear();
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] > 0.0) order.push_back(j);
  }
  // m is small; insertion sort beats std::sort at these sizes.
  auto before = [&](std::size_t x, std::size_t y) {
    if (a[x] != a[y]) return a[x] < a[y];
    if (p[x] != p[y]) return p[x] < p[y];
    return x < y;
  };
  for (std::size_t k = 1; k < order.size(); ++k) {
    const std::size_t v = order[k];
    std::size_t pos = k;
    while (pos > 0 && before(v, order[pos - 1])) {
      order[pos] = order[pos - 1];
      --pos;
    }
    order[pos] = v;
  }
  std::size_t kept = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (kept > 0 && a[order[kept - 1]] == a[order[k]]) continue;
    order[kept++] = order[k];
  }
  order.resize(kept);
}

void push_kink(CostEnvelope& out, double t, double c, std::size_t resource) {
  out.throughput.push_back(t);
  out.cost.push_back(c);
  out.resource.push_back(resource);
}

void hull_envelope(std::span<const double> a, std::span<const double> p,
                   const std::vector<std::size_t>& order, CostEnvelope& out) {
  for (std::size_t j : order) {
    const double x = a[j];
    const double y = p[j];
    while (out.num_kinks() >= 2) {
      const std::size_t k = out.num_kinks();
      const double ox = out.throughput[k - 2], oy = out.cost[k - 2];
      const double ax = out.throughput[k - 1], ay = out.cost[k - 1];
      const double cross = (ax - ox) * (y - oy) - (ay - oy) * (x - ox);
      if (cross > 0.0) break;
      out.throughput.pop_back();
      out.cost.pop_back();
      out.resource.pop_back();
    }
    push_kink(out, x, y, j);
  }
}

void pairwise_envelope(std::span<const double> a, std::span<const double> p,
                       const std::vector<std::size_t>& order, std::vector<double>& slopes,
                       CostEnvelope& out) {
  // Point 0 is the origin, point k >= 1 is resource order[k - 1].
  const std::size_t count = order.size() + 1;
  auto px = [&](std::size_t k) { return k == 0 ? 0.0 : a[order[k - 1]]; };
  auto py = [&](std::size_t k) { return k == 0 ? 0.0 : p[order[k - 1]]; };

  // Slope of every chord (i, k), i < k, stored row-major in a full square.
  slopes.assign(count * count, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t k = i + 1; k < count; ++k) {
      slopes[i * count + k] = (py(k) - py(i)) / (px(k) - px(i));
    }
  }
  // Point k is a vertex of the lower boundary iff it lies strictly below
  // every chord that straddles it.
  for (std::size_t k = 1; k < count; ++k) {
    bool vertex = true;
    if (k + 1 < count) {
      double steepest_in = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < k; ++i) {
        steepest_in = std::max(steepest_in, slopes[i * count + k]);
      }
      double flattest_out = std::numeric_limits<double>::infinity();
      for (std::size_t j = k + 1; j < count; ++j) {
        flattest_out = std::min(flattest_out, slopes[k * count + j]);
      }
      vertex = steepest_in < flattest_out;
    }
    if (vertex) push_kink(out, px(k), py(k), order[k - 1]);
  }
}

}  // namespace

void build_envelope_into(std::span<const double> a, std::span<const double> prices,
                         EnvelopeMethod method, CostEnvelope& out, EnvelopeScratch& scratch) {
  out.clear();
  push_kink(out, 0.0, 0.0, CostEnvelope::kVirtualOrigin);
  sorted_candidates(a, prices, scratch.order);
  if (method == EnvelopeMethod::kHull) {
    hull_envelope(a, prices, scratch.order, out);
  } else {
    pairwise_envelope(a, prices, scratch.order, scratch.slopes, out);
  }
}

CostEnvelope build_envelope(std::span<const double> a, std::span<const double> prices,
                            EnvelopeMethod method) {
  CostEnvelope out;
  EnvelopeScratch scratch;
  build_envelope_into(a, prices, method, out, scratch);
  return out;
}

}  // namespace resalloc
