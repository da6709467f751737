#include "resalloc/bench.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "resalloc/dual.hpp"
#include "resalloc/errors.hpp"
#include "resalloc/generate.hpp"

namespace resalloc {

double PowerLawFit::prefactor() const { return std::exp(intercept); }

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kDimensionMismatch, "power-law fit needs at least two paired points");
  }
  const double k = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = k * sxx - sx * sx;
  if (denom == 0.0) throw Error(ErrorCode::kDimensionMismatch, "power-law fit needs distinct x");
  PowerLawFit fit;
  fit.exponent = (k * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.exponent * sx) / k;
  return fit;
}

double SweepPoint::mean_seconds() const {
  if (seconds.empty()) return 0.0;
  return std::accumulate(seconds.begin(), seconds.end(), 0.0) /
         static_cast<double>(seconds.size());
}

std::vector<SweepPoint> run_sweep(const SweepConfig& config) {
  std::vector<SweepPoint> points;
  KernelOptions kernel{config.threads, config.envelope};
  DualEval eval;
  for (std::size_t size : config.sizes) {
    GeneratorSpec spec;
    spec.family = GeneratorFamily::kScaling;
    spec.seed = config.seed;
    spec.jobs = config.axis == SweepAxis::kJobs ? size : config.fixed;
    spec.resources = config.axis == SweepAxis::kJobs ? config.fixed : size;
    const Problem problem = generate_problem(spec);
    const auto prices = initialize_prices(problem);

    SweepPoint point{spec.jobs, spec.resources, {}};
    evaluate_dual_into(problem, prices, kernel, eval);  // warm-up
    for (int rep = 0; rep < config.repetitions; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      evaluate_dual_into(problem, prices, kernel, eval);
      const auto stop = std::chrono::steady_clock::now();
      point.seconds.push_back(std::chrono::duration<double>(stop - start).count());
    }
    points.push_back(std::move(point));
  }
  return points;
}

PowerLawFit fit_sweep(std::span<const SweepPoint> points, SweepAxis axis, std::size_t lo,
                      std::size_t hi) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& p : points) {
    const std::size_t size = axis == SweepAxis::kJobs ? p.jobs : p.resources;
    if (size < lo || size > hi) continue;
    x.push_back(static_cast<double>(size));
    y.push_back(p.mean_seconds());
  }
  return fit_power_law(x, y);
}

}  // namespace resalloc
