#include "resalloc/price_update.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace resalloc {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

std::vector<double> subgradient_step(std::span<const double> prices,
                                     std::span<const double> subgradient, int iter,
                                     double step0) {
  const double step = step0 / static_cast<double>(std::max(iter, 1));
  std::vector<double> next(prices.size());
  for (std::size_t j = 0; j < prices.size(); ++j) {
    next[j] = std::max(prices[j] - step * subgradient[j], 0.0);
  }
  return next;
}

bool LbfgsHistory::push(std::span<const double> s, std::span<const double> y,
                        double curvature_tolerance) {
  const double sy = dot(s, y);
  if (!(sy > curvature_tolerance * norm(s) * norm(y))) return false;
  if (memory_ == 0) return false;
  if (s_.size() == memory_) {
    s_.pop_front();
    y_.pop_front();
    rho_.pop_front();
  }
  s_.emplace_back(s.begin(), s.end());
  y_.emplace_back(y.begin(), y.end());
  rho_.push_back(1.0 / sy);
  return true;
}

void LbfgsHistory::clear() {
  s_.clear();
  y_.clear();
  rho_.clear();
}

std::vector<double> LbfgsHistory::direction(std::span<const double> gradient) const {
  std::vector<double> d(gradient.begin(), gradient.end());
  if (s_.empty()) {
    const double g = norm(gradient);
    for (double& v : d) v = g > 0.0 ? -v / g : 0.0;
    return d;
  }
  const std::size_t k = s_.size();
  std::vector<double> alpha(k);
  for (std::size_t i = k; i-- > 0;) {
    alpha[i] = rho_[i] * dot(s_[i], d);
    for (std::size_t j = 0; j < d.size(); ++j) d[j] -= alpha[i] * y_[i][j];
  }
  const double gamma = dot(s_.back(), y_.back()) / dot(y_.back(), y_.back());
  for (double& v : d) v *= gamma;
  for (std::size_t i = 0; i < k; ++i) {
    const double beta = rho_[i] * dot(y_[i], d);
    for (std::size_t j = 0; j < d.size(); ++j) d[j] += (alpha[i] - beta) * s_[i][j];
  }
  for (double& v : d) v = -v;
  return d;
}

std::optional<LbfgsStep> lbfgs_step(LbfgsHistory& history, std::span<const double> x,
                                    double value, std::span<const double> gradient,
                                    const Objective& objective, const LbfgsOptions& options) {
  std::vector<double> d = history.direction(gradient);
  if (!(dot(d, gradient) < 0.0)) {
    history.clear();
    d = history.direction(gradient);
  }

  LbfgsStep step;
  step.point.resize(x.size());
  double alpha = 1.0;
  for (int trial = 0; trial < options.max_trials; ++trial, alpha *= 0.5) {
    bool moved = false;
    for (std::size_t j = 0; j < x.size(); ++j) {
      double v = x[j] + alpha * d[j];
      if (options.nonnegative) v = std::max(v, 0.0);
      step.point[j] = v;
      moved = moved || v != x[j];
    }
    if (!moved) break;
    double predicted = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) predicted += gradient[j] * (step.point[j] - x[j]);

    step.value = objective(step.point, step.gradient);
    ++step.evaluations;
    if (std::isfinite(step.value) &&
        step.value <= value + options.sufficient_decrease * std::min(predicted, 0.0)) {
      std::vector<double> s(x.size()), y(x.size());
      for (std::size_t j = 0; j < x.size(); ++j) {
        s[j] = step.point[j] - x[j];
        y[j] = step.gradient[j] - gradient[j];
      }
      history.push(s, y, options.curvature_tolerance);
      return step;
    }
  }
  return std::nullopt;
}

}  // namespace resalloc
