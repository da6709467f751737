#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace resalloc {

// Projected subgradient update p+ = max(p - (step0 / iter) q, 0), iter >= 1.
// q = R - r, so overused resources (q_j < 0) get more expensive.
std::vector<double> subgradient_step(std::span<const double> prices,
                                     std::span<const double> subgradient, int iter,
                                     double step0);

struct LbfgsOptions {
  std::size_t memory = 10;
  double sufficient_decrease = 1e-4;
  int max_trials = 20;                // backtracking halvings
  double curvature_tolerance = 1e-10;  // skip pairs with s'y <= tol |s| |y|
  bool nonnegative = true;            // project iterates onto x >= 0
};

// Curvature pairs (s, y) for the two-loop recursion.
class LbfgsHistory {
 public:
  explicit LbfgsHistory(std::size_t memory = 10) : memory_(memory) {}

  // Returns false (and stores nothing) when the pair fails the curvature test.
  bool push(std::span<const double> s, std::span<const double> y, double curvature_tolerance);
  void clear();
  std::size_t size() const noexcept { return s_.size(); }

  // -H g. With no stored pairs this is the unit-length steepest-descent
  // direction -g / |g|.
  std::vector<double> direction(std::span<const double> gradient) const;

 private:
  std::size_t memory_;
  std::deque<std::vector<double>> s_;
  std::deque<std::vector<double>> y_;
  std::deque<double> rho_;
};

// Minimization objective: returns f(x) and fills the gradient.
using Objective = std::function<double(std::span<const double> x, std::vector<double>& gradient)>;

struct LbfgsStep {
  std::vector<double> point;
  double value = 0.0;
  std::vector<double> gradient;
  int evaluations = 0;
};

// One quasi-Newton step from (x, f(x), grad f(x)) with a backtracking
// (Armijo) line search and projection. On success the history gains the new
// curvature pair. std::nullopt means the line search failed; the caller is
// expected to fall back to a subgradient step.
std::optional<LbfgsStep> lbfgs_step(LbfgsHistory& history, std::span<const double> x,
                                    double value, std::span<const double> gradient,
                                    const Objective& objective, const LbfgsOptions& options = {});

}  // namespace resalloc
