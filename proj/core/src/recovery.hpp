#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include "resalloc/dual.hpp"
#include "resalloc/problem.hpp"

namespace resalloc::detail {

// Primal recovery by convex combination. Keeps the raw and column-scaled
// subproblem responses of recent dual evaluations and picks, per job, the
// mix of its own responses that maximizes the (concave lower bound on)
// utility subject to the resource limits: a small linear master program.
class CombinationRecovery {
 public:
  CombinationRecovery(const Problem& problem, std::size_t capacity);

  void add(const DualEval& eval);

  struct Result {
    Allocation x;
    double utility = 0.0;
    std::vector<double> prices;  // master duals on the resource rows, clamped at 0
  };
  std::optional<Result> combine() const;

 private:
  struct Entry {
    Allocation raw;
    std::vector<double> scale;
    double scaled_utility = 0.0;
  };

  const Problem& problem_;
  std::size_t capacity_;
  std::deque<Entry> entries_;
};

}  // namespace resalloc::detail
