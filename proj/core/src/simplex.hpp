#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace resalloc::detail {

// Dense revised simplex for
//   maximize c^T x  s.t.  A x = b,  x >= 0
// started from a caller-supplied feasible basis. Sized for a few hundred
// rows; columns are stored densely.
struct LinearProgram {
  std::size_t rows = 0;
  std::vector<std::vector<double>> columns;  // each of length rows
  std::vector<double> cost;
  std::vector<double> rhs;
};

struct LpSolution {
  std::vector<double> x;
  std::vector<double> duals;  // y = c_B^T B^{-1}, one per row
  double objective = 0.0;
  bool optimal = false;  // false when the pivot limit was reached
};

// `basis` lists one column index per row; B must be nonsingular with
// B^{-1} b >= 0. Returns nullopt if the starting basis is unusable.
std::optional<LpSolution> solve_lp(const LinearProgram& lp, std::vector<std::size_t> basis,
                                   std::size_t max_pivots);

}  // namespace resalloc::detail
