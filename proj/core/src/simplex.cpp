#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace resalloc::detail {

namespace {

constexpr double kPivotTolerance = 1e-11;

// Gauss-Jordan inverse with partial pivoting; false if singular.
bool invert(std::vector<double>& a, std::size_t n, std::vector<double>& inv) {
  inv.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (std::abs(a[pivot * n + col]) < 1e-14) return false;
    if (pivot != col) {
      for (std::size_t k = 0; k < n; ++k) {
        std::swap(a[pivot * n + k], a[col * n + k]);
        std::swap(inv[pivot * n + k], inv[col * n + k]);
      }
    }
    const double scale = 1.0 / a[col * n + col];
    for (std::size_t k = 0; k < n; ++k) {
      a[col * n + k] *= scale;
      inv[col * n + k] *= scale;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r * n + col];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        a[r * n + k] -= f * a[col * n + k];
        inv[r * n + k] -= f * inv[col * n + k];
      }
    }
  }
  return true;
}

}  // namespace

std::optional<LpSolution> solve_lp(const LinearProgram& lp, std::vector<std::size_t> basis,
                                   std::size_t max_pivots) {
  const std::size_t r = lp.rows;
  const std::size_t cols = lp.columns.size();
  if (basis.size() != r) return std::nullopt;

  std::vector<double> binv;
  std::vector<double> xb(r);
  auto refactor = [&]() {
    std::vector<double> b(r * r);
    for (std::size_t k = 0; k < r; ++k) {
      for (std::size_t i = 0; i < r; ++i) b[i * r + k] = lp.columns[basis[k]][i];
    }
    if (!invert(b, r, binv)) return false;
    for (std::size_t i = 0; i < r; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < r; ++k) s += binv[i * r + k] * lp.rhs[k];
      xb[i] = std::max(s, 0.0);
    }
    return true;
  };
  if (!refactor()) return std::nullopt;

  std::vector<char> in_basis(cols, 0);
  for (std::size_t k : basis) in_basis[k] = 1;
  std::vector<double> y(r);
  std::vector<double> w(r);
  double cost_scale = 1.0;
  for (double c : lp.cost) cost_scale = std::max(cost_scale, std::abs(c));
  const double tolerance = 1e-11 * cost_scale;

  LpSolution out;
  std::size_t degenerate = 0;
  for (std::size_t pivots = 0; pivots < max_pivots; ++pivots) {
    if (pivots > 0 && pivots % 64 == 0 && !refactor()) return std::nullopt;
    for (std::size_t k = 0; k < r; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < r; ++i) s += lp.cost[basis[i]] * binv[i * r + k];
      y[k] = s;
    }
    // Dantzig pricing; Bland's rule after a run of degenerate pivots.
    const bool bland = degenerate > 2 * r;
    std::size_t entering = cols;
    double best = tolerance;
    for (std::size_t j = 0; j < cols; ++j) {
      if (in_basis[j]) continue;
      const auto& col = lp.columns[j];
      double reduced = lp.cost[j];
      for (std::size_t i = 0; i < r; ++i) reduced -= y[i] * col[i];
      if (reduced > best) {
        entering = j;
        if (bland) break;
        best = reduced;
      }
    }
    if (entering == cols) {
      out.optimal = true;
      break;
    }
    const auto& col = lp.columns[entering];
    for (std::size_t i = 0; i < r; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < r; ++k) s += binv[i * r + k] * col[k];
      w[i] = s;
    }
    std::size_t leaving = r;
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r; ++i) {
      if (w[i] <= kPivotTolerance) continue;
      const double t = xb[i] / w[i];
      if (t < ratio || (t == ratio && leaving < r && basis[i] < basis[leaving])) {
        ratio = t;
        leaving = i;
      }
    }
    if (leaving == r) return std::nullopt;  // unbounded: not expected for bounded programs
    degenerate = ratio <= 0.0 ? degenerate + 1 : 0;

    for (std::size_t i = 0; i < r; ++i) {
      if (i != leaving) xb[i] = std::max(xb[i] - ratio * w[i], 0.0);
    }
    xb[leaving] = ratio;
    const double pivot = w[leaving];
    for (std::size_t k = 0; k < r; ++k) binv[leaving * r + k] /= pivot;
    for (std::size_t i = 0; i < r; ++i) {
      if (i == leaving || w[i] == 0.0) continue;
      const double f = w[i];
      for (std::size_t k = 0; k < r; ++k) binv[i * r + k] -= f * binv[leaving * r + k];
    }
    in_basis[basis[leaving]] = 0;
    in_basis[entering] = 1;
    basis[leaving] = entering;
  }

  for (std::size_t k = 0; k < r; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < r; ++i) s += lp.cost[basis[i]] * binv[i * r + k];
    y[k] = s;
  }
  out.duals = y;
  out.x.assign(cols, 0.0);
  for (std::size_t i = 0; i < r; ++i) out.x[basis[i]] = xb[i];
  for (std::size_t j = 0; j < cols; ++j) out.objective += lp.cost[j] * out.x[j];
  return out;
}

}  // namespace resalloc::detail
