#include "bellwright/simplex.hpp"

#include <cassert>

#include "bellwright/errors.hpp"

namespace bellwright::feasibility {

LpResult solve_equality_feasibility(const std::vector<std::vector<Rational>>& A,
                                    const std::vector<Rational>& b) {
  const std::size_t m = A.size();
  if (b.size() != m) throw Error("row/rhs size mismatch");
  const std::size_t n = m == 0 ? 0 : A[0].size();
  for (const auto& row : A) {
    if (row.size() != n) throw Error("ragged constraint matrix");
  }

  if (m == 0) {
    LpResult r;
    r.feasible = true;
    r.solution.assign(n, Rational(0));
    return r;
  }

  // Sign-normalize so the rhs is nonnegative, remembering the flips for the
  // Farkas vector.
  std::vector<int> sign(m, 1);
  // tab[i] = structural columns, artificial columns, rhs
  const std::size_t cols = n + m + 1;
  std::vector<std::vector<Rational>> tab(m, std::vector<Rational>(cols, Rational(0)));
  for (std::size_t i = 0; i < m; ++i) {
    sign[i] = b[i] < 0 ? -1 : 1;
    for (std::size_t j = 0; j < n; ++j) tab[i][j] = sign[i] * A[i][j];
    tab[i][n + i] = 1;
    tab[i][cols - 1] = sign[i] * b[i];
  }

  // Reduced-cost row for minimizing the sum of artificials; basis starts as
  // the artificial columns.
  std::vector<Rational> obj(cols, Rational(0));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) obj[j] -= tab[i][j];
  }
  Rational cost = 0;
  for (std::size_t i = 0; i < m; ++i) cost += tab[i][cols - 1];

  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  for (;;) {
    // Bland: smallest improving column.
    std::size_t enter = cols - 1;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (obj[j] < 0) {
        enter = j;
        break;
      }
    }
    if (enter == cols - 1) break;  // optimal

    // Ratio test, ties broken by smallest basis variable (Bland).
    std::size_t leave_row = m;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (tab[i][enter] <= 0) continue;
      Rational ratio = tab[i][cols - 1] / tab[i][enter];
      if (leave_row == m || ratio < best ||
          (ratio == best && basis[i] < basis[leave_row])) {
        leave_row = i;
        best = ratio;
      }
    }
    if (leave_row == m) {
      // Phase-1 objective is bounded below by 0, so an unbounded column
      // cannot happen on well-formed input.
      throw Error("phase-1 simplex: unbounded pivot column");
    }

    // Pivot.
    Rational pivot = tab[leave_row][enter];
    for (auto& v : tab[leave_row]) v /= pivot;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave_row || tab[i][enter] == 0) continue;
      Rational factor = tab[i][enter];
      for (std::size_t j = 0; j < cols; ++j) tab[i][j] -= factor * tab[leave_row][j];
    }
    if (obj[enter] != 0) {
      Rational factor = obj[enter];
      for (std::size_t j = 0; j < cols; ++j) obj[j] -= factor * tab[leave_row][j];
      cost += factor * tab[leave_row][cols - 1];
    }
    basis[leave_row] = enter;
  }

  LpResult result;
  if (cost == 0) {
    result.feasible = true;
    result.solution.assign(n, Rational(0));
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < n) result.solution[basis[i]] = tab[i][cols - 1];
    }
  } else {
    result.feasible = false;
    // Dual from the reduced costs at the artificial columns: y_i = 1 - r_i.
    result.farkas.assign(m, Rational(0));
    for (std::size_t i = 0; i < m; ++i) {
      result.farkas[i] = (Rational(1) - obj[n + i]) * sign[i];
    }
  }
  return result;
}

}  // namespace bellwright::feasibility
