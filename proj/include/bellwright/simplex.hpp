#pragma once

#include <vector>

#include "bellwright/rational.hpp"

namespace bellwright::feasibility {

// Exact rational feasibility of { A x = b, x >= 0 }, decided by a phase-1
// simplex with Bland's rule. On the infeasible side the dual of the phase-1
// optimum is returned: y with yA <= 0 componentwise and y.b > 0.
struct LpResult {
  bool feasible = false;
  std::vector<Rational> solution;  // size n when feasible
  std::vector<Rational> farkas;    // size m when infeasible
};

LpResult solve_equality_feasibility(const std::vector<std::vector<Rational>>& A,
                                    const std::vector<Rational>& b);

}  // namespace bellwright::feasibility
