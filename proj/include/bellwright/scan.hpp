#pragma once

#include <cstddef>
#include <vector>

namespace bellwright {

// One row of the equally-spaced configuration (0, theta, 2*theta).
struct ScanRow {
  double theta_deg = 0;
  double p13 = 0;
  double p12 = 0;
  double p23 = 0;
  double slack = 0;  // p12 + p23 - p13
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::size_t argmin = 0;  // row with the most negative slack
};

// Evaluates the inequality over a theta grid; bounds must satisfy
// 0 < lo <= hi < 180 and step > 0 (throws OutOfRange otherwise). Rows are
// independent and computed in parallel when OpenMP is available.
ScanResult wigner_scan(double lo_deg, double hi_deg, double step_deg);

}  // namespace bellwright
