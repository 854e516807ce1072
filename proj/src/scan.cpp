#include "bellwright/scan.hpp"

#include <cmath>

#include "bellwright/errors.hpp"
#include "bellwright/quantum.hpp"
#include "bellwright/simulate.hpp"

namespace bellwright {

ScanResult wigner_scan(double lo_deg, double hi_deg, double step_deg) {
  if (!(lo_deg > 0.0) || !(hi_deg < 180.0) || !(lo_deg <= hi_deg) || !(step_deg > 0.0)) {
    throw OutOfRange("scan grid must satisfy 0 < lo <= hi < 180 with positive step");
  }
  const auto count =
      static_cast<std::size_t>(std::floor((hi_deg - lo_deg) / step_deg + 1e-9)) + 1;

  ScanResult result;
  result.rows.assign(count, ScanRow{});
  const auto n = static_cast<long long>(count);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(simulate::effective_threads())
#endif
  for (long long k = 0; k < n; ++k) {
    double theta = lo_deg + static_cast<double>(k) * step_deg;
    auto cfg = quantum::DirectionConfig::from_degrees(0.0, theta, 2.0 * theta);
    ScanRow row;
    row.theta_deg = theta;
    row.p12 = quantum::joint_prob(cfg, 1, 2, Outcome::Plus, Outcome::Plus);
    row.p23 = quantum::joint_prob(cfg, 2, 3, Outcome::Plus, Outcome::Plus);
    row.p13 = quantum::joint_prob(cfg, 1, 3, Outcome::Plus, Outcome::Plus);
    row.slack = row.p12 + row.p23 - row.p13;
    result.rows[static_cast<std::size_t>(k)] = row;
  }

  for (std::size_t k = 1; k < result.rows.size(); ++k) {
    if (result.rows[k].slack < result.rows[result.argmin].slack) result.argmin = k;
  }
  return result;
}

}  // namespace bellwright
