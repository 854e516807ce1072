#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "bellwright/targets.hpp"
#include "bellwright/types.hpp"

namespace bellwright::quantum {

// Three measurement directions. Accepted in degrees, normalized into
// [0, 360); pairwise angles come out in [0, 180].
class DirectionConfig {
 public:
  static DirectionConfig from_degrees(double a1, double a2, double a3);

  double angle_deg(int i) const { return degrees_[static_cast<std::size_t>(i - 1)]; }
  double angle_rad(int i) const;

  double pair_angle_deg(int i, int j) const;
  double pair_angle_rad(int i, int j) const;

 private:
  std::array<double, 3> degrees_{};
};

// Singlet-state prediction for the joint outcome, conditional on the setting
// pair: (1/2) sin^2(phi/2) when the outcomes agree, (1/2) cos^2(phi/2) when
// they differ.
double joint_prob(const DirectionConfig& cfg, int i, int j, Outcome a, Outcome b);

// Each wing's outcome alone is unbiased: exactly 1/2 for every setting pair.
double marginal_prob(const DirectionConfig& cfg, Wing wing, int i, int j, Outcome a);

// Exact rational value of joint_prob when the pair angle is one of the
// special angles 0, 60, 90, 120, 180 degrees; nullopt otherwise.
std::optional<Rational> exact_joint_prob(const DirectionConfig& cfg, int i, int j,
                                         Outcome a, Outcome b);

// E(i,j) = p(++) + p(--) - p(+-) - p(-+); equals -cos(phi_ij).
double anticorrelation(const DirectionConfig& cfg, int i, int j);

// Joint-outcome table for all 9 setting pairs.
struct OutcomeTable {
  std::array<std::array<double, 4>, kNumPairs> cells{};

  double at(int i, int j, Outcome a, Outcome b) const {
    return cells[static_cast<std::size_t>(pair_index(i, j))]
                [static_cast<std::size_t>(outcome_index(a, b))];
  }
};

OutcomeTable outcome_table(const DirectionConfig& cfg);

// Packages the predictions as rational target statistics for the feasibility
// solver: exact at special angles, otherwise rounded to the given denominator
// with the rounding radius recorded. Rounding keeps each pair's cells summing
// to 1 and both marginals at exactly 1/2.
TargetStatistics quantum_targets(const DirectionConfig& cfg,
                                 std::uint64_t denominator = 1000000);

}  // namespace bellwright::quantum
