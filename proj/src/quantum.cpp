#include "bellwright/quantum.hpp"

#include <cmath>

#include "bellwright/errors.hpp"

namespace bellwright {

void TargetStatistics::set_pair(int i, int j, std::array<TargetEntry, 4> cells) {
  Rational sum = 0;
  for (const auto& cell : cells) {
    if (cell.value < 0 || cell.value > 1) {
      throw MalformedTargets("target entry outside [0,1] for pair " +
                             pair_name(SettingPair{i, j}));
    }
    if (cell.radius < 0) throw MalformedTargets("negative rounding radius");
    sum += cell.value;
  }
  if (sum != 1) {
    throw MalformedTargets("target cells for pair " + pair_name(SettingPair{i, j}) +
                           " sum to " + format_rational(sum) + ", expected 1");
  }
  pairs_[pair_index(i, j)] = cells;
}

const TargetEntry& TargetStatistics::at(int i, int j, Outcome a, Outcome b) const {
  return at_cell(pair_index(i, j), outcome_index(a, b));
}

const TargetEntry& TargetStatistics::at_cell(int pair_idx, int cell) const {
  const auto& entry = pairs_[static_cast<std::size_t>(pair_idx)];
  if (!entry) {
    throw MalformedTargets("no targets for pair " + pair_name(pair_from_index(pair_idx)));
  }
  return (*entry)[static_cast<std::size_t>(cell)];
}

std::vector<int> TargetStatistics::included_pairs() const {
  std::vector<int> out;
  for (int idx = 0; idx < kNumPairs; ++idx) {
    if (pairs_[idx]) out.push_back(idx);
  }
  return out;
}

bool TargetStatistics::all_exact() const { return max_radius() == 0; }

Rational TargetStatistics::max_radius() const {
  Rational r = 0;
  for (const auto& entry : pairs_) {
    if (!entry) continue;
    for (const auto& cell : *entry) {
      if (cell.radius > r) r = cell.radius;
    }
  }
  return r;
}

namespace quantum {

namespace {

constexpr double kPi = 3.14159265358979323846;

double normalize_deg(double deg) {
  double d = std::fmod(deg, 360.0);
  if (d < 0) d += 360.0;
  return d;
}

// sin^2(phi/2) at the angles where it is rational.
std::optional<Rational> exact_half_sine_sq(double phi_deg) {
  const double eps = 1e-9;
  if (std::fabs(phi_deg - 0.0) < eps) return make_rational(0, 1);
  if (std::fabs(phi_deg - 60.0) < eps) return make_rational(1, 4);
  if (std::fabs(phi_deg - 90.0) < eps) return make_rational(1, 2);
  if (std::fabs(phi_deg - 120.0) < eps) return make_rational(3, 4);
  if (std::fabs(phi_deg - 180.0) < eps) return make_rational(1, 1);
  return std::nullopt;
}

void require_indices(int i, int j) {
  if (i < 1 || i > 3 || j < 1 || j > 3) throw OutOfRange("setting index outside 1..3");
}

}  // namespace

DirectionConfig DirectionConfig::from_degrees(double a1, double a2, double a3) {
  DirectionConfig cfg;
  cfg.degrees_ = {normalize_deg(a1), normalize_deg(a2), normalize_deg(a3)};
  return cfg;
}

double DirectionConfig::angle_rad(int i) const { return angle_deg(i) * kPi / 180.0; }

double DirectionConfig::pair_angle_deg(int i, int j) const {
  require_indices(i, j);
  double d = std::fabs(angle_deg(i) - angle_deg(j));
  if (d > 180.0) d = 360.0 - d;
  return d;
}

double DirectionConfig::pair_angle_rad(int i, int j) const {
  return pair_angle_deg(i, j) * kPi / 180.0;
}

double joint_prob(const DirectionConfig& cfg, int i, int j, Outcome a, Outcome b) {
  double half = cfg.pair_angle_rad(i, j) / 2.0;
  double s = std::sin(half);
  double c = std::cos(half);
  return a == b ? 0.5 * s * s : 0.5 * c * c;
}

double marginal_prob(const DirectionConfig& cfg, Wing, int i, int j, Outcome) {
  require_indices(i, j);
  (void)cfg;
  return 0.5;
}

std::optional<Rational> exact_joint_prob(const DirectionConfig& cfg, int i, int j,
                                         Outcome a, Outcome b) {
  auto s2h = exact_half_sine_sq(cfg.pair_angle_deg(i, j));
  if (!s2h) return std::nullopt;
  Rational same = *s2h / 2;
  return a == b ? same : make_rational(1, 2) - same;
}

double anticorrelation(const DirectionConfig& cfg, int i, int j) {
  return joint_prob(cfg, i, j, Outcome::Plus, Outcome::Plus) +
         joint_prob(cfg, i, j, Outcome::Minus, Outcome::Minus) -
         joint_prob(cfg, i, j, Outcome::Plus, Outcome::Minus) -
         joint_prob(cfg, i, j, Outcome::Minus, Outcome::Plus);
}

OutcomeTable outcome_table(const DirectionConfig& cfg) {
  OutcomeTable table;
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      for (Outcome a : {Outcome::Plus, Outcome::Minus}) {
        for (Outcome b : {Outcome::Plus, Outcome::Minus}) {
          table.cells[static_cast<std::size_t>(pair_index(i, j))]
                     [static_cast<std::size_t>(outcome_index(a, b))] =
              joint_prob(cfg, i, j, a, b);
        }
      }
    }
  }
  return table;
}

TargetStatistics quantum_targets(const DirectionConfig& cfg, std::uint64_t denominator) {
  TargetStatistics targets;
  const Rational half = make_rational(1, 2);
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      Rational same, radius;
      if (auto exact = exact_half_sine_sq(cfg.pair_angle_deg(i, j))) {
        same = *exact / 2;
        radius = 0;
      } else {
        same = round_to_denominator(joint_prob(cfg, i, j, Outcome::Plus, Outcome::Plus),
                                    denominator);
        if (same < 0) same = 0;
        if (same > half) same = half;
        // half a grid step plus slack for the floating evaluation itself
        radius = make_rational(1, 2 * static_cast<long>(denominator)) +
                 make_rational(1, 1000000000000L);
      }
      Rational diff = half - same;
      targets.set_pair(i, j,
                       {TargetEntry{same, radius}, TargetEntry{diff, radius},
                        TargetEntry{diff, radius}, TargetEntry{same, radius}});
    }
  }
  return targets;
}

}  // namespace quantum
}  // namespace bellwright
