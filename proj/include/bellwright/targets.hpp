#pragma once

#include <array>
#include <optional>
#include <vector>

#include "bellwright/rational.hpp"
#include "bellwright/types.hpp"

namespace bellwright {

// One conditional probability p_ij(a,b). radius == 0 means the value is
// exact; a positive radius records how far the true (possibly irrational)
// value may sit from the stored rational.
struct TargetEntry {
  Rational value;
  Rational radius;
};

// Table of conditional outcome probabilities per setting pair. Pairs may be
// omitted (a feasibility problem can restrict itself to a selection); every
// included pair carries all four outcome cells and they sum to 1 exactly.
class TargetStatistics {
 public:
  // Throws MalformedTargets unless entries are in [0,1] and sum to 1.
  void set_pair(int i, int j, std::array<TargetEntry, 4> cells);

  bool has_pair(int i, int j) const { return pairs_[pair_index(i, j)].has_value(); }
  bool has_pair_index(int idx) const { return pairs_[idx].has_value(); }

  const TargetEntry& at(int i, int j, Outcome a, Outcome b) const;
  const TargetEntry& at_cell(int pair_idx, int cell) const;

  std::vector<int> included_pairs() const;
  bool all_exact() const;
  Rational max_radius() const;

 private:
  std::array<std::optional<std::array<TargetEntry, 4>>, kNumPairs> pairs_;
};

}  // namespace bellwright
