#pragma once

#include <array>
#include <cassert>
#include <string>

namespace bellwright {

// Spin outcome of one wing's measurement.
enum class Outcome : int { Plus = 0, Minus = 1 };

enum class Wing : int { Left = 0, Right = 1 };

inline char outcome_char(Outcome a) { return a == Outcome::Plus ? '+' : '-'; }

inline Outcome outcome_from_char(char c) {
  assert(c == '+' || c == '-');
  return c == '+' ? Outcome::Plus : Outcome::Minus;
}

// Measurement directions are indexed 1..3 in each wing.
struct SettingPair {
  int left = 1;
  int right = 1;
};

inline constexpr int kNumPairs = 9;

inline int pair_index(int i, int j) {
  assert(i >= 1 && i <= 3 && j >= 1 && j <= 3);
  return (i - 1) * 3 + (j - 1);
}

inline int pair_index(SettingPair p) { return pair_index(p.left, p.right); }

inline SettingPair pair_from_index(int idx) {
  assert(idx >= 0 && idx < kNumPairs);
  return SettingPair{idx / 3 + 1, idx % 3 + 1};
}

inline std::string pair_name(SettingPair p) {
  return std::to_string(p.left) + std::to_string(p.right);
}

// Joint outcome cell index: ++, +-, -+, -- in that order.
inline int outcome_index(Outcome a, Outcome b) {
  return static_cast<int>(a) * 2 + static_cast<int>(b);
}

inline std::string outcome_cell_name(int cell) {
  static const std::array<const char*, 4> names = {"++", "+-", "-+", "--"};
  assert(cell >= 0 && cell < 4);
  return names[static_cast<std::size_t>(cell)];
}

// Canonical atomic-event names shared by every module that builds or reads
// a probability space for this experiment: "L1".."R3" for settings,
// "L1+".."R3-" for outcomes, "C11"/"C22"/"C33" for the parallel-pair common
// cause event types and "!Cii" for their complements.
inline std::string setting_name(Wing w, int i) {
  return (w == Wing::Left ? "L" : "R") + std::to_string(i);
}

inline std::string outcome_name(Wing w, int i, Outcome a) {
  return setting_name(w, i) + outcome_char(a);
}

inline std::string cause_name(int i) {
  return "C" + std::to_string(i) + std::to_string(i);
}

inline std::string cause_complement_name(int i) { return "!" + cause_name(i); }

}  // namespace bellwright
