#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bellwright/event.hpp"
#include "bellwright/rational.hpp"

namespace bellwright {

// Per-atom membership mask; index parallel to the space's atom list.
using AtomMask = std::vector<char>;

// Finite set of worlds with exact rational weights plus named extensions for
// the atomic event types. Immutable after SpaceBuilder::build(); all queries
// are const and safe to share across threads.
class FiniteProbabilitySpace {
 public:
  std::size_t atom_count() const { return weights_.size(); }
  const std::string& atom_label(std::size_t k) const { return labels_[k]; }
  const Rational& weight(std::size_t k) const { return weights_[k]; }

  bool has_event(const std::string& name) const;
  const AtomMask& extension(const std::string& name) const;  // throws UndeclaredAtom

  // Evaluates the expression on every atom at once.
  AtomMask satisfying_atoms(const EventExpr& e) const;

  Rational mass(const AtomMask& mask) const;

 private:
  friend class SpaceBuilder;
  FiniteProbabilitySpace() = default;

  std::vector<std::string> labels_;
  std::vector<Rational> weights_;
  std::map<std::string, AtomMask> extensions_;
};

class SpaceBuilder {
 public:
  // Returns the new atom's index.
  std::size_t add_atom(std::string label, Rational weight);

  void declare_event(const std::string& name, const std::vector<std::size_t>& members);
  void add_to_event(const std::string& name, std::size_t atom);

  // Validates: weights >= 0 and summing exactly to 1, members in range.
  FiniteProbabilitySpace build();

 private:
  std::vector<std::string> labels_;
  std::vector<Rational> weights_;
  std::map<std::string, std::vector<std::size_t>> members_;
};

// Finite-valued variable: each value is bound to an atomic event name.
// Value extensions must be pairwise disjoint and jointly cover the atoms.
struct Variable {
  std::string name;
  std::vector<std::string> value_events;

  EventExpr value_expr(std::size_t k) const { return EventExpr::atom(value_events[k]); }
};

void validate_variable(const FiniteProbabilitySpace& space, const Variable& v);

// --- probability queries (exact) ---

Rational prob(const FiniteProbabilitySpace& space, const EventExpr& e);

// p(e | given) = p(e & given) / p(given); throws ZeroConditioning.
Rational cond_prob(const FiniteProbabilitySpace& space, const EventExpr& e,
                   const EventExpr& given);

struct CorrelationResult {
  bool correlated = false;
  Rational delta;  // p(a&b|given) - p(a|given) p(b|given)
};

CorrelationResult correlated(const FiniteProbabilitySpace& space, const EventExpr& a,
                             const EventExpr& b,
                             const std::optional<EventExpr>& given = std::nullopt);

enum class ScreeningStatus { Holds, Fails, Vacuous };

struct ScreeningEntry {
  std::string value;
  ScreeningStatus status = ScreeningStatus::Vacuous;
  Rational residual;  // p(a&b|Vq&given) - p(a|Vq&given) p(b|Vq&given)
};

struct ScreeningReport {
  std::vector<ScreeningEntry> entries;
  bool all_hold() const;
};

// Checks the screening-off condition value by value. Zero-weight values are
// reported vacuous rather than failed.
ScreeningReport screens_off(const FiniteProbabilitySpace& space, const Variable& v,
                            const EventExpr& a, const EventExpr& b,
                            const std::optional<EventExpr>& given = std::nullopt);

}  // namespace bellwright
