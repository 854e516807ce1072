#pragma once

#include <memory>
#include <set>
#include <string>

namespace bellwright {

// Symbolic boolean expression over atomic event types. Values are cheap to
// copy (immutable nodes behind shared pointers) and composable with
// operator overloads:
//
//   auto e = EventExpr::atom("L1") && !EventExpr::atom("C11");
//
// Double negation collapses at construction time, so !!e is e.
class EventExpr {
 public:
  enum class Kind { Atom, Not, And, Or };

  static EventExpr atom(std::string name);
  static EventExpr conj(EventExpr a, EventExpr b);
  static EventExpr disj(EventExpr a, EventExpr b);
  static EventExpr negate(EventExpr e);

  Kind kind() const { return node_->kind; }
  const std::string& atom_name() const;
  EventExpr lhs() const;
  EventExpr rhs() const;
  EventExpr operand() const { return lhs(); }

  void collect_atoms(std::set<std::string>& out) const;
  std::string to_string() const;

 private:
  struct Node;
  explicit EventExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  struct Node {
    Kind kind;
    std::string name;  // Kind::Atom only
    // wrapped children; And/Or use both, Not uses first
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
  };

  static EventExpr wrap(std::shared_ptr<const Node> n) { return EventExpr(std::move(n)); }

  std::shared_ptr<const Node> node_;

  friend EventExpr operator&&(const EventExpr& a, const EventExpr& b);
  friend EventExpr operator||(const EventExpr& a, const EventExpr& b);
  friend EventExpr operator!(const EventExpr& e);
};

EventExpr operator&&(const EventExpr& a, const EventExpr& b);
EventExpr operator||(const EventExpr& a, const EventExpr& b);
EventExpr operator!(const EventExpr& e);

}  // namespace bellwright
