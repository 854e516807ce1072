#include "bellwright/event.hpp"

#include <cassert>

namespace bellwright {

EventExpr EventExpr::atom(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Atom;
  n->name = std::move(name);
  return wrap(n);
}

EventExpr EventExpr::conj(EventExpr a, EventExpr b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::And;
  n->a = std::move(a.node_);
  n->b = std::move(b.node_);
  return wrap(n);
}

EventExpr EventExpr::disj(EventExpr a, EventExpr b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Or;
  n->a = std::move(a.node_);
  n->b = std::move(b.node_);
  return wrap(n);
}

EventExpr EventExpr::negate(EventExpr e) {
  if (e.node_->kind == Kind::Not) return wrap(e.node_->a);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Not;
  n->a = std::move(e.node_);
  return wrap(n);
}

const std::string& EventExpr::atom_name() const {
  assert(node_->kind == Kind::Atom);
  return node_->name;
}

EventExpr EventExpr::lhs() const {
  assert(node_->a);
  return wrap(node_->a);
}

EventExpr EventExpr::rhs() const {
  assert(node_->b);
  return wrap(node_->b);
}

void EventExpr::collect_atoms(std::set<std::string>& out) const {
  switch (node_->kind) {
    case Kind::Atom:
      out.insert(node_->name);
      return;
    case Kind::Not:
      lhs().collect_atoms(out);
      return;
    case Kind::And:
    case Kind::Or:
      lhs().collect_atoms(out);
      rhs().collect_atoms(out);
      return;
  }
}

std::string EventExpr::to_string() const {
  switch (node_->kind) {
    case Kind::Atom:
      return node_->name;
    case Kind::Not:
      return "!" + lhs().to_string();
    case Kind::And:
      return "(" + lhs().to_string() + " & " + rhs().to_string() + ")";
    case Kind::Or:
      return "(" + lhs().to_string() + " | " + rhs().to_string() + ")";
  }
  return {};
}

EventExpr operator&&(const EventExpr& a, const EventExpr& b) { return EventExpr::conj(a, b); }
EventExpr operator||(const EventExpr& a, const EventExpr& b) { return EventExpr::disj(a, b); }
EventExpr operator!(const EventExpr& e) { return EventExpr::negate(e); }

}  // namespace bellwright
