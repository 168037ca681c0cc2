#include "lpbot/logic/term.hpp"

#include <algorithm>
#include <unordered_set>

#include "lpbot/logic/errors.hpp"

namespace lpbot::logic {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::syntax: return "syntax";
    case ErrorKind::instantiation: return "instantiation";
    case ErrorKind::type: return "type";
    case ErrorKind::evaluation: return "evaluation";
    case ErrorKind::existence: return "existence";
    case ErrorKind::permission: return "permission";
    case ErrorKind::resource: return "resource";
  }
  return "unknown";
}

SyntaxError::SyntaxError(std::size_t line, std::size_t column, const std::string& message,
                         const std::string& excerpt)
    : EngineError(ErrorKind::syntax, "line " + std::to_string(line) + ", column " +
                                         std::to_string(column) + ": " + message + "\n  " +
                                         excerpt),
      line_(line),
      column_(column),
      excerpt_(excerpt) {}

Term::Node::~Node() {
  auto detachable = [](const Term& t) { return t.node_ && t.node_.use_count() == 1 && !t.node_->args.empty(); };
  if (std::none_of(args.begin(), args.end(), detachable)) return;
  std::vector<std::shared_ptr<const Node>> pending;
  for (Term& a : args)
    if (detachable(a)) pending.push_back(std::move(a.node_));
  while (!pending.empty()) {
    std::shared_ptr<const Node> n = std::move(pending.back());
    pending.pop_back();
    auto& kids = const_cast<std::vector<Term>&>(n->args);
    for (Term& k : kids)
      if (detachable(k)) pending.push_back(std::move(k.node_));
  }
}

Term::Term() {
  static const std::shared_ptr<const Node> empty_list =
      std::make_shared<const Node>(Node{Kind::atom, true, 0, "[]", {}});
  node_ = empty_list;
}

Term Term::atom(std::string_view name) {
  if (name == "[]") return Term();
  return Term(std::make_shared<const Node>(Node{Kind::atom, true, 0, std::string(name), {}}));
}

Term Term::integer(std::int64_t value) {
  return Term(std::make_shared<const Node>(Node{Kind::integer, true, value, {}, {}}));
}

Term Term::variable(VarId id, std::string_view name) {
  return Term(std::make_shared<const Node>(
      Node{Kind::variable, false, static_cast<std::int64_t>(id), std::string(name), {}}));
}

Term Term::compound(std::string_view functor, std::vector<Term> args) {
  if (args.empty()) return atom(functor);
  bool ground = std::all_of(args.begin(), args.end(), [](const Term& t) { return t.ground(); });
  return Term(std::make_shared<const Node>(
      Node{Kind::compound, ground, 0, std::string(functor), std::move(args)}));
}

Term Term::list(std::span<const Term> items, Term tail) {
  Term out = std::move(tail);
  for (auto it = items.rbegin(); it != items.rend(); ++it) out = compound(".", {*it, out});
  return out;
}

PredicateKey key_of(const Term& t) { return PredicateKey{t.name(), t.arity()}; }

bool identical(const Term& a0, const Term& b0) {
  Term a = a0, b = b0;
  while (true) {
    if (a.identity() == b.identity()) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case Term::Kind::atom: return a.name() == b.name();
      case Term::Kind::integer: return a.int_value() == b.int_value();
      case Term::Kind::variable: return a.var_id() == b.var_id();
      case Term::Kind::compound: break;
    }
    const std::size_t n = a.arity();
    if (n != b.arity() || a.name() != b.name()) return false;
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!identical(a.arg(i), b.arg(i))) return false;
    Term na = a.arg(n - 1), nb = b.arg(n - 1);
    a = std::move(na);
    b = std::move(nb);
  }
}

namespace {

int kind_rank(Term::Kind k) {
  switch (k) {
    case Term::Kind::variable: return 0;
    case Term::Kind::integer: return 1;
    case Term::Kind::atom: return 2;
    case Term::Kind::compound: return 3;
  }
  return 4;
}

template <typename T>
int three_way(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

}  // namespace

int compare_terms(const Term& a0, const Term& b0) {
  Term a = a0, b = b0;
  while (true) {
    if (a.identity() == b.identity()) return 0;
    if (a.kind() != b.kind()) return three_way(kind_rank(a.kind()), kind_rank(b.kind()));
    switch (a.kind()) {
      case Term::Kind::variable: return three_way(a.var_id(), b.var_id());
      case Term::Kind::integer: return three_way(a.int_value(), b.int_value());
      case Term::Kind::atom: return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
      case Term::Kind::compound: break;
    }
    const std::size_t n = a.arity();
    if (n != b.arity()) return three_way(n, b.arity());
    if (int c = a.name().compare(b.name()); c != 0) return c < 0 ? -1 : 1;
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (int c = compare_terms(a.arg(i), b.arg(i)); c != 0) return c;
    Term na = a.arg(n - 1), nb = b.arg(n - 1);
    a = std::move(na);
    b = std::move(nb);
  }
}

VarId var_bound(const Term& t0) {
  VarId best = 0;
  Term t = t0;
  while (!t.ground()) {
    if (t.is_variable()) return std::max(best, t.var_id() + 1);
    const std::size_t n = t.arity();
    for (std::size_t i = 0; i + 1 < n; ++i) best = std::max(best, var_bound(t.arg(i)));
    Term next = t.arg(n - 1);
    t = std::move(next);
  }
  return best;
}

namespace {

void collect_vars(const Term& t0, std::unordered_set<VarId>& seen, std::vector<Term>& out) {
  Term t = t0;
  while (!t.ground()) {
    if (t.is_variable()) {
      if (seen.insert(t.var_id()).second) out.push_back(t);
      return;
    }
    const std::size_t n = t.arity();
    for (std::size_t i = 0; i + 1 < n; ++i) collect_vars(t.arg(i), seen, out);
    Term next = t.arg(n - 1);
    t = std::move(next);
  }
}

}  // namespace

std::vector<Term> variables_of(const Term& t) {
  std::unordered_set<VarId> seen;
  std::vector<Term> out;
  collect_vars(t, seen, out);
  return out;
}

bool list_items(const Term& t, std::vector<Term>& out) {
  Term cur = t;
  while (cur.is_functor(".", 2)) {
    out.push_back(cur.arg(0));
    cur = cur.arg(1);
  }
  return cur.is_atom("[]");
}

}  // namespace lpbot::logic
