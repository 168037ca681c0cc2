#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lpbot::logic {

using VarId = std::uint64_t;

/// Immutable logic term: atom, integer, variable or compound.
///
/// A Term is a cheap handle over a shared node, so copies share structure.
/// Compound terms always have arity >= 1; zero-arity symbols are atoms.
class Term {
 public:
  enum class Kind : std::uint8_t { atom, integer, variable, compound };

  /// The empty list atom `[]`.
  Term();

  static Term atom(std::string_view name);
  static Term integer(std::int64_t value);
  static Term variable(VarId id, std::string_view name = {});
  static Term compound(std::string_view functor, std::vector<Term> args);

  /// Builds `'.'(H, '.'(..., Tail))` from the items.
  static Term list(std::span<const Term> items, Term tail = Term());

  Kind kind() const { return node_->kind; }
  bool is_atom() const { return kind() == Kind::atom; }
  bool is_integer() const { return kind() == Kind::integer; }
  bool is_variable() const { return kind() == Kind::variable; }
  bool is_compound() const { return kind() == Kind::compound; }
  bool is_callable() const { return is_atom() || is_compound(); }
  bool is_atom(std::string_view name) const { return is_atom() && node_->name == name; }
  bool is_functor(std::string_view name, std::size_t arity) const {
    return is_compound() && node_->args.size() == arity && node_->name == name;
  }

  /// Atom name, compound functor, or variable source name (may be empty).
  const std::string& name() const { return node_->name; }
  std::int64_t int_value() const { return node_->value; }
  VarId var_id() const { return static_cast<VarId>(node_->value); }
  std::size_t arity() const { return node_->args.size(); }
  std::span<const Term> args() const { return node_->args; }
  const Term& arg(std::size_t i) const { return node_->args[i]; }

  /// True when no variable occurs in the term.
  bool ground() const { return node_->ground; }

  /// Identity of the underlying node; equal identities imply equal terms.
  const void* identity() const { return node_.get(); }

 private:
  struct Node {
    Kind kind;
    bool ground;
    std::int64_t value;
    std::string name;
    std::vector<Term> args;

    // Frees long chains without recursing once per level.
    ~Node();
  };

  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// Predicate indicator `name/arity`.
struct PredicateKey {
  std::string name;
  std::size_t arity = 0;

  friend bool operator==(const PredicateKey&, const PredicateKey&) = default;
  friend auto operator<=>(const PredicateKey&, const PredicateKey&) = default;

  std::string str() const { return name + "/" + std::to_string(arity); }
};

struct PredicateKeyHash {
  std::size_t operator()(const PredicateKey& k) const noexcept {
    return std::hash<std::string>{}(k.name) * 31u + k.arity;
  }
};

/// Key of a callable term. Precondition: t.is_callable().
PredicateKey key_of(const Term& t);

/// Structural equality (variables compare by id).
bool identical(const Term& a, const Term& b);

/// Standard order of terms: Var < Integer < Atom < Compound; compounds by
/// arity, then name, then arguments left to right.
int compare_terms(const Term& a, const Term& b);

/// Largest variable id occurring in t plus one (0 when ground).
VarId var_bound(const Term& t);

/// Distinct variables of t in first-occurrence order.
std::vector<Term> variables_of(const Term& t);

/// Elements of a proper list, or false when t is not a proper list.
bool list_items(const Term& t, std::vector<Term>& out);

}  // namespace lpbot::logic
