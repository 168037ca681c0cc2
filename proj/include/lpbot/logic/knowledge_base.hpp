#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lpbot/logic/bindings.hpp"
#include "lpbot/logic/parser.hpp"
#include "lpbot/logic/term.hpp"

namespace lpbot::logic {

class KnowledgeBase;

enum class NativeMode { deterministic, nondeterministic };
enum class InsertPosition { front, back };

/// Resolution limits applied to one query.
struct SolveLimits {
  std::uint64_t max_steps = 100000;
  std::size_t max_choice_points = 100000;
};

/// View of a native predicate invocation handed to host callbacks.
class NativeCall {
 public:
  NativeCall(const Term& goal, Bindings& bindings, KnowledgeBase& kb, std::uint64_t snapshot)
      : goal_(goal), bindings_(bindings), kb_(kb), snapshot_(snapshot) {}

  std::size_t arity() const { return goal_.arity(); }
  /// Argument i, dereferenced through the current bindings.
  Term arg(std::size_t i) const { return bindings_.deref(goal_.arg(i)); }
  /// Argument i with the substitution applied throughout.
  Term resolved(std::size_t i) const { return bindings_.resolve(goal_.arg(i)); }
  bool unify(const Term& a, const Term& b) { return logic::unify(a, b, bindings_); }

  const Term& goal() const { return goal_; }
  Bindings& bindings() { return bindings_; }
  KnowledgeBase& kb() { return kb_; }
  /// Generation of the knowledge base visible to the running query.
  std::uint64_t snapshot_generation() const { return snapshot_; }

 private:
  Term goal_;
  Bindings& bindings_;
  KnowledgeBase& kb_;
  std::uint64_t snapshot_;
};

/// Re-entrant answer source for a nondeterministic native.  next() returns
/// true after producing one more solution; the solver undoes bindings
/// between calls.
class NativeEnumerator {
 public:
  virtual ~NativeEnumerator() = default;
  virtual bool next(NativeCall& call) = 0;
};

using DeterministicHandler = std::function<bool(NativeCall&)>;
using NondeterministicHandler = std::function<std::unique_ptr<NativeEnumerator>(NativeCall&)>;

/// Enumerator that unifies the call arguments with each answer tuple in turn.
std::unique_ptr<NativeEnumerator> enumerate_answers(std::vector<std::vector<Term>> answers);

struct NativePredicate {
  NativeMode mode = NativeMode::deterministic;
  DeterministicHandler deterministic;
  NondeterministicHandler nondeterministic;
  bool builtin = false;
};

struct StoredClause {
  static constexpr std::uint64_t alive = std::numeric_limits<std::uint64_t>::max();

  Clause clause;
  std::uint64_t born = 0;
  std::uint64_t died = alive;

  bool visible_at(std::uint64_t generation) const { return born <= generation && generation < died; }
};

using ClauseList = std::vector<std::shared_ptr<StoredClause>>;

/// True for control constructs handled by the solver itself.
bool is_control(const PredicateKey& key);

/// Clause store plus registered native predicates.
///
/// Clause lists are copy-on-write: every assert or retract bumps the
/// generation, and open solution streams keep reading the clause set of
/// the generation they were created at.
class KnowledgeBase {
 public:
  KnowledgeBase();
  ~KnowledgeBase();
  KnowledgeBase(const KnowledgeBase&) = delete;
  KnowledgeBase& operator=(const KnowledgeBase&) = delete;

  /// Parses and adds every clause of source.  Nothing is added when parsing
  /// fails or any clause targets a native/control predicate.
  void consult(std::string_view source);
  void add_clauses(std::vector<Clause> clauses);

  void assert_clause(Clause clause, InsertPosition position = InsertPosition::back);
  void assert_term(const Term& clause_term, InsertPosition position = InsertPosition::back);

  /// Removes the first clause unifying with `Head` or `(Head :- Body)`.
  bool retract(const Term& pattern);
  /// Retract driven by a running query: bindings are kept on success.
  bool retract_first(const Term& pattern, Bindings& bindings, std::uint64_t snapshot);
  /// Removes every live clause whose head unifies with head; returns the count.
  std::size_t retract_all(const Term& head);

  /// Declares a predicate that may have zero clauses without raising
  /// existence errors.
  void declare_dynamic(std::string_view name, std::size_t arity);

  void register_deterministic(std::string_view name, std::size_t arity,
                              DeterministicHandler handler);
  void register_nondeterministic(std::string_view name, std::size_t arity,
                                 NondeterministicHandler handler);

  const NativePredicate* native(const PredicateKey& key) const;
  bool is_native(const PredicateKey& key) const { return native(key) != nullptr; }
  /// Clause-defined or declared dynamic.
  bool is_defined(const PredicateKey& key) const { return preds_.count(key) != 0; }
  bool is_dynamic(const PredicateKey& key) const;

  /// Snapshot of the clause list, or nullptr for an undefined predicate.
  std::shared_ptr<const ClauseList> clauses(const PredicateKey& key) const;
  /// Live clauses of a predicate in order (empty when undefined).
  std::vector<Clause> live_clauses(const PredicateKey& key) const;

  std::vector<PredicateKey> defined_predicates() const;
  std::vector<PredicateKey> native_predicates(bool include_builtins) const;

  std::uint64_t generation() const { return generation_; }
  std::size_t active_streams() const { return active_streams_; }

  SolveLimits& limits() { return limits_; }
  const SolveLimits& limits() const { return limits_; }

  std::ostream& output() const { return *output_; }
  void set_output(std::ostream& out) { output_ = &out; }

 private:
  friend class SolutionStream;

  struct Predicate {
    std::shared_ptr<const ClauseList> clauses;
    bool dynamic = false;
  };

  void check_modifiable(const PredicateKey& key) const;
  void register_entry(std::string_view name, std::size_t arity, NativePredicate entry);
  void register_builtins();
  void stream_opened() { ++active_streams_; }
  void stream_closed();
  void collect_garbage();

  std::unordered_map<PredicateKey, Predicate, PredicateKeyHash> preds_;
  std::unordered_map<PredicateKey, NativePredicate, PredicateKeyHash> natives_;
  std::unordered_set<PredicateKey, PredicateKeyHash> dirty_;
  std::uint64_t generation_ = 0;
  std::uint64_t next_sequence_ = 0;
  std::size_t active_streams_ = 0;
  SolveLimits limits_;
  std::ostream* output_;
};

}  // namespace lpbot::logic
