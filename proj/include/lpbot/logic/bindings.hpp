#pragma once

#include <cstddef>
#include <vector>

#include "lpbot/logic/term.hpp"

namespace lpbot::logic {

/// Substitution from variable ids to terms, with a trail for undo.
///
/// Bindings never form chains that revisit a variable, so deref always
/// terminates.  undo_to(mark) restores the exact map that existed when
/// mark() was taken.
class Bindings {
 public:
  Bindings() = default;

  /// Follows variable bindings until an unbound variable or non-variable.
  Term deref(Term t) const;
  bool is_bound(VarId id) const { return id < slots_.size() && slots_[id].has_value; }

  /// Binds an unbound variable and records it on the trail.
  void bind(VarId id, const Term& value);

  std::size_t mark() const { return trail_.size(); }
  void undo_to(std::size_t mark);
  std::size_t trail_size() const { return trail_.size(); }

  /// Applies the substitution throughout t.
  Term resolve(const Term& t) const;

  /// Reserves a block of `count` fresh variable ids and returns the first.
  VarId fresh(VarId count = 1);
  /// Ensures subsequently issued ids are >= floor.
  void reserve_ids(VarId floor);
  VarId next_id() const { return next_; }

 private:
  struct Slot {
    bool has_value = false;
    Term value;
  };

  std::vector<Slot> slots_;
  std::vector<VarId> trail_;
  VarId next_ = 0;
};

/// Most general unifier with occurs check.  On failure the bindings are
/// restored to their state at entry.
bool unify(const Term& a, const Term& b, Bindings& bindings);

/// Copies t with every variable id shifted by offset (clause renaming).
Term rename(const Term& t, VarId offset);

/// Resolves t and replaces each remaining variable by a fresh one.
Term copy_fresh(const Term& t, Bindings& bindings);

}  // namespace lpbot::logic
