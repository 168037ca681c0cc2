#include "lpbot/logic/bindings.hpp"

#include <unordered_map>
#include <utility>

namespace lpbot::logic {

Term Bindings::deref(Term t) const {
  while (t.is_variable()) {
    VarId id = t.var_id();
    if (id >= slots_.size() || !slots_[id].has_value) break;
    t = slots_[id].value;
  }
  return t;
}

void Bindings::bind(VarId id, const Term& value) {
  if (id >= slots_.size()) slots_.resize(id + 1);
  slots_[id].has_value = true;
  slots_[id].value = value;
  trail_.push_back(id);
}

void Bindings::undo_to(std::size_t mark) {
  while (trail_.size() > mark) {
    Slot& s = slots_[trail_.back()];
    s.has_value = false;
    s.value = Term();
    trail_.pop_back();
  }
}

namespace {

// Rebuilds t bottom-up.  The last argument of each compound is followed in
// a loop, so long lists and right-nested conjunctions do not recurse.
//   norm(t)  - view of t at each spine position (e.g. deref)
//   leaf(t)  - result for a non-compound or untouched subterm
//   rec(t)   - result for a non-last argument
template <class Norm, class Stop, class Leaf, class Rec>
Term map_spine(const Term& t0, Norm norm, Stop stop, Leaf leaf, Rec rec) {
  struct Level {
    Term node;
    std::vector<Term> args;
    bool changed = false;
  };
  std::vector<Level> levels;
  Term t = norm(t0);
  while (t.is_compound() && !stop(t)) {
    Level level{t, {}, false};
    const std::size_t n = t.arity();
    level.args.reserve(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      level.args.push_back(rec(t.arg(i)));
      level.changed = level.changed || level.args.back().identity() != t.arg(i).identity();
    }
    Term next = norm(t.arg(n - 1));
    levels.push_back(std::move(level));
    t = std::move(next);
  }
  Term result = leaf(t);
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    const Term& last = it->node.arg(it->node.arity() - 1);
    bool changed = it->changed || result.identity() != last.identity();
    if (changed) {
      it->args.push_back(std::move(result));
      result = Term::compound(it->node.name(), std::move(it->args));
    } else {
      result = it->node;
    }
  }
  return result;
}

}  // namespace

Term Bindings::resolve(const Term& t) const {
  if (t.ground()) return t;
  return map_spine(
      t, [this](const Term& x) { return deref(x); }, [](const Term& x) { return x.ground(); },
      [](const Term& x) { return x; }, [this](const Term& x) { return resolve(x); });
}

VarId Bindings::fresh(VarId count) {
  VarId first = next_;
  next_ += count;
  return first;
}

void Bindings::reserve_ids(VarId floor) {
  if (next_ < floor) next_ = floor;
}

namespace {

bool occurs(VarId id, const Term& t0, const Bindings& b) {
  std::vector<Term> stack{t0};
  while (!stack.empty()) {
    Term t = std::move(stack.back());
    stack.pop_back();
    if (t.ground()) continue;
    Term d = b.deref(t);
    if (d.is_variable()) {
      if (d.var_id() == id) return true;
      continue;
    }
    for (const Term& a : d.args()) stack.push_back(a);
  }
  return false;
}

}  // namespace

bool unify(const Term& a, const Term& b, Bindings& bindings) {
  const std::size_t entry = bindings.mark();
  std::vector<std::pair<Term, Term>> work;
  work.emplace_back(a, b);
  while (!work.empty()) {
    auto [x0, y0] = std::move(work.back());
    work.pop_back();
    Term x = bindings.deref(x0);
    Term y = bindings.deref(y0);
    if (x.identity() == y.identity()) continue;
    if (x.is_variable() && y.is_variable()) {
      if (x.var_id() == y.var_id()) continue;
      // Bind the younger variable to the older one.
      if (x.var_id() < y.var_id())
        bindings.bind(y.var_id(), x);
      else
        bindings.bind(x.var_id(), y);
      continue;
    }
    if (x.is_variable() || y.is_variable()) {
      const Term& var = x.is_variable() ? x : y;
      const Term& val = x.is_variable() ? y : x;
      if (occurs(var.var_id(), val, bindings)) {
        bindings.undo_to(entry);
        return false;
      }
      bindings.bind(var.var_id(), val);
      continue;
    }
    if (x.kind() != y.kind()) {
      bindings.undo_to(entry);
      return false;
    }
    switch (x.kind()) {
      case Term::Kind::atom:
        if (x.name() != y.name()) {
          bindings.undo_to(entry);
          return false;
        }
        break;
      case Term::Kind::integer:
        if (x.int_value() != y.int_value()) {
          bindings.undo_to(entry);
          return false;
        }
        break;
      case Term::Kind::compound:
        if (x.arity() != y.arity() || x.name() != y.name()) {
          bindings.undo_to(entry);
          return false;
        }
        for (std::size_t i = x.arity(); i-- > 0;) work.emplace_back(x.arg(i), y.arg(i));
        break;
      case Term::Kind::variable:
        break;
    }
  }
  return true;
}

Term rename(const Term& t, VarId offset) {
  if (t.ground()) return t;
  return map_spine(
      t, [](const Term& x) { return x; }, [](const Term& x) { return x.ground(); },
      [offset](const Term& x) { return x.is_variable() ? Term::variable(x.var_id() + offset, x.name()) : x; },
      [offset](const Term& x) { return rename(x, offset); });
}

namespace {

Term refresh(const Term& t, Bindings& b, std::unordered_map<VarId, Term>& map) {
  auto leaf = [&](const Term& x) {
    if (!x.is_variable()) return x;
    auto it = map.find(x.var_id());
    if (it != map.end()) return it->second;
    Term v = Term::variable(b.fresh());
    map.emplace(x.var_id(), v);
    return v;
  };
  if (t.ground()) return t;
  return map_spine(
      t, [](const Term& x) { return x; }, [](const Term& x) { return x.ground(); }, leaf,
      [&](const Term& x) { return refresh(x, b, map); });
}

}  // namespace

Term copy_fresh(const Term& t, Bindings& bindings) {
  std::unordered_map<VarId, Term> map;
  return refresh(bindings.resolve(t), bindings, map);
}

}  // namespace lpbot::logic
