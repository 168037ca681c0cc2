#include "lpbot/logic/knowledge_base.hpp"

#include <algorithm>
#include <iostream>

#include "lpbot/logic/arith.hpp"
#include "lpbot/logic/errors.hpp"

namespace lpbot::logic {

bool is_control(const PredicateKey& key) {
  static const std::unordered_set<PredicateKey, PredicateKeyHash> control = {
      {",", 2},    {";", 2},    {"->", 2},   {"!", 0},       {"\\+", 1},      {"not", 1},
      {"call", 1}, {"true", 0}, {"fail", 0}, {"false", 0},   {"findall", 3},  {"once", 1},
      {"forall", 2},
  };
  return control.count(key) != 0;
}

namespace {

class AnswerEnumerator : public NativeEnumerator {
 public:
  explicit AnswerEnumerator(std::vector<std::vector<Term>> answers) : answers_(std::move(answers)) {}

  bool next(NativeCall& call) override {
    while (index_ < answers_.size()) {
      const auto& row = answers_[index_++];
      std::size_t mark = call.bindings().mark();
      bool ok = row.size() == call.arity();
      for (std::size_t i = 0; ok && i < row.size(); ++i) ok = call.unify(call.goal().arg(i), row[i]);
      if (ok) return true;
      call.bindings().undo_to(mark);
    }
    return false;
  }

 private:
  std::vector<std::vector<Term>> answers_;
  std::size_t index_ = 0;
};

class MemberEnumerator : public NativeEnumerator {
 public:
  explicit MemberEnumerator(Term list) : cursor_(std::move(list)) {}

  bool next(NativeCall& call) override {
    while (true) {
      Term cur = call.bindings().deref(cursor_);
      if (!cur.is_functor(".", 2)) return false;
      cursor_ = cur.arg(1);
      std::size_t mark = call.bindings().mark();
      if (call.unify(call.goal().arg(0), cur.arg(0))) return true;
      call.bindings().undo_to(mark);
    }
  }

 private:
  Term cursor_;
};

bool may_match_head(const Term& pattern_head, const Clause& c) {
  return pattern_head.arity() == c.head.arity() && pattern_head.name() == c.head.name();
}

}  // namespace

std::unique_ptr<NativeEnumerator> enumerate_answers(std::vector<std::vector<Term>> answers) {
  return std::make_unique<AnswerEnumerator>(std::move(answers));
}

KnowledgeBase::KnowledgeBase() : output_(&std::cout) { register_builtins(); }

KnowledgeBase::~KnowledgeBase() = default;

void KnowledgeBase::check_modifiable(const PredicateKey& key) const {
  if (is_control(key)) throw EngineError(ErrorKind::permission, "cannot modify control construct " + key.str());
  if (auto* n = native(key)) {
    throw EngineError(ErrorKind::permission, std::string("cannot modify ") +
                                                 (n->builtin ? "builtin " : "native ") +
                                                 "predicate " + key.str());
  }
}

void KnowledgeBase::consult(std::string_view source) { add_clauses(parse_program(source)); }

void KnowledgeBase::add_clauses(std::vector<Clause> clauses) {
  for (const Clause& c : clauses) check_modifiable(key_of(c.head));
  for (Clause& c : clauses) assert_clause(std::move(c), InsertPosition::back);
}

void KnowledgeBase::assert_clause(Clause clause, InsertPosition position) {
  PredicateKey key = key_of(clause.head);
  check_modifiable(key);
  ++generation_;
  clause.sequence = next_sequence_++;
  auto stored = std::make_shared<StoredClause>();
  stored->clause = std::move(clause);
  stored->born = generation_;
  Predicate& p = preds_[key];
  auto list = std::make_shared<ClauseList>();
  if (p.clauses) list->reserve(p.clauses->size() + 1);
  if (position == InsertPosition::front) list->push_back(stored);
  if (p.clauses) list->insert(list->end(), p.clauses->begin(), p.clauses->end());
  if (position == InsertPosition::back) list->push_back(stored);
  p.clauses = std::move(list);
}

void KnowledgeBase::assert_term(const Term& clause_term, InsertPosition position) {
  Clause c = make_clause(clause_term);
  c.dynamic = true;
  PredicateKey key = key_of(c.head);
  check_modifiable(key);
  assert_clause(std::move(c), position);
  preds_[key].dynamic = true;
}

bool KnowledgeBase::retract_first(const Term& pattern, Bindings& bindings, std::uint64_t snapshot) {
  Term p = bindings.deref(pattern);
  Term head = p;
  Term body = Term::atom("true");
  if (p.is_functor(":-", 2)) {
    head = bindings.deref(p.arg(0));
    body = p.arg(1);
  }
  if (head.is_variable()) throw EngineError(ErrorKind::instantiation, "retract/1: unbound clause head");
  if (!head.is_callable()) throw EngineError(ErrorKind::type, "retract/1: head is not callable");
  PredicateKey key = key_of(head);
  check_modifiable(key);
  auto it = preds_.find(key);
  if (it == preds_.end() || !it->second.clauses) return false;
  auto list = it->second.clauses;
  for (const auto& sc : *list) {
    if (sc->died != StoredClause::alive || sc->born > snapshot) continue;
    if (!may_match_head(head, sc->clause)) continue;
    std::size_t mark = bindings.mark();
    VarId offset = bindings.fresh(sc->clause.var_count);
    if (unify(head, rename(sc->clause.head, offset), bindings) &&
        unify(body, rename(sc->clause.body, offset), bindings)) {
      sc->died = ++generation_;
      dirty_.insert(key);
      if (active_streams_ == 0) collect_garbage();
      return true;
    }
    bindings.undo_to(mark);
  }
  return false;
}

bool KnowledgeBase::retract(const Term& pattern) {
  Bindings b;
  b.reserve_ids(var_bound(pattern));
  return retract_first(pattern, b, generation_);
}

std::size_t KnowledgeBase::retract_all(const Term& head) {
  if (head.is_variable()) throw EngineError(ErrorKind::instantiation, "retractall/1: unbound head");
  if (!head.is_callable()) throw EngineError(ErrorKind::type, "retractall/1: head is not callable");
  PredicateKey key = key_of(head);
  check_modifiable(key);
  auto it = preds_.find(key);
  if (it == preds_.end()) {
    declare_dynamic(key.name, key.arity);
    return 0;
  }
  std::size_t count = 0;
  if (!it->second.clauses) return 0;
  Bindings b;
  b.reserve_ids(var_bound(head));
  for (const auto& sc : *it->second.clauses) {
    if (sc->died != StoredClause::alive) continue;
    std::size_t mark = b.mark();
    VarId offset = b.fresh(sc->clause.var_count);
    if (unify(head, rename(sc->clause.head, offset), b)) {
      sc->died = ++generation_;
      ++count;
    }
    b.undo_to(mark);
  }
  if (count) {
    dirty_.insert(key);
    if (active_streams_ == 0) collect_garbage();
  }
  return count;
}

void KnowledgeBase::declare_dynamic(std::string_view name, std::size_t arity) {
  PredicateKey key{std::string(name), arity};
  check_modifiable(key);
  Predicate& p = preds_[key];
  p.dynamic = true;
  if (!p.clauses) p.clauses = std::make_shared<ClauseList>();
}

bool KnowledgeBase::is_dynamic(const PredicateKey& key) const {
  auto it = preds_.find(key);
  return it != preds_.end() && it->second.dynamic;
}

void KnowledgeBase::register_entry(std::string_view name, std::size_t arity, NativePredicate entry) {
  PredicateKey key{std::string(name), arity};
  if (is_control(key))
    throw EngineError(ErrorKind::permission, "cannot register control construct " + key.str());
  if (auto* n = native(key)) {
    throw EngineError(ErrorKind::permission,
                      std::string(n->builtin ? "builtin " : "duplicate native registration ") + key.str());
  }
  if (preds_.count(key))
    throw EngineError(ErrorKind::permission, "predicate already defined by clauses: " + key.str());
  natives_.emplace(std::move(key), std::move(entry));
}

void KnowledgeBase::register_deterministic(std::string_view name, std::size_t arity,
                                           DeterministicHandler handler) {
  NativePredicate e;
  e.mode = NativeMode::deterministic;
  e.deterministic = std::move(handler);
  register_entry(name, arity, std::move(e));
}

void KnowledgeBase::register_nondeterministic(std::string_view name, std::size_t arity,
                                              NondeterministicHandler handler) {
  NativePredicate e;
  e.mode = NativeMode::nondeterministic;
  e.nondeterministic = std::move(handler);
  register_entry(name, arity, std::move(e));
}

const NativePredicate* KnowledgeBase::native(const PredicateKey& key) const {
  auto it = natives_.find(key);
  return it == natives_.end() ? nullptr : &it->second;
}

std::shared_ptr<const ClauseList> KnowledgeBase::clauses(const PredicateKey& key) const {
  auto it = preds_.find(key);
  if (it == preds_.end()) return nullptr;
  return it->second.clauses ? it->second.clauses : std::make_shared<const ClauseList>();
}

std::vector<Clause> KnowledgeBase::live_clauses(const PredicateKey& key) const {
  std::vector<Clause> out;
  if (auto list = clauses(key)) {
    for (const auto& sc : *list)
      if (sc->died == StoredClause::alive) out.push_back(sc->clause);
  }
  return out;
}

std::vector<PredicateKey> KnowledgeBase::defined_predicates() const {
  std::vector<PredicateKey> out;
  for (const auto& [k, p] : preds_) out.push_back(k);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PredicateKey> KnowledgeBase::native_predicates(bool include_builtins) const {
  std::vector<PredicateKey> out;
  for (const auto& [k, n] : natives_)
    if (include_builtins || !n.builtin) out.push_back(k);
  std::sort(out.begin(), out.end());
  return out;
}

void KnowledgeBase::stream_closed() {
  if (active_streams_ > 0) --active_streams_;
  if (active_streams_ == 0 && !dirty_.empty()) collect_garbage();
}

void KnowledgeBase::collect_garbage() {
  for (const PredicateKey& key : dirty_) {
    auto it = preds_.find(key);
    if (it == preds_.end() || !it->second.clauses) continue;
    auto list = std::make_shared<ClauseList>();
    for (const auto& sc : *it->second.clauses)
      if (sc->died == StoredClause::alive) list->push_back(sc);
    it->second.clauses = std::move(list);
  }
  dirty_.clear();
}

// ------------------------------------------------------------ builtins

void KnowledgeBase::register_builtins() {
  auto det = [this](std::string_view name, std::size_t arity, DeterministicHandler h) {
    NativePredicate e;
    e.mode = NativeMode::deterministic;
    e.deterministic = std::move(h);
    e.builtin = true;
    natives_.emplace(PredicateKey{std::string(name), arity}, std::move(e));
  };
  auto nondet = [this](std::string_view name, std::size_t arity, NondeterministicHandler h) {
    NativePredicate e;
    e.mode = NativeMode::nondeterministic;
    e.nondeterministic = std::move(h);
    e.builtin = true;
    natives_.emplace(PredicateKey{std::string(name), arity}, std::move(e));
  };

  det("=", 2, [](NativeCall& c) { return c.unify(c.goal().arg(0), c.goal().arg(1)); });
  det("\\=", 2, [](NativeCall& c) {
    std::size_t mark = c.bindings().mark();
    bool ok = c.unify(c.goal().arg(0), c.goal().arg(1));
    c.bindings().undo_to(mark);
    return !ok;
  });
  det("==", 2, [](NativeCall& c) { return identical(c.resolved(0), c.resolved(1)); });
  det("\\==", 2, [](NativeCall& c) { return !identical(c.resolved(0), c.resolved(1)); });
  det("@<", 2, [](NativeCall& c) { return compare_terms(c.resolved(0), c.resolved(1)) < 0; });
  det("@>", 2, [](NativeCall& c) { return compare_terms(c.resolved(0), c.resolved(1)) > 0; });
  det("@=<", 2, [](NativeCall& c) { return compare_terms(c.resolved(0), c.resolved(1)) <= 0; });
  det("@>=", 2, [](NativeCall& c) { return compare_terms(c.resolved(0), c.resolved(1)) >= 0; });

  det("is", 2, [](NativeCall& c) {
    std::int64_t v = eval_arith(c.goal().arg(1), c.bindings());
    return c.unify(c.goal().arg(0), Term::integer(v));
  });
  auto cmp = [&det](std::string_view name, bool (*pred)(std::int64_t, std::int64_t)) {
    det(name, 2, [pred](NativeCall& c) {
      return pred(eval_arith(c.goal().arg(0), c.bindings()), eval_arith(c.goal().arg(1), c.bindings()));
    });
  };
  cmp("<", [](std::int64_t a, std::int64_t b) { return a < b; });
  cmp(">", [](std::int64_t a, std::int64_t b) { return a > b; });
  cmp("=<", [](std::int64_t a, std::int64_t b) { return a <= b; });
  cmp(">=", [](std::int64_t a, std::int64_t b) { return a >= b; });
  cmp("=:=", [](std::int64_t a, std::int64_t b) { return a == b; });
  cmp("=\\=", [](std::int64_t a, std::int64_t b) { return a != b; });

  det("var", 1, [](NativeCall& c) { return c.arg(0).is_variable(); });
  det("nonvar", 1, [](NativeCall& c) { return !c.arg(0).is_variable(); });
  det("atom", 1, [](NativeCall& c) { return c.arg(0).is_atom(); });
  det("number", 1, [](NativeCall& c) { return c.arg(0).is_integer(); });
  det("integer", 1, [](NativeCall& c) { return c.arg(0).is_integer(); });
  det("atomic", 1, [](NativeCall& c) { return c.arg(0).is_atom() || c.arg(0).is_integer(); });
  det("compound", 1, [](NativeCall& c) { return c.arg(0).is_compound(); });
  det("callable", 1, [](NativeCall& c) { return c.arg(0).is_callable(); });
  det("is_list", 1, [](NativeCall& c) {
    std::vector<Term> items;
    return list_items(c.resolved(0), items);
  });

  det("write", 1, [](NativeCall& c) {
    Term t = c.resolved(0);
    c.kb().output() << (t.is_atom() ? t.name() : to_string(t));
    return true;
  });
  det("nl", 0, [](NativeCall& c) {
    c.kb().output() << '\n';
    return true;
  });

  auto assert_back = [](NativeCall& c) {
    c.kb().assert_term(c.resolved(0), InsertPosition::back);
    return true;
  };
  det("assert", 1, assert_back);
  det("assertz", 1, assert_back);
  det("asserta", 1, [](NativeCall& c) {
    c.kb().assert_term(c.resolved(0), InsertPosition::front);
    return true;
  });
  det("retract", 1, [](NativeCall& c) {
    return c.kb().retract_first(c.goal().arg(0), c.bindings(), c.snapshot_generation());
  });
  det("retractall", 1, [](NativeCall& c) {
    c.kb().retract_all(c.resolved(0));
    return true;
  });

  det("length", 2, [](NativeCall& c) {
    std::vector<Term> items;
    Term l = c.resolved(0);
    if (list_items(l, items)) return c.unify(c.goal().arg(1), Term::integer(static_cast<std::int64_t>(items.size())));
    Term n = c.arg(1);
    if (n.is_variable()) throw EngineError(ErrorKind::instantiation, "length/2: partial list and unbound length");
    if (!n.is_integer()) throw EngineError(ErrorKind::type, "length/2: length is not an integer");
    if (n.int_value() < 0) return false;
    std::vector<Term> fresh;
    for (std::int64_t i = 0; i < n.int_value(); ++i) fresh.push_back(Term::variable(c.bindings().fresh()));
    return c.unify(c.goal().arg(0), Term::list(fresh));
  });
  det("msort", 2, [](NativeCall& c) {
    std::vector<Term> items;
    if (!list_items(c.resolved(0), items)) throw EngineError(ErrorKind::instantiation, "msort/2: not a proper list");
    std::stable_sort(items.begin(), items.end(),
                     [](const Term& a, const Term& b) { return compare_terms(a, b) < 0; });
    return c.unify(c.goal().arg(1), Term::list(items));
  });
  nondet("member", 2, [](NativeCall& c) -> std::unique_ptr<NativeEnumerator> {
    return std::make_unique<MemberEnumerator>(c.goal().arg(1));
  });
}

}  // namespace lpbot::logic
