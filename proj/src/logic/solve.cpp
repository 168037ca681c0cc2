#include "lpbot/logic/solve.hpp"

#include <stdexcept>

#include "lpbot/logic/errors.hpp"

namespace lpbot::logic {

std::optional<Term> Solution::get(std::string_view name) const {
  for (const auto& [n, v] : values_)
    if (n == name) return v;
  return std::nullopt;
}

Term Solution::at(std::string_view name) const {
  if (auto v = get(name)) return *v;
  throw std::out_of_range("no variable named " + std::string(name));
}

std::string Solution::str() const {
  std::string out;
  for (const auto& [n, v] : values_) {
    if (v.is_variable() && v.name() == n) continue;
    if (!out.empty()) out += ", ";
    out += n + " = " + to_string(v);
  }
  return out.empty() ? "true" : out;
}

namespace {

enum class FrameKind : std::uint8_t { call, cut_to, naf_commit, collect };

struct Frame;
using FramePtr = std::shared_ptr<Frame>;

struct Frame {
  FrameKind kind = FrameKind::call;
  Term goal;
  std::size_t barrier = 0;  // cut barrier for call frames, choice point index otherwise
  FramePtr next;

  Frame(FrameKind k, Term g, std::size_t b, FramePtr n)
      : kind(k), goal(std::move(g)), barrier(b), next(std::move(n)) {}

  // Long conjunction chains would otherwise recurse once per frame.
  ~Frame() {
    FramePtr n = std::move(next);
    while (n && n.use_count() == 1) {
      FramePtr after = std::move(n->next);
      n = std::move(after);
    }
  }
};

FramePtr push_call(Term goal, std::size_t barrier, FramePtr next) {
  return std::make_shared<Frame>(FrameKind::call, std::move(goal), barrier, std::move(next));
}

enum class ChoiceKind : std::uint8_t { clauses, alternative, native, naf, findall };

struct ChoicePoint {
  explicit ChoicePoint(ChoiceKind k) : kind(k) {}

  ChoiceKind kind;
  std::size_t mark = 0;
  FramePtr cont;
  Term goal;
  // clauses
  std::shared_ptr<const ClauseList> list;
  std::size_t next_clause = 0;
  // alternative
  std::size_t barrier = 0;
  // native
  std::unique_ptr<NativeEnumerator> enumerator;
  // findall
  Term result;
  std::vector<Term> collected;
};

bool may_unify_first_arg(const Term& goal_arg, const Term& head_arg) {
  if (goal_arg.is_variable() || head_arg.is_variable()) return true;
  if (goal_arg.kind() != head_arg.kind()) return false;
  switch (goal_arg.kind()) {
    case Term::Kind::integer:
      return goal_arg.int_value() == head_arg.int_value();
    case Term::Kind::atom:
      return goal_arg.name() == head_arg.name();
    case Term::Kind::compound:
      return goal_arg.arity() == head_arg.arity() && goal_arg.name() == head_arg.name();
    default:
      return true;
  }
}

}  // namespace

class Machine {
 public:
  Machine(KnowledgeBase& kb, const Term& goal, const SolveLimits& limits)
      : kb_(kb), limits_(limits), snapshot_(kb.generation()) {
    bindings_.reserve_ids(var_bound(goal));
    for (const Term& v : variables_of(goal))
      if (!v.name().empty() && v.name()[0] != '_') query_vars_.emplace_back(v.name(), v);
    cont_ = push_call(goal, 0, nullptr);
  }

  std::optional<Solution> next() {
    if (exhausted_) return std::nullopt;
    if (started_ && !backtrack()) return finish();
    started_ = true;
    if (!run()) return finish();
    std::vector<std::pair<std::string, Term>> values;
    values.reserve(query_vars_.size());
    for (const auto& [name, var] : query_vars_) values.emplace_back(name, bindings_.resolve(var));
    return Solution(std::move(values));
  }

  void abort() {
    exhausted_ = true;
    choices_.clear();
    cont_.reset();
    bindings_.undo_to(0);
  }

  bool exhausted() const { return exhausted_; }
  std::uint64_t steps() const { return steps_; }
  std::uint64_t snapshot() const { return snapshot_; }
  std::size_t trail_size() const { return bindings_.trail_size(); }

 private:
  std::nullopt_t finish() {
    abort();
    return std::nullopt;
  }

  void push_choice(ChoicePoint cp) {
    if (choices_.size() >= limits_.max_choice_points)
      throw EngineError(ErrorKind::resource, "choice point limit exceeded");
    choices_.push_back(std::move(cp));
  }

  void cut_to(std::size_t height) {
    if (choices_.size() > height) choices_.erase(choices_.begin() + static_cast<std::ptrdiff_t>(height), choices_.end());
  }

  // Runs until the continuation is empty (success) or no choice point is left.
  bool run() {
    while (true) {
      if (!cont_) return true;
      if (!step() && !backtrack()) return false;
    }
  }

  // Executes the first frame; false on failure.
  bool step() {
    FramePtr frame = cont_;
    cont_ = frame->next;
    switch (frame->kind) {
      case FrameKind::cut_to:
        cut_to(frame->barrier);
        return true;
      case FrameKind::naf_commit:
        cut_to(frame->barrier);
        return false;
      case FrameKind::collect: {
        ChoicePoint& cp = choices_[frame->barrier];
        cp.collected.push_back(copy_fresh(cp.goal, bindings_));
        return false;
      }
      case FrameKind::call:
        break;
    }
    if (steps_ >= limits_.max_steps) throw EngineError(ErrorKind::resource, "step limit exceeded");
    ++steps_;
    return call(bindings_.deref(frame->goal), frame->barrier);
  }

  bool call(const Term& goal, std::size_t barrier) {
    if (goal.is_variable()) throw EngineError(ErrorKind::instantiation, "unbound goal");
    if (goal.is_integer()) throw EngineError(ErrorKind::type, "goal is not callable: " + to_string(goal));
    const std::string& f = goal.name();
    const std::size_t n = goal.arity();

    if (n == 0) {
      if (f == "true") return true;
      if (f == "fail" || f == "false") return false;
      if (f == "!") {
        cut_to(barrier);
        return true;
      }
    } else if (n == 2 && f == ",") {
      cont_ = push_call(goal.arg(1), barrier, std::move(cont_));
      cont_ = push_call(goal.arg(0), barrier, std::move(cont_));
      return true;
    } else if (n == 2 && f == ";") {
      Term left = bindings_.deref(goal.arg(0));
      ChoicePoint cp(ChoiceKind::alternative);
      cp.mark = bindings_.mark();
      cp.cont = cont_;
      cp.goal = goal.arg(1);
      cp.barrier = barrier;
      std::size_t k = choices_.size();
      push_choice(std::move(cp));
      if (left.is_functor("->", 2)) {
        cont_ = push_call(left.arg(1), barrier, std::move(cont_));
        cont_ = std::make_shared<Frame>(FrameKind::cut_to, Term(), k, std::move(cont_));
        cont_ = push_call(left.arg(0), k + 1, std::move(cont_));
      } else {
        cont_ = push_call(left, barrier, std::move(cont_));
      }
      return true;
    } else if (n == 2 && f == "->") {
      std::size_t h = choices_.size();
      cont_ = push_call(goal.arg(1), barrier, std::move(cont_));
      cont_ = std::make_shared<Frame>(FrameKind::cut_to, Term(), h, std::move(cont_));
      cont_ = push_call(goal.arg(0), h, std::move(cont_));
      return true;
    } else if (n == 1 && (f == "\\+" || f == "not")) {
      return negate(goal.arg(0));
    } else if (n == 1 && f == "call") {
      cont_ = push_call(goal.arg(0), choices_.size(), std::move(cont_));
      return true;
    } else if (n == 1 && f == "once") {
      std::size_t h = choices_.size();
      cont_ = std::make_shared<Frame>(FrameKind::cut_to, Term(), h, std::move(cont_));
      cont_ = push_call(goal.arg(0), h, std::move(cont_));
      return true;
    } else if (n == 2 && f == "forall") {
      Term inner = Term::compound("\\+", {goal.arg(1)});
      return negate(Term::compound(",", {goal.arg(0), inner}));
    } else if (n == 3 && f == "findall") {
      ChoicePoint cp(ChoiceKind::findall);
      cp.mark = bindings_.mark();
      cp.cont = cont_;
      cp.goal = goal.arg(0);
      cp.result = goal.arg(2);
      std::size_t k = choices_.size();
      push_choice(std::move(cp));
      cont_ = std::make_shared<Frame>(FrameKind::collect, Term(), k, nullptr);
      cont_ = push_call(goal.arg(1), k + 1, std::move(cont_));
      return true;
    }

    PredicateKey key{f, n};
    if (const NativePredicate* nat = kb_.native(key)) return call_native(*nat, goal);

    auto list = kb_.clauses(key);
    if (!list) throw EngineError(ErrorKind::existence, "unknown procedure " + key.str());
    return resolve(goal, std::move(list), 0, cont_, false);
  }

  bool negate(const Term& inner) {
    ChoicePoint cp(ChoiceKind::naf);
    cp.mark = bindings_.mark();
    cp.cont = cont_;
    std::size_t k = choices_.size();
    push_choice(std::move(cp));
    cont_ = std::make_shared<Frame>(FrameKind::naf_commit, Term(), k, nullptr);
    cont_ = push_call(inner, k + 1, std::move(cont_));
    return true;
  }

  bool call_native(const NativePredicate& nat, const Term& goal) {
    NativeCall nc(goal, bindings_, kb_, snapshot_);
    if (nat.mode == NativeMode::deterministic) return nat.deterministic(nc);
    ChoicePoint cp(ChoiceKind::native);
    cp.mark = bindings_.mark();
    cp.cont = cont_;
    cp.goal = goal;
    cp.enumerator = nat.nondeterministic(nc);
    if (!cp.enumerator) return false;
    if (!cp.enumerator->next(nc)) {
      bindings_.undo_to(cp.mark);
      return false;
    }
    push_choice(std::move(cp));
    return true;
  }

  std::size_t next_candidate(const Term& goal, const ClauseList& list, std::size_t from) const {
    const bool index = goal.arity() > 0;
    Term first = index ? bindings_.deref(goal.arg(0)) : Term();
    for (std::size_t i = from; i < list.size(); ++i) {
      const StoredClause& sc = *list[i];
      if (!sc.visible_at(snapshot_)) continue;
      if (index && !may_unify_first_arg(first, sc.clause.head.arg(0))) continue;
      return i;
    }
    return list.size();
  }

  // Tries clauses from `from`; `on_stack` means the top choice point
  // belongs to this call and must be updated or popped.
  bool resolve(const Term& goal, std::shared_ptr<const ClauseList> list, std::size_t from,
               FramePtr cont, bool on_stack) {
    const std::size_t mark = bindings_.mark();
    const std::size_t height = on_stack ? choices_.size() - 1 : choices_.size();
    std::size_t i = next_candidate(goal, *list, from);
    while (i < list->size()) {
      const Clause& c = list->at(i)->clause;
      VarId offset = bindings_.fresh(c.var_count);
      std::size_t after = next_candidate(goal, *list, i + 1);
      if (unify(goal, rename(c.head, offset), bindings_)) {
        if (after < list->size()) {
          if (on_stack) {
            choices_.back().next_clause = after;
          } else {
            ChoicePoint cp(ChoiceKind::clauses);
            cp.mark = mark;
            cp.cont = cont;
            cp.goal = goal;
            cp.list = list;
            cp.next_clause = after;
            push_choice(std::move(cp));
          }
        } else if (on_stack) {
          choices_.pop_back();
        }
        cont_ = std::move(cont);
        if (!c.body.is_atom("true")) cont_ = push_call(rename(c.body, offset), height, std::move(cont_));
        return true;
      }
      bindings_.undo_to(mark);
      i = after;
    }
    if (on_stack) choices_.pop_back();
    return false;
  }

  // Resumes the most recent choice point; false when none is left.
  bool backtrack() {
    while (!choices_.empty()) {
      ChoicePoint& cp = choices_.back();
      bindings_.undo_to(cp.mark);
      switch (cp.kind) {
        case ChoiceKind::clauses: {
          Term goal = cp.goal;
          auto list = cp.list;
          FramePtr cont = cp.cont;
          if (resolve(goal, std::move(list), cp.next_clause, std::move(cont), true)) return true;
          break;
        }
        case ChoiceKind::alternative: {
          cont_ = push_call(cp.goal, cp.barrier, std::move(cp.cont));
          choices_.pop_back();
          return true;
        }
        case ChoiceKind::native: {
          if (steps_ >= limits_.max_steps) throw EngineError(ErrorKind::resource, "step limit exceeded");
          ++steps_;
          NativeCall nc(cp.goal, bindings_, kb_, snapshot_);
          if (cp.enumerator->next(nc)) {
            cont_ = cp.cont;
            return true;
          }
          bindings_.undo_to(cp.mark);
          choices_.pop_back();
          break;
        }
        case ChoiceKind::naf: {
          cont_ = std::move(cp.cont);
          choices_.pop_back();
          return true;
        }
        case ChoiceKind::findall: {
          Term result = cp.result;
          Term list = Term::list(cp.collected);
          FramePtr cont = std::move(cp.cont);
          choices_.pop_back();
          if (unify(result, list, bindings_)) {
            cont_ = std::move(cont);
            return true;
          }
          break;
        }
      }
    }
    return false;
  }

  KnowledgeBase& kb_;
  SolveLimits limits_;
  std::uint64_t snapshot_;
  Bindings bindings_;
  std::vector<std::pair<std::string, Term>> query_vars_;
  std::vector<ChoicePoint> choices_;
  FramePtr cont_;
  std::uint64_t steps_ = 0;
  bool started_ = false;
  bool exhausted_ = false;
};

SolutionStream::SolutionStream(KnowledgeBase& kb, const Term& goal) : SolutionStream(kb, goal, kb.limits()) {}

SolutionStream::SolutionStream(KnowledgeBase& kb, const Term& goal, const SolveLimits& limits)
    : kb_(&kb), machine_(std::make_unique<Machine>(kb, goal, limits)) {
  kb.stream_opened();
}

SolutionStream::SolutionStream(SolutionStream&& other) noexcept
    : kb_(std::exchange(other.kb_, nullptr)), machine_(std::move(other.machine_)) {}

SolutionStream::~SolutionStream() {
  if (kb_ && machine_ && !machine_->exhausted()) {
    machine_->abort();
    kb_->stream_closed();
  }
}

std::optional<Solution> SolutionStream::next() {
  if (!machine_ || machine_->exhausted()) return std::nullopt;
  try {
    auto s = machine_->next();
    if (!s) kb_->stream_closed();
    return s;
  } catch (...) {
    machine_->abort();
    kb_->stream_closed();
    throw;
  }
}

bool SolutionStream::exhausted() const { return !machine_ || machine_->exhausted(); }
std::uint64_t SolutionStream::steps() const { return machine_ ? machine_->steps() : 0; }
std::uint64_t SolutionStream::snapshot_generation() const { return machine_ ? machine_->snapshot() : 0; }
std::size_t SolutionStream::trail_size() const { return machine_ ? machine_->trail_size() : 0; }

SolutionStream solve(KnowledgeBase& kb, const Term& goal) { return SolutionStream(kb, goal); }

std::optional<Solution> solve_once(KnowledgeBase& kb, const Term& goal) {
  SolutionStream s(kb, goal);
  return s.next();
}

std::vector<Solution> solve_all(KnowledgeBase& kb, const Term& goal) {
  std::vector<Solution> out;
  SolutionStream s(kb, goal);
  while (auto sol = s.next()) out.push_back(std::move(*sol));
  return out;
}

std::vector<Solution> query_all(KnowledgeBase& kb, std::string_view query) {
  return solve_all(kb, parse_term(query).term);
}

bool query_holds(KnowledgeBase& kb, std::string_view query) {
  return solve_once(kb, parse_term(query).term).has_value();
}

}  // namespace lpbot::logic
