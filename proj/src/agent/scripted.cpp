#include "lpbot/agent/scripted.hpp"

#include <algorithm>

#include "lpbot/logic/errors.hpp"
#include "lpbot/logic/solve.hpp"

namespace lpbot::agent {

using logic::EngineError;
using logic::ErrorKind;
using logic::KnowledgeBase;
using logic::NativeCall;
using logic::PredicateKey;
using sim::World;

std::vector<Term> TeamBlackboard::facts(const Term& pattern) const {
  if (!pattern.is_callable()) throw EngineError(ErrorKind::type, "team fact must be callable");
  std::vector<Term> out;
  for (const auto& c : kb_->live_clauses({pattern.name(), pattern.arity()})) out.push_back(c.head);
  return out;
}

const std::vector<PredicateKey>& round_scoped_predicates() {
  static const std::vector<PredicateKey> keys = {{"bought_this_round", 1}};
  return keys;
}

namespace {

using Answers = std::vector<std::vector<Term>>;

Term atom(const std::string& s) { return Term::atom(s); }

/// Bound argument must be an atom; returns nullopt for an unbound one.
std::optional<std::string> atom_arg(const NativeCall& call, std::size_t i, const char* pred) {
  Term t = call.arg(i);
  if (t.is_variable()) return std::nullopt;
  if (!t.is_atom()) throw EngineError(ErrorKind::type, std::string(pred) + ": atom expected, got " + logic::to_string(t));
  return t.name();
}

std::string required_atom(const NativeCall& call, std::size_t i, const char* pred) {
  auto a = atom_arg(call, i, pred);
  if (!a) throw EngineError(ErrorKind::instantiation, std::string(pred) + ": argument " + std::to_string(i + 1) + " unbound");
  return *a;
}

std::int64_t required_integer(const NativeCall& call, std::size_t i, const char* pred) {
  Term t = call.arg(i);
  if (t.is_variable())
    throw EngineError(ErrorKind::instantiation, std::string(pred) + ": argument " + std::to_string(i + 1) + " unbound");
  if (!t.is_integer()) throw EngineError(ErrorKind::type, std::string(pred) + ": integer expected, got " + logic::to_string(t));
  return t.int_value();
}

Term action_term(const HighLevelAction& a) {
  if (a.args.empty()) return Term::atom(to_string(a.kind));
  return Term::compound(to_string(a.kind), a.args);
}

/// Splits the optional trailing argument of an action predicate.
void unpack_extra(const Term& extra, Term& motivation, std::optional<Term>& continuation) {
  if (extra.is_functor("andThen", 1)) {
    continuation = continuation ? Term::compound(",", {*continuation, extra.arg(0)}) : extra.arg(0);
  } else if (extra.is_functor(".", 2) || extra.is_atom("[]")) {
    Term cur = extra;
    while (cur.is_functor(".", 2)) {
      unpack_extra(cur.arg(0), motivation, continuation);
      cur = cur.arg(1);
    }
  } else if (extra.is_variable()) {
    throw EngineError(ErrorKind::instantiation, "action motivation is unbound");
  } else if (!extra.is_callable()) {
    throw EngineError(ErrorKind::type, "action motivation must be callable, got " + logic::to_string(extra));
  } else {
    motivation = motivation.is_atom("true") ? extra : Term::compound(",", {motivation, extra});
  }
}

struct ActionNative {
  const char* name;
  ActionKind kind;
  std::size_t base_arity;  // including the bot
  enum class Arg { none, waypoint, bot, weapon, seconds } arg;
  bool extra;  // also registered with one more argument
};

const std::vector<ActionNative>& action_natives() {
  using A = ActionNative::Arg;
  static const std::vector<ActionNative> table = {
      {"action_goto", ActionKind::goto_waypoint, 2, A::waypoint, true},
      {"action_kill", ActionKind::attack, 2, A::bot, true},
      {"action_liberate_hostages", ActionKind::liberate_hostages, 1, A::none, true},
      {"action_guard", ActionKind::guard, 2, A::waypoint, true},
      {"action_buy", ActionKind::buy_weapon, 2, A::weapon, false},
      {"action_wait", ActionKind::wait, 2, A::seconds, false},
  };
  return table;
}

bool unifies_with(const Term& pattern, const Term& fact) {
  logic::Bindings b;
  return logic::unify(pattern, fact, b);
}

}  // namespace

void ScriptedMind::register_natives(KnowledgeBase& kb, ScriptedMind* self) {
  auto world = [self]() -> const World& {
    if (!self) throw EngineError(ErrorKind::existence, "no world attached");
    return self->runtime_.world();
  };
  // Answers for p(Bot, Value) over living bots, filtered by a bound Bot.
  auto per_bot = [world](const char* pred, auto value) {
    return [world, pred, value](NativeCall& call) {
      const World& w = world();
      auto name = atom_arg(call, 0, pred);
      Answers out;
      for (const auto& b : w.bots()) {
        if (!b.alive() || (name && *name != b.name)) continue;
        out.push_back({atom(b.name), value(w, b)});
      }
      return logic::enumerate_answers(std::move(out));
    };
  };
  kb.register_nondeterministic("bot_alive", 1, [world](NativeCall& call) {
    const World& w = world();
    auto name = atom_arg(call, 0, "bot_alive");
    Answers out;
    for (const auto& b : w.bots())
      if (b.alive() && (!name || *name == b.name)) out.push_back({atom(b.name)});
    return logic::enumerate_answers(std::move(out));
  });
  kb.register_nondeterministic("team", 2, per_bot("team", [](const World&, const sim::BotState& b) {
                                 return Term::atom(sim::to_string(b.team));
                               }));
  kb.register_nondeterministic("health", 2, per_bot("health", [](const World&, const sim::BotState& b) {
                                 return Term::integer(b.health);
                               }));
  kb.register_nondeterministic("ammo", 2, per_bot("ammo", [](const World&, const sim::BotState& b) {
                                 return Term::integer(b.ammo);
                               }));
  kb.register_nondeterministic("money", 2, per_bot("money", [](const World&, const sim::BotState& b) {
                                 return Term::integer(b.money);
                               }));
  kb.register_nondeterministic("weapon", 2, per_bot("weapon", [](const World&, const sim::BotState& b) {
                                 return Term::atom(sim::to_string(b.weapon));
                               }));
  kb.register_nondeterministic("at_waypoint", 2, per_bot("at_waypoint", [](const World& w, const sim::BotState& b) {
                                 return Term::atom(w.map().waypoint(w.nearest_waypoint(b.id)).id);
                               }));

  auto pairs = [world](const char* pred, bool enemies_only) {
    return [world, pred, enemies_only](NativeCall& call) {
      const World& w = world();
      auto a = atom_arg(call, 0, pred);
      auto t = atom_arg(call, 1, pred);
      Answers out;
      for (const auto& o : w.bots()) {
        if (a && *a != o.name) continue;
        for (const auto& x : w.bots()) {
          if (t && *t != x.name) continue;
          if (enemies_only && x.team == o.team) continue;
          if (w.in_fov(o.id, x.id)) out.push_back({atom(o.name), atom(x.name)});
        }
      }
      return logic::enumerate_answers(std::move(out));
    };
  };
  kb.register_nondeterministic("bot_in_fov", 2, pairs("bot_in_fov", false));
  kb.register_nondeterministic("visible_enemy", 2, pairs("visible_enemy", true));

  kb.register_nondeterministic("hear_footsteps", 2, [world](NativeCall& call) {
    const World& w = world();
    auto a = atom_arg(call, 0, "hear_footsteps");
    auto t = atom_arg(call, 1, "hear_footsteps");
    Answers out;
    for (const auto& o : w.bots()) {
      if (!o.alive() || (a && *a != o.name)) continue;
      for (const auto& x : w.bots()) {
        if (!x.alive() || x.team == o.team || (t && *t != x.name)) continue;
        if (w.graph_distance(o.id, x.id) <= w.rules().hearing_range_cm) out.push_back({atom(o.name), atom(x.name)});
      }
    }
    return logic::enumerate_answers(std::move(out));
  });

  kb.register_nondeterministic("hostage_at", 2, [world](NativeCall&) {
    const World& w = world();
    Answers out;
    for (const auto& h : w.hostages())
      if (h.free()) out.push_back({atom(h.id), atom(w.map().waypoint(h.at).id)});
    return logic::enumerate_answers(std::move(out));
  });
  kb.register_nondeterministic("hostage_following", 2, [world](NativeCall&) {
    const World& w = world();
    Answers out;
    for (const auto& h : w.hostages())
      if (h.leader != sim::no_bot && !h.rescued) out.push_back({atom(h.id), atom(w.bot(h.leader).name)});
    return logic::enumerate_answers(std::move(out));
  });
  kb.register_nondeterministic("waypoint_tag", 2, [world](NativeCall& call) {
    const World& w = world();
    auto id = atom_arg(call, 0, "waypoint_tag");
    Answers out;
    for (const auto& wp : w.map().waypoints()) {
      if (id && *id != wp.id) continue;
      for (const auto& tag : wp.tags) out.push_back({atom(wp.id), atom(tag)});
    }
    return logic::enumerate_answers(std::move(out));
  });
  kb.register_nondeterministic("current_action", 2, [self, world](NativeCall& call) {
    const World& w = world();
    auto name = atom_arg(call, 0, "current_action");
    Answers out;
    for (const auto& b : w.bots()) {
      if (name && *name != b.name) continue;
      if (const HighLevelAction* a = self->runtime_.active_action(b.id)) out.push_back({atom(b.name), action_term(*a)});
    }
    return logic::enumerate_answers(std::move(out));
  });
  kb.register_nondeterministic("weapon_price", 2, [world](NativeCall&) {
    const World& w = world();
    Answers out;
    for (auto weapon : {sim::Weapon::pistol, sim::Weapon::rifle})
      out.push_back({atom(sim::to_string(weapon)), Term::integer(w.rules().spec(weapon).price)});
    return logic::enumerate_answers(std::move(out));
  });

  kb.register_deterministic("bot_distance", 3, [world](NativeCall& call) {
    const World& w = world();
    auto a = w.find_bot(required_atom(call, 0, "bot_distance"));
    auto b = w.find_bot(required_atom(call, 1, "bot_distance"));
    if (!a || !b) return false;
    return call.unify(call.arg(2), Term::integer(w.distance_cm(*a, *b)));
  });
  kb.register_deterministic("path_cost", 3, [world](NativeCall& call) {
    const World& w = world();
    auto a = w.map().find(required_atom(call, 0, "path_cost"));
    auto b = w.map().find(required_atom(call, 1, "path_cost"));
    if (!a || !b) return false;
    std::int64_t d = w.map().distance(*a, *b);
    if (d == sim::MapDefinition::unreachable) return false;
    return call.unify(call.arg(2), Term::integer(d));
  });
  kb.register_deterministic("round_time_left", 1, [world](NativeCall& call) {
    const World& w = world();
    return call.unify(call.arg(0), Term::integer(w.ticks_left() * w.rules().tick_ms / 1000));
  });
  kb.register_deterministic("game_phase", 1, [world](NativeCall& call) {
    return call.unify(call.arg(0), Term::atom(sim::to_string(world().phase())));
  });

  for (const auto& spec : action_natives()) {
    auto handler = [self, world, spec](NativeCall& call) {
      const World& w = world();
      std::string owner_name = required_atom(call, 0, spec.name);
      auto owner = w.find_bot(owner_name);
      if (!owner) throw EngineError(ErrorKind::existence, std::string(spec.name) + ": unknown bot " + owner_name);
      if (*owner != self->bot_)
        throw EngineError(ErrorKind::permission, std::string(spec.name) + ": cannot command " + owner_name);
      std::vector<Term> args;
      using A = ActionNative::Arg;
      switch (spec.arg) {
        case A::none: break;
        case A::waypoint:
        case A::bot:
        case A::weapon: args.push_back(Term::atom(required_atom(call, 1, spec.name))); break;
        case A::seconds: args.push_back(Term::integer(required_integer(call, 1, spec.name))); break;
      }
      Term motivation = Term::atom("true");
      std::optional<Term> continuation;
      if (call.arity() > spec.base_arity) unpack_extra(call.resolved(spec.base_arity), motivation, continuation);
      return self->runtime_.start_action(*owner, spec.kind, std::move(args), motivation, continuation).has_value();
    };
    kb.register_deterministic(spec.name, spec.base_arity, handler);
    if (spec.extra) kb.register_deterministic(spec.name, spec.base_arity + 1, handler);
  }

  auto board = [self]() -> TeamBlackboard& {
    if (!self) throw EngineError(ErrorKind::existence, "no team blackboard attached");
    return *self->board_;
  };
  kb.register_deterministic("team_assert", 1, [board](NativeCall& call) {
    Term fact = call.resolved(0);
    if (!fact.ground()) throw EngineError(ErrorKind::instantiation, "team_assert: fact must be ground");
    if (!fact.is_callable()) throw EngineError(ErrorKind::type, "team_assert: callable expected");
    board().kb().assert_term(fact);
    return true;
  });
  kb.register_deterministic("team_retract", 1, [board](NativeCall& call) {
    Term pattern = call.resolved(0);
    if (pattern.is_variable()) throw EngineError(ErrorKind::instantiation, "team_retract: pattern unbound");
    for (const auto& f : board().facts(pattern)) {
      if (unifies_with(pattern, f)) {
        board().kb().retract(f);
        return call.unify(call.arg(0), f);
      }
    }
    return false;
  });
  kb.register_nondeterministic("team_fact", 1, [board](NativeCall& call) {
    Term pattern = call.resolved(0);
    if (pattern.is_variable()) throw EngineError(ErrorKind::instantiation, "team_fact: pattern unbound");
    Answers out;
    for (const auto& f : board().facts(pattern)) out.push_back({f});
    return logic::enumerate_answers(std::move(out));
  });
}

rules::HostCatalog host_catalog() {
  KnowledgeBase kb;
  ScriptedMind::register_natives(kb, nullptr);
  rules::HostCatalog c;
  for (const auto& k : kb.native_predicates(true)) c.predicates.insert(k);
  for (const auto& spec : action_natives())
    if (spec.extra) c.goal_args[{spec.name, spec.base_arity + 1}] = {spec.base_arity};
  for (const auto& k : round_scoped_predicates()) c.predicates.insert(k);
  return c;
}

void install_packages(KnowledgeBase& kb, const std::vector<rules::RulePackage>& packages) {
  for (const auto& p : packages)
    for (const auto& c : p.clauses) {
      PredicateKey key{c.head.name(), c.head.arity()};
      if (logic::is_control(key) || kb.is_native(key))
        throw EngineError(ErrorKind::permission,
                          "package " + p.manifest.name + " redefines host predicate " + key.str());
    }
  for (const auto& k : round_scoped_predicates()) kb.declare_dynamic(k.name, k.arity);
  for (const auto& p : packages) {
    for (const auto& d : p.manifest.dynamic) kb.declare_dynamic(d.name, d.arity);
    kb.add_clauses(p.clauses);
  }
}

ScriptedMind::ScriptedMind(AgentRuntime& runtime, BotId bot, std::shared_ptr<TeamBlackboard> board,
                           const std::vector<rules::RulePackage>& packages)
    : runtime_(runtime), bot_(bot), board_(board ? std::move(board) : std::make_shared<TeamBlackboard>()),
      kb_(std::make_unique<KnowledgeBase>()) {
  register_natives(*kb_, this);
  install_packages(*kb_, packages);
}

void ScriptedMind::report(const std::string& message, bool once) {
  if (once && !reported_.insert(message).second) return;
  runtime_.diagnose(bot_, message);
}

bool ScriptedMind::prove(const Term& goal, const char* what) {
  auto start = std::chrono::steady_clock::now();
  bool ok = false;
  logic::SolutionStream stream(*kb_, goal);
  try {
    ok = stream.next().has_value();
  } catch (const EngineError& e) {
    report(std::string(what) + " " + logic::to_string(goal) + ": " + e.what(), e.kind() == ErrorKind::existence);
  }
  last_steps_ = stream.steps();
  runtime_.add_reasoning_time(std::chrono::steady_clock::now() - start);
  return ok;
}

void ScriptedMind::on_round_start(BotContext& ctx) {
  for (const auto& k : round_scoped_predicates()) {
    std::vector<Term> vars;
    for (std::size_t i = 0; i < k.arity; ++i) vars.push_back(Term::variable(static_cast<logic::VarId>(i)));
    kb_->retract_all(k.arity ? Term::compound(k.name, vars) : Term::atom(k.name));
  }
  if (board_->cleared_round != ctx.world.round_index()) {
    board_->clear();
    board_->cleared_round = ctx.world.round_index();
  }
}

void ScriptedMind::reason(BotContext& ctx) {
  prove(Term::compound("do_reasoning", {Term::atom(ctx.world.bot(bot_).name)}), "reasoning");
}

bool ScriptedMind::motivation_holds(BotContext&, const HighLevelAction& action) {
  if (action.motivation.is_atom("true")) return true;
  return prove(action.motivation, "motivation");
}

void ScriptedMind::run_continuation(BotContext&, const HighLevelAction& action) {
  if (!action.continuation) return;
  if (!prove(*action.continuation, "continuation"))
    report("continuation " + logic::to_string(*action.continuation) + " of " + action.text() + " did not succeed",
           false);
}

}  // namespace lpbot::agent
