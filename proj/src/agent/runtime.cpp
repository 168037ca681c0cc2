#include "lpbot/agent/runtime.hpp"

#include <algorithm>
#include <stdexcept>

#include "lpbot/logic/parser.hpp"

namespace lpbot::agent {

using Clock = std::chrono::steady_clock;
using sim::Intent;
using sim::World;

const char* to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::goto_waypoint: return "goto";
    case ActionKind::attack: return "attack";
    case ActionKind::liberate_hostages: return "liberate_hostages";
    case ActionKind::guard: return "guard";
    case ActionKind::buy_weapon: return "buy_weapon";
    case ActionKind::wait: return "wait";
  }
  return "?";
}

std::optional<ActionKind> action_kind_from_string(std::string_view name) {
  for (auto k : {ActionKind::goto_waypoint, ActionKind::attack, ActionKind::liberate_hostages, ActionKind::guard,
                 ActionKind::buy_weapon, ActionKind::wait})
    if (name == to_string(k)) return k;
  return std::nullopt;
}

const char* to_string(ActionStatus status) {
  switch (status) {
    case ActionStatus::running: return "running";
    case ActionStatus::completed: return "completed";
    case ActionStatus::interrupted: return "interrupted";
    case ActionStatus::failed: return "failed";
  }
  return "?";
}

std::string HighLevelAction::text() const {
  std::string s = to_string(kind);
  s += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ',';
    s += logic::to_string(args[i]);
  }
  s += ')';
  return s;
}

const char* to_string(LifecycleKind kind) {
  switch (kind) {
    case LifecycleKind::started: return "started";
    case LifecycleKind::interrupted: return "interrupted";
    case LifecycleKind::completed: return "completed";
    case LifecycleKind::failed: return "failed";
  }
  return "?";
}

std::string LifecycleEvent::str() const {
  return "tick=" + std::to_string(tick) + " bot=" + bot_name + " event=" + to_string(kind) + " action=" + action_text;
}

namespace {

IdleController& fallback_controller() {
  static IdleController idle;
  return idle;
}

std::optional<sim::WaypointIndex> waypoint_arg(const World& w, const HighLevelAction& a) {
  if (a.args.empty() || !a.args[0].is_atom()) return std::nullopt;
  return w.map().find(a.args[0].name());
}

std::optional<BotId> bot_arg(const World& w, const HighLevelAction& a) {
  if (a.args.empty() || !a.args[0].is_atom()) return std::nullopt;
  return w.find_bot(a.args[0].name());
}

}  // namespace

AgentRuntime::AgentRuntime(World& world, RuntimeConfig config)
    : world_(world), config_(config), slots_(world.bots().size()) {}

void AgentRuntime::set_controller(BotId bot, std::shared_ptr<Controller> controller) {
  slots_.at(bot).controller = std::move(controller);
}

Controller* AgentRuntime::controller(BotId bot) const { return slots_.at(bot).controller.get(); }

BotContext AgentRuntime::context(BotId bot) { return BotContext{*this, world_, bot}; }

std::optional<ActionId> AgentRuntime::start_action(BotId owner, ActionKind kind, std::vector<Term> args,
                                                   Term motivation, std::optional<Term> continuation) {
  if (owner >= slots_.size() || !world_.bot(owner).alive()) return std::nullopt;
  HighLevelAction a;
  a.id = next_action_++;
  a.owner = owner;
  a.kind = kind;
  a.args = std::move(args);
  a.motivation = std::move(motivation);
  a.continuation = std::move(continuation);
  a.created_tick = world_.global_tick();
  log(a, LifecycleKind::started);
  Slot& s = slots_[owner];
  if (!s.active)
    s.active = std::move(a);
  else
    s.queue.push_back(std::move(a));
  return next_action_ - 1;
}

const HighLevelAction* AgentRuntime::active_action(BotId bot) const {
  const Slot& s = slots_.at(bot);
  return s.active ? &*s.active : nullptr;
}

const std::deque<HighLevelAction>& AgentRuntime::queued_actions(BotId bot) const { return slots_.at(bot).queue; }

void AgentRuntime::log(const HighLevelAction& action, LifecycleKind kind) {
  lifecycle_.push_back(
      {world_.global_tick(), action.owner, world_.bot(action.owner).name, kind, action.id, action.text()});
}

void AgentRuntime::diagnose(BotId bot, const std::string& message) {
  std::string who = bot < slots_.size() ? world_.bot(bot).name : "-";
  diagnostics_.push_back("tick=" + std::to_string(world_.global_tick()) + " bot=" + who + " " + message);
}

int AgentRuntime::continuation_runs(ActionId id) const {
  auto it = continuation_runs_.find(id);
  return it == continuation_runs_.end() ? 0 : it->second;
}

void AgentRuntime::finish(BotId bot, ActionStatus status) {
  Slot& s = slots_[bot];
  s.active->status = status;
  log(*s.active,
      status == ActionStatus::completed     ? LifecycleKind::completed
      : status == ActionStatus::interrupted ? LifecycleKind::interrupted
                                            : LifecycleKind::failed);
  s.active.reset();
}

void AgentRuntime::promote(BotId bot) {
  Slot& s = slots_[bot];
  s.active = std::move(s.queue.front());
  s.queue.pop_front();
}

AgentRuntime::Progress AgentRuntime::progress(const HighLevelAction& a) const {
  const World& w = world_;
  const sim::BotState& b = w.bot(a.owner);
  const auto& map = w.map();
  switch (a.kind) {
    case ActionKind::goto_waypoint:
    case ActionKind::guard: {
      auto goal = waypoint_arg(w, a);
      if (!goal) return Progress::failed;
      if (a.kind == ActionKind::guard && a.elapsed_ticks >= guard_hold_ticks) return Progress::completed;
      if (a.kind == ActionKind::goto_waypoint && b.on_waypoint() && b.at == *goal) return Progress::completed;
      if (map.distance(w.nearest_waypoint(a.owner), *goal) == sim::MapDefinition::unreachable) return Progress::failed;
      return Progress::running;
    }
    case ActionKind::attack: {
      auto target = bot_arg(w, a);
      if (!target || w.bot(*target).team == b.team) return Progress::failed;
      if (!w.bot(*target).alive()) return Progress::completed;
      if (b.ammo <= 0) return Progress::failed;
      return Progress::running;
    }
    case ActionKind::liberate_hostages: {
      if (b.team != sim::Team::ct || !b.on_waypoint()) return Progress::failed;
      bool waiting = false, leading = false;
      for (const auto& h : w.hostages()) {
        waiting |= h.free() && h.at == b.at;
        leading |= h.leader == a.owner && !h.rescued;
      }
      if (waiting) return Progress::running;
      return leading ? Progress::completed : Progress::failed;
    }
    case ActionKind::buy_weapon: {
      if (a.args.empty() || !a.args[0].is_atom()) return Progress::failed;
      auto weapon = sim::weapon_from_string(a.args[0].name());
      if (!weapon) return Progress::failed;
      if (b.weapon == *weapon) return Progress::completed;
      if (w.phase() != sim::Phase::buy || b.money < w.rules().spec(*weapon).price) return Progress::failed;
      return Progress::running;
    }
    case ActionKind::wait: {
      if (a.args.empty() || !a.args[0].is_integer()) return Progress::failed;
      std::int64_t ticks = a.args[0].int_value() * 1000 / w.rules().tick_ms;
      return a.elapsed_ticks >= ticks ? Progress::completed : Progress::running;
    }
  }
  return Progress::failed;
}

Intent AgentRuntime::low_level_intent(BotId bot) {
  Slot& s = slots_.at(bot);
  if (!s.active || !world_.bot(bot).alive()) return Intent::idle();
  HighLevelAction& a = *s.active;
  const World& w = world_;
  const sim::BotState& b = w.bot(bot);
  switch (a.kind) {
    case ActionKind::goto_waypoint:
      if (auto goal = waypoint_arg(w, a)) return Intent::move_to(*goal);
      return Intent::idle();
    case ActionKind::guard: {
      auto goal = waypoint_arg(w, a);
      if (!goal) return Intent::idle();
      if (b.on_waypoint() && b.at == *goal) {
        ++a.elapsed_ticks;
        return Intent::idle();
      }
      return Intent::move_to(*goal);
    }
    case ActionKind::attack: {
      auto target = bot_arg(w, a);
      if (!target || !w.bot(*target).alive()) return Intent::idle();
      if (w.line_of_sight(bot, *target) && w.distance_cm(bot, *target) <= w.rules().view_range_cm)
        return Intent::attack(*target);
      return Intent::move_to(w.nearest_waypoint(*target));
    }
    case ActionKind::liberate_hostages: {
      const auto& hs = w.hostages();
      for (std::size_t i = 0; i < hs.size(); ++i)
        if (hs[i].free() && b.on_waypoint() && hs[i].at == b.at) return Intent::interact(i);
      return Intent::idle();
    }
    case ActionKind::buy_weapon:
      if (auto weapon = sim::weapon_from_string(a.args.at(0).name())) return Intent::buy(*weapon);
      return Intent::idle();
    case ActionKind::wait:
      ++a.elapsed_ticks;
      return Intent::idle();
  }
  return Intent::idle();
}

void AgentRuntime::settle(BotId bot) {
  Slot& s = slots_[bot];
  Controller& c = s.controller ? *s.controller : fallback_controller();
  BotContext ctx = context(bot);
  const std::int64_t now = world_.global_tick();
  for (int i = 0; i < config_.settle_limit; ++i) {
    if (!s.active) {
      if (s.queue.empty()) return;
      promote(bot);
    }
    HighLevelAction& a = *s.active;
    if (a.motivation_checked_tick != now) {
      a.motivation_checked_tick = now;
      bool holds = c.motivation_holds(ctx, a);
      if (!holds) {
        finish(bot, ActionStatus::interrupted);
        continue;
      }
    }
    switch (progress(a)) {
      case Progress::running:
        return;
      case Progress::failed:
        finish(bot, ActionStatus::failed);
        break;
      case Progress::completed: {
        HighLevelAction done = a;
        finish(bot, ActionStatus::completed);
        if (done.continuation) {
          ++continuation_runs_[done.id];
          c.run_continuation(ctx, done);
        }
        break;
      }
    }
  }
  diagnose(bot, "settle limit reached");
}

std::vector<sim::Event> AgentRuntime::tick(TickTiming* timing) {
  auto start = Clock::now();
  reasoning_acc_ = std::chrono::nanoseconds{0};
  const std::int64_t now = world_.global_tick();
  const std::size_t n = slots_.size();
  std::vector<Intent> intents(n);
  std::chrono::nanoseconds simulation{0};
  for (BotId id = 0; id < n; ++id) {
    Slot& s = slots_[id];
    if (!world_.bot(id).alive()) {
      while (s.active || !s.queue.empty()) {
        if (!s.active) promote(id);
        finish(id, ActionStatus::failed);
      }
      continue;
    }
    settle(id);
    if (!s.active || now - s.last_reason_tick >= config_.reason_every_ticks) {
      s.last_reason_tick = now;
      if (s.controller) {
        BotContext ctx = context(id);
        s.controller->reason(ctx);
      }
      settle(id);
    }
    auto t0 = Clock::now();
    intents[id] = low_level_intent(id);
    simulation += Clock::now() - t0;
  }
  auto t0 = Clock::now();
  auto events = world_.step(intents);
  auto end = Clock::now();
  if (timing) {
    timing->reasoning = reasoning_acc_;
    timing->simulation = simulation + (end - t0);
    timing->total = end - start;
  }
  return events;
}

void AgentRuntime::begin_round() {
  for (BotId id = 0; id < slots_.size(); ++id) {
    Slot& s = slots_[id];
    s.active.reset();
    s.queue.clear();
    s.last_reason_tick = INT64_MIN / 2;
    if (s.controller) {
      BotContext ctx = context(id);
      s.controller->on_round_start(ctx);
    }
  }
}

void AgentRuntime::end_round() {
  for (BotId id = 0; id < slots_.size(); ++id) {
    Slot& s = slots_[id];
    while (s.active || !s.queue.empty()) {
      if (!s.active) promote(id);
      finish(id, ActionStatus::interrupted);
    }
  }
}

}  // namespace lpbot::agent
