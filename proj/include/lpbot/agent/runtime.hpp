#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lpbot/agent/action.hpp"
#include "lpbot/sim/world.hpp"

namespace lpbot::agent {

class AgentRuntime;

/// What a controller sees while deciding for one bot.
struct BotContext {
  AgentRuntime& runtime;
  const sim::World& world;
  BotId bot;
};

/// Decision procedure behind one bot.  The runtime owns the action
/// lifecycle; controllers only start actions and judge motivations.
class Controller {
 public:
  virtual ~Controller() = default;

  virtual void on_round_start(BotContext&) {}
  /// High-level reasoning; may start actions through ctx.runtime.
  virtual void reason(BotContext& ctx) = 0;
  /// Whether a running action should keep running.
  virtual bool motivation_holds(BotContext& ctx, const HighLevelAction& action) = 0;
  /// Runs an action's continuation after it completed.
  virtual void run_continuation(BotContext& ctx, const HighLevelAction& action) = 0;
};

/// Controller that never acts.
class IdleController : public Controller {
 public:
  void reason(BotContext&) override {}
  bool motivation_holds(BotContext&, const HighLevelAction&) override { return true; }
  void run_continuation(BotContext&, const HighLevelAction&) override {}
};

enum class LifecycleKind : std::uint8_t { started, interrupted, completed, failed };
const char* to_string(LifecycleKind kind);

struct LifecycleEvent {
  std::int64_t tick = 0;
  BotId bot = 0;
  std::string bot_name;
  LifecycleKind kind = LifecycleKind::started;
  ActionId action = 0;
  std::string action_text;

  /// `tick=<n> bot=<id> event=<kind> action=<kind>(<args>)`
  std::string str() const;
};

struct RuntimeConfig {
  /// Reasoning period for a bot that has an active action.
  std::int64_t reason_every_ticks = 5;
  /// Upper bound on lifecycle transitions per bot per settle pass.
  int settle_limit = 64;
};

/// Wall-clock split of one tick.  Reasoning is logic-engine time only.
struct TickTiming {
  std::chrono::nanoseconds reasoning{0};
  std::chrono::nanoseconds simulation{0};
  std::chrono::nanoseconds total{0};
};

/// Per-tick driver: motivations, reasoning, continuations, low-level
/// intents and the world step, for every bot in ascending id.
class AgentRuntime {
 public:
  AgentRuntime(sim::World& world, RuntimeConfig config = {});

  void set_controller(BotId bot, std::shared_ptr<Controller> controller);
  Controller* controller(BotId bot) const;

  sim::World& world() { return world_; }
  const sim::World& world() const { return world_; }
  const RuntimeConfig& config() const { return config_; }

  /// Creates a running action; it becomes active at once when the bot is
  /// idle, otherwise it is queued.  Returns nullopt for a dead owner.
  std::optional<ActionId> start_action(BotId owner, ActionKind kind, std::vector<Term> args,
                                       Term motivation = Term::atom("true"),
                                       std::optional<Term> continuation = std::nullopt);

  const HighLevelAction* active_action(BotId bot) const;
  const std::deque<HighLevelAction>& queued_actions(BotId bot) const;

  /// Call after World::start_round.
  void begin_round();
  /// Interrupts whatever is still running.
  void end_round();

  /// One full tick including World::step.  Returns the world events.
  std::vector<sim::Event> tick(TickTiming* timing = nullptr);

  /// Intent the active action would issue now (also advances its counters).
  sim::Intent low_level_intent(BotId bot);

  const std::vector<LifecycleEvent>& lifecycle() const { return lifecycle_; }
  void clear_lifecycle() { lifecycle_.clear(); }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }
  void diagnose(BotId bot, const std::string& message);

  /// Number of times the continuation of `id` has been run.
  int continuation_runs(ActionId id) const;

  /// Script controllers report engine time here.
  void add_reasoning_time(std::chrono::nanoseconds t) { reasoning_acc_ += t; }

 private:
  struct Slot {
    std::shared_ptr<Controller> controller;
    std::optional<HighLevelAction> active;
    std::deque<HighLevelAction> queue;
    std::int64_t last_reason_tick = INT64_MIN / 2;
  };

  enum class Progress { running, completed, failed };

  BotContext context(BotId bot);
  void settle(BotId bot);
  void finish(BotId bot, ActionStatus status);
  void promote(BotId bot);
  void log(const HighLevelAction& action, LifecycleKind kind);
  Progress progress(const HighLevelAction& action) const;

  sim::World& world_;
  RuntimeConfig config_;
  std::vector<Slot> slots_;
  std::vector<LifecycleEvent> lifecycle_;
  std::vector<std::string> diagnostics_;
  std::map<ActionId, int> continuation_runs_;
  ActionId next_action_ = 1;
  std::chrono::nanoseconds reasoning_acc_{0};
};

}  // namespace lpbot::agent
