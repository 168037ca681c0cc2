#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lpbot/logic/term.hpp"
#include "lpbot/sim/world.hpp"

namespace lpbot::agent {

using logic::Term;
using sim::BotId;
using ActionId = std::uint64_t;

enum class ActionKind : std::uint8_t { goto_waypoint, attack, liberate_hostages, guard, buy_weapon, wait };
enum class ActionStatus : std::uint8_t { running, completed, interrupted, failed };

/// `goto`, `attack`, `liberate_hostages`, `guard`, `buy_weapon`, `wait`.
const char* to_string(ActionKind kind);
std::optional<ActionKind> action_kind_from_string(std::string_view name);
const char* to_string(ActionStatus status);

/// A persistent bot task started from a controller.
struct HighLevelAction {
  ActionId id = 0;
  BotId owner = 0;
  ActionKind kind = ActionKind::wait;
  std::vector<Term> args;
  Term motivation = Term::atom("true");
  std::optional<Term> continuation;
  ActionStatus status = ActionStatus::running;

  std::int64_t created_tick = 0;
  std::int64_t motivation_checked_tick = -1;
  std::int64_t elapsed_ticks = 0;  // wait: ticks waited; guard: ticks held at the post

  /// `kind(arg1,arg2)` as written in lifecycle logs.
  std::string text() const;
};

/// Hold duration of a guard action once the post is reached.
inline constexpr std::int64_t guard_hold_ticks = 60;

}  // namespace lpbot::agent
