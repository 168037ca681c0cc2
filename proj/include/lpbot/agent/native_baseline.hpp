#pragma once

#include <optional>
#include <string>

#include "lpbot/agent/runtime.hpp"

namespace lpbot::agent {

/// Hand-written counterpart of the `baseline` rule package: buy, engage
/// the nearest visible enemy, then play the team objective.  It starts the
/// same actions with the same motivation and continuation terms, so its
/// lifecycle log matches the scripted baseline tick for tick.
class NativeBaselineController : public Controller {
 public:
  explicit NativeBaselineController(BotId bot) : bot_(bot) {}

  void on_round_start(BotContext& ctx) override;
  void reason(BotContext& ctx) override;
  bool motivation_holds(BotContext& ctx, const HighLevelAction& action) override;
  void run_continuation(BotContext& ctx, const HighLevelAction& action) override;

 private:
  bool should_buy(const BotContext& ctx) const;
  std::optional<BotId> nearest_visible_enemy(const BotContext& ctx) const;
  std::optional<std::string> nearest_tagged(const BotContext& ctx, const std::string& tag) const;
  std::optional<std::string> nearest_free_hostage(const BotContext& ctx) const;
  std::optional<std::string> next_ambush(const BotContext& ctx, const std::string& here) const;
  bool clear_view(const BotContext& ctx, BotId bot) const;
  void ct_objective(BotContext& ctx);
  void t_objective(BotContext& ctx);

  BotId bot_;
  bool bought_this_round_ = false;
};

}  // namespace lpbot::agent
