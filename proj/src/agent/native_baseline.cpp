#include "lpbot/agent/native_baseline.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace lpbot::agent {

using sim::World;

namespace {

Term self_goal(const char* name, const std::string& bot) { return Term::compound(name, {Term::atom(bot)}); }

template <class T>
std::optional<T> first_sorted(std::vector<std::pair<std::int64_t, T>> pairs) {
  if (pairs.empty()) return std::nullopt;
  return std::min_element(pairs.begin(), pairs.end())->second;
}

}  // namespace

void NativeBaselineController::on_round_start(BotContext&) { bought_this_round_ = false; }

bool NativeBaselineController::clear_view(const BotContext& ctx, BotId bot) const {
  const World& w = ctx.world;
  for (const auto& x : w.bots())
    if (x.team != w.bot(bot).team && w.in_fov(bot, x.id)) return false;
  return true;
}

bool NativeBaselineController::should_buy(const BotContext& ctx) const {
  const World& w = ctx.world;
  const auto& b = w.bot(bot_);
  return w.phase() == sim::Phase::buy && !bought_this_round_ && b.weapon == sim::Weapon::pistol &&
         b.money >= w.rules().rifle.price;
}

std::optional<BotId> NativeBaselineController::nearest_visible_enemy(const BotContext& ctx) const {
  const World& w = ctx.world;
  if (w.bot(bot_).ammo <= 0) return std::nullopt;
  std::vector<std::pair<std::int64_t, std::string>> pairs;
  for (const auto& x : w.bots())
    if (x.team != w.bot(bot_).team && w.in_fov(bot_, x.id)) pairs.emplace_back(w.distance_cm(bot_, x.id), x.name);
  auto name = first_sorted(std::move(pairs));
  if (!name) return std::nullopt;
  return w.find_bot(*name);
}

std::optional<std::string> NativeBaselineController::nearest_tagged(const BotContext& ctx,
                                                                    const std::string& tag) const {
  const World& w = ctx.world;
  const auto& map = w.map();
  auto here = w.nearest_waypoint(bot_);
  std::vector<std::pair<std::int64_t, std::string>> pairs;
  for (auto i : map.tagged(tag)) {
    std::int64_t d = map.distance(here, i);
    if (d != sim::MapDefinition::unreachable) pairs.emplace_back(d, map.waypoint(i).id);
  }
  return first_sorted(std::move(pairs));
}

std::optional<std::string> NativeBaselineController::nearest_free_hostage(const BotContext& ctx) const {
  const World& w = ctx.world;
  const auto& map = w.map();
  auto here = w.nearest_waypoint(bot_);
  std::vector<std::pair<std::int64_t, std::string>> pairs;
  for (const auto& h : w.hostages()) {
    if (!h.free()) continue;
    std::int64_t d = map.distance(here, h.at);
    if (d != sim::MapDefinition::unreachable) pairs.emplace_back(d, map.waypoint(h.at).id);
  }
  return first_sorted(std::move(pairs));
}

std::optional<std::string> NativeBaselineController::next_ambush(const BotContext& ctx,
                                                                 const std::string& here) const {
  std::vector<std::string> names;
  for (auto i : ctx.world.map().tagged("ambush_point")) names.push_back(ctx.world.map().waypoint(i).id);
  std::sort(names.begin(), names.end());
  if (names.empty()) return std::nullopt;
  auto it = std::upper_bound(names.begin(), names.end(), here);
  return it == names.end() ? names.front() : *it;
}

void NativeBaselineController::ct_objective(BotContext& ctx) {
  const World& w = ctx.world;
  const std::string& me = w.bot(bot_).name;
  bool leading = std::any_of(w.hostages().begin(), w.hostages().end(),
                             [&](const sim::HostageState& h) { return h.leader == bot_ && !h.rescued; });
  if (leading) {
    if (auto zone = nearest_tagged(ctx, "rescue_zone"))
      ctx.runtime.start_action(bot_, ActionKind::goto_waypoint, {Term::atom(*zone)}, self_goal("clear_view", me));
    return;
  }
  if (auto wp = nearest_free_hostage(ctx)) {
    ctx.runtime.start_action(bot_, ActionKind::goto_waypoint, {Term::atom(*wp)}, self_goal("clear_view", me),
                             self_goal("action_liberate_hostages", me));
    return;
  }
  if (w.map().waypoint(w.nearest_waypoint(bot_)).has_tag("spawn_t")) {
    ctx.runtime.start_action(bot_, ActionKind::wait, {Term::integer(5)});
    return;
  }
  if (auto wp = nearest_tagged(ctx, "spawn_t"))
    ctx.runtime.start_action(bot_, ActionKind::goto_waypoint, {Term::atom(*wp)}, self_goal("clear_view", me));
}

void NativeBaselineController::t_objective(BotContext& ctx) {
  const World& w = ctx.world;
  const std::string& me = w.bot(bot_).name;
  const auto& here = w.map().waypoint(w.nearest_waypoint(bot_));
  if (here.has_tag("hostage_point") || here.has_tag("ambush_point")) {
    if (auto wp = next_ambush(ctx, here.id)) {
      ctx.runtime.start_action(bot_, ActionKind::guard, {Term::atom(*wp)}, self_goal("clear_view", me));
      return;
    }
  }
  if (auto wp = nearest_tagged(ctx, "hostage_point"))
    ctx.runtime.start_action(bot_, ActionKind::guard, {Term::atom(*wp)}, self_goal("clear_view", me));
}

void NativeBaselineController::reason(BotContext& ctx) {
  const World& w = ctx.world;
  if (ctx.runtime.active_action(bot_)) return;
  const std::string& me = w.bot(bot_).name;
  if (should_buy(ctx)) {
    bought_this_round_ = true;
    ctx.runtime.start_action(bot_, ActionKind::buy_weapon, {Term::atom("rifle")});
    return;
  }
  if (auto enemy = nearest_visible_enemy(ctx)) {
    const std::string& e = w.bot(*enemy).name;
    ctx.runtime.start_action(bot_, ActionKind::attack, {Term::atom(e)},
                             Term::compound("visible_enemy", {Term::atom(me), Term::atom(e)}));
    return;
  }
  if (w.bot(bot_).team == sim::Team::ct)
    ct_objective(ctx);
  else
    t_objective(ctx);
}

bool NativeBaselineController::motivation_holds(BotContext& ctx, const HighLevelAction& action) {
  const Term& m = action.motivation;
  const World& w = ctx.world;
  if (m.is_atom("true")) return true;
  if (m.is_functor("clear_view", 1) && m.arg(0).is_atom()) {
    if (auto b = w.find_bot(m.arg(0).name())) return clear_view(ctx, *b);
    return false;
  }
  if (m.is_functor("visible_enemy", 2) && m.arg(0).is_atom() && m.arg(1).is_atom()) {
    auto a = w.find_bot(m.arg(0).name());
    auto e = w.find_bot(m.arg(1).name());
    return a && e && w.bot(*a).team != w.bot(*e).team && w.in_fov(*a, *e);
  }
  ctx.runtime.diagnose(bot_, "native baseline cannot evaluate motivation of " + action.text());
  return false;
}

void NativeBaselineController::run_continuation(BotContext& ctx, const HighLevelAction& action) {
  const auto& c = action.continuation;
  if (c && c->is_functor("action_liberate_hostages", 1)) {
    ctx.runtime.start_action(bot_, ActionKind::liberate_hostages, {});
    return;
  }
  ctx.runtime.diagnose(bot_, "native baseline cannot run continuation of " + action.text());
}

}  // namespace lpbot::agent
