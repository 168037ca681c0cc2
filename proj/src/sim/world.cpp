#include "lpbot/sim/world.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace lpbot::sim {

const char* to_string(Team team) { return team == Team::ct ? "ct" : "t"; }
const char* to_string(Weapon weapon) { return weapon == Weapon::rifle ? "rifle" : "pistol"; }

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::buy: return "buy";
    case Phase::play: return "play";
    case Phase::over: return "over";
  }
  return "?";
}

std::optional<Weapon> weapon_from_string(std::string_view name) {
  if (name == "rifle") return Weapon::rifle;
  if (name == "pistol") return Weapon::pistol;
  return std::nullopt;
}

const char* to_string(WinCause cause) {
  switch (cause) {
    case WinCause::hostages_rescued: return "hostages_rescued";
    case WinCause::team_eliminated_t: return "team_eliminated_T";
    case WinCause::team_eliminated_ct: return "team_eliminated_CT";
    case WinCause::time_expired: return "time_expired";
  }
  return "?";
}

RoundOutcome classify_round(WinCause cause, std::size_t ct_alive, std::size_t t_alive) {
  RoundOutcome o;
  o.cause = cause;
  o.winner = (cause == WinCause::hostages_rescued || cause == WinCause::team_eliminated_t) ? Team::ct : Team::t;
  o.goal_fulfilled = (cause == WinCause::hostages_rescued && t_alive >= 1) ||
                     (cause == WinCause::time_expired && ct_alive >= 1);
  return o;
}

namespace {

constexpr std::int64_t unit = 65536;

const std::array<Point, 360>& heading_table() {
  static const std::array<Point, 360> table = [] {
    std::array<Point, 360> t{};
    for (int d = 0; d < 360; ++d) {
      double r = d * std::numbers::pi / 180.0;
      t[d] = {static_cast<std::int64_t>(std::llround(std::cos(r) * unit)),
              static_cast<std::int64_t>(std::llround(std::sin(r) * unit))};
    }
    return t;
  }();
  return table;
}

std::int64_t normalize_deg(std::int64_t d) { return ((d % 360) + 360) % 360; }

}  // namespace

Point heading_vector(std::int64_t degrees) { return heading_table()[normalize_deg(degrees)]; }

std::int64_t heading_towards(std::int64_t dx, std::int64_t dy) {
  const auto& t = heading_table();
  std::int64_t best = 0;
  __int128 best_dot = 0;
  for (std::int64_t d = 0; d < 360; ++d) {
    __int128 dot = static_cast<__int128>(t[d].x) * dx + static_cast<__int128>(t[d].y) * dy;
    if (d == 0 || dot > best_dot) {
      best = d;
      best_dot = dot;
    }
  }
  return best;
}

World::World(std::shared_ptr<const MapDefinition> map, GameRules rules, std::size_t ct_count, std::size_t t_count,
             std::uint64_t seed)
    : map_(std::move(map)), rules_(rules), rng_(seed), ct_count_(ct_count), t_count_(t_count) {
  for (std::size_t i = 0; i < ct_count + t_count; ++i) {
    BotState b;
    b.id = i;
    b.team = i < ct_count ? Team::ct : Team::t;
    b.name = i < ct_count ? "ct" + std::to_string(i + 1) : "t" + std::to_string(i - ct_count + 1);
    b.money = rules_.start_money;
    b.health = 0;
    bots_.push_back(std::move(b));
  }
  for (const auto& h : map_->hostages()) hostages_.push_back({h.id, h.at, no_bot, false});
}

std::optional<BotId> World::find_bot(std::string_view name) const {
  for (const auto& b : bots_)
    if (b.name == name) return b.id;
  return std::nullopt;
}

void World::start_round() {
  ++round_;
  round_tick_ = 0;
  phase_ = rules_.buy_ticks > 0 ? Phase::buy : Phase::play;
  auto ct_spawns = map_->tagged("spawn_ct");
  auto t_spawns = map_->tagged("spawn_t");
  std::size_t ci = 0, ti = 0;
  for (auto& b : bots_) {
    const auto& spawns = b.team == Team::ct ? ct_spawns : t_spawns;
    std::size_t& k = b.team == Team::ct ? ci : ti;
    b.at = b.to = spawns[k++ % spawns.size()];
    b.progress_cm = 0;
    b.health = rules_.start_health;
    b.weapon = Weapon::pistol;
    b.ammo = rules_.pistol.ammo;
    // face the map centre of mass
    std::int64_t cx = 0, cy = 0;
    for (const auto& w : map_->waypoints()) {
      cx += w.x_cm;
      cy += w.y_cm;
    }
    const auto n = static_cast<std::int64_t>(map_->size());
    const Waypoint& here = map_->waypoint(b.at);
    b.facing_deg = heading_towards(cx / n - here.x_cm, cy / n - here.y_cm);
  }
  hostages_.clear();
  for (const auto& h : map_->hostages()) hostages_.push_back({h.id, h.at, no_bot, false});
}

Point World::position(BotId id) const {
  const BotState& b = bots_.at(id);
  const Waypoint& a = map_->waypoint(b.at);
  if (b.on_waypoint() || b.progress_cm == 0) return {a.x_cm, a.y_cm};
  const Waypoint& c = map_->waypoint(b.to);
  std::int64_t cost = *map_->edge_cost(b.at, b.to);
  return {a.x_cm + (c.x_cm - a.x_cm) * b.progress_cm / cost, a.y_cm + (c.y_cm - a.y_cm) * b.progress_cm / cost};
}

WaypointIndex World::nearest_waypoint(BotId id) const {
  const BotState& b = bots_.at(id);
  if (b.on_waypoint()) return b.at;
  std::int64_t cost = *map_->edge_cost(b.at, b.to);
  return b.progress_cm * 2 < cost ? b.at : b.to;
}

std::int64_t World::distance_cm(BotId a, BotId b) const {
  Point p = position(a), q = position(b);
  return euclid_cm(q.x - p.x, q.y - p.y);
}

bool World::line_of_sight(BotId a, BotId b) const { return map_->visible(nearest_waypoint(a), nearest_waypoint(b)); }

bool World::in_fov(BotId observer, BotId target) const {
  if (observer == target) return false;
  const BotState& o = bots_.at(observer);
  const BotState& t = bots_.at(target);
  if (!o.alive() || !t.alive()) return false;
  Point p = position(observer), q = position(target);
  std::int64_t vx = q.x - p.x, vy = q.y - p.y;
  __int128 len2 = static_cast<__int128>(vx) * vx + static_cast<__int128>(vy) * vy;
  if (len2 > static_cast<__int128>(rules_.view_range_cm) * rules_.view_range_cm) return false;
  if (len2 != 0) {
    Point f = heading_vector(o.facing_deg);
    __int128 dot = static_cast<__int128>(f.x) * vx + static_cast<__int128>(f.y) * vy;
    __int128 c = heading_vector(rules_.fov_half_angle_deg).x;
    if (dot < 0 || dot * dot < c * c * len2) return false;
  }
  return line_of_sight(observer, target);
}

std::int64_t World::graph_distance(BotId a, BotId b) const {
  return map_->distance(nearest_waypoint(a), nearest_waypoint(b));
}

std::optional<WaypointIndex> World::next_waypoint(BotId id, WaypointIndex goal) const {
  const BotState& b = bots_.at(id);
  if (b.on_waypoint()) return map_->next_hop(b.at, goal);
  std::int64_t cost = *map_->edge_cost(b.at, b.to);
  std::int64_t via_to = map_->distance(b.to, goal);
  std::int64_t via_at = map_->distance(b.at, goal);
  if (via_to == MapDefinition::unreachable) return std::nullopt;
  if (via_at + b.progress_cm < via_to + (cost - b.progress_cm)) return b.at;
  return b.to;
}

void World::emit(std::vector<Event>& out, BotId bot, std::string type, std::string payload) {
  out.push_back({global_tick_, bot, std::move(type), std::move(payload)});
}

void World::turn_towards(BotState& b, Point target) {
  Point here = position(b.id);
  if (target.x == here.x && target.y == here.y) return;
  std::int64_t want = heading_towards(target.x - here.x, target.y - here.y);
  std::int64_t diff = normalize_deg(want - b.facing_deg + 180) - 180;
  if (std::abs(diff) <= rules_.turn_deg_per_tick)
    b.facing_deg = want;
  else
    b.facing_deg = normalize_deg(b.facing_deg + (diff > 0 ? rules_.turn_deg_per_tick : -rules_.turn_deg_per_tick));
}

Event World::resolve_attack(BotId attacker, BotId target) {
  BotState& a = bots_.at(attacker);
  BotState& t = bots_.at(target);
  auto fail = [&](const char* why) {
    return Event{global_tick_, attacker, "attack_failed", std::string("target=") + t.name + " reason=" + why};
  };
  if (!a.alive()) return fail("attacker_dead");
  if (!t.alive()) return fail("target_dead");
  if (a.ammo <= 0) return fail("no_ammo");
  if (!in_fov(attacker, target)) return fail("not_in_fov");
  --a.ammo;
  const WeaponSpec& w = rules_.spec(a.weapon);
  const std::int64_t range = rules_.view_range_cm;
  const std::int64_t d = distance_cm(attacker, target);
  const std::uint64_t roll = rng_.next() % static_cast<std::uint64_t>(1000 * range);
  const std::int64_t threshold = d >= range ? 0 : w.accuracy_permille * (range - d);
  const bool hit = static_cast<std::int64_t>(roll) < threshold;
  std::string payload = "target=" + t.name + " hit=" + (hit ? "1" : "0");
  if (hit) {
    t.health = std::max<std::int64_t>(0, t.health - w.damage);
    payload += " health=" + std::to_string(t.health);
  }
  return {global_tick_, attacker, "shot", payload};
}

void World::release_hostages(BotId leader, std::vector<Event>& out) {
  for (auto& h : hostages_) {
    if (h.leader == leader && !h.rescued) {
      h.leader = no_bot;
      emit(out, leader, "hostage_released", h.id);
    }
  }
}

void World::on_arrival(BotId id, WaypointIndex from, WaypointIndex reached, std::vector<Event>& out) {
  BotState& b = bots_[id];
  emit(out, id, "arrive", map_->waypoint(reached).id);
  bool rescue = b.team == Team::ct && map_->waypoint(reached).has_tag("rescue_zone");
  for (auto& h : hostages_) {
    if (h.leader != id || h.rescued) continue;
    h.at = from;
    if (rescue) {
      h.rescued = true;
      h.at = reached;
      emit(out, id, "hostage_rescued", h.id);
    }
  }
}

void World::move_bot(BotId id, WaypointIndex goal, std::vector<Event>& out) {
  BotState& b = bots_[id];
  if (goal >= map_->size()) {
    emit(out, id, "intent_invalid", "move");
    return;
  }
  if (b.on_waypoint()) {
    if (b.at == goal) return;
    auto hop = map_->next_hop(b.at, goal);
    if (!hop) {
      emit(out, id, "move_failed", map_->waypoint(goal).id);
      return;
    }
    b.to = *hop;
    b.progress_cm = 0;
  } else {
    auto next = next_waypoint(id, goal);
    if (!next) {
      emit(out, id, "move_failed", map_->waypoint(goal).id);
      return;
    }
    if (*next == b.at) {
      std::int64_t cost = *map_->edge_cost(b.at, b.to);
      std::swap(b.at, b.to);
      b.progress_cm = cost - b.progress_cm;
    }
  }
  std::int64_t cost = *map_->edge_cost(b.at, b.to);
  b.progress_cm += rules_.move_cm_per_tick;
  if (b.progress_cm >= cost) {
    WaypointIndex from = b.at;
    b.at = b.to;
    b.progress_cm = 0;
    on_arrival(id, from, b.at, out);
  }
}

void World::interact(BotId id, std::size_t hostage, std::vector<Event>& out) {
  BotState& b = bots_[id];
  if (hostage >= hostages_.size()) {
    emit(out, id, "intent_invalid", "interact");
    return;
  }
  HostageState& h = hostages_[hostage];
  if (b.team != Team::ct || h.rescued || !b.on_waypoint()) {
    emit(out, id, "interact_failed", h.id);
    return;
  }
  if (h.leader == id) {
    h.leader = no_bot;
    h.at = b.at;
    emit(out, id, "hostage_released", h.id);
  } else if (h.free() && h.at == b.at) {
    h.leader = id;
    emit(out, id, "hostage_follow", h.id);
  } else {
    emit(out, id, "interact_failed", h.id);
  }
}

void World::buy(BotId id, Weapon weapon, std::vector<Event>& out) {
  BotState& b = bots_[id];
  const WeaponSpec& spec = rules_.spec(weapon);
  if (phase_ != Phase::buy) {
    emit(out, id, "buy_failed", std::string(to_string(weapon)) + " reason=not_buy_phase");
  } else if (b.money < spec.price) {
    emit(out, id, "buy_failed", std::string(to_string(weapon)) + " reason=money");
  } else {
    b.money -= spec.price;
    b.weapon = weapon;
    b.ammo = spec.ammo;
    emit(out, id, "buy", std::string(to_string(weapon)) + " money=" + std::to_string(b.money));
  }
}

std::vector<Event> World::step(const std::vector<Intent>& intents) {
  std::vector<Event> out;
  const bool frozen = phase_ == Phase::buy;
  auto intent_of = [&](BotId id) { return id < intents.size() ? intents[id] : Intent::idle(); };

  if (phase_ != Phase::over) {
    // 1. facing
    if (!frozen) {
      for (auto& b : bots_) {
        if (!b.alive()) continue;
        Intent in = intent_of(b.id);
        if (in.kind == IntentKind::attack && in.target < bots_.size() && bots_[in.target].alive()) {
          turn_towards(b, position(in.target));
        } else if (in.kind == IntentKind::move && in.waypoint < map_->size()) {
          if (auto next = next_waypoint(b.id, in.waypoint)) {
            const Waypoint& w = map_->waypoint(*next);
            turn_towards(b, {w.x_cm, w.y_cm});
          }
        }
      }
    }
    // 2. attacks, ascending id
    for (auto& b : bots_) {
      Intent in = intent_of(b.id);
      if (in.kind != IntentKind::attack || !b.alive()) continue;
      if (frozen || in.target >= bots_.size() || bots_[in.target].team == b.team) {
        emit(out, b.id, "intent_invalid", "attack");
        continue;
      }
      BotState& t = bots_[in.target];
      if (!t.alive()) continue;
      if (b.ammo > 0 && !in_fov(b.id, t.id)) continue;  // still turning or chasing
      Event e = resolve_attack(b.id, t.id);
      out.push_back(e);
      if (e.type == "shot" && !t.alive()) {
        b.kills += 1;
        b.money = std::min(rules_.money_cap, b.money + rules_.kill_reward);
        emit(out, b.id, "kill", t.name);
        release_hostages(t.id, out);
      }
    }
    // 3. movement, interaction, purchases
    for (auto& b : bots_) {
      if (!b.alive()) continue;
      Intent in = intent_of(b.id);
      switch (in.kind) {
        case IntentKind::move:
          if (!frozen) move_bot(b.id, in.waypoint, out);
          break;
        case IntentKind::interact:
          if (!frozen) interact(b.id, in.hostage, out);
          break;
        case IntentKind::buy:
          buy(b.id, in.weapon, out);
          break;
        case IntentKind::idle:
        case IntentKind::attack:
          break;
      }
    }
    ++round_tick_;
    if (phase_ == Phase::buy && round_tick_ >= rules_.buy_ticks) phase_ = Phase::play;
  }
  ++global_tick_;
  std::stable_sort(out.begin(), out.end(), [](const Event& a, const Event& b) { return a.bot < b.bot; });
  log_.insert(log_.end(), out.begin(), out.end());
  return out;
}

std::size_t World::alive_count(Team team) const {
  return static_cast<std::size_t>(
      std::count_if(bots_.begin(), bots_.end(), [&](const BotState& b) { return b.team == team && b.alive(); }));
}

std::size_t World::hostages_rescued() const {
  return static_cast<std::size_t>(
      std::count_if(hostages_.begin(), hostages_.end(), [](const HostageState& h) { return h.rescued; }));
}

std::optional<RoundOutcome> World::check_win() {
  if (phase_ == Phase::over) return std::nullopt;
  std::size_t ct = alive_count(Team::ct), t = alive_count(Team::t);
  std::optional<WinCause> cause;
  if (!hostages_.empty() && hostages_rescued() == hostages_.size())
    cause = WinCause::hostages_rescued;
  else if (t_count_ > 0 && t == 0)
    cause = WinCause::team_eliminated_t;
  else if (ct_count_ > 0 && ct == 0)
    cause = WinCause::team_eliminated_ct;
  else if (ticks_left() <= 0)
    cause = WinCause::time_expired;
  if (!cause) return std::nullopt;
  phase_ = Phase::over;
  RoundOutcome o = classify_round(*cause, ct, t);
  log_.push_back({global_tick_, no_bot, "round_end",
                  std::string("winner=") + to_string(o.winner) + " cause=" + to_string(o.cause) +
                      " goal=" + (o.goal_fulfilled ? "1" : "0")});
  return o;
}

void World::award_round(const RoundOutcome& outcome) {
  for (auto& b : bots_) {
    std::int64_t reward = b.team == outcome.winner ? rules_.win_reward : rules_.loss_reward;
    b.money = std::min(rules_.money_cap, b.money + reward);
  }
}

}  // namespace lpbot::sim
