#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lpbot/sim/map.hpp"
#include "lpbot/sim/rng.hpp"

namespace lpbot::sim {

using BotId = std::size_t;
inline constexpr BotId no_bot = static_cast<BotId>(-1);

enum class Team : std::uint8_t { ct, t };
enum class Weapon : std::uint8_t { pistol, rifle };
enum class Phase : std::uint8_t { buy, play, over };

const char* to_string(Team team);
const char* to_string(Weapon weapon);
const char* to_string(Phase phase);
std::optional<Weapon> weapon_from_string(std::string_view name);

struct WeaponSpec {
  std::int64_t accuracy_permille = 600;
  std::int64_t damage = 15;
  std::int64_t price = 0;
  std::int64_t ammo = 36;
};

/// Tunable game rules.  Lengths in centimetres, time in ticks of 0.25 s.
struct GameRules {
  std::int64_t tick_ms = 250;
  std::int64_t round_ticks = 360;
  std::int64_t buy_ticks = 20;
  std::int64_t move_cm_per_tick = 125;
  std::int64_t turn_deg_per_tick = 45;
  std::int64_t fov_half_angle_deg = 60;
  std::int64_t view_range_cm = 4000;
  std::int64_t hearing_range_cm = 1500;
  std::int64_t start_health = 100;
  WeaponSpec pistol{600, 15, 0, 36};
  WeaponSpec rifle{800, 25, 800, 90};
  std::int64_t start_money = 800;
  std::int64_t win_reward = 3000;
  std::int64_t loss_reward = 1400;
  std::int64_t kill_reward = 300;
  std::int64_t money_cap = 16000;

  const WeaponSpec& spec(Weapon w) const { return w == Weapon::rifle ? rifle : pistol; }
};

struct BotState {
  BotId id = 0;
  std::string name;
  Team team = Team::ct;
  WaypointIndex at = 0;      // last waypoint reached
  WaypointIndex to = 0;      // equals `at` when standing on a waypoint
  std::int64_t progress_cm = 0;
  std::int64_t facing_deg = 0;
  std::int64_t health = 100;
  Weapon weapon = Weapon::pistol;
  std::int64_t ammo = 0;
  std::int64_t money = 0;
  std::int64_t kills = 0;

  bool alive() const { return health > 0; }
  bool on_waypoint() const { return at == to; }
};

struct HostageState {
  std::string id;
  WaypointIndex at = 0;
  BotId leader = no_bot;
  bool rescued = false;

  bool free() const { return leader == no_bot && !rescued; }
};

enum class IntentKind : std::uint8_t { idle, move, attack, interact, buy };

/// Low-level command for one bot for one tick.
struct Intent {
  IntentKind kind = IntentKind::idle;
  WaypointIndex waypoint = 0;  // move
  BotId target = no_bot;       // attack
  std::size_t hostage = 0;     // interact
  Weapon weapon = Weapon::rifle;  // buy

  static Intent idle() { return {}; }
  static Intent move_to(WaypointIndex w) { return {IntentKind::move, w, no_bot, 0, Weapon::rifle}; }
  static Intent attack(BotId b) { return {IntentKind::attack, 0, b, 0, Weapon::rifle}; }
  static Intent interact(std::size_t h) { return {IntentKind::interact, 0, no_bot, h, Weapon::rifle}; }
  static Intent buy(Weapon w) { return {IntentKind::buy, 0, no_bot, 0, w}; }
};

/// Simulation event; `bot` is no_bot for world events.
struct Event {
  std::int64_t tick = 0;  // global tick
  BotId bot = no_bot;
  std::string type;
  std::string payload;
};

enum class WinCause : std::uint8_t { hostages_rescued, team_eliminated_t, team_eliminated_ct, time_expired };
const char* to_string(WinCause cause);

struct RoundOutcome {
  Team winner = Team::t;
  WinCause cause = WinCause::time_expired;
  bool goal_fulfilled = false;
};

/// Applies the objective rules to a final round state.
RoundOutcome classify_round(WinCause cause, std::size_t ct_alive, std::size_t t_alive);

struct Point {
  std::int64_t x = 0;
  std::int64_t y = 0;
};

/// Integer unit vector for a heading in degrees, scaled by 65536.
Point heading_vector(std::int64_t degrees);
/// Heading (0..359) whose unit vector best matches (dx, dy); ties pick the smaller angle.
std::int64_t heading_towards(std::int64_t dx, std::int64_t dy);

/// Hostage-rescue world: one round at a time, advanced in fixed ticks.
class World {
 public:
  /// Bots are numbered CTs first (ct1..ctN) then Ts (t1..tM).
  World(std::shared_ptr<const MapDefinition> map, GameRules rules, std::size_t ct_count, std::size_t t_count,
        std::uint64_t seed);

  const MapDefinition& map() const { return *map_; }
  std::shared_ptr<const MapDefinition> map_ptr() const { return map_; }
  const GameRules& rules() const { return rules_; }

  const std::vector<BotState>& bots() const { return bots_; }
  const BotState& bot(BotId id) const { return bots_.at(id); }
  BotState& mutable_bot(BotId id) { return bots_.at(id); }
  std::optional<BotId> find_bot(std::string_view name) const;
  const std::vector<HostageState>& hostages() const { return hostages_; }
  std::vector<HostageState>& mutable_hostages() { return hostages_; }

  Phase phase() const { return phase_; }
  int round_index() const { return round_; }
  std::int64_t round_tick() const { return round_tick_; }
  std::int64_t global_tick() const { return global_tick_; }
  std::int64_t ticks_left() const { return rules_.round_ticks - round_tick_; }

  SplitMix64& rng() { return rng_; }
  const SplitMix64& rng() const { return rng_; }

  /// Respawns all bots and hostages; money persists between rounds.
  void start_round();

  Point position(BotId id) const;
  /// Waypoint the bot is standing on or closest to along its edge.
  WaypointIndex nearest_waypoint(BotId id) const;
  std::int64_t distance_cm(BotId a, BotId b) const;
  bool line_of_sight(BotId a, BotId b) const;
  bool in_fov(BotId observer, BotId target) const;
  /// Waypoint the bot will head for next when moving to goal (after any
  /// mid-edge reversal), or nullopt when already there or unreachable.
  std::optional<WaypointIndex> next_waypoint(BotId id, WaypointIndex goal) const;
  /// Shortest graph distance between the bots' nearest waypoints.
  std::int64_t graph_distance(BotId a, BotId b) const;

  /// Fires one shot.  Consumes ammo and one RNG draw when the
  /// preconditions hold; otherwise returns an attack_failed event.
  Event resolve_attack(BotId attacker, BotId target);

  /// Advances one tick.  `intents` has one entry per bot (dead bots ignored).
  /// Returns the events of this tick, also appended to the log.
  std::vector<Event> step(const std::vector<Intent>& intents);

  /// Round result once decided; sets phase to over.
  std::optional<RoundOutcome> check_win();
  /// Pays win/loss rewards for a decided round.
  void award_round(const RoundOutcome& outcome);

  std::size_t alive_count(Team team) const;
  std::size_t hostages_rescued() const;

  const std::vector<Event>& events() const { return log_; }
  void clear_events() { log_.clear(); }

 private:
  void emit(std::vector<Event>& out, BotId bot, std::string type, std::string payload = {});
  void turn_towards(BotState& b, Point target);
  void move_bot(BotId id, WaypointIndex goal, std::vector<Event>& out);
  void on_arrival(BotId id, WaypointIndex from, WaypointIndex reached, std::vector<Event>& out);
  void interact(BotId id, std::size_t hostage, std::vector<Event>& out);
  void buy(BotId id, Weapon weapon, std::vector<Event>& out);
  void release_hostages(BotId leader, std::vector<Event>& out);

  std::shared_ptr<const MapDefinition> map_;
  GameRules rules_;
  std::vector<BotState> bots_;
  std::vector<HostageState> hostages_;
  SplitMix64 rng_;
  Phase phase_ = Phase::buy;
  int round_ = -1;
  std::int64_t round_tick_ = 0;
  std::int64_t global_tick_ = 0;
  std::vector<Event> log_;
  std::size_t ct_count_ = 0;
  std::size_t t_count_ = 0;
};

}  // namespace lpbot::sim
