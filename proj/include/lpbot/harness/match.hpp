#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lpbot/agent/runtime.hpp"
#include "lpbot/sim/map.hpp"
#include "lpbot/sim/world.hpp"

namespace lpbot::harness {

/// Bad match configuration or package stack; raised before round 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `native`, `scripted` (default stack for the map) or `scripted:a,b,c`.
/// `scripted:` with nothing after the colon gives empty minds.
struct ControllerSpec {
  enum class Kind { native, scripted };
  Kind kind = Kind::native;
  bool default_stack = false;
  std::vector<std::string> packages;

  static ControllerSpec parse(std::string_view text);
  static ControllerSpec native() { return {}; }
  static ControllerSpec scripted(std::vector<std::string> packages) {
    return {Kind::scripted, false, std::move(packages)};
  }
  std::string str() const;
  /// `native` or `scripted`, as used in report rows.
  std::string label() const { return kind == Kind::native ? "native" : "scripted"; }
};

/// Packages loaded by a bare `scripted` controller on the given map.
std::vector<std::string> default_packages(const std::string& map_name, const std::filesystem::path& package_dir);

struct MatchConfig {
  std::string map = "warehouse";  // fixture name or path to a map file
  int rounds = 12;
  std::size_t ct_count = 5;
  std::size_t t_count = 5;
  std::uint64_t seed = 1;
  ControllerSpec ct;
  ControllerSpec t;
  std::filesystem::path package_dir;  // empty: bundled packages
  bool perf = false;
  sim::GameRules rules;
  agent::RuntimeConfig runtime;

  nlohmann::json to_json() const;
  static MatchConfig from_json(const nlohmann::json& j);
  std::filesystem::path packages() const;
};

/// Fixture name (`warehouse`) or a path to a map file.
std::shared_ptr<const sim::MapDefinition> resolve_map(const std::string& name_or_path);

struct RoundRecord {
  int round = 0;
  sim::RoundOutcome outcome;
  std::int64_t ticks = 0;
  std::size_t ct_alive = 0;
  std::size_t t_alive = 0;
  std::size_t hostages_rescued = 0;
};

/// The per-match tuple reported in the experiment tables.
struct MatchCounts {
  int ct_wins = 0;
  int t_wins = 0;
  int ct_goal_wins = 0;
  int t_goal_wins = 0;

  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

struct MatchResult {
  std::vector<RoundRecord> rounds;
  MatchCounts counts;
  /// `tick;bot;event;payload` lines: world events, action lifecycle and round ends.
  std::vector<std::string> trace;
  /// Action lifecycle lines `tick=<n> bot=<id> event=<e> action=<a>`.
  std::vector<std::string> lifecycle;
  std::vector<std::string> diagnostics;
  std::vector<agent::TickTiming> timings;  // filled when perf is on
};

MatchResult run_match(const MatchConfig& config);

/// Trace file: two header lines then one event per line.
void write_trace(const std::filesystem::path& path, const MatchConfig& config, const MatchResult& result);

struct ReplayResult {
  bool clean = false;
  std::size_t line = 0;       // 1-based line in the trace file of the first divergence
  std::int64_t tick = -1;     // tick of that line, or -1
  std::string expected;       // line from the file
  std::string actual;         // line from the re-run
  std::string message;
};

/// Re-runs the match recorded in a trace file and diffs the traces.
/// Throws ConfigError for files not written by this trace version.
ReplayResult replay(const std::filesystem::path& path);

inline constexpr std::string_view trace_magic = "# lpbot-trace 1";

}  // namespace lpbot::harness
