#include "lpbot/harness/match.hpp"

#include <fstream>
#include <sstream>

#include "lpbot/agent/native_baseline.hpp"
#include "lpbot/agent/scripted.hpp"
#include "lpbot/logic/errors.hpp"
#include "lpbot/rules/package.hpp"

namespace lpbot::harness {

namespace fs = std::filesystem;
using nlohmann::json;

ControllerSpec ControllerSpec::parse(std::string_view text) {
  if (text == "native") return native();
  if (text == "scripted") return {Kind::scripted, true, {}};
  constexpr std::string_view prefix = "scripted:";
  if (text.substr(0, prefix.size()) != prefix)
    throw ConfigError("controller must be native, scripted or scripted:PKG[,PKG...], got '" + std::string(text) + "'");
  ControllerSpec spec{Kind::scripted, false, {}};
  std::string rest(text.substr(prefix.size()));
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw ConfigError("empty package name in '" + std::string(text) + "'");
    spec.packages.push_back(item);
  }
  return spec;
}

std::string ControllerSpec::str() const {
  if (kind == Kind::native) return "native";
  if (default_stack) return "scripted";
  std::string s = "scripted:";
  for (std::size_t i = 0; i < packages.size(); ++i) s += (i ? "," : "") + packages[i];
  return s;
}

std::vector<std::string> default_packages(const std::string& map_name, const fs::path& package_dir) {
  std::vector<std::string> names = {"baseline", "cs_rules"};
  if (fs::exists(package_dir / (map_name + "_tactics.json"))) names.push_back(map_name + "_tactics");
  return names;
}

fs::path MatchConfig::packages() const { return package_dir.empty() ? rules::default_package_dir() : package_dir; }

json MatchConfig::to_json() const {
  return json{{"map", map},
              {"rounds", rounds},
              {"ct_count", ct_count},
              {"t_count", t_count},
              {"seed", seed},
              {"ct", ct.str()},
              {"t", t.str()},
              {"package_dir", package_dir.string()},
              {"round_ticks", rules.round_ticks},
              {"buy_ticks", rules.buy_ticks},
              {"reason_every_ticks", runtime.reason_every_ticks}};
}

MatchConfig MatchConfig::from_json(const json& j) {
  MatchConfig c;
  try {
    c.map = j.at("map").get<std::string>();
    c.rounds = j.at("rounds").get<int>();
    c.ct_count = j.at("ct_count").get<std::size_t>();
    c.t_count = j.at("t_count").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.ct = ControllerSpec::parse(j.at("ct").get<std::string>());
    c.t = ControllerSpec::parse(j.at("t").get<std::string>());
    c.package_dir = j.value("package_dir", std::string());
    c.rules.round_ticks = j.value("round_ticks", c.rules.round_ticks);
    c.rules.buy_ticks = j.value("buy_ticks", c.rules.buy_ticks);
    c.runtime.reason_every_ticks = j.value("reason_every_ticks", c.runtime.reason_every_ticks);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad match config: ") + e.what());
  }
  return c;
}

std::shared_ptr<const sim::MapDefinition> resolve_map(const std::string& name_or_path) {
  fs::path path = name_or_path;
  if (path.extension().empty() && !path.has_parent_path())
    path = fs::path(LPBOT_DATA_DIR) / "maps" / (name_or_path + ".json");
  try {
    return std::make_shared<const sim::MapDefinition>(sim::load_map(path.string()));
  } catch (const sim::MapError& e) {
    throw ConfigError(e.what());
  }
}

namespace {

std::string bot_label(const sim::World& w, sim::BotId id) { return id == sim::no_bot ? "-" : w.bot(id).name; }

void install_controllers(agent::AgentRuntime& rt, const MatchConfig& config, const ControllerSpec& spec,
                         sim::Team team) {
  const sim::World& world = rt.world();
  std::vector<sim::BotId> bots;
  for (const auto& b : world.bots())
    if (b.team == team) bots.push_back(b.id);
  if (spec.kind == ControllerSpec::Kind::native) {
    for (auto id : bots) rt.set_controller(id, std::make_shared<agent::NativeBaselineController>(id));
    return;
  }
  const fs::path dir = config.packages();
  auto names = spec.default_stack ? default_packages(world.map().name(), dir) : spec.packages;
  std::vector<rules::RulePackage> stack;
  try {
    stack = rules::load_stack(dir, names);
  } catch (const rules::PackageError& e) {
    throw ConfigError(e.what());
  }
  auto report = rules::validate_stack(stack, agent::host_catalog());
  if (!report.ok()) throw ConfigError("package stack " + spec.str() + " does not validate:\n" + report.str());
  auto board = std::make_shared<agent::TeamBlackboard>();
  try {
    for (auto id : bots) rt.set_controller(id, std::make_shared<agent::ScriptedMind>(rt, id, board, stack));
  } catch (const logic::EngineError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

MatchResult run_match(const MatchConfig& config) {
  if (config.rounds < 1) throw ConfigError("rounds must be at least 1");
  if (config.ct_count + config.t_count == 0) throw ConfigError("no bots");
  auto map = resolve_map(config.map);
  sim::World world(map, config.rules, config.ct_count, config.t_count, config.seed);
  agent::AgentRuntime rt(world, config.runtime);
  install_controllers(rt, config, config.ct, sim::Team::ct);
  install_controllers(rt, config, config.t, sim::Team::t);

  MatchResult result;
  std::size_t flushed = 0;
  auto flush_lifecycle = [&] {
    const auto& log = rt.lifecycle();
    for (; flushed < log.size(); ++flushed) {
      const auto& e = log[flushed];
      result.trace.push_back(std::to_string(e.tick) + ";" + e.bot_name + ";" + agent::to_string(e.kind) + ";" +
                             e.action_text);
      result.lifecycle.push_back(e.str());
    }
  };

  for (int r = 0; r < config.rounds; ++r) {
    world.start_round();
    rt.begin_round();
    const std::int64_t first_tick = world.global_tick();
    while (true) {
      agent::TickTiming timing;
      auto events = rt.tick(config.perf ? &timing : nullptr);
      if (config.perf) result.timings.push_back(timing);
      flush_lifecycle();
      for (const auto& e : events)
        result.trace.push_back(std::to_string(e.tick) + ";" + bot_label(world, e.bot) + ";" + e.type + ";" + e.payload);
      if (auto outcome = world.check_win()) {
        rt.end_round();
        flush_lifecycle();
        world.award_round(*outcome);
        RoundRecord rec;
        rec.round = r + 1;
        rec.outcome = *outcome;
        rec.ticks = world.global_tick() - first_tick;
        rec.ct_alive = world.alive_count(sim::Team::ct);
        rec.t_alive = world.alive_count(sim::Team::t);
        rec.hostages_rescued = world.hostages_rescued();
        result.rounds.push_back(rec);
        auto& c = result.counts;
        if (outcome->winner == sim::Team::ct) {
          ++c.ct_wins;
          c.ct_goal_wins += outcome->goal_fulfilled;
        } else {
          ++c.t_wins;
          c.t_goal_wins += outcome->goal_fulfilled;
        }
        result.trace.push_back(std::to_string(world.global_tick()) + ";-;round_end;round=" + std::to_string(r + 1) +
                               " winner=" + sim::to_string(outcome->winner) + " cause=" +
                               sim::to_string(outcome->cause) + " goal=" + (outcome->goal_fulfilled ? "1" : "0"));
        break;
      }
    }
  }
  result.diagnostics = rt.diagnostics();
  return result;
}

void write_trace(const fs::path& path, const MatchConfig& config, const MatchResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << trace_magic << "\n# config " << config.to_json().dump() << "\n";
  for (const auto& line : result.trace) out << line << "\n";
}

ReplayResult replay(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::string magic, config_line;
  std::getline(in, magic);
  if (magic != trace_magic)
    throw ConfigError("unsupported trace version: first line is '" + magic + "', expected '" +
                      std::string(trace_magic) + "'");
  std::getline(in, config_line);
  constexpr std::string_view prefix = "# config ";
  if (config_line.rfind(prefix, 0) != 0) throw ConfigError("trace lacks its config line");
  MatchConfig config;
  try {
    config = MatchConfig::from_json(json::parse(config_line.substr(prefix.size())));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config line: ") + e.what());
  }
  std::vector<std::string> recorded;
  for (std::string line; std::getline(in, line);) recorded.push_back(line);

  config.perf = false;
  MatchResult rerun = run_match(config);
  ReplayResult r;
  const std::size_t n = std::max(recorded.size(), rerun.trace.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::string* want = i < recorded.size() ? &recorded[i] : nullptr;
    const std::string* got = i < rerun.trace.size() ? &rerun.trace[i] : nullptr;
    if (want && got && *want == *got) continue;
    r.line = i + 3;
    r.expected = want ? *want : "<end of trace>";
    r.actual = got ? *got : "<end of trace>";
    const std::string& probe = want ? *want : *got;
    try {
      r.tick = std::stoll(probe.substr(0, probe.find(';')));
    } catch (const std::logic_error&) {
      r.tick = -1;
    }
    r.message = "divergence at line " + std::to_string(r.line) + " (tick " + std::to_string(r.tick) + ")";
    return r;
  }
  r.clean = true;
  r.message = "clean: " + std::to_string(recorded.size()) + " events reproduced";
  return r;
}

}  // namespace lpbot::harness
