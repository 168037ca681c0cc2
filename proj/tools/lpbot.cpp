#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lpbot/agent/scripted.hpp"
#include "lpbot/harness/experiment.hpp"
#include "lpbot/harness/match.hpp"
#include "lpbot/logic/errors.hpp"
#include "lpbot/logic/parser.hpp"
#include "lpbot/logic/solve.hpp"
#include "lpbot/rules/package.hpp"

namespace fs = std::filesystem;
using namespace lpbot;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_invalid = 1;
constexpr int exit_runtime = 2;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw harness::ConfigError("cannot write " + path.string());
  out << text;
}

struct CommonOptions {
  std::string map = "warehouse";
  int rounds = 12;
  int matches = 1;
  std::uint64_t seed = 1;
  std::size_t ct_count = 5;
  std::size_t t_count = 5;
  std::string package_dir;
  std::string out;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--map", o.map, "Fixture name or map file")->capture_default_str();
  app->add_option("--rounds", o.rounds, "Rounds per match")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--matches", o.matches, "Matches")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--seed", o.seed, "Base seed")->capture_default_str();
  app->add_option("--ct-count", o.ct_count, "Counter-terrorist bots")->capture_default_str();
  app->add_option("--t-count", o.t_count, "Terrorist bots")->capture_default_str();
  app->add_option("--packages", o.package_dir, "Rule package directory");
  app->add_option("--out", o.out, "Output directory");
}

harness::MatchConfig base_config(const CommonOptions& o) {
  harness::MatchConfig c;
  c.map = o.map;
  c.rounds = o.rounds;
  c.seed = o.seed;
  c.ct_count = o.ct_count;
  c.t_count = o.t_count;
  c.package_dir = o.package_dir;
  return c;
}

fs::path out_dir(const CommonOptions& o) {
  fs::path dir = o.out;
  fs::create_directories(dir);
  return dir;
}

int cmd_run(const CommonOptions& o, const std::string& ct, const std::string& t, bool perf) {
  harness::MatchConfig c = base_config(o);
  c.ct = harness::ControllerSpec::parse(ct);
  c.t = harness::ControllerSpec::parse(t);
  std::cout << "match,seed,ct_wins,t_wins,ct_goal_wins,t_goal_wins\n";
  for (int m = 0; m < o.matches; ++m) {
    harness::MatchConfig mc = c;
    mc.seed = c.seed + static_cast<std::uint64_t>(m);
    auto result = harness::run_match(mc);
    const auto& k = result.counts;
    std::cout << m << "," << mc.seed << "," << k.ct_wins << "," << k.t_wins << "," << k.ct_goal_wins << ","
              << k.t_goal_wins << "\n";
    for (const auto& d : result.diagnostics) std::cerr << d << "\n";
    if (!o.out.empty()) {
      fs::path dir = out_dir(o);
      harness::write_trace(dir / ("trace_" + std::to_string(m) + ".txt"), mc, result);
      std::string lifecycle;
      for (const auto& line : result.lifecycle) lifecycle += line + "\n";
      write_file(dir / ("actions_" + std::to_string(m) + ".log"), lifecycle);
    }
  }
  if (perf) {
    auto report = harness::measure_performance(c);
    std::cout << report.str();
    if (!o.out.empty()) write_file(out_dir(o) / "perf.json", report.to_json().dump(2) + "\n");
  }
  return exit_ok;
}

int cmd_experiment(CommonOptions o, bool matches_given) {
  harness::ExperimentConfig e;
  e.base = base_config(o);
  e.matches = matches_given ? o.matches : 10;
  auto report = harness::run_experiment(e);
  std::cout << report.total_table() << "\n" << report.goal_table() << "\n" << report.csv();
  if (!o.out.empty()) {
    fs::path dir = out_dir(o);
    write_file(dir / "tables.txt", report.total_table() + "\n" + report.goal_table());
    write_file(dir / "raw_counts.csv", report.csv());
    write_file(dir / "report.json", report.to_json().dump(2) + "\n");
  }
  return exit_ok;
}

int cmd_replay(const std::string& path) {
  auto r = harness::replay(path);
  std::cout << r.message << "\n";
  if (!r.clean) {
    std::cout << "  recorded: " << r.expected << "\n  replayed: " << r.actual << "\n";
    return exit_invalid;
  }
  return exit_ok;
}

int cmd_validate(const std::string& manifest, const std::vector<std::string>& earlier, bool earlier_given) {
  rules::RulePackage pkg;
  try {
    pkg = rules::load_package(manifest);
  } catch (const rules::PackageError& e) {
    std::cout << "error: " << e.what() << "\n";
    return exit_invalid;
  }
  auto names = earlier_given ? earlier : pkg.manifest.requires_packages;
  std::vector<rules::RulePackage> stack;
  try {
    stack = rules::load_stack(pkg.manifest.dir, names);
  } catch (const rules::PackageError& e) {
    std::cout << "error: " << e.what() << "\n";
    return exit_invalid;
  }
  stack.push_back(std::move(pkg));
  auto report = rules::validate_stack(stack, agent::host_catalog());
  std::cout << report.str();
  return report.ok() ? exit_ok : exit_invalid;
}

int cmd_repl(const CommonOptions& o, const std::string& controller) {
  harness::MatchConfig c = base_config(o);
  auto spec = harness::ControllerSpec::parse(controller);
  auto map = harness::resolve_map(c.map);
  sim::World world(map, c.rules, c.ct_count, c.t_count, c.seed);
  world.start_round();
  agent::AgentRuntime rt(world);
  fs::path dir = c.packages();
  auto names = spec.default_stack ? harness::default_packages(map->name(), dir) : spec.packages;
  auto stack = rules::load_stack(dir, names);
  auto mind = std::make_shared<agent::ScriptedMind>(rt, 0, nullptr, stack);
  rt.set_controller(0, mind);
  std::cout << "% " << world.bot(0).name << " on " << map->name() << "; one query per line\n";
  std::string line;
  while (std::cout << "?- " << std::flush, std::getline(std::cin, line)) {
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line == "halt." || line == "halt") break;
    try {
      auto parsed = logic::parse_term(line);
      logic::SolutionStream stream(mind->kb(), parsed.term);
      bool stopped = false;
      while (auto s = stream.next()) {
        std::cout << s->str() << " " << std::flush;
        std::string reply;
        if (!std::getline(std::cin, reply) || reply.find(';') == std::string::npos) {
          std::cout << ".\n";
          stopped = true;
          break;
        }
      }
      if (!stopped) std::cout << "false.\n";
    } catch (const logic::EngineError& e) {
      std::cout << e.what() << "\n";
    }
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logic-programmed bots for a hostage-rescue shooter simulation"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  std::string run_ct = "native", run_t = "native";
  bool run_perf = false;
  auto* run = app.add_subcommand("run", "Play seeded matches");
  add_common(run, run_opts);
  run->add_option("--ct", run_ct, "native | scripted | scripted:PKG,...")->capture_default_str();
  run->add_option("--t", run_t, "native | scripted | scripted:PKG,...")->capture_default_str();
  run->add_flag("--perf", run_perf, "Also measure reasoning time against a native-only run");

  CommonOptions exp_opts;
  std::string matrix = "default";
  auto* exp = app.add_subcommand("experiment", "Four-pairing experiment matrix");
  add_common(exp, exp_opts);
  exp->add_option("--matrix", matrix, "Pairing matrix")->check(CLI::IsMember({"default"}))->capture_default_str();

  std::string trace_path;
  auto* rep = app.add_subcommand("replay", "Re-run a trace file and report the first divergence");
  rep->add_option("trace", trace_path, "Trace file")->required();

  std::string manifest;
  std::vector<std::string> earlier;
  auto* val = app.add_subcommand("validate", "Check a rule package against the packages loaded before it");
  val->add_option("manifest", manifest, "Package manifest (.json)")->required();
  auto* earlier_opt =
      val->add_option("--after", earlier, "Packages loaded before it (default: its requires list)")->expected(0, -1);

  CommonOptions repl_opts;
  std::string repl_controller = "scripted";
  auto* repl = app.add_subcommand("repl", "Query a bot's knowledge base interactively");
  add_common(repl, repl_opts);
  repl->add_option("--stack", repl_controller, "scripted | scripted:PKG,...")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? exit_ok : exit_invalid;
  }

  try {
    if (*run) return cmd_run(run_opts, run_ct, run_t, run_perf);
    if (*exp) return cmd_experiment(exp_opts, exp->count("--matches") > 0);
    if (*rep) return cmd_replay(trace_path);
    if (*val) return cmd_validate(manifest, earlier, earlier_opt->count() > 0);
    if (*repl) return cmd_repl(repl_opts, repl_controller);
  } catch (const harness::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_invalid;
  } catch (const rules::PackageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_invalid;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return exit_runtime;
  }
  return exit_ok;
}
