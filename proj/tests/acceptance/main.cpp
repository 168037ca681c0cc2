// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "lpbot/agent/native_baseline.hpp"
#include "lpbot/agent/scripted.hpp"
#include "lpbot/harness/experiment.hpp"
#include "lpbot/harness/match.hpp"
#include "lpbot/logic/solve.hpp"
#include "lpbot/rules/package.hpp"
#include "support/conformance_cases.hpp"
#include "support/graph_oracle.hpp"
#include "support/motivation_property.hpp"

using namespace lpbot;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

rules::RulePackage probe_package(const std::string& src, std::vector<std::string> dynamic = {}) {
  rules::RulePackage p;
  p.manifest.name = "probe";
  for (const auto& d : dynamic) p.manifest.dynamic.push_back(rules::parse_indicator(d));
  p.clauses = logic::parse_program(src);
  return p;
}

// ---------------------------------------------------------------- 1

Verdict conformance() {
  auto cases = testing::conformance_cases();
  auto t0 = Clock::now();
  std::size_t failed = 0;
  std::string first;
  for (const auto& c : cases) {
    auto why = testing::run_conformance_case(c);
    if (!why.empty()) {
      if (!failed) first = c.name + ": " + why;
      ++failed;
    }
  }
  double s = seconds_since(t0);
  std::string d = std::to_string(cases.size()) + " cases, " + std::to_string(failed) + " failed, " + fmt("%.3f s", s);
  if (!first.empty()) d += "; first: " + first;
  return {cases.size() >= 40 && failed == 0 && s < 5.0, d};
}

// ---------------------------------------------------------------- 2

Verdict baseline_equivalence() {
  harness::MatchConfig c;
  c.rounds = 20;
  c.seed = 7;
  auto native = harness::run_match(c);
  c.ct = c.t = harness::ControllerSpec::parse("scripted:baseline");
  auto scripted = harness::run_match(c);
  std::string a, b;
  for (const auto& l : native.lifecycle) a += l + "\n";
  for (const auto& l : scripted.lifecycle) b += l + "\n";
  std::size_t at = 0;
  while (at < a.size() && at < b.size() && a[at] == b[at]) ++at;
  std::string d = std::to_string(native.lifecycle.size()) + " lifecycle lines over 20 rounds";
  if (a != b) d += ", first byte difference at offset " + std::to_string(at);
  if (native.trace != scripted.trace) d += ", full event traces differ";
  if (!scripted.diagnostics.empty()) d += ", diagnostics: " + scripted.diagnostics[0];
  return {a == b && !a.empty() && native.trace == scripted.trace && scripted.diagnostics.empty(), d};
}

// ---------------------------------------------------------------- 3

Verdict motivation() {
  testing::MotivationStats stats;
  auto why = testing::run_motivation_cases(31337, 1000, stats);
  std::string d = std::to_string(stats.cases) + " cases, " + std::to_string(stats.interrupts) + " motivation interrupts, " +
                  std::to_string(stats.completions) + " completions";
  if (!why.empty()) d += "; " + why;
  return {why.empty() && stats.cases >= 1000 && stats.interrupts > 0, d};
}

// ---------------------------------------------------------------- 4

Verdict continuations() {
  std::string problems;
  int runs_checked = 0;
  {
    sim::GameRules rules;
    rules.buy_ticks = 0;
    sim::World world(harness::resolve_map("warehouse"), rules, 1, 0, 1);
    world.start_round();
    agent::AgentRuntime rt(world);
    auto mind = std::make_shared<agent::ScriptedMind>(rt, 0, nullptr,
                                                      std::vector{probe_package("do_reasoning(_) :- fail.")});
    rt.set_controller(0, mind);
    rt.begin_round();
    logic::query_holds(mind->kb(), "action_goto(ct1, office, andThen(action_liberate_hostages(ct1)))");
    for (int k = 0; k < 300 && rt.active_action(0); ++k) rt.tick();
    const auto& log = rt.lifecycle();
    std::vector<std::string> shape;
    for (const auto& e : log) shape.push_back(std::string(agent::to_string(e.kind)) + " " + e.action_text);
    const std::vector<std::string> want = {"started goto(office)", "completed goto(office)",
                                           "started liberate_hostages()", "completed liberate_hostages()"};
    if (shape != want) problems += " goto-then-liberate lifecycle differs;";
    else {
      if (rt.continuation_runs(log[0].action) != 1) problems += " goto continuation count;";
      if (rt.continuation_runs(log[2].action) != 0) problems += " liberate continuation count;";
      if (log[2].tick != log[1].tick) problems += " liberate did not start in the completion tick;";
      runs_checked += 2;
    }
  }
  {
    auto map = std::make_shared<const sim::MapDefinition>(testing::make_map(
        {{"a", 0, 0, {"spawn_ct", "rescue_zone"}}, {"b", 250, 0, {}}, {"c", 500, 0, {}},
         {"d", 750, 0, {"spawn_t", "hostage_point"}}},
        {{0, 1, 250}, {1, 2, 250}, {2, 3, 250}}));
    sim::GameRules rules;
    rules.buy_ticks = 0;
    sim::World world(map, rules, 1, 0, 1);
    world.start_round();
    agent::AgentRuntime rt(world);
    auto mind = std::make_shared<agent::ScriptedMind>(
        rt, 0, nullptr, std::vector{probe_package("do_reasoning(_) :- fail.", {"chain_done/0"})});
    rt.set_controller(0, mind);
    rt.begin_round();
    logic::query_holds(mind->kb(),
                       "action_goto(ct1, b, andThen(action_goto(ct1, c, andThen(action_goto(ct1, d, "
                       "andThen(assert(chain_done)))))))");
    for (int k = 0; k < 100 && rt.active_action(0); ++k) rt.tick();
    std::vector<agent::ActionId> completed;
    for (const auto& e : rt.lifecycle())
      if (e.kind == agent::LifecycleKind::completed) completed.push_back(e.action);
    if (completed.size() != 3) problems += " chain completed " + std::to_string(completed.size()) + " links;";
    for (auto id : completed) {
      if (rt.continuation_runs(id) != 1) problems += " chain link continuation count;";
      ++runs_checked;
    }
    if (logic::query_all(mind->kb(), "chain_done").size() != 1) problems += " final continuation count;";
  }
  return {problems.empty(), std::to_string(runs_checked) + " continuation counts checked" +
                                (problems.empty() ? "" : ";" + problems)};
}

// ---------------------------------------------------------------- 5

struct HandTrace {
  std::string name;
  std::size_t ct, t;
  std::vector<std::pair<std::int64_t, std::string>> events;  // round tick, "kill <bot>" / "rescue <index>"
  sim::Team winner;
  sim::WinCause cause;
  bool goal;
  std::int64_t end_tick;
};

std::vector<HandTrace> hand_traces() {
  using sim::Team;
  using sim::WinCause;
  auto kills = [](std::int64_t tick, const std::string& prefix, int from, int to) {
    std::vector<std::pair<std::int64_t, std::string>> out;
    for (int i = from; i <= to; ++i) out.emplace_back(tick, "kill " + prefix + std::to_string(i));
    return out;
  };
  auto join = [](std::initializer_list<std::vector<std::pair<std::int64_t, std::string>>> parts) {
    std::vector<std::pair<std::int64_t, std::string>> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
  };
  std::vector<std::pair<std::int64_t, std::string>> staggered_t;
  for (int i = 1; i <= 5; ++i) staggered_t.emplace_back(40 + 10 * i, "kill t" + std::to_string(i));
  return {
      {"both hostages out, Ts alive", 5, 5, {{100, "rescue 0"}, {100, "rescue 1"}}, Team::ct, WinCause::hostages_rescued, true, 100},
      {"Ts picked off one by one", 5, 5, staggered_t, Team::ct, WinCause::team_eliminated_t, false, 90},
      {"CT wipe", 5, 5, kills(40, "ct", 1, 5), Team::t, WinCause::team_eliminated_ct, false, 40},
      {"nobody moves", 5, 5, {}, Team::t, WinCause::time_expired, true, 360},
      {"rescue in the tick the last T dies", 5, 5, join({kills(30, "t", 1, 5), {{30, "rescue 0"}, {30, "rescue 1"}}}),
       Team::ct, WinCause::hostages_rescued, false, 30},
      {"one hostage short", 5, 5, {{50, "rescue 0"}}, Team::t, WinCause::time_expired, true, 360},
      {"rescue with one T left", 5, 5, join({kills(100, "t", 1, 4), {{200, "rescue 0"}, {200, "rescue 1"}}}), Team::ct,
       WinCause::hostages_rescued, true, 200},
      {"last CT hides out the clock", 5, 5, kills(100, "ct", 1, 4), Team::t, WinCause::time_expired, true, 360},
      {"duel lost by the CT", 1, 1, {{10, "kill ct1"}}, Team::t, WinCause::team_eliminated_ct, false, 10},
      {"duel won in the buy phase", 1, 1, {{0, "kill t1"}}, Team::ct, WinCause::team_eliminated_t, false, 0},
      {"no terrorists, no rescue", 5, 0, {}, Team::t, WinCause::time_expired, true, 360},
      {"no terrorists, rescue", 5, 0, {{120, "rescue 0"}, {120, "rescue 1"}}, Team::ct, WinCause::hostages_rescued,
       false, 120},
      {"CT wipe one tick before time", 5, 5, kills(359, "ct", 1, 5), Team::t, WinCause::team_eliminated_ct, false, 359},
      {"CT wipe on the final tick", 5, 5, kills(360, "ct", 1, 5), Team::t, WinCause::team_eliminated_ct, false, 360},
      {"T wipe on the final tick", 5, 5, kills(360, "t", 1, 5), Team::ct, WinCause::team_eliminated_t, false, 360},
      {"rescue on the final tick", 5, 5, {{360, "rescue 0"}, {360, "rescue 1"}}, Team::ct, WinCause::hostages_rescued,
       true, 360},
      {"hostages out far apart", 5, 5, {{10, "rescue 0"}, {300, "rescue 1"}}, Team::ct, WinCause::hostages_rescued,
       true, 300},
      {"mutual wipe", 5, 5, join({kills(70, "t", 1, 5), kills(70, "ct", 1, 5)}), Team::ct,
       WinCause::team_eliminated_t, false, 70},
      {"3v2 attrition", 3, 2, {{20, "kill t1"}, {25, "kill ct1"}, {25, "kill ct2"}, {200, "kill ct3"}}, Team::t,
       WinCause::team_eliminated_ct, false, 200},
      {"2v3 late comeback", 2, 3, join({{{5, "kill ct1"}}, kills(330, "t", 1, 3)}), Team::ct,
       WinCause::team_eliminated_t, false, 330},
  };
}

Verdict round_classification() {
  const auto map = harness::resolve_map("warehouse");
  std::map<sim::WinCause, int> causes;
  int agree = 0;
  int wins[2] = {0, 0}, goals[2] = {0, 0};
  std::string problems;
  for (const auto& h : hand_traces()) {
    sim::World world(map, sim::GameRules{}, h.ct, h.t, 1);
    world.start_round();
    std::optional<sim::RoundOutcome> o;
    std::int64_t end = -1;
    for (std::int64_t k = 0; k <= world.rules().round_ticks + 1; ++k) {
      for (const auto& [tick, ev] : h.events) {
        if (tick != world.round_tick()) continue;
        std::istringstream in(ev);
        std::string verb, arg;
        in >> verb >> arg;
        if (verb == "kill") {
          for (const auto& b : world.bots())
            if (b.name == arg) world.mutable_bot(b.id).health = 0;
        } else {
          world.mutable_hostages().at(std::stoul(arg)).rescued = true;
        }
      }
      if ((o = world.check_win())) {
        end = world.round_tick();
        break;
      }
      world.step(std::vector<sim::Intent>(world.bots().size()));
    }
    ++causes[h.cause];
    wins[h.winner == sim::Team::t] += 1;
    goals[h.winner == sim::Team::t] += h.goal;
    if (o && o->winner == h.winner && o->cause == h.cause && o->goal_fulfilled == h.goal && end == h.end_tick)
      ++agree;
    else
      problems += " '" + h.name + "'";
  }
  // The same inequality over real matches of every pairing.
  for (const auto& p : harness::default_matrix()) {
    harness::MatchConfig c;
    c.ct = p.ct;
    c.t = p.t;
    auto k = harness::run_match(c).counts;
    if (k.ct_goal_wins > k.ct_wins || k.t_goal_wins > k.t_wins) problems += " goal>total for " + p.label();
  }
  bool subset = goals[0] <= wins[0] && goals[1] <= wins[1];
  std::string d = std::to_string(agree) + "/20 traces agree, " + std::to_string(causes.size()) +
                  " causes covered, CT goal/total " + std::to_string(goals[0]) + "/" + std::to_string(wins[0]) +
                  ", T goal/total " + std::to_string(goals[1]) + "/" + std::to_string(wins[1]);
  if (!problems.empty()) d += "; mismatched:" + problems;
  return {agree == 20 && causes.size() == 4 && subset && problems.empty(), d};
}

// ---------------------------------------------------------------- 6

Verdict experiment() {
  auto t0 = Clock::now();
  harness::ExperimentConfig e;
  auto render = [](const harness::ExperimentReport& r) { return r.total_table() + "\n" + r.goal_table() + "\n" + r.csv(); };
  auto first = harness::run_experiment(e);
  auto second = harness::run_experiment(e);
  double s = seconds_since(t0);
  const std::string a = render(first), b = render(second);

  bool format = first.rows.size() == 4 && first.matches == 10;
  const std::regex row(R"((native|scripted) +(native|scripted) +\d+\.\d +\d+\.\d)");
  for (const auto& table : {first.total_table(), first.goal_table()}) {
    std::istringstream in(table);
    std::string title, header, l;
    std::getline(in, title);
    std::getline(in, header);
    format = format && title.find("10 matches average") != std::string::npos && header.find("CTs AI") == 0;
    int rows = 0;
    while (std::getline(in, l)) rows += std::regex_match(l, row);
    format = format && rows == 4;
  }
  std::printf("%s\n%s\n", first.total_table().c_str(), first.goal_table().c_str());
  return {format && a == b && s < 120.0,
          "4 pairings x 10 matches, two runs " + std::string(a == b ? "byte-identical" : "DIFFER") + ", layout " +
              (format ? "ok" : "wrong") + ", " + fmt("%.1f s for both", s)};
}

// ---------------------------------------------------------------- 7

Verdict voting() {
  auto stack = rules::load_stack(rules::default_package_dir(), {"baseline", "cs_rules", "warehouse_tactics"});
  std::map<std::string, int> tally;
  for (const auto& c : stack.back().clauses)
    if (c.head.is_functor("preference", 2)) ++tally[logic::to_string(c.head.arg(1))];
  std::string plurality;
  int best = -1;
  for (const auto& [t, n] : tally)
    if (n > best) plurality = t, best = n;

  auto run = [](std::size_t cts, std::uint64_t seed, const std::vector<rules::RulePackage>& s) {
    sim::World world(harness::resolve_map("warehouse"), sim::GameRules{}, cts, 5, seed);
    agent::AgentRuntime rt(world);
    auto board = std::make_shared<agent::TeamBlackboard>();
    std::vector<std::shared_ptr<agent::ScriptedMind>> minds;
    for (const auto& b : world.bots()) {
      if (b.team == sim::Team::ct) {
        minds.push_back(std::make_shared<agent::ScriptedMind>(rt, b.id, board, s));
        rt.set_controller(b.id, minds.back());
      } else {
        rt.set_controller(b.id, std::make_shared<agent::NativeBaselineController>(b.id));
      }
    }
    world.start_round();
    rt.begin_round();
    while (world.phase() == sim::Phase::buy) rt.tick();
    std::set<std::string> committed;
    for (auto& m : minds) {
      auto sol = logic::query_all(m->kb(), "committed_tactic(T)");
      committed.insert(sol.size() == 1 ? logic::to_string(sol[0].at("T")) : "<none>");
    }
    return committed;
  };

  int converged = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) converged += run(5, seed, stack) == std::set<std::string>{plurality};

  auto tie_stack = stack;
  auto& clauses = tie_stack.back().clauses;
  std::erase_if(clauses, [](const logic::Clause& c) { return c.head.is_functor("preference", 2); });
  auto prefs = logic::parse_program("preference(ct1, rush). preference(ct2, flank). preference(ct3, rush). preference(ct4, flank).");
  clauses.insert(clauses.begin(), prefs.begin(), prefs.end());
  auto tie = run(4, 1, tie_stack);
  bool tie_ok = tie == std::set<std::string>{"flank"};
  return {converged == 50 && tie_ok, std::to_string(converged) + "/50 seeds commit to '" + plurality +
                                         "' within the buy phase; 2-2 tie resolves to '" + *tie.begin() + "'"};
}

// ---------------------------------------------------------------- 8

Verdict shortest_paths() {
  std::mt19937_64 rng(8);
  int graphs = 0;
  std::string problem;
  for (int g = 0; g < 200 && problem.empty(); ++g) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(2, 50)(rng);
    auto m = testing::random_graph(rng, n, 30, g % 2 == 1);
    problem = testing::compare_with_floyd_warshall(m);
    if (problem.empty()) ++graphs;
  }
  int fixtures = 0;
  for (const char* name : {"warehouse", "airplane"}) {
    if (!problem.empty()) break;
    problem = testing::compare_with_floyd_warshall(*harness::resolve_map(name));
    if (problem.empty()) ++fixtures;
  }
  return {graphs == 200 && fixtures == 2 && problem.empty(),
          std::to_string(graphs) + "/200 random graphs and " + std::to_string(fixtures) + "/2 fixtures agree" +
              (problem.empty() ? "" : "; " + problem)};
}

// ---------------------------------------------------------------- 9

Verdict rifle_accuracy() {
  sim::GameRules rules;
  rules.buy_ticks = 0;
  sim::World world(harness::resolve_map("warehouse"), rules, 1, 1, 2024);
  world.start_round();
  auto& shooter = world.mutable_bot(0);
  auto& target = world.mutable_bot(1);
  target.at = target.to = shooter.at;
  shooter.weapon = sim::Weapon::rifle;
  int hits = 0, shots = 0;
  for (; shots < 10000; ++shots) {
    world.mutable_bot(0).ammo = 1;
    world.mutable_bot(1).health = 100;
    auto e = world.resolve_attack(0, 1);
    if (e.type != "shot") break;
    hits += e.payload.find("hit=1") != std::string::npos;
  }
  double rate = static_cast<double>(hits) / 10000.0;
  return {shots == 10000 && rate >= 0.78 && rate <= 0.82,
          std::to_string(hits) + "/" + std::to_string(shots) + " hits, rate " + fmt("%.4f", rate)};
}

// ---------------------------------------------------------------- 10

Verdict performance() {
  harness::MatchConfig c;
  c.ct_count = 7;
  c.t_count = 7;
  c.ct = c.t = harness::ControllerSpec::parse("scripted");
  auto r = harness::measure_performance(c);
  std::printf("%s", r.str().c_str());
  return {r.median_reasoning_ms < 5.0 && r.reasoning_share > 0.0 && !r.samples.empty(),
          "14 scripted bots, median reasoning " + fmt("%.4f ms/tick", r.median_reasoning_ms) + ", share " +
              fmt("%.3f", r.reasoning_share) + ", native delta " + fmt("%+.2f", r.native_delta)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"C1 interpreter conformance", conformance},
      {"C2 scripted baseline equals native FSM", baseline_equivalence},
      {"C3 motivation interrupts within one tick", motivation},
      {"C4 continuations run exactly once", continuations},
      {"C5 round classification", round_classification},
      {"C6 experiment tables", experiment},
      {"C7 team voting", voting},
      {"C8 shortest paths", shortest_paths},
      {"C9 rifle accuracy at point blank", rifle_accuracy},
      {"C10 reasoning cost", performance},
  };
  int failures = 0;
  std::vector<std::string> lines;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    lines.push_back(std::string(v.pass ? "PASS" : "FAIL") + " " + name + ": " + v.detail);
    std::printf("%s\n", lines.back().c_str());
    std::fflush(stdout);
  }
  std::printf("\nsummary\n");
  for (const auto& l : lines) std::printf("%s\n", l.c_str());
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
