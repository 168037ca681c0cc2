#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "lpbot/harness/experiment.hpp"
#include "lpbot/harness/match.hpp"
#include "lpbot/rules/package.hpp"

using namespace lpbot;
using harness::ControllerSpec;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "lpbot_harness_test";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

void write_lines(const fs::path& p, const std::vector<std::string>& lines) {
  std::ofstream out(p, std::ios::binary);
  for (const auto& l : lines) out << l << "\n";
}

}  // namespace

TEST(ControllerSpec, ParsesAllForms) {
  EXPECT_EQ(ControllerSpec::parse("native").kind, ControllerSpec::Kind::native);
  auto d = ControllerSpec::parse("scripted");
  EXPECT_TRUE(d.default_stack);
  auto s = ControllerSpec::parse("scripted:baseline,cs_rules");
  EXPECT_FALSE(s.default_stack);
  EXPECT_EQ(s.packages, (std::vector<std::string>{"baseline", "cs_rules"}));
  EXPECT_EQ(s.str(), "scripted:baseline,cs_rules");
  EXPECT_TRUE(ControllerSpec::parse("scripted:").packages.empty());
  for (const char* bad : {"robot", "scripted:a,,b", "Native", ""})
    EXPECT_THROW(ControllerSpec::parse(bad), harness::ConfigError) << bad;
}

TEST(ControllerSpec, DefaultStackAddsMapTactics) {
  auto dir = rules::default_package_dir();
  EXPECT_EQ(harness::default_packages("warehouse", dir),
            (std::vector<std::string>{"baseline", "cs_rules", "warehouse_tactics"}));
  EXPECT_EQ(harness::default_packages("office", dir), (std::vector<std::string>{"baseline", "cs_rules"}));
}

TEST(Match, ConfigErrorsRaiseBeforeRoundOne) {
  harness::MatchConfig c;
  c.rounds = 0;
  EXPECT_THROW(harness::run_match(c), harness::ConfigError);
  c = {};
  c.map = "atlantis";
  EXPECT_THROW(harness::run_match(c), harness::ConfigError);
  c = {};
  c.ct = ControllerSpec::parse("scripted:nonexistent");
  EXPECT_THROW(harness::run_match(c), harness::ConfigError);
  c = {};
  c.ct = ControllerSpec::parse("scripted:warehouse_tactics");
  EXPECT_THROW(harness::run_match(c), harness::ConfigError);  // does not validate
  c = {};
  c.ct_count = c.t_count = 0;
  EXPECT_THROW(harness::run_match(c), harness::ConfigError);
}

TEST(Match, EmptyMindsLoseEveryRoundToNativeTs) {
  harness::MatchConfig c;
  c.ct = ControllerSpec::parse("scripted:");
  auto r = harness::run_match(c);
  EXPECT_EQ(r.counts.ct_wins, 0);
  EXPECT_EQ(r.counts.t_wins, 12);
  EXPECT_EQ(r.counts.ct_goal_wins, 0);
  EXPECT_EQ(r.counts.t_goal_wins, 12);
  // One missing-entry diagnostic per empty mind.
  EXPECT_EQ(r.diagnostics.size(), 5u);
}

TEST(Match, CountsAreConsistent) {
  for (const char* ct : {"native", "scripted"})
    for (const char* t : {"native", "scripted"})
      for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        harness::MatchConfig c;
        c.ct = ControllerSpec::parse(ct);
        c.t = ControllerSpec::parse(t);
        c.seed = seed;
        c.rounds = 6;
        auto r = harness::run_match(c);
        const auto& k = r.counts;
        ASSERT_EQ(k.ct_wins + k.t_wins, 6);
        ASSERT_LE(k.ct_goal_wins, k.ct_wins);
        ASSERT_LE(k.t_goal_wins, k.t_wins);
        ASSERT_EQ(r.rounds.size(), 6u);
        int ct = 0, ctg = 0, tg = 0;
        for (const auto& rr : r.rounds) {
          ct += rr.outcome.winner == sim::Team::ct;
          ctg += rr.outcome.winner == sim::Team::ct && rr.outcome.goal_fulfilled;
          tg += rr.outcome.winner == sim::Team::t && rr.outcome.goal_fulfilled;
        }
        ASSERT_EQ(ct, k.ct_wins);
        ASSERT_EQ(ctg, k.ct_goal_wins);
        ASSERT_EQ(tg, k.t_goal_wins);
      }
}

TEST(Match, SameConfigSameTrace) {
  harness::MatchConfig c;
  c.ct = ControllerSpec::parse("scripted");
  c.seed = 9;
  c.rounds = 4;
  auto a = harness::run_match(c);
  auto b = harness::run_match(c);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.lifecycle, b.lifecycle);
  EXPECT_EQ(a.counts, b.counts);
  c.seed = 10;
  EXPECT_NE(harness::run_match(c).trace, a.trace);
}

TEST(Match, LifecycleLinesHaveTheDocumentedShape) {
  harness::MatchConfig c;
  c.ct = ControllerSpec::parse("scripted");
  c.rounds = 2;
  auto r = harness::run_match(c);
  ASSERT_FALSE(r.lifecycle.empty());
  const std::regex shape(R"(tick=\d+ bot=(ct|t)\d+ event=(started|completed|failed|interrupted) action=[a-z_]+\(.*\))");
  for (const auto& l : r.lifecycle) ASSERT_TRUE(std::regex_match(l, shape)) << l;
}

TEST(Match, ConfigJsonRoundTrip) {
  harness::MatchConfig c;
  c.ct = ControllerSpec::parse("scripted:baseline");
  c.seed = 123;
  c.rounds = 3;
  c.rules.round_ticks = 200;
  auto back = harness::MatchConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_THROW(harness::MatchConfig::from_json(nlohmann::json{{"map", "warehouse"}}), harness::ConfigError);
}

TEST(Replay, CleanTraceReplaysClean) {
  harness::MatchConfig c;
  c.ct = ControllerSpec::parse("scripted");
  c.rounds = 3;
  c.seed = 5;
  auto p = scratch("clean.txt");
  harness::write_trace(p, c, harness::run_match(c));
  auto r = harness::replay(p);
  EXPECT_TRUE(r.clean) << r.message;
}

TEST(Replay, EditedLineIsLocated) {
  harness::MatchConfig c;
  c.rounds = 2;
  auto p = scratch("edited.txt");
  harness::write_trace(p, c, harness::run_match(c));
  auto lines = lines_of(p);
  ASSERT_GT(lines.size(), 40u);
  const std::size_t victim = 30;  // 0-based, so file line 31
  lines[victim] += "x";
  write_lines(p, lines);
  auto r = harness::replay(p);
  EXPECT_FALSE(r.clean);
  EXPECT_EQ(r.line, victim + 1);
  EXPECT_EQ(r.expected, lines[victim]);
  EXPECT_EQ(r.actual + "x", lines[victim]);
  EXPECT_EQ(r.tick, std::stoll(lines[victim].substr(0, lines[victim].find(';'))));
}

TEST(Replay, DifferentSeedDivergesAtFirstDifferingEvent) {
  harness::MatchConfig c;
  c.rounds = 2;
  c.seed = 1;
  auto recorded = harness::run_match(c);
  c.seed = 2;
  auto other = harness::run_match(c);
  auto p = scratch("seed.txt");
  // Header claims seed 2, events come from seed 1.
  harness::write_trace(p, c, recorded);
  auto r = harness::replay(p);
  ASSERT_FALSE(r.clean);
  std::size_t first = 0;
  while (first < recorded.trace.size() && first < other.trace.size() && recorded.trace[first] == other.trace[first])
    ++first;
  EXPECT_EQ(r.line, first + 3);
  EXPECT_EQ(r.expected, recorded.trace[first]);
  EXPECT_EQ(r.actual, other.trace[first]);
  // Movement is seed-free; the seed first shows up in combat.
  EXPECT_NE(recorded.trace[first].find(";shot;"), std::string::npos);
}

TEST(Replay, TruncatedTraceReportsEnd) {
  harness::MatchConfig c;
  c.rounds = 1;
  auto p = scratch("short.txt");
  harness::write_trace(p, c, harness::run_match(c));
  auto lines = lines_of(p);
  lines.resize(lines.size() - 3);
  write_lines(p, lines);
  auto r = harness::replay(p);
  EXPECT_FALSE(r.clean);
  EXPECT_EQ(r.line, lines.size() + 1);
  EXPECT_EQ(r.expected, "<end of trace>");
}

TEST(Replay, UnsupportedVersionIsRefused) {
  auto p = scratch("old.txt");
  write_lines(p, {"# lpbot-trace 0", "# config {}", "0;-;x;y"});
  try {
    harness::replay(p);
    FAIL();
  } catch (const harness::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("unsupported trace version"), std::string::npos);
  }
  EXPECT_THROW(harness::replay(scratch("does_not_exist.txt")), harness::ConfigError);
}

TEST(Experiment, SeedsAndShape) {
  harness::ExperimentConfig e;
  e.base.rounds = 2;
  e.base.seed = 100;
  e.matches = 3;
  auto rep = harness::run_experiment(e);
  ASSERT_EQ(rep.rows.size(), 4u);
  const std::vector<std::string> labels = {"(native,native)", "(scripted,native)", "(native,scripted)",
                                           "(scripted,scripted)"};
  for (std::size_t p = 0; p < 4; ++p) {
    EXPECT_EQ(rep.rows[p].pairing.label(), labels[p]);
    ASSERT_EQ(rep.rows[p].seeds, (std::vector<std::uint64_t>{100 + p, 101 + p, 102 + p}));
    // Row means equal the arithmetic mean of an independent re-run.
    double sum = 0;
    for (std::size_t m = 0; m < 3; ++m) {
      harness::MatchConfig c = e.base;
      c.ct = rep.rows[p].pairing.ct;
      c.t = rep.rows[p].pairing.t;
      c.seed = rep.rows[p].seeds[m];
      auto k = harness::run_match(c).counts;
      EXPECT_EQ(k, rep.rows[p].matches[m]);
      sum += k.ct_wins;
    }
    EXPECT_DOUBLE_EQ(rep.rows[p].mean_ct_wins(), sum / 3);
  }
}

TEST(Experiment, TablesHaveTheExpectedLayout) {
  harness::ExperimentConfig e;
  e.base.rounds = 2;
  e.matches = 2;
  auto rep = harness::run_experiment(e);
  auto total = rep.total_table();
  auto goal = rep.goal_table();
  EXPECT_EQ(total.rfind("Table 1. Total team victories, 2 matches average\n", 0), 0u) << total;
  EXPECT_EQ(goal.rfind("Table 2. Goal-fulfilled team victories, 2 matches average\n", 0), 0u) << goal;
  const std::regex row(R"((native|scripted) +(native|scripted) +\d+\.\d +\d+\.\d)");
  for (const auto* t : {&total, &goal}) {
    std::istringstream in(*t);
    std::string l;
    std::getline(in, l);
    std::getline(in, l);
    EXPECT_NE(l.find("CTs AI"), std::string::npos);
    EXPECT_NE(l.find("Ts wins"), std::string::npos);
    int rows = 0;
    while (std::getline(in, l)) {
      EXPECT_TRUE(std::regex_match(l, row)) << l;
      ++rows;
    }
    EXPECT_EQ(rows, 4);
  }
  auto csv = rep.csv();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 4 * 2);
  EXPECT_THROW(([] {
                 harness::ExperimentConfig bad;
                 bad.matches = 0;
                 harness::run_experiment(bad);
               }()),
               harness::ConfigError);
}

TEST(Perf, SummaryOracle) {
  using std::chrono::nanoseconds;
  std::vector<agent::TickTiming> s;
  for (int v : {5, 1, 4, 2, 3, 100}) {
    agent::TickTiming t;
    t.reasoning = nanoseconds(v * 1000000);
    t.simulation = nanoseconds(1000000);
    t.total = nanoseconds(v * 1000000 + 1000000);
    s.push_back(t);
  }
  auto r = harness::summarize(s);
  EXPECT_DOUBLE_EQ(r.median_reasoning_ms, 3.5);
  EXPECT_DOUBLE_EQ(r.p95_reasoning_ms, 100.0);
  EXPECT_DOUBLE_EQ(r.reasoning_share, 115.0 / 121.0);
  EXPECT_EQ(harness::summarize({}).reasoning_share, 0.0);
}

TEST(Perf, NativeOnlyHasNoReasoningTime) {
  harness::MatchConfig c;
  c.rounds = 2;
  auto r = harness::measure_performance(c);
  EXPECT_FALSE(r.samples.empty());
  EXPECT_EQ(r.reasoning_share, 0.0);
  for (const auto& t : r.samples) ASSERT_LE((t.reasoning + t.simulation).count(), t.total.count());
}

TEST(Perf, ScriptedRunReportsShare) {
  harness::MatchConfig c;
  c.rounds = 2;
  c.ct = ControllerSpec::parse("scripted");
  c.t = ControllerSpec::parse("scripted");
  auto r = harness::measure_performance(c);
  EXPECT_GT(r.reasoning_share, 0.0);
  EXPECT_LT(r.reasoning_share, 1.0);
  EXPECT_GT(r.native_mean_tick_ms, 0.0);
  for (const auto& t : r.samples) ASSERT_LE((t.reasoning + t.simulation).count(), t.total.count());
  auto j = r.to_json();
  EXPECT_EQ(j["ticks"].size(), r.samples.size());
}
