#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "lpbot/agent/native_baseline.hpp"
#include "lpbot/agent/scripted.hpp"
#include "lpbot/harness/match.hpp"
#include "lpbot/logic/solve.hpp"
#include "lpbot/rules/package.hpp"

using namespace lpbot;
namespace fs = std::filesystem;
using rules::IssueKind;

namespace {

std::vector<rules::RulePackage> shipped(const std::vector<std::string>& names) {
  return rules::load_stack(rules::default_package_dir(), names);
}

rules::RulePackage toy(const std::string& name, rules::PackageLevel level, const std::string& src,
                       std::vector<std::string> entry = {}, std::vector<std::string> dynamic = {}) {
  rules::RulePackage p;
  p.manifest.name = name;
  p.manifest.level = level;
  for (const auto& e : entry) p.manifest.entry.push_back(rules::parse_indicator(e));
  for (const auto& d : dynamic) p.manifest.dynamic.push_back(rules::parse_indicator(d));
  p.clauses = logic::parse_program(src);
  return p;
}

rules::ValidationReport check(const std::vector<rules::RulePackage>& stack) {
  return rules::validate_stack(stack, agent::host_catalog());
}

bool has_issue(const rules::ValidationReport& r, IssueKind kind, const std::string& pred) {
  for (const auto& i : r.issues)
    if (i.kind == kind && i.predicate.str() == pred) return true;
  return false;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("lpbot_rules_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                         "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  void write(const std::string& name, const std::string& text) const { std::ofstream(path_ / name) << text; }

 private:
  fs::path path_;
};

}  // namespace

// ---------------------------------------------------------------- manifests

TEST(Manifest, ShippedPackagesLoadWithDeclaredLevels) {
  auto stack = shipped({"baseline", "cs_rules", "warehouse_tactics"});
  ASSERT_EQ(stack.size(), 3u);
  EXPECT_EQ(stack[0].manifest.level, rules::PackageLevel::game);
  EXPECT_EQ(stack[1].manifest.level, rules::PackageLevel::map_type);
  EXPECT_EQ(stack[2].manifest.level, rules::PackageLevel::map);
  EXPECT_EQ(stack[2].manifest.requires_packages, (std::vector<std::string>{"baseline", "cs_rules"}));
  for (const auto& p : stack) EXPECT_FALSE(p.clauses.empty()) << p.manifest.name;
}

TEST(Manifest, IndicatorParsing) {
  EXPECT_EQ(rules::parse_indicator("do_reasoning/1").str(), "do_reasoning/1");
  EXPECT_EQ(rules::parse_indicator("x/0").arity, 0u);
  for (const char* bad : {"foo", "foo/", "/2", "foo/x", "foo/-1"}) EXPECT_THROW(rules::parse_indicator(bad), rules::PackageError) << bad;
}

TEST(Manifest, MissingFieldsAndFilesAreReported) {
  TempDir d;
  d.write("a.json", R"({"name": "a", "level": "game", "files": ["a.pl"]})");
  EXPECT_THROW(rules::load_package(d.path() / "a.json"), rules::PackageError);  // a.pl missing
  d.write("b.json", R"({"level": "game", "files": []})");
  EXPECT_THROW(rules::load_manifest(d.path() / "b.json"), rules::PackageError);
  d.write("c.json", R"({"name": "c", "level": "galaxy", "files": []})");
  EXPECT_THROW(rules::load_manifest(d.path() / "c.json"), rules::PackageError);
  d.write("e.json", "{not json");
  EXPECT_THROW(rules::load_manifest(d.path() / "e.json"), rules::PackageError);
  EXPECT_THROW(rules::load_stack(d.path(), {"nope"}), rules::PackageError);
}

TEST(Manifest, ParseErrorCarriesFileLineAndColumn) {
  TempDir d;
  d.write("p.json", R"({"name": "p", "level": "game", "files": ["p.pl"], "entry": [], "dynamic": [], "requires": []})");
  d.write("p.pl", "ok(1).\nok(2).\nbroken(X :- ok(X).\n");
  try {
    rules::load_package(d.path() / "p.json");
    FAIL();
  } catch (const rules::PackageError& e) {
    std::string what = e.what();
    EXPECT_NE(what.find("p.pl:3:"), std::string::npos) << what;
  }
}

// ---------------------------------------------------------------- validator

TEST(Validator, ShippedStacksAreClean) {
  for (const auto& names : std::vector<std::vector<std::string>>{
           {"baseline"}, {"baseline", "cs_rules"}, {"baseline", "cs_rules", "warehouse_tactics"}}) {
    auto r = check(shipped(names));
    EXPECT_TRUE(r.ok()) << r.str();
  }
}

TEST(Validator, TacticsWithoutCsRulesReportObjectiveWaypoint) {
  auto r = check(shipped({"baseline", "warehouse_tactics"}));
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_issue(r, IssueKind::undefined, "objective_waypoint/2")) << r.str();
  EXPECT_TRUE(has_issue(r, IssueKind::missing_requirement, "cs_rules/0")) << r.str();
  for (const auto& i : r.issues) EXPECT_EQ(i.package, "warehouse_tactics");
}

TEST(Validator, UndeclaredDynamicPredicate) {
  auto pkg = toy("p", rules::PackageLevel::map, "scout(B) :- \\+ scout_done(B), assert(scout_done(B)).");
  auto r = check({shipped({"baseline"})[0], pkg});
  EXPECT_TRUE(has_issue(r, IssueKind::undeclared_dynamic, "scout_done/1")) << r.str();
  pkg.manifest.dynamic.push_back(rules::parse_indicator("scout_done/1"));
  EXPECT_TRUE(check({shipped({"baseline"})[0], pkg}).ok());
}

TEST(Validator, ArityMismatchNamesTheExistingArity) {
  auto pkg = toy("p", rules::PackageLevel::map, "x(B) :- should_buy(B, rifle).");
  auto r = check({shipped({"baseline"})[0], pkg});
  ASSERT_TRUE(has_issue(r, IssueKind::arity_mismatch, "should_buy/2")) << r.str();
  EXPECT_NE(r.str().find("should_buy/1"), std::string::npos);
}

TEST(Validator, MissingEntryPredicate) {
  auto pkg = toy("p", rules::PackageLevel::game, "helper.", {"do_reasoning/1"});
  EXPECT_TRUE(has_issue(check({pkg}), IssueKind::missing_entry, "do_reasoning/1"));
}

TEST(Validator, GoalArgumentsOfHostPredicatesAreChecked) {
  auto pkg = toy("p", rules::PackageLevel::game,
                 "a(L) :- findall(X, ghost(X), L).\n"
                 "b :- \\+ phantom.\n"
                 "c(B) :- action_goto(B, office, andThen(spectre(B))).\n"
                 "d(B) :- action_goto(B, office, [wraith(B)]).");
  auto r = check({pkg});
  for (const char* p : {"ghost/1", "phantom/0", "spectre/1", "wraith/1"}) EXPECT_TRUE(has_issue(r, IssueKind::undefined, p)) << p;
}

TEST(Validator, LevelOrderIsEnforced) {
  auto stack = shipped({"baseline", "cs_rules", "warehouse_tactics"});
  std::swap(stack[1], stack[2]);
  auto r = check(stack);
  bool order = false;
  for (const auto& i : r.issues) order = order || i.kind == IssueKind::order;
  EXPECT_TRUE(order) << r.str();
}

TEST(Validator, ForwardReferencesWithinAPackageAreFine) {
  auto pkg = toy("p", rules::PackageLevel::game, "do_reasoning(B) :- later(B).\nlater(_).", {"do_reasoning/1"});
  EXPECT_TRUE(check({pkg}).ok());
}

TEST(Validator, ReferencesToLaterPackagesAreRejected) {
  auto early = toy("early", rules::PackageLevel::game, "do_reasoning(B) :- late_rule(B).", {"do_reasoning/1"});
  auto late = toy("late", rules::PackageLevel::map, "late_rule(_).");
  auto r = check({early, late});
  EXPECT_TRUE(has_issue(r, IssueKind::undefined, "late_rule/1")) << r.str();
}

// ---------------------------------------------------------------- layering in a live mind

namespace {

struct TeamRig {
  sim::World world;
  agent::AgentRuntime rt;
  std::vector<std::shared_ptr<agent::ScriptedMind>> minds;

  TeamRig(std::size_t ct, std::uint64_t seed, const std::vector<rules::RulePackage>& stack)
      : world(harness::resolve_map("warehouse"), sim::GameRules{}, ct, 5, seed), rt(world) {
    auto board = std::make_shared<agent::TeamBlackboard>();
    for (const auto& b : world.bots()) {
      if (b.team == sim::Team::ct) {
        minds.push_back(std::make_shared<agent::ScriptedMind>(rt, b.id, board, stack));
        rt.set_controller(b.id, minds.back());
      } else {
        rt.set_controller(b.id, std::make_shared<agent::NativeBaselineController>(b.id));
      }
    }
  }

  // Runs the buy phase and returns each bot's committed tactic ("" if none).
  std::vector<std::string> vote() {
    world.start_round();
    rt.begin_round();
    while (world.phase() == sim::Phase::buy) rt.tick();
    std::vector<std::string> out;
    for (auto& m : minds) {
      auto s = logic::query_all(m->kb(), "committed_tactic(T)");
      out.push_back(s.size() == 1 ? logic::to_string(s[0].at("T")) : "");
    }
    return out;
  }
};

std::vector<rules::RulePackage> with_preferences(const std::map<std::string, std::string>& prefs,
                                                 const std::vector<std::string>& extra_tactics = {}) {
  auto stack = shipped({"baseline", "cs_rules", "warehouse_tactics"});
  auto& clauses = stack.back().clauses;
  clauses.erase(std::remove_if(clauses.begin(), clauses.end(),
                               [](const logic::Clause& c) { return c.head.is_functor("preference", 2); }),
                clauses.end());
  std::string src;
  for (const auto& [bot, t] : prefs) src += "preference(" + bot + ", " + t + ").\n";
  for (const auto& t : extra_tactics) src += "tactic(" + t + ").\n";
  for (auto& c : logic::parse_program(src)) clauses.insert(clauses.begin(), c);
  return stack;
}

// Plurality with ties broken by the alphabetically first tactic.
std::string plurality(const std::map<std::string, std::string>& prefs) {
  std::map<std::string, int> votes;
  for (const auto& [bot, t] : prefs) ++votes[t];
  std::string best;
  int n = -1;
  for (const auto& [t, c] : votes)
    if (c > n) best = t, n = c;
  return best;
}

}  // namespace

TEST(Voting, ShippedPreferencesConvergeToRush) {
  auto stack = shipped({"baseline", "cs_rules", "warehouse_tactics"});
  std::map<std::string, std::string> shipped_prefs;
  for (const auto& c : stack.back().clauses)
    if (c.head.is_functor("preference", 2))
      shipped_prefs[logic::to_string(c.head.arg(0))] = logic::to_string(c.head.arg(1));
  const std::string want = plurality(shipped_prefs);
  ASSERT_EQ(want, "rush");
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    TeamRig rig(5, seed, stack);
    auto got = rig.vote();
    ASSERT_EQ(got, std::vector<std::string>(5, want)) << "seed " << seed;
  }
}

TEST(Voting, RandomPreferencesConvergeToPlurality) {
  std::mt19937_64 rng(99);
  const std::vector<std::string> tactics = {"camp", "flank", "rush"};
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    std::map<std::string, std::string> prefs;
    for (int i = 1; i <= 5; ++i)
      prefs["ct" + std::to_string(i)] = tactics[std::uniform_int_distribution<std::size_t>(0, 2)(rng)];
    TeamRig rig(5, seed, with_preferences(prefs, {"camp"}));
    ASSERT_EQ(rig.vote(), std::vector<std::string>(5, plurality(prefs))) << "seed " << seed;
  }
}

TEST(Voting, TieResolvesLexicographically) {
  std::map<std::string, std::string> prefs = {{"ct1", "rush"}, {"ct2", "flank"}, {"ct3", "rush"}, {"ct4", "flank"}};
  ASSERT_EQ(plurality(prefs), "flank");
  TeamRig rig(4, 11, with_preferences(prefs));
  EXPECT_EQ(rig.vote(), std::vector<std::string>(4, "flank"));
}

TEST(Voting, VotesAreRecastEveryRound) {
  auto stack = shipped({"baseline", "cs_rules", "warehouse_tactics"});
  TeamRig rig(5, 5, stack);
  for (int round = 0; round < 3; ++round) {
    ASSERT_EQ(rig.vote(), std::vector<std::string>(5, "rush")) << round;
    auto votes = logic::query_all(rig.minds[0]->kb(), "team_fact(vote(B, T))");
    EXPECT_EQ(votes.size(), 5u);
    while (!rig.world.check_win()) rig.rt.tick();
    rig.rt.end_round();
  }
}

TEST(Voting, FlankChainRunsEachContinuationOnce) {
  std::map<std::string, std::string> prefs = {{"ct1", "flank"}, {"ct2", "flank"}, {"ct3", "flank"}};
  TeamRig rig(3, 21, with_preferences(prefs));
  ASSERT_EQ(rig.vote(), std::vector<std::string>(3, "flank"));
  for (int k = 0; k < 400 && !rig.world.check_win(); ++k) rig.rt.tick();
  rig.rt.end_round();
  // Follow the chain: each link starts in the same tick its predecessor completes.
  std::map<std::string, int> started;
  std::map<agent::ActionId, agent::LifecycleEvent> last;
  std::vector<agent::ActionId> chain;
  bool link_due = false;
  for (const auto& e : rig.rt.lifecycle()) {
    if (e.bot_name != "ct1") continue;
    if (e.kind == agent::LifecycleKind::started) {
      ++started[e.action_text];
      if (e.action_text == "goto(roof)" || link_due) chain.push_back(e.action);
      link_due = false;
    }
    if (e.kind == agent::LifecycleKind::completed && !chain.empty() && e.action == chain.back() && chain.size() < 3)
      link_due = true;
    last[e.action] = e;
  }
  ASSERT_GE(chain.size(), 2u);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto& e = last.at(chain[i]);
    int want = e.kind == agent::LifecycleKind::completed && i < 2 ? 1 : 0;
    EXPECT_EQ(rig.rt.continuation_runs(chain[i]), want) << e.str();
  }
  if (chain.size() == 3) EXPECT_EQ(last.at(chain[2]).action_text, "liberate_hostages()");
  EXPECT_EQ(started["goto(roof)"], 1);
  EXPECT_LE(started["liberate_hostages()"], 1);
}
