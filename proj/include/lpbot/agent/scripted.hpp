#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "lpbot/agent/runtime.hpp"
#include "lpbot/logic/knowledge_base.hpp"
#include "lpbot/rules/package.hpp"

namespace lpbot::agent {

/// Ground facts shared by the minds of one team, kept in a knowledge base
/// of their own.  Cleared at the start of every round.
class TeamBlackboard {
 public:
  TeamBlackboard() : kb_(std::make_unique<logic::KnowledgeBase>()) {}

  logic::KnowledgeBase& kb() { return *kb_; }
  /// Facts whose functor matches the pattern's, in assertion order.
  std::vector<Term> facts(const Term& pattern) const;
  void clear() { kb_ = std::make_unique<logic::KnowledgeBase>(); }

  int cleared_round = -1;

 private:
  std::unique_ptr<logic::KnowledgeBase> kb_;
};

/// Dynamic predicates the runtime empties at every round start.
const std::vector<logic::PredicateKey>& round_scoped_predicates();

/// A bot controlled by rule packages running on its own knowledge base.
///
/// Each reasoning pass proves `do_reasoning(Self)` once.  Errors inside a
/// proof are reported to the runtime diagnostics and never escape.
class ScriptedMind : public Controller {
 public:
  ScriptedMind(AgentRuntime& runtime, BotId bot, std::shared_ptr<TeamBlackboard> board,
               const std::vector<rules::RulePackage>& packages);

  logic::KnowledgeBase& kb() { return *kb_; }
  BotId bot() const { return bot_; }

  void on_round_start(BotContext& ctx) override;
  void reason(BotContext& ctx) override;
  bool motivation_holds(BotContext& ctx, const HighLevelAction& action) override;
  void run_continuation(BotContext& ctx, const HighLevelAction& action) override;

  /// Resolution steps used by the latest reasoning pass.
  std::uint64_t last_reasoning_steps() const { return last_steps_; }

  /// Registers the perception, action and team predicates.  `self` may be
  /// null when only the predicate catalogue is needed.
  static void register_natives(logic::KnowledgeBase& kb, ScriptedMind* self);

 private:
  bool prove(const Term& goal, const char* what);
  void report(const std::string& message, bool once);

  AgentRuntime& runtime_;
  BotId bot_;
  std::shared_ptr<TeamBlackboard> board_;
  std::unique_ptr<logic::KnowledgeBase> kb_;
  std::set<std::string> reported_;
  std::uint64_t last_steps_ = 0;
};

/// Predicates a package may rely on besides its own and earlier packages.
rules::HostCatalog host_catalog();

/// Adds every package to kb in order.  Nothing is added if any clause
/// would redefine a host predicate.
void install_packages(logic::KnowledgeBase& kb, const std::vector<rules::RulePackage>& packages);

}  // namespace lpbot::agent
