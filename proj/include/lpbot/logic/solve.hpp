#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lpbot/logic/knowledge_base.hpp"

namespace lpbot::logic {

/// Values of the named query variables for one answer.
class Solution {
 public:
  Solution() = default;
  explicit Solution(std::vector<std::pair<std::string, Term>> values) : values_(std::move(values)) {}

  const std::vector<std::pair<std::string, Term>>& values() const { return values_; }
  std::optional<Term> get(std::string_view name) const;
  /// Throws std::out_of_range for an unknown name.
  Term at(std::string_view name) const;
  /// `X = a, Y = f(b)`; variables left unbound are omitted, `true` if none remain.
  std::string str() const;

 private:
  std::vector<std::pair<std::string, Term>> values_;
};

class Machine;

/// Lazily enumerates the answers to a goal in depth-first, leftmost-goal,
/// clause-order.  The clause set is the one visible when the stream was
/// created (logical update view).
class SolutionStream {
 public:
  SolutionStream(KnowledgeBase& kb, const Term& goal);
  SolutionStream(KnowledgeBase& kb, const Term& goal, const SolveLimits& limits);
  SolutionStream(SolutionStream&&) noexcept;
  SolutionStream& operator=(SolutionStream&&) = delete;
  ~SolutionStream();

  /// Next answer, or nullopt once exhausted (idempotent).  Engine errors
  /// propagate and leave the stream exhausted.
  std::optional<Solution> next();

  bool exhausted() const;
  std::uint64_t steps() const;
  std::uint64_t snapshot_generation() const;
  /// Number of bindings currently recorded; zero after exhaustion.
  std::size_t trail_size() const;

 private:
  KnowledgeBase* kb_;
  std::unique_ptr<Machine> machine_;
};

SolutionStream solve(KnowledgeBase& kb, const Term& goal);
std::optional<Solution> solve_once(KnowledgeBase& kb, const Term& goal);
std::vector<Solution> solve_all(KnowledgeBase& kb, const Term& goal);

/// Parses query text and collects every answer.
std::vector<Solution> query_all(KnowledgeBase& kb, std::string_view query);
/// Parses query text and returns whether it has at least one answer.
bool query_holds(KnowledgeBase& kb, std::string_view query);

}  // namespace lpbot::logic
