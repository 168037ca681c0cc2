#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lpbot/harness/match.hpp"

namespace lpbot::harness {

struct Pairing {
  ControllerSpec ct;
  ControllerSpec t;
  /// `(native,scripted)` etc.
  std::string label() const { return "(" + ct.label() + "," + t.label() + ")"; }
};

/// native/native, scripted/native, native/scripted, scripted/scripted.
std::vector<Pairing> default_matrix();

struct ExperimentConfig {
  MatchConfig base;  // controllers in base are ignored
  int matches = 10;
  std::vector<Pairing> pairings = default_matrix();
};

struct PairingResult {
  Pairing pairing;
  std::vector<std::uint64_t> seeds;
  std::vector<MatchCounts> matches;

  double mean_ct_wins() const;
  double mean_t_wins() const;
  double mean_ct_goal_wins() const;
  double mean_t_goal_wins() const;
};

struct ExperimentReport {
  int rounds = 0;
  int matches = 0;
  std::vector<PairingResult> rows;

  /// Total victories, one decimal, aligned columns.
  std::string total_table() const;
  /// Goal-fulfilled victories.
  std::string goal_table() const;
  /// `pairing,match,seed,ct_wins,t_wins,ct_goal_wins,t_goal_wins`
  std::string csv() const;
  nlohmann::json to_json() const;
};

/// Match m of pairing p uses seed base.seed + p + m.
ExperimentReport run_experiment(const ExperimentConfig& config);

struct PerfReport {
  std::vector<agent::TickTiming> samples;
  double median_reasoning_ms = 0;
  double p95_reasoning_ms = 0;
  double median_total_ms = 0;
  double reasoning_share = 0;   // reasoning / total wall time, in [0,1]
  double native_mean_tick_ms = 0;
  double scripted_mean_tick_ms = 0;
  double native_delta = 0;      // relative increase of mean tick time over the native-only run

  std::string str() const;
  nlohmann::json to_json() const;
};

/// Aggregates raw tick samples (native fields left zero).
PerfReport summarize(std::vector<agent::TickTiming> samples);

/// Runs config with timing, then the same match with native controllers on
/// both sides, and reports the reasoning share and the native delta.
PerfReport measure_performance(MatchConfig config);

}  // namespace lpbot::harness
