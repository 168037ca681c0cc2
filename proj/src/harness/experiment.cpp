#include "lpbot/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace lpbot::harness {

using nlohmann::json;

std::vector<Pairing> default_matrix() {
  auto n = ControllerSpec::native();
  auto s = ControllerSpec::parse("scripted");
  return {{n, n}, {s, n}, {n, s}, {s, s}};
}

namespace {

template <class F>
double mean_of(const std::vector<MatchCounts>& ms, F f) {
  if (ms.empty()) return 0;
  long total = 0;
  for (const auto& m : ms) total += f(m);
  return static_cast<double>(total) / static_cast<double>(ms.size());
}

std::string format_table(const ExperimentReport& r, bool goal) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %-10s %9s %9s\n", "CTs AI", "Ts AI", "CTs wins", "Ts wins");
  out += buf;
  for (const auto& row : r.rows) {
    double ct = goal ? row.mean_ct_goal_wins() : row.mean_ct_wins();
    double t = goal ? row.mean_t_goal_wins() : row.mean_t_wins();
    std::snprintf(buf, sizeof buf, "%-10s %-10s %9.1f %9.1f\n", row.pairing.ct.label().c_str(),
                  row.pairing.t.label().c_str(), ct, t);
    out += buf;
  }
  return out;
}

double percentile_ms(const std::vector<std::int64_t>& sorted_ns, double q) {
  if (sorted_ns.empty()) return 0;
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted_ns.size())));
  rank = std::clamp<std::size_t>(rank, 1, sorted_ns.size());
  return static_cast<double>(sorted_ns[rank - 1]) / 1e6;
}

double median_ms(const std::vector<std::int64_t>& sorted_ns) {
  if (sorted_ns.empty()) return 0;
  std::size_t n = sorted_ns.size();
  double mid = n % 2 ? static_cast<double>(sorted_ns[n / 2])
                     : (static_cast<double>(sorted_ns[n / 2 - 1]) + static_cast<double>(sorted_ns[n / 2])) / 2;
  return mid / 1e6;
}

}  // namespace

double PairingResult::mean_ct_wins() const { return mean_of(matches, [](const MatchCounts& m) { return m.ct_wins; }); }
double PairingResult::mean_t_wins() const { return mean_of(matches, [](const MatchCounts& m) { return m.t_wins; }); }
double PairingResult::mean_ct_goal_wins() const {
  return mean_of(matches, [](const MatchCounts& m) { return m.ct_goal_wins; });
}
double PairingResult::mean_t_goal_wins() const {
  return mean_of(matches, [](const MatchCounts& m) { return m.t_goal_wins; });
}

std::string ExperimentReport::total_table() const {
  return "Table 1. Total team victories, " + std::to_string(matches) + " matches average\n" + format_table(*this, false);
}

std::string ExperimentReport::goal_table() const {
  return "Table 2. Goal-fulfilled team victories, " + std::to_string(matches) + " matches average\n" +
         format_table(*this, true);
}

std::string ExperimentReport::csv() const {
  std::string out = "pairing,match,seed,ct_wins,t_wins,ct_goal_wins,t_goal_wins\n";
  for (const auto& row : rows)
    for (std::size_t m = 0; m < row.matches.size(); ++m) {
      const auto& c = row.matches[m];
      out += "\"" + row.pairing.label() + "\"," + std::to_string(m) + "," + std::to_string(row.seeds[m]) + "," +
             std::to_string(c.ct_wins) + "," + std::to_string(c.t_wins) + "," + std::to_string(c.ct_goal_wins) + "," +
             std::to_string(c.t_goal_wins) + "\n";
    }
  return out;
}

json ExperimentReport::to_json() const {
  json rows_j = json::array();
  for (const auto& row : rows) {
    json ms = json::array();
    for (std::size_t m = 0; m < row.matches.size(); ++m) {
      const auto& c = row.matches[m];
      ms.push_back({{"seed", row.seeds[m]},
                    {"ct_wins", c.ct_wins},
                    {"t_wins", c.t_wins},
                    {"ct_goal_wins", c.ct_goal_wins},
                    {"t_goal_wins", c.t_goal_wins}});
    }
    rows_j.push_back({{"pairing", row.pairing.label()},
                      {"ct", row.pairing.ct.str()},
                      {"t", row.pairing.t.str()},
                      {"mean_ct_wins", row.mean_ct_wins()},
                      {"mean_t_wins", row.mean_t_wins()},
                      {"mean_ct_goal_wins", row.mean_ct_goal_wins()},
                      {"mean_t_goal_wins", row.mean_t_goal_wins()},
                      {"matches", ms}});
  }
  return {{"rounds", rounds}, {"matches", matches}, {"rows", rows_j}};
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (config.matches < 1) throw ConfigError("matches must be at least 1");
  ExperimentReport report;
  report.rounds = config.base.rounds;
  report.matches = config.matches;
  for (std::size_t p = 0; p < config.pairings.size(); ++p) {
    PairingResult row;
    row.pairing = config.pairings[p];
    for (int m = 0; m < config.matches; ++m) {
      MatchConfig mc = config.base;
      mc.ct = row.pairing.ct;
      mc.t = row.pairing.t;
      mc.perf = false;
      mc.seed = config.base.seed + p + static_cast<std::uint64_t>(m);
      row.seeds.push_back(mc.seed);
      row.matches.push_back(run_match(mc).counts);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

PerfReport summarize(std::vector<agent::TickTiming> samples) {
  PerfReport r;
  std::vector<std::int64_t> reasoning, total;
  std::int64_t sum_reasoning = 0, sum_total = 0;
  for (const auto& s : samples) {
    reasoning.push_back(s.reasoning.count());
    total.push_back(s.total.count());
    sum_reasoning += s.reasoning.count();
    sum_total += s.total.count();
  }
  std::sort(reasoning.begin(), reasoning.end());
  std::sort(total.begin(), total.end());
  r.median_reasoning_ms = median_ms(reasoning);
  r.p95_reasoning_ms = percentile_ms(reasoning, 0.95);
  r.median_total_ms = median_ms(total);
  r.reasoning_share = sum_total > 0 ? static_cast<double>(sum_reasoning) / static_cast<double>(sum_total) : 0.0;
  r.scripted_mean_tick_ms = samples.empty() ? 0 : static_cast<double>(sum_total) / 1e6 / static_cast<double>(samples.size());
  r.samples = std::move(samples);
  return r;
}

PerfReport measure_performance(MatchConfig config) {
  config.perf = true;
  PerfReport r = summarize(run_match(config).timings);
  MatchConfig native = config;
  native.ct = ControllerSpec::native();
  native.t = ControllerSpec::native();
  PerfReport base = summarize(run_match(native).timings);
  r.native_mean_tick_ms = base.scripted_mean_tick_ms;
  r.native_delta =
      r.native_mean_tick_ms > 0 ? (r.scripted_mean_tick_ms - r.native_mean_tick_ms) / r.native_mean_tick_ms : 0.0;
  return r;
}

std::string PerfReport::str() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "ticks sampled            %zu\n"
                "median reasoning/tick    %.4f ms\n"
                "p95 reasoning/tick       %.4f ms\n"
                "median total/tick        %.4f ms\n"
                "reasoning share          %.4f\n"
                "mean tick (this run)     %.4f ms\n"
                "mean tick (native run)   %.4f ms\n"
                "native delta             %+.4f\n",
                samples.size(), median_reasoning_ms, p95_reasoning_ms, median_total_ms, reasoning_share,
                scripted_mean_tick_ms, native_mean_tick_ms, native_delta);
  return buf;
}

json PerfReport::to_json() const {
  json ticks = json::array();
  for (const auto& s : samples)
    ticks.push_back({{"reasoning_ns", s.reasoning.count()},
                     {"simulation_ns", s.simulation.count()},
                     {"total_ns", s.total.count()}});
  return {{"median_reasoning_ms", median_reasoning_ms},
          {"p95_reasoning_ms", p95_reasoning_ms},
          {"median_total_ms", median_total_ms},
          {"reasoning_share", reasoning_share},
          {"mean_tick_ms", scripted_mean_tick_ms},
          {"native_mean_tick_ms", native_mean_tick_ms},
          {"native_delta", native_delta},
          {"ticks", ticks}};
}

}  // namespace lpbot::harness
