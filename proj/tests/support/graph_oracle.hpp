#pragma once

// Map builders and an all-pairs Floyd-Warshall oracle for path checks.

#include <algorithm>
#include <climits>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "lpbot/sim/map.hpp"

namespace lpbot::testing {

struct WpSpec {
  std::string id;
  std::int64_t x, y;  // centimetres
  std::vector<std::string> tags;
};

inline const std::vector<std::string> all_required = {"spawn_ct", "spawn_t", "hostage_point", "rescue_zone"};

inline sim::MapDefinition make_map(std::vector<WpSpec> wps, std::vector<std::tuple<int, int, std::int64_t>> edges,
                                   std::vector<sim::Wall> walls = {}, std::vector<sim::HostageSpawn> hostages = {}) {
  sim::MapDefinition::Builder b;
  b.name = "test";
  for (auto& w : wps) b.waypoints.push_back({w.id, w.x, w.y, w.tags});
  for (auto [a, c, cost] : edges)
    b.edges.push_back({static_cast<sim::WaypointIndex>(a), static_cast<sim::WaypointIndex>(c), cost});
  b.walls = std::move(walls);
  b.hostages = std::move(hostages);
  return sim::build_map(std::move(b));
}

inline std::vector<std::vector<std::int64_t>> floyd_warshall(const sim::MapDefinition& m) {
  const std::size_t n = m.size();
  const std::int64_t inf = INT64_MAX / 4;
  std::vector<std::vector<std::int64_t>> d(n, std::vector<std::int64_t>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& e : m.edges()) {
    d[e.a][e.b] = std::min(d[e.a][e.b], e.cost_cm);
    d[e.b][e.a] = std::min(d[e.b][e.a], e.cost_cm);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

/// Connected graph: a random spanning tree plus up to 2n extra edges.
inline sim::MapDefinition random_graph(std::mt19937_64& rng, std::size_t n, std::int64_t max_cost, bool shuffled_ids) {
  std::vector<WpSpec> wps;
  std::uniform_int_distribution<int> letter(0, 25);
  for (std::size_t i = 0; i < n; ++i) {
    std::string id;
    if (shuffled_ids) {
      id = std::string(1, static_cast<char>('a' + letter(rng))) + static_cast<char>('a' + letter(rng)) +
           std::to_string(i);
    } else {
      id = "n" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    }
    wps.push_back({id, static_cast<std::int64_t>(i * 100), 0, i == 0 ? all_required : std::vector<std::string>{}});
  }
  std::uniform_int_distribution<std::int64_t> cost(1, max_cost);
  std::vector<std::tuple<int, int, std::int64_t>> edges;
  std::set<std::pair<int, int>> used;
  for (std::size_t i = 1; i < n; ++i) {
    int parent = static_cast<int>(std::uniform_int_distribution<std::size_t>(0, i - 1)(rng));
    edges.emplace_back(parent, static_cast<int>(i), cost(rng));
    used.insert({parent, static_cast<int>(i)});
  }
  std::size_t extra = std::uniform_int_distribution<std::size_t>(0, 2 * n)(rng);
  std::uniform_int_distribution<int> node(0, static_cast<int>(n) - 1);
  for (std::size_t k = 0; k < extra; ++k) {
    int a = node(rng), b = node(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!used.insert({a, b}).second) continue;
    edges.emplace_back(a, b, cost(rng));
  }
  return make_map(std::move(wps), std::move(edges));
}

/// "" when every pair's path cost, endpoints and walked length agree with
/// Floyd-Warshall; otherwise a description of the first mismatch.
inline std::string compare_with_floyd_warshall(const sim::MapDefinition& m) {
  auto fw = floyd_warshall(m);
  for (sim::WaypointIndex s = 0; s < m.size(); ++s)
    for (sim::WaypointIndex t = 0; t < m.size(); ++t) {
      const std::string pair = m.waypoint(s).id + " -> " + m.waypoint(t).id;
      auto p = m.shortest_path(s, t);
      if (!p) return pair + ": no path";
      if (p->cost_cm != fw[s][t] || m.distance(s, t) != fw[s][t])
        return pair + ": cost " + std::to_string(p->cost_cm) + ", oracle " + std::to_string(fw[s][t]);
      if (p->nodes.front() != s || p->nodes.back() != t) return pair + ": wrong endpoints";
      std::int64_t walked = 0;
      for (std::size_t k = 1; k < p->nodes.size(); ++k) {
        auto c = m.edge_cost(p->nodes[k - 1], p->nodes[k]);
        if (!c) return pair + ": path uses a missing edge";
        walked += *c;
      }
      if (walked != fw[s][t]) return pair + ": walked length " + std::to_string(walked);
    }
  return "";
}

}  // namespace lpbot::testing
