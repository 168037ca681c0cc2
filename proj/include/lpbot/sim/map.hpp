#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lpbot::sim {

using WaypointIndex = std::size_t;

/// Raised for malformed or inconsistent map files.
class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Waypoint {
  std::string id;
  std::int64_t x_cm = 0;
  std::int64_t y_cm = 0;
  std::vector<std::string> tags;

  bool has_tag(std::string_view tag) const;
};

struct Edge {
  WaypointIndex a = 0;
  WaypointIndex b = 0;
  std::int64_t cost_cm = 0;
};

struct Wall {
  std::int64_t x1_cm, y1_cm, x2_cm, y2_cm;
};

struct HostageSpawn {
  std::string id;
  WaypointIndex at = 0;
};

struct Path {
  std::vector<WaypointIndex> nodes;
  std::int64_t cost_cm = 0;
};

/// Waypoint graph with tags, line-of-sight matrix and hostage placement.
/// Distances are integer centimetres; file coordinates are metres.
class MapDefinition {
 public:
  static constexpr std::int64_t unreachable = INT64_MAX;

  const std::string& name() const { return name_; }
  const std::vector<Waypoint>& waypoints() const { return waypoints_; }
  const Waypoint& waypoint(WaypointIndex i) const { return waypoints_.at(i); }
  std::size_t size() const { return waypoints_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<HostageSpawn>& hostages() const { return hostages_; }

  std::optional<WaypointIndex> find(std::string_view id) const;
  WaypointIndex index_of(std::string_view id) const;  // throws MapError
  std::vector<WaypointIndex> tagged(std::string_view tag) const;

  /// Neighbours of i as (index, edge cost), ordered by waypoint id.
  const std::vector<std::pair<WaypointIndex, std::int64_t>>& neighbours(WaypointIndex i) const {
    return adjacency_.at(i);
  }
  /// Cost of the direct edge a-b, or nullopt.
  std::optional<std::int64_t> edge_cost(WaypointIndex a, WaypointIndex b) const;

  bool visible(WaypointIndex a, WaypointIndex b) const { return visibility_[a * size() + b]; }

  /// Shortest path cost, or `unreachable`.
  std::int64_t distance(WaypointIndex from, WaypointIndex to) const { return dist_[from * size() + to]; }
  /// First waypoint after `from` on the chosen shortest path to `to`.
  std::optional<WaypointIndex> next_hop(WaypointIndex from, WaypointIndex to) const;
  /// Minimum-cost path; among equal costs the lexicographically smallest
  /// sequence of waypoint ids.
  std::optional<Path> shortest_path(WaypointIndex from, WaypointIndex to) const;

  struct Builder;

 private:
  friend MapDefinition build_map(Builder);

  std::string name_;
  std::vector<Waypoint> waypoints_;
  std::vector<Edge> edges_;
  std::vector<HostageSpawn> hostages_;
  std::vector<std::vector<std::pair<WaypointIndex, std::int64_t>>> adjacency_;
  std::vector<bool> visibility_;
  std::vector<std::int64_t> dist_;
};

/// Raw map content before validation.
struct MapDefinition::Builder {
  std::string name;
  std::vector<Waypoint> waypoints;
  std::vector<Edge> edges;
  std::vector<HostageSpawn> hostages;
  std::optional<std::vector<std::vector<bool>>> visibility;
  std::vector<Wall> walls;
};

/// Validates and finalises a map: connectivity, required tags, symmetric
/// visibility with a true diagonal, positive edge costs.
MapDefinition build_map(MapDefinition::Builder builder);

/// Parses the JSON map format (metres; see data/maps).
MapDefinition parse_map(std::string_view json_text);
MapDefinition load_map(const std::string& path);

/// True when segment p1-p2 shares at least one point with q1-q2.
bool segments_intersect(std::int64_t p1x, std::int64_t p1y, std::int64_t p2x, std::int64_t p2y,
                        std::int64_t q1x, std::int64_t q1y, std::int64_t q2x, std::int64_t q2y);

/// Integer square root (floor).
std::int64_t isqrt(std::int64_t v);

/// Euclidean distance in centimetres, rounded to nearest.
std::int64_t euclid_cm(std::int64_t dx, std::int64_t dy);

}  // namespace lpbot::sim
