#include "lpbot/sim/map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>

#include "json.hpp"

namespace lpbot::sim {

bool Waypoint::has_tag(std::string_view tag) const {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

std::int64_t isqrt(std::int64_t v) {
  if (v <= 0) return 0;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r > 0 && r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

std::int64_t euclid_cm(std::int64_t dx, std::int64_t dy) {
  std::int64_t sq = dx * dx + dy * dy;
  std::int64_t r = isqrt(sq);
  // round to nearest: compare sq against (r + 0.5)^2 = r^2 + r + 0.25
  return sq - r * r > r ? r + 1 : r;
}

namespace {

int orientation(std::int64_t ax, std::int64_t ay, std::int64_t bx, std::int64_t by, std::int64_t cx,
                std::int64_t cy) {
  __int128 v = static_cast<__int128>(bx - ax) * (cy - ay) - static_cast<__int128>(by - ay) * (cx - ax);
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

bool on_segment(std::int64_t ax, std::int64_t ay, std::int64_t bx, std::int64_t by, std::int64_t px,
                std::int64_t py) {
  return std::min(ax, bx) <= px && px <= std::max(ax, bx) && std::min(ay, by) <= py && py <= std::max(ay, by);
}

}  // namespace

bool segments_intersect(std::int64_t p1x, std::int64_t p1y, std::int64_t p2x, std::int64_t p2y,
                        std::int64_t q1x, std::int64_t q1y, std::int64_t q2x, std::int64_t q2y) {
  int o1 = orientation(p1x, p1y, p2x, p2y, q1x, q1y);
  int o2 = orientation(p1x, p1y, p2x, p2y, q2x, q2y);
  int o3 = orientation(q1x, q1y, q2x, q2y, p1x, p1y);
  int o4 = orientation(q1x, q1y, q2x, q2y, p2x, p2y);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1x, p1y, p2x, p2y, q1x, q1y)) return true;
  if (o2 == 0 && on_segment(p1x, p1y, p2x, p2y, q2x, q2y)) return true;
  if (o3 == 0 && on_segment(q1x, q1y, q2x, q2y, p1x, p1y)) return true;
  if (o4 == 0 && on_segment(q1x, q1y, q2x, q2y, p2x, p2y)) return true;
  return false;
}

std::optional<WaypointIndex> MapDefinition::find(std::string_view id) const {
  for (WaypointIndex i = 0; i < waypoints_.size(); ++i)
    if (waypoints_[i].id == id) return i;
  return std::nullopt;
}

WaypointIndex MapDefinition::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw MapError("unknown waypoint '" + std::string(id) + "'");
}

std::vector<WaypointIndex> MapDefinition::tagged(std::string_view tag) const {
  std::vector<WaypointIndex> out;
  for (WaypointIndex i = 0; i < waypoints_.size(); ++i)
    if (waypoints_[i].has_tag(tag)) out.push_back(i);
  return out;
}

std::optional<std::int64_t> MapDefinition::edge_cost(WaypointIndex a, WaypointIndex b) const {
  for (const auto& [n, c] : adjacency_.at(a))
    if (n == b) return c;
  return std::nullopt;
}

std::optional<WaypointIndex> MapDefinition::next_hop(WaypointIndex from, WaypointIndex to) const {
  if (from == to) return std::nullopt;
  std::int64_t d = distance(from, to);
  if (d == unreachable) return std::nullopt;
  // neighbours are sorted by id, so the first match is the smallest id
  for (const auto& [n, c] : adjacency_[from])
    if (distance(n, to) != unreachable && c + distance(n, to) == d) return n;
  return std::nullopt;
}

std::optional<Path> MapDefinition::shortest_path(WaypointIndex from, WaypointIndex to) const {
  if (from >= size() || to >= size()) throw MapError("waypoint index out of range");
  if (distance(from, to) == unreachable) return std::nullopt;
  Path p;
  p.cost_cm = distance(from, to);
  p.nodes.push_back(from);
  WaypointIndex cur = from;
  while (cur != to) {
    cur = *next_hop(cur, to);
    p.nodes.push_back(cur);
  }
  return p;
}

MapDefinition build_map(MapDefinition::Builder b) {
  MapDefinition m;
  const std::size_t n = b.waypoints.size();
  if (n == 0) throw MapError("map has no waypoints");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (b.waypoints[i].id == b.waypoints[j].id) throw MapError("duplicate waypoint '" + b.waypoints[i].id + "'");

  static const char* known_tags[] = {"spawn_ct", "spawn_t", "hostage_point", "rescue_zone", "hiding_spot", "ambush_point"};
  for (const auto& w : b.waypoints)
    for (const auto& t : w.tags)
      if (std::find(std::begin(known_tags), std::end(known_tags), t) == std::end(known_tags))
        throw MapError("waypoint '" + w.id + "' has unknown tag '" + t + "'");
  for (const char* required : {"spawn_ct", "spawn_t", "hostage_point", "rescue_zone"}) {
    bool any = std::any_of(b.waypoints.begin(), b.waypoints.end(), [&](const Waypoint& w) { return w.has_tag(required); });
    if (!any) throw MapError(std::string("map has no waypoint tagged ") + required);
  }

  m.adjacency_.assign(n, {});
  for (const Edge& e : b.edges) {
    if (e.a >= n || e.b >= n) throw MapError("edge references unknown waypoint");
    if (e.a == e.b) throw MapError("self-loop edge at '" + b.waypoints[e.a].id + "'");
    if (e.cost_cm <= 0)
      throw MapError("edge " + b.waypoints[e.a].id + "-" + b.waypoints[e.b].id + " has non-positive cost");
    for (const auto& [nb, c] : m.adjacency_[e.a])
      if (nb == e.b) throw MapError("duplicate edge " + b.waypoints[e.a].id + "-" + b.waypoints[e.b].id);
    m.adjacency_[e.a].emplace_back(e.b, e.cost_cm);
    m.adjacency_[e.b].emplace_back(e.a, e.cost_cm);
  }
  for (auto& adj : m.adjacency_)
    std::sort(adj.begin(), adj.end(),
              [&](const auto& x, const auto& y) { return b.waypoints[x.first].id < b.waypoints[y.first].id; });

  // connectivity
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    std::size_t u = stack.back();
    stack.pop_back();
    for (const auto& [v, c] : m.adjacency_[u])
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!seen[i]) throw MapError("graph is disconnected: waypoint '" + b.waypoints[i].id + "' is unreachable");

  // visibility
  m.visibility_.assign(n * n, false);
  if (b.visibility) {
    const auto& vis = *b.visibility;
    if (vis.size() != n) throw MapError("visibility matrix must have one row per waypoint");
    for (std::size_t i = 0; i < n; ++i) {
      if (vis[i].size() != n) throw MapError("visibility row of '" + b.waypoints[i].id + "' has wrong length");
      if (!vis[i][i]) throw MapError("waypoint '" + b.waypoints[i].id + "' must see itself");
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (vis[i][j] != vis[j][i])
          throw MapError("visibility is asymmetric between '" + b.waypoints[i].id + "' and '" + b.waypoints[j].id + "'");
        m.visibility_[i * n + j] = vis[i][j];
      }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const Waypoint& p = b.waypoints[i];
        const Waypoint& q = b.waypoints[j];
        bool blocked = false;
        if (i != j) {
          for (const Wall& w : b.walls)
            if (segments_intersect(p.x_cm, p.y_cm, q.x_cm, q.y_cm, w.x1_cm, w.y1_cm, w.x2_cm, w.y2_cm)) {
              blocked = true;
              break;
            }
        }
        m.visibility_[i * n + j] = !blocked;
      }
  }

  for (const auto& h : b.hostages)
    if (h.at >= n) throw MapError("hostage '" + h.id + "' placed at unknown waypoint");

  // all-pairs distances, Dijkstra from every source
  m.dist_.assign(n * n, MapDefinition::unreachable);
  for (std::size_t s = 0; s < n; ++s) {
    using Item = std::pair<std::int64_t, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    m.dist_[s * n + s] = 0;
    pq.emplace(0, s);
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d != m.dist_[s * n + u]) continue;
      for (const auto& [v, c] : m.adjacency_[u]) {
        if (d + c < m.dist_[s * n + v]) {
          m.dist_[s * n + v] = d + c;
          pq.emplace(d + c, v);
        }
      }
    }
  }

  m.name_ = std::move(b.name);
  m.waypoints_ = std::move(b.waypoints);
  m.edges_ = std::move(b.edges);
  m.hostages_ = std::move(b.hostages);
  return m;
}

namespace {

std::int64_t metres_to_cm(const nlohmann::json& v, const std::string& what) {
  if (!v.is_number()) throw MapError(what + " must be a number");
  return static_cast<std::int64_t>(std::llround(v.get<double>() * 100.0));
}

}  // namespace

MapDefinition parse_map(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MapError(std::string("map is not valid JSON: ") + e.what());
  }
  MapDefinition::Builder b;
  try {
    b.name = j.value("name", "unnamed");
    for (const auto& w : j.at("waypoints")) {
      Waypoint wp;
      wp.id = w.at("id").get<std::string>();
      wp.x_cm = metres_to_cm(w.at("x"), "waypoint x");
      wp.y_cm = metres_to_cm(w.at("y"), "waypoint y");
      if (w.contains("tags")) wp.tags = w.at("tags").get<std::vector<std::string>>();
      b.waypoints.push_back(std::move(wp));
    }
    auto index = [&](const std::string& id) -> WaypointIndex {
      for (WaypointIndex i = 0; i < b.waypoints.size(); ++i)
        if (b.waypoints[i].id == id) return i;
      throw MapError("unknown waypoint '" + id + "'");
    };
    for (const auto& e : j.at("edges")) {
      Edge edge;
      if (e.is_array()) {
        edge.a = index(e.at(0).get<std::string>());
        edge.b = index(e.at(1).get<std::string>());
        if (e.size() > 2) edge.cost_cm = metres_to_cm(e.at(2), "edge cost");
      } else {
        edge.a = index(e.at("a").get<std::string>());
        edge.b = index(e.at("b").get<std::string>());
        if (e.contains("cost")) edge.cost_cm = metres_to_cm(e.at("cost"), "edge cost");
      }
      if (edge.cost_cm == 0) {
        const auto& p = b.waypoints[edge.a];
        const auto& q = b.waypoints[edge.b];
        edge.cost_cm = euclid_cm(p.x_cm - q.x_cm, p.y_cm - q.y_cm);
      }
      b.edges.push_back(edge);
    }
    if (j.contains("visibility")) {
      std::vector<std::vector<bool>> vis;
      for (const auto& row : j.at("visibility")) {
        std::vector<bool> r;
        for (const auto& c : row) r.push_back(c.is_boolean() ? c.get<bool>() : c.get<int>() != 0);
        vis.push_back(std::move(r));
      }
      b.visibility = std::move(vis);
    }
    if (j.contains("walls")) {
      for (const auto& w : j.at("walls")) {
        if (!w.is_array() || w.size() != 4) throw MapError("wall must be [x1, y1, x2, y2]");
        b.walls.push_back({metres_to_cm(w[0], "wall"), metres_to_cm(w[1], "wall"), metres_to_cm(w[2], "wall"),
                           metres_to_cm(w[3], "wall")});
      }
    }
    if (j.contains("hostages")) {
      for (const auto& h : j.at("hostages"))
        b.hostages.push_back({h.at("id").get<std::string>(), index(h.at("at").get<std::string>())});
    }
  } catch (const nlohmann::json::exception& e) {
    throw MapError(std::string("malformed map: ") + e.what());
  }
  return build_map(std::move(b));
}

MapDefinition load_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MapError("cannot open map file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_map(ss.str());
}

}  // namespace lpbot::sim
