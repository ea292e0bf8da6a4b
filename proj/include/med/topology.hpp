#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <cstdlib>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "med/error.hpp"

namespace med {

using NodeId = int;

struct GridCoord {
  int row = 0;
  int col = 0;
  friend bool operator==(const GridCoord&, const GridCoord&) = default;
};

// Rectangular 4-neighbour lattice. Node ids are row-major, 0..rows*cols-1.
class GridTopology {
 public:
  GridTopology(int rows, int cols, double edge_length_km)
      : rows_(rows), cols_(cols), edge_length_km_(edge_length_km) {
    if (rows < 2 || cols < 2)
      throw ConfigError("grid dimensions must be at least 2x2, got " +
                        std::to_string(rows) + "x" + std::to_string(cols));
    if (!(edge_length_km > 0.0))
      throw ConfigError("edge length must be positive");
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  double edge_length_km() const noexcept { return edge_length_km_; }
  int num_nodes() const noexcept { return rows_ * cols_; }
  int num_edges() const noexcept {
    return rows_ * (cols_ - 1) + cols_ * (rows_ - 1);
  }

  bool contains(NodeId n) const noexcept { return n >= 0 && n < num_nodes(); }

  GridCoord coord(NodeId n) const { return {n / cols_, n % cols_}; }
  NodeId id(GridCoord c) const { return c.row * cols_ + c.col; }

  // Sorted ascending by id.
  std::vector<NodeId> neighbours(NodeId n) const {
    const auto [r, c] = coord(n);
    std::vector<NodeId> out;
    out.reserve(4);
    if (r > 0) out.push_back(id({r - 1, c}));
    if (c > 0) out.push_back(id({r, c - 1}));
    if (c + 1 < cols_) out.push_back(id({r, c + 1}));
    if (r + 1 < rows_) out.push_back(id({r + 1, c}));
    return out;
  }

  bool adjacent(NodeId a, NodeId b) const {
    if (!contains(a) || !contains(b)) return false;
    const auto ca = coord(a);
    const auto cb = coord(b);
    return std::abs(ca.row - cb.row) + std::abs(ca.col - cb.col) == 1;
  }

  // Hop distance from `source` to every node.
  std::vector<int> bfs_distances(NodeId source) const {
    std::vector<int> dist(static_cast<std::size_t>(num_nodes()), -1);
    std::queue<NodeId> frontier;
    dist[static_cast<std::size_t>(source)] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
      const NodeId u = frontier.front();
      frontier.pop();
      for (NodeId v : neighbours(u)) {
        auto& dv = dist[static_cast<std::size_t>(v)];
        if (dv < 0) {
          dv = dist[static_cast<std::size_t>(u)] + 1;
          frontier.push(v);
        }
      }
    }
    return dist;
  }

 private:
  int rows_;
  int cols_;
  double edge_length_km_;
};

inline GridTopology build_grid(int rows, int cols, double edge_length_km) {
  return GridTopology(rows, cols, edge_length_km);
}

struct Route {
  NodeId user = 0;
  std::vector<NodeId> vertices;  // central node first, user last

  int num_segments() const noexcept {
    return static_cast<int>(vertices.size()) - 1;
  }
  friend bool operator==(const Route&, const Route&) = default;
};

struct RoutePlan {
  NodeId central_node = 0;
  std::vector<Route> routes;
  int v_max = 0;  // vertices on the longest route, endpoints included

  std::vector<int> segment_counts() const {
    std::vector<int> out;
    out.reserve(routes.size());
    for (const auto& r : routes) out.push_back(r.num_segments());
    return out;
  }
  friend bool operator==(const RoutePlan&, const RoutePlan&) = default;
};

namespace detail {

inline void check_users(const GridTopology& topo, std::span<const NodeId> users) {
  if (users.empty()) throw ConfigError("user set is empty");
  std::set<NodeId> seen;
  for (NodeId u : users) {
    if (!topo.contains(u))
      throw ConfigError("user node " + std::to_string(u) + " is outside the grid");
    if (!seen.insert(u).second)
      throw ConfigError("user node " + std::to_string(u) + " listed twice");
  }
}

inline std::pair<NodeId, NodeId> edge_key(NodeId a, NodeId b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

}  // namespace detail

// Node closest to the users: minimum total hop distance, then minimum
// worst-case distance, then smallest id.
inline NodeId select_central_node(const GridTopology& topo,
                                  std::span<const NodeId> users) {
  detail::check_users(topo, users);
  std::vector<std::vector<int>> dist;
  dist.reserve(users.size());
  for (NodeId u : users) dist.push_back(topo.bfs_distances(u));

  NodeId best = -1;
  std::tuple<long, int, NodeId> best_key{};
  for (NodeId n = 0; n < topo.num_nodes(); ++n) {
    long sum = 0;
    int worst = 0;
    for (const auto& d : dist) {
      const int dn = d[static_cast<std::size_t>(n)];
      sum += dn;
      worst = std::max(worst, dn);
    }
    const std::tuple<long, int, NodeId> key{sum, worst, n};
    if (best < 0 || key < best_key) {
      best = n;
      best_key = key;
    }
  }
  return best;
}

// One shortest path per user, in the given order. Among shortest paths the
// search minimises the number of edges already taken by earlier routes, so
// the plan is edge-disjoint whenever a disjoint set of shortest paths can be
// built greedily. Ties resolve towards lower node ids.
inline RoutePlan compute_routes(const GridTopology& topo, NodeId cn,
                                std::span<const NodeId> users) {
  if (!topo.contains(cn))
    throw ConfigError("central node " + std::to_string(cn) + " is outside the grid");
  detail::check_users(topo, users);

  // Hop count dominates; reused edges only break ties between shortest paths.
  const long reuse_penalty = 1;
  const long hop_cost = static_cast<long>(topo.num_edges()) + 1;

  std::set<std::pair<NodeId, NodeId>> used;
  RoutePlan plan;
  plan.central_node = cn;

  const auto n = static_cast<std::size_t>(topo.num_nodes());
  for (NodeId user : users) {
    if (user == cn)
      throw ConfigError("user node " + std::to_string(user) +
                        " coincides with the central node");

    std::vector<long> cost(n, std::numeric_limits<long>::max());
    std::vector<NodeId> pred(n, -1);
    using Entry = std::pair<long, NodeId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    cost[static_cast<std::size_t>(cn)] = 0;
    open.emplace(0, cn);
    while (!open.empty()) {
      const auto [c, u] = open.top();
      open.pop();
      if (c != cost[static_cast<std::size_t>(u)]) continue;
      if (u == user) break;
      for (NodeId v : topo.neighbours(u)) {
        const long w = hop_cost + (used.count(detail::edge_key(u, v)) ? reuse_penalty : 0);
        auto& cv = cost[static_cast<std::size_t>(v)];
        if (c + w < cv) {
          cv = c + w;
          pred[static_cast<std::size_t>(v)] = u;
          open.emplace(cv, v);
        }
      }
    }

    Route route;
    route.user = user;
    for (NodeId v = user; v != -1; v = pred[static_cast<std::size_t>(v)])
      route.vertices.push_back(v);
    std::reverse(route.vertices.begin(), route.vertices.end());
    for (std::size_t i = 1; i < route.vertices.size(); ++i)
      used.insert(detail::edge_key(route.vertices[i - 1], route.vertices[i]));

    plan.v_max = std::max(plan.v_max, static_cast<int>(route.vertices.size()));
    plan.routes.push_back(std::move(route));
  }
  return plan;
}

}  // namespace med
