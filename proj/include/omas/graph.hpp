// Copyright 2026 The omas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OMAS_GRAPH_HPP
#define OMAS_GRAPH_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "omas/error.hpp"
#include "omas/random.hpp"

namespace omas {

/// Simulator bookkeeping label. Protocol code never reads it.
using NodeId = std::uint32_t;

/// Undirected edge, stored with first < second.
using Edge = std::pair<NodeId, NodeId>;

inline Edge make_edge(NodeId a, NodeId b) {
  if (a == b) throw Error("self-loop on node " + std::to_string(a));
  return a < b ? Edge{a, b} : Edge{b, a};
}

struct ChurnEvent {
  enum class Kind { deactivate, activate };
  Kind kind;
  NodeId node;

  static ChurnEvent leave(NodeId i) { return {Kind::deactivate, i}; }
  static ChurnEvent join(NodeId i) { return {Kind::activate, i}; }
};

/// Immutable undirected graph at one tick.
///
/// Besides the active nodes and edges, a snapshot carries the edges that are
/// currently dormant because at least one endpoint is inactive, plus the order
/// in which nodes were first created. Activating a node revives its dormant
/// edges towards active endpoints, so deactivate/activate round-trips are
/// exact. Equality compares only the active graph.
class NetworkSnapshot {
 public:
  NetworkSnapshot() = default;

  NetworkSnapshot(std::vector<NodeId> nodes, std::vector<Edge> edges)
      : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    std::sort(nodes_.begin(), nodes_.end());
    if (std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end())
      throw Error("duplicate node id in snapshot");
    for (auto& e : edges_) e = make_edge(e.first, e.second);
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    for (const auto& [a, b] : edges_) {
      if (!contains(a) || !contains(b))
        throw Error("edge {" + std::to_string(a) + "," + std::to_string(b) +
                    "} has an endpoint outside the node set");
    }
    insertion_order_ = nodes_;
    build_index();
  }

  const std::vector<NodeId>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Edge>& dormant_edges() const { return dormant_; }
  /// Every node ever created, in creation order (active or not).
  const std::vector<NodeId>& insertion_order() const { return insertion_order_; }

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  bool contains(NodeId i) const {
    return std::binary_search(nodes_.begin(), nodes_.end(), i);
  }

  /// Position of `i` in nodes(); states and inputs are aligned to it.
  std::size_t index_of(NodeId i) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), i);
    if (it == nodes_.end() || *it != i)
      throw Error("node " + std::to_string(i) + " is not active");
    return static_cast<std::size_t>(it - nodes_.begin());
  }

  /// Neighbor positions of the node at position `idx`, ascending.
  const std::vector<std::size_t>& adjacency(std::size_t idx) const {
    return adjacency_.at(idx);
  }

  std::size_t degree(NodeId i) const { return adjacency_[index_of(i)].size(); }

  friend bool operator==(const NetworkSnapshot& a, const NetworkSnapshot& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

  /// Adds a fresh node wired to `neighbors` (all must be active).
  NetworkSnapshot with_new_node(NodeId i, const std::vector<NodeId>& neighbors) const {
    if (std::find(insertion_order_.begin(), insertion_order_.end(), i) !=
        insertion_order_.end())
      throw Error("node " + std::to_string(i) + " already exists");
    NetworkSnapshot out = *this;
    out.nodes_.insert(std::upper_bound(out.nodes_.begin(), out.nodes_.end(), i), i);
    for (NodeId j : neighbors) {
      if (!contains(j)) throw Error("new node wired to inactive node " + std::to_string(j));
      out.edges_.push_back(make_edge(i, j));
    }
    std::sort(out.edges_.begin(), out.edges_.end());
    out.edges_.erase(std::unique(out.edges_.begin(), out.edges_.end()), out.edges_.end());
    out.insertion_order_.push_back(i);
    out.build_index();
    return out;
  }

  NetworkSnapshot apply(const ChurnEvent& ev) const {
    NetworkSnapshot out = *this;
    if (ev.kind == ChurnEvent::Kind::deactivate) {
      if (!contains(ev.node))
        throw Error("cannot deactivate node " + std::to_string(ev.node) + ": not active");
      out.nodes_.erase(std::lower_bound(out.nodes_.begin(), out.nodes_.end(), ev.node));
      std::vector<Edge> keep;
      for (const Edge& e : edges_) {
        if (e.first == ev.node || e.second == ev.node)
          out.dormant_.push_back(e);
        else
          keep.push_back(e);
      }
      out.edges_ = std::move(keep);
      std::sort(out.dormant_.begin(), out.dormant_.end());
    } else {
      if (contains(ev.node))
        throw Error("cannot activate node " + std::to_string(ev.node) + ": already active");
      if (std::find(insertion_order_.begin(), insertion_order_.end(), ev.node) ==
          insertion_order_.end())
        throw Error("cannot activate unknown node " + std::to_string(ev.node));
      out.nodes_.insert(std::upper_bound(out.nodes_.begin(), out.nodes_.end(), ev.node),
                        ev.node);
      std::vector<Edge> still_dormant;
      for (const Edge& e : dormant_) {
        const bool incident = e.first == ev.node || e.second == ev.node;
        const NodeId other = e.first == ev.node ? e.second : e.first;
        if (incident && out.contains(other))
          out.edges_.push_back(e);
        else
          still_dormant.push_back(e);
      }
      out.dormant_ = std::move(still_dormant);
      std::sort(out.edges_.begin(), out.edges_.end());
    }
    out.build_index();
    return out;
  }

 private:
  void build_index() {
    adjacency_.assign(nodes_.size(), {});
    for (const auto& [a, b] : edges_) {
      const std::size_t ia = index_of(a);
      const std::size_t ib = index_of(b);
      adjacency_[ia].push_back(ib);
      adjacency_[ib].push_back(ia);
    }
    for (auto& row : adjacency_) std::sort(row.begin(), row.end());
  }

  std::vector<NodeId> nodes_;
  std::vector<Edge> edges_;
  std::vector<Edge> dormant_;
  std::vector<NodeId> insertion_order_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

inline std::vector<NodeId> neighbors(const NetworkSnapshot& g, NodeId i) {
  std::vector<NodeId> out;
  for (std::size_t j : g.adjacency(g.index_of(i))) out.push_back(g.nodes()[j]);
  return out;
}

/// Hop distances from the node at position `src`; unreachable = -1.
inline std::vector<int> bfs_distances(const NetworkSnapshot& g, std::size_t src) {
  std::vector<int> dist(g.size(), -1);
  std::queue<std::size_t> frontier;
  dist[src] = 0;
  frontier.push(src);
  while (!frontier.empty()) {
    const std::size_t v = frontier.front();
    frontier.pop();
    for (std::size_t w : g.adjacency(v)) {
      if (dist[w] == -1) {
        dist[w] = dist[v] + 1;
        frontier.push(w);
      }
    }
  }
  return dist;
}

inline bool is_connected(const NetworkSnapshot& g) {
  if (g.empty()) throw Error("is_connected: empty node set");
  const auto dist = bfs_distances(g, 0);
  return std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
}

/// Longest shortest path, by BFS from every node.
inline std::size_t diameter(const NetworkSnapshot& g) {
  if (g.empty()) throw Error("diameter: empty node set");
  int best = 0;
  for (std::size_t s = 0; s < g.size(); ++s) {
    for (int d : bfs_distances(g, s)) {
      if (d < 0) throw Error("diameter: graph is disconnected");
      best = std::max(best, d);
    }
  }
  return static_cast<std::size_t>(best);
}

struct NodePartition {
  std::vector<NodeId> departing;
  std::vector<NodeId> arriving;
  std::vector<NodeId> remaining;
};

/// Splits two consecutive active sets into departing, arriving and remaining
/// nodes. Inputs need not be sorted.
inline NodePartition partition_nodes(std::vector<NodeId> now, std::vector<NodeId> next) {
  std::sort(now.begin(), now.end());
  std::sort(next.begin(), next.end());
  NodePartition p;
  std::set_difference(now.begin(), now.end(), next.begin(), next.end(),
                      std::back_inserter(p.departing));
  std::set_difference(next.begin(), next.end(), now.begin(), now.end(),
                      std::back_inserter(p.arriving));
  std::set_intersection(now.begin(), now.end(), next.begin(), next.end(),
                        std::back_inserter(p.remaining));
  return p;
}

inline NodePartition partition_nodes(const NetworkSnapshot& now, const NetworkSnapshot& next) {
  return partition_nodes(now.nodes(), next.nodes());
}

// Generators ----------------------------------------------------------------

/// Path 1 - 2 - ... - n.
inline NetworkSnapshot line_graph(std::size_t n) {
  if (n == 0) throw Error("line_graph: n must be at least 1");
  std::vector<NodeId> nodes;
  std::vector<Edge> edges;
  for (std::size_t i = 1; i <= n; ++i) nodes.push_back(static_cast<NodeId>(i));
  for (std::size_t i = 1; i < n; ++i)
    edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i + 1)});
  return {std::move(nodes), std::move(edges)};
}

inline NetworkSnapshot complete_graph(std::size_t n) {
  if (n == 0) throw Error("complete_graph: n must be at least 1");
  std::vector<NodeId> nodes;
  std::vector<Edge> edges;
  for (std::size_t i = 1; i <= n; ++i) {
    nodes.push_back(static_cast<NodeId>(i));
    for (std::size_t j = i + 1; j <= n; ++j)
      edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
  }
  return {std::move(nodes), std::move(edges)};
}

/// Hub 1 with leaves 2..leaves+1.
inline NetworkSnapshot star_graph(std::size_t leaves) {
  std::vector<NodeId> nodes{1};
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < leaves; ++i) {
    nodes.push_back(static_cast<NodeId>(i + 2));
    edges.push_back({1, static_cast<NodeId>(i + 2)});
  }
  return {std::move(nodes), std::move(edges)};
}

/// Uniform random spanning tree skeleton (random attachment order) plus each
/// remaining pair independently with probability `extra_edge_prob`.
inline NetworkSnapshot random_connected_graph(std::size_t n, double extra_edge_prob,
                                              RandomStream& rng) {
  if (n == 0) throw Error("random_connected_graph: n must be at least 1");
  std::vector<NodeId> nodes;
  for (std::size_t i = 1; i <= n; ++i) nodes.push_back(static_cast<NodeId>(i));
  std::vector<NodeId> order = nodes;
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.below(i)]);
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < n; ++i)
    edges.push_back(make_edge(order[i], order[rng.below(i)]));
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j)
      if (rng.bernoulli(extra_edge_prob))
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
  return {std::move(nodes), std::move(edges)};
}

/// Preferential-attachment growth from `seed` up to `target_n` nodes.
///
/// Each new node gets the next free id and links to `edges_per_new_node`
/// distinct existing nodes, drawn sequentially without replacement with
/// probability proportional to their degree before the insertion. If every
/// existing degree is zero the draw is uniform.
inline NetworkSnapshot barabasi_albert(const NetworkSnapshot& seed, std::size_t target_n,
                                       std::size_t edges_per_new_node, RandomStream& rng) {
  if (seed.empty() || !is_connected(seed))
    throw Error("barabasi_albert: seed must be a nonempty connected graph");
  if (target_n < seed.size())
    throw Error("barabasi_albert: target_n is smaller than the seed");
  if (edges_per_new_node == 0)
    throw Error("barabasi_albert: edges_per_new_node must be at least 1");

  NetworkSnapshot g = seed;
  NodeId next_id = seed.insertion_order().empty()
                       ? 1
                       : *std::max_element(seed.insertion_order().begin(),
                                           seed.insertion_order().end()) + 1;
  while (g.size() < target_n) {
    const std::size_t m = std::min(edges_per_new_node, g.size());
    std::vector<double> weight(g.size());
    for (std::size_t v = 0; v < g.size(); ++v)
      weight[v] = static_cast<double>(g.adjacency(v).size());
    std::vector<NodeId> chosen;
    for (std::size_t pick = 0; pick < m; ++pick) {
      double total = 0.0;
      for (double w : weight) total += w;
      std::size_t v = 0;
      if (total <= 0.0) {
        std::vector<std::size_t> open;
        for (std::size_t c = 0; c < weight.size(); ++c)
          if (std::find(chosen.begin(), chosen.end(), g.nodes()[c]) == chosen.end())
            open.push_back(c);
        v = open[rng.below(open.size())];
      } else {
        double r = rng.uniform() * total;
        v = weight.size();
        for (std::size_t c = 0; c < weight.size(); ++c) {
          if (weight[c] <= 0.0) continue;
          v = c;
          if (r < weight[c]) break;
          r -= weight[c];
        }
      }
      chosen.push_back(g.nodes()[v]);
      weight[v] = 0.0;
    }
    g = g.with_new_node(next_id++, chosen);
  }
  return g;
}

/// Applies one membership change; connectivity of the result is the
/// caller's concern.
inline NetworkSnapshot apply_churn(const NetworkSnapshot& g, const ChurnEvent& ev) {
  NetworkSnapshot out = g.apply(ev);
  if (out.empty()) throw Error("churn would leave the network empty");
  return out;
}

inline NetworkSnapshot apply_churn(const NetworkSnapshot& g, const std::vector<ChurnEvent>& batch) {
  NetworkSnapshot out = g;
  for (const auto& ev : batch) out = out.apply(ev);
  if (out.empty()) throw Error("churn would leave the network empty");
  return out;
}

// Text form -------------------------------------------------------------------

/// `nodes: 1 2 3` header followed by one `u v` line per edge.
inline std::string to_edge_list(const NetworkSnapshot& g) {
  std::ostringstream os;
  os << "nodes:";
  for (NodeId i : g.nodes()) os << ' ' << i;
  os << '\n';
  for (const auto& [a, b] : g.edges()) os << a << ' ' << b << '\n';
  return os.str();
}

inline NetworkSnapshot parse_edge_list(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::vector<NodeId> nodes;
  std::vector<Edge> edges;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (line.rfind("nodes:", 0) == 0) {
      ls.ignore(6);
      std::uint64_t v;
      while (ls >> v) nodes.push_back(static_cast<NodeId>(v));
      have_header = true;
      continue;
    }
    std::uint64_t a, b;
    if (!(ls >> a >> b)) throw Error("malformed edge line: '" + line + "'");
    edges.push_back(make_edge(static_cast<NodeId>(a), static_cast<NodeId>(b)));
  }
  if (!have_header) throw Error("edge list is missing its 'nodes:' header");
  return {std::move(nodes), std::move(edges)};
}

}  // namespace omas

#endif  // OMAS_GRAPH_HPP
