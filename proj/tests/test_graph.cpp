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

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "omas/graph.hpp"
#include "oracles.hpp"

using namespace omas;

namespace {

std::vector<NodeId> ids(std::initializer_list<NodeId> l) { return l; }

void expect_well_formed(const NetworkSnapshot& g) {
  for (const auto& [a, b] : g.edges()) {
    EXPECT_LT(a, b);
    EXPECT_TRUE(g.contains(a));
    EXPECT_TRUE(g.contains(b));
  }
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j : g.adjacency(i)) {
      EXPECT_NE(i, j);
      const auto& back = g.adjacency(j);
      EXPECT_NE(std::find(back.begin(), back.end(), i), back.end());
    }
}

oracle::DenseGraph dense(const NetworkSnapshot& g) {
  oracle::DenseGraph d{g.size(), {}};
  for (const auto& [a, b] : g.edges()) d.edges.emplace_back(g.index_of(a), g.index_of(b));
  return d;
}

}  // namespace

TEST(Neighbors, LineGraph) {
  const auto g = line_graph(3);
  EXPECT_EQ(neighbors(g, 2), ids({1, 3}));
  EXPECT_EQ(neighbors(g, 1), ids({2}));
  EXPECT_TRUE(neighbors(line_graph(1), 1).empty());
  EXPECT_THROW(neighbors(g, 7), Error);
}

TEST(Connectivity, Examples) {
  EXPECT_TRUE(is_connected(line_graph(6)));
  EXPECT_FALSE(is_connected(NetworkSnapshot({1, 2, 3, 4}, {{1, 2}, {3, 4}})));
  EXPECT_TRUE(is_connected(NetworkSnapshot({1}, {})));
  EXPECT_THROW(is_connected(NetworkSnapshot{}), Error);
}

TEST(Diameter, Examples) {
  EXPECT_EQ(diameter(line_graph(6)), 5u);
  EXPECT_EQ(diameter(complete_graph(4)), 1u);
  EXPECT_EQ(diameter(star_graph(5)), 2u);
  EXPECT_EQ(diameter(line_graph(1)), 0u);
  EXPECT_THROW(diameter(NetworkSnapshot({1, 2, 3, 4}, {{1, 2}, {3, 4}})), Error);
}

TEST(Diameter, LineGraphIsNMinusOne) {
  for (std::size_t n = 2; n <= 40; ++n) EXPECT_EQ(diameter(line_graph(n)), n - 1);
}

TEST(Diameter, MatchesFloydWarshallOnRandomGraphs) {
  RandomStream rng(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.below(15);
    const auto g = random_connected_graph(n, rng.uniform(0.0, 0.5), rng);
    expect_well_formed(g);
    ASSERT_TRUE(is_connected(g));
    EXPECT_EQ(static_cast<int>(diameter(g)), dense(g).diameter());
    EXPECT_LE(diameter(g), g.size() - 1);
  }
}

TEST(Snapshot, RejectsMalformedInput) {
  EXPECT_THROW(make_edge(3, 3), Error);
  EXPECT_THROW(NetworkSnapshot({1, 2}, {{1, 3}}), Error);
  EXPECT_THROW(NetworkSnapshot({1, 1}, {}), Error);
}

TEST(Snapshot, EdgesAreUnordered) {
  const NetworkSnapshot a({1, 2, 3}, {{2, 1}, {3, 2}});
  const NetworkSnapshot b({3, 2, 1}, {{1, 2}, {2, 3}, {1, 2}});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.edges().size(), 2u);
}

TEST(Partition, Examples) {
  auto p = partition_nodes(ids({1, 2, 3}), ids({2, 3, 4}));
  EXPECT_EQ(p.departing, ids({1}));
  EXPECT_EQ(p.arriving, ids({4}));
  EXPECT_EQ(p.remaining, ids({2, 3}));

  p = partition_nodes(ids({1, 2}), ids({1, 2}));
  EXPECT_TRUE(p.departing.empty());
  EXPECT_TRUE(p.arriving.empty());
  EXPECT_EQ(p.remaining, ids({1, 2}));

  p = partition_nodes(ids({1}), ids({2}));
  EXPECT_EQ(p.departing, ids({1}));
  EXPECT_EQ(p.arriving, ids({2}));
  EXPECT_TRUE(p.remaining.empty());
}

TEST(Partition, RecomposesBothSets) {
  RandomStream rng(3);
  for (int t = 0; t < 200; ++t) {
    std::vector<NodeId> now, next;
    for (NodeId i = 1; i <= 20; ++i) {
      if (rng.bernoulli(0.5)) now.push_back(i);
      if (rng.bernoulli(0.5)) next.push_back(i);
    }
    const auto p = partition_nodes(now, next);
    std::vector<NodeId> a = p.departing, b = p.arriving;
    a.insert(a.end(), p.remaining.begin(), p.remaining.end());
    b.insert(b.end(), p.remaining.begin(), p.remaining.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, now);
    EXPECT_EQ(b, next);
    for (NodeId d : p.departing) {
      EXPECT_EQ(std::count(p.arriving.begin(), p.arriving.end(), d), 0);
      EXPECT_EQ(std::count(p.remaining.begin(), p.remaining.end(), d), 0);
    }
    for (NodeId d : p.arriving)
      EXPECT_EQ(std::count(p.remaining.begin(), p.remaining.end(), d), 0);
  }
}

TEST(LineGraph, Shapes) {
  EXPECT_EQ(line_graph(6).edges().size(), 5u);
  EXPECT_TRUE(line_graph(1).edges().empty());
  EXPECT_EQ(line_graph(2).edges().size(), 1u);
  EXPECT_EQ(diameter(line_graph(2)), 1u);
  EXPECT_THROW(line_graph(0), Error);
}

TEST(Churn, RemoveLeafAndMiddle) {
  const auto g = line_graph(3);
  const auto leaf = apply_churn(g, ChurnEvent::leave(3));
  EXPECT_EQ(leaf, line_graph(2));
  const auto middle = apply_churn(g, ChurnEvent::leave(2));
  EXPECT_EQ(middle.size(), 2u);
  EXPECT_FALSE(is_connected(middle));
}

TEST(Churn, RoundTripRestoresSnapshot) {
  RandomStream rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto g = random_connected_graph(2 + rng.below(10), 0.3, rng);
    for (NodeId i : g.nodes()) {
      const auto back = apply_churn(apply_churn(g, ChurnEvent::leave(i)), ChurnEvent::join(i));
      EXPECT_EQ(back, g);
      expect_well_formed(back);
    }
  }
}

TEST(Churn, RejoinOnlyLinksActiveEndpoints) {
  auto g = line_graph(4);
  g = apply_churn(g, ChurnEvent::leave(2));
  g = apply_churn(g, ChurnEvent::leave(3));
  g = apply_churn(g, ChurnEvent::join(2));
  EXPECT_EQ(neighbors(g, 2), ids({1}));
  g = apply_churn(g, ChurnEvent::join(3));
  EXPECT_EQ(g, line_graph(4));
}

TEST(Churn, InvalidEvents) {
  const auto g = line_graph(3);
  EXPECT_THROW(apply_churn(g, ChurnEvent::leave(9)), Error);
  EXPECT_THROW(apply_churn(g, ChurnEvent::join(2)), Error);
  EXPECT_THROW(apply_churn(g, ChurnEvent::join(9)), Error);
  EXPECT_THROW(apply_churn(line_graph(1), ChurnEvent::leave(1)), Error);
}

TEST(BarabasiAlbert, GrowsConnectedWithInsertionOrder) {
  RandomStream rng(42);
  const auto g = barabasi_albert(line_graph(5), 100, 2, rng);
  expect_well_formed(g);
  EXPECT_EQ(g.size(), 100u);
  EXPECT_TRUE(is_connected(g));
  EXPECT_LE(diameter(g), 10u);
  EXPECT_EQ(g.edges().size(), 4u + 2u * 95u);
  ASSERT_EQ(g.insertion_order().size(), 100u);
  for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(g.insertion_order()[i], i + 1);
}

TEST(BarabasiAlbert, ConnectedForManySeeds) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    RandomStream rng(s);
    const auto g = barabasi_albert(line_graph(1 + s % 5), 30 + s, 1 + s % 3, rng);
    EXPECT_EQ(g.size(), 30 + s);
    EXPECT_TRUE(is_connected(g));
  }
}

TEST(BarabasiAlbert, TargetEqualToSeedIsIdentity) {
  RandomStream rng(1);
  EXPECT_EQ(barabasi_albert(line_graph(5), 5, 2, rng), line_graph(5));
}

TEST(BarabasiAlbert, Errors) {
  RandomStream rng(1);
  EXPECT_THROW(barabasi_albert(line_graph(5), 4, 2, rng), Error);
  EXPECT_THROW(barabasi_albert(line_graph(5), 10, 0, rng), Error);
  EXPECT_THROW(barabasi_albert(NetworkSnapshot({1, 2}, {}), 10, 1, rng), Error);
}

TEST(BarabasiAlbert, AttachmentFollowsDegree) {
  // Seed 1-2-3 has degrees 1, 2, 1: one new edge lands on node 2 with
  // probability 1/2 and on each end with probability 1/4.
  constexpr int kTrials = 10000;
  std::map<NodeId, int> hits;
  RandomStream rng(2024);
  for (int t = 0; t < kTrials; ++t) {
    const auto g = barabasi_albert(line_graph(3), 4, 1, rng);
    ++hits[neighbors(g, 4).front()];
  }
  const std::map<NodeId, double> expected{{1, 0.25}, {2, 0.5}, {3, 0.25}};
  for (const auto& [node, p] : expected) {
    const double sigma = std::sqrt(kTrials * p * (1.0 - p));
    EXPECT_NEAR(hits[node], kTrials * p, 3.0 * sigma) << "node " << node;
  }
}

TEST(BarabasiAlbert, Deterministic) {
  RandomStream a(9), b(9), c(10);
  const auto ga = barabasi_albert(line_graph(5), 60, 2, a);
  EXPECT_EQ(ga, barabasi_albert(line_graph(5), 60, 2, b));
  EXPECT_FALSE(ga == barabasi_albert(line_graph(5), 60, 2, c));
}

TEST(EdgeList, RoundTripKeepsIsolatedNodes) {
  const NetworkSnapshot g({1, 2, 5, 9}, {{1, 2}, {2, 5}});
  const auto text = to_edge_list(g);
  EXPECT_EQ(text, "nodes: 1 2 5 9\n1 2\n2 5\n");
  EXPECT_EQ(parse_edge_list(text), g);
  EXPECT_THROW(parse_edge_list("1 2\n"), Error);
  EXPECT_THROW(parse_edge_list("nodes: 1 2\n1\n"), Error);
}
