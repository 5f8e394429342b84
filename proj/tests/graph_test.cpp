// Copyright 2026 The embattack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "embattack/generators.hpp"
#include "embattack/graph.hpp"

namespace embattack {
namespace {

Graph parse(const std::string& text, EdgeListStats* stats = nullptr) {
  std::istringstream in(text);
  return load_edge_list(in, stats);
}

Graph make(std::vector<std::pair<NodeId, NodeId>> edges, std::vector<NodeId> extra = {}) {
  return Graph::from_edges(std::move(extra), edges);
}

void expect_simple(const Graph& g) {
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    for (auto j : g.neighbors_at(i)) {
      EXPECT_NE(i, j);
      EXPECT_TRUE(g.has_edge_at(j, i));
    }
  }
}

TEST(EdgeList, PathOfLengthTwo) {
  Graph g = parse("0 1\n1 2");
  EXPECT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_TRUE(g.has_edge(2, 1));
  EXPECT_FALSE(g.has_edge(0, 2));
}

TEST(EdgeList, DuplicatesAndSelfLoopsDropped) {
  EdgeListStats stats;
  Graph g = parse("0 1\n1 0\n1 1", &stats);
  EXPECT_EQ(g.num_nodes(), 2u);
  EXPECT_EQ(g.num_edges(), 1u);
  EXPECT_EQ(stats.dropped, 2u);
}

TEST(EdgeList, CommentsBlankLinesAndExtraColumns) {
  Graph g = parse("# header\n% konect\n\n3 7 1.0\n7 9\n");
  EXPECT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.order().ids(), (std::vector<NodeId>{3, 7, 9}));
}

TEST(EdgeList, MalformedLineReportsLineNumber) {
  try {
    parse("0 1\n# c\n2 x\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse("0\n"), ParseError);
  EXPECT_THROW(parse("-1 2\n"), ParseError);
}

TEST(EdgeList, EmptyInputIsAnError) {
  EXPECT_THROW(parse(""), Error);
  EXPECT_THROW(parse("# only comments\n"), Error);
}

TEST(EdgeList, RoundTripOnRandomGraphs) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Graph g = generate_barabasi(30 + seed, 1 + seed % 4, seed);
    std::ostringstream out;
    save_edge_list(g, out);
    EXPECT_EQ(parse(out.str()), g);
  }
}

TEST(EdgeList, SavedFileIsSorted) {
  std::ostringstream out;
  save_edge_list(make({{5, 2}, {1, 9}, {2, 1}}), out);
  EXPECT_EQ(out.str(), "1 2\n1 9\n2 5\n");
}

TEST(Graph, IdsArePreservedAndNeighborsSorted) {
  Graph g = make({{10, 40}, {40, 20}, {10, 20}, {40, 30}});
  EXPECT_EQ(g.neighbors(40), (std::vector<NodeId>{10, 20, 30}));
  EXPECT_EQ(g.degree(30), 1u);
  EXPECT_EQ(g.max_degree(), 3u);
  expect_simple(g);
}

TEST(RemoveNode, Triangle) {
  Graph t = make({{0, 1}, {1, 2}, {0, 2}});
  for (NodeId v = 0; v < 3; ++v) {
    Graph r = remove_node(t, v);
    EXPECT_EQ(r.num_nodes(), 2u);
    EXPECT_EQ(r.num_edges(), 1u);
    EXPECT_FALSE(r.order().contains(v));
  }
  EXPECT_EQ(t.num_nodes(), 3u);
}

TEST(RemoveNode, StarCenterLeavesIsolatedNodes) {
  Graph star = make({{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  Graph r = remove_node(star, 0);
  EXPECT_EQ(r.num_nodes(), 4u);
  EXPECT_EQ(r.num_edges(), 0u);
  EXPECT_EQ(r.order().ids(), (std::vector<NodeId>{1, 2, 3, 4}));
}

TEST(RemoveNode, PathMiddleDisconnects) {
  Graph r = remove_node(make({{0, 1}, {1, 2}}), 1);
  EXPECT_EQ(r.num_nodes(), 2u);
  EXPECT_EQ(r.num_edges(), 0u);
  EXPECT_FALSE(is_connected(r));
}

TEST(RemoveNode, SizesOnRandomGraphs) {
  Graph g = generate_barabasi(200, 3, 11);
  for (NodeId v : {0, 7, 150, 199}) {
    Graph r = remove_node(g, v);
    EXPECT_EQ(r.num_nodes(), g.num_nodes() - 1);
    EXPECT_EQ(r.num_edges(), g.num_edges() - g.degree(v));
    expect_simple(r);
  }
}

TEST(RemoveNode, MissingNodeIsAnError) {
  EXPECT_THROW(remove_node(make({{0, 1}}), 5), ParameterError);
}

TEST(Components, ConnectedGraphIsItsOwnComponent) {
  Graph g = generate_barabasi(50, 2, 3);
  EXPECT_TRUE(is_connected(g));
  EXPECT_EQ(largest_connected_component(g), g);
}

TEST(Components, TieGoesToSmallestId) {
  Graph g = make({{4, 5}, {5, 6}, {4, 6}, {1, 2}, {2, 3}, {1, 3}}, {0});
  Graph lcc = largest_connected_component(g);
  EXPECT_EQ(lcc.order().ids(), (std::vector<NodeId>{1, 2, 3}));
  EXPECT_EQ(lcc.num_edges(), 3u);
}

TEST(Components, EmptyGraphIsAnError) {
  EXPECT_THROW(largest_connected_component(Graph{}), Error);
}

}  // namespace
}  // namespace embattack
