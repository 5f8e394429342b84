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

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "embattack/error.hpp"
#include "embattack/random.hpp"

namespace embattack {

using NodeId = std::int64_t;

// Node ids in strictly ascending order. Row k of every matrix built over a
// NodeOrder belongs to ids()[k]; element-wise comparisons require equal
// orders.
class NodeOrder {
 public:
  NodeOrder() = default;

  // Sorts and validates; duplicates are rejected.
  explicit NodeOrder(std::vector<NodeId> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end()) {
      throw ParameterError("node order contains duplicate ids");
    }
    for (NodeId id : ids_) {
      if (id < 0) throw ParameterError("node ids must be non-negative");
    }
  }

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  NodeId operator[](std::size_t k) const { return ids_[k]; }
  const std::vector<NodeId>& ids() const noexcept { return ids_; }

  std::optional<std::size_t> find(NodeId id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - ids_.begin());
  }

  bool contains(NodeId id) const { return find(id).has_value(); }

  std::size_t index_of(NodeId id) const {
    auto k = find(id);
    if (!k) throw ParameterError("node " + std::to_string(id) + " not in order");
    return *k;
  }

  NodeOrder without(NodeId id) const {
    NodeOrder out;
    out.ids_.reserve(ids_.size());
    for (NodeId x : ids_) {
      if (x != id) out.ids_.push_back(x);
    }
    return out;
  }

  friend bool operator==(const NodeOrder&, const NodeOrder&) = default;

 private:
  std::vector<NodeId> ids_;
};

// Undirected, unweighted simple graph. Immutable once built. Adjacency is
// stored by row index into the NodeOrder; neighbor lists are sorted.
class Graph {
 public:
  using Index = std::uint32_t;

  Graph() = default;

  // Builds from an explicit node set plus edges. Self-loops and duplicate
  // edges are dropped; the number dropped is reported through `dropped`.
  static Graph from_edges(std::vector<NodeId> nodes,
                          std::span<const std::pair<NodeId, NodeId>> edges,
                          std::size_t* dropped = nullptr) {
    for (const auto& [a, b] : edges) {
      nodes.push_back(a);
      nodes.push_back(b);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    Graph g;
    g.order_ = NodeOrder(std::move(nodes));
    g.adj_.assign(g.order_.size(), {});
    std::size_t drop = 0;
    for (const auto& [a, b] : edges) {
      if (a == b) {
        ++drop;
        continue;
      }
      Index i = static_cast<Index>(g.order_.index_of(a));
      Index j = static_cast<Index>(g.order_.index_of(b));
      g.adj_[i].push_back(j);
      g.adj_[j].push_back(i);
    }
    std::size_t arcs = 0;
    for (auto& nbrs : g.adj_) {
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
      arcs += nbrs.size();
    }
    g.num_edges_ = arcs / 2;
    drop += edges.size() - drop - g.num_edges_;
    if (dropped) *dropped = drop;
    return g;
  }

  static Graph from_edges(std::span<const std::pair<NodeId, NodeId>> edges,
                          std::size_t* dropped = nullptr) {
    return from_edges({}, edges, dropped);
  }

  const NodeOrder& order() const noexcept { return order_; }
  std::size_t num_nodes() const noexcept { return order_.size(); }
  std::size_t num_edges() const noexcept { return num_edges_; }
  bool empty() const noexcept { return order_.empty(); }

  bool contains(NodeId id) const { return order_.contains(id); }
  NodeId id(std::size_t index) const { return order_[index]; }
  std::size_t index_of(NodeId id) const { return order_.index_of(id); }

  std::span<const Index> neighbors_at(std::size_t index) const {
    return adj_[index];
  }
  std::size_t degree_at(std::size_t index) const { return adj_[index].size(); }
  std::size_t degree(NodeId v) const { return degree_at(index_of(v)); }

  std::vector<NodeId> neighbors(NodeId v) const {
    std::vector<NodeId> out;
    for (Index j : adj_[index_of(v)]) out.push_back(order_[j]);
    return out;
  }

  bool has_edge_at(std::size_t i, std::size_t j) const {
    const auto& nbrs = adj_[i];
    return std::binary_search(nbrs.begin(), nbrs.end(), static_cast<Index>(j));
  }
  bool has_edge(NodeId a, NodeId b) const {
    auto i = order_.find(a), j = order_.find(b);
    return i && j && has_edge_at(*i, *j);
  }

  std::size_t max_degree() const {
    std::size_t d = 0;
    for (const auto& nbrs : adj_) d = std::max(d, nbrs.size());
    return d;
  }

  // Edges as (smaller id, larger id), sorted.
  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(num_edges_);
    for (std::size_t i = 0; i < adj_.size(); ++i) {
      for (Index j : adj_[i]) {
        if (j > i) out.emplace_back(order_[i], order_[j]);
      }
    }
    return out;
  }

  // Subgraph induced by the given row indices (any order, no duplicates).
  Graph induced_by_index(std::span<const std::size_t> keep) const {
    std::vector<NodeId> nodes;
    nodes.reserve(keep.size());
    std::vector<char> mark(adj_.size(), 0);
    for (std::size_t k : keep) {
      mark[k] = 1;
      nodes.push_back(order_[k]);
    }
    std::vector<std::pair<NodeId, NodeId>> es;
    for (std::size_t k : keep) {
      for (Index j : adj_[k]) {
        if (mark[j] && j > k) es.emplace_back(order_[k], order_[j]);
      }
    }
    return from_edges(std::move(nodes), es);
  }

  // Stable content hash over ids and edges.
  std::uint64_t fingerprint() const {
    std::uint64_t h = splitmix64(order_.size());
    for (NodeId id : order_.ids()) h = splitmix64(h ^ static_cast<std::uint64_t>(id));
    for (std::size_t i = 0; i < adj_.size(); ++i) {
      for (Index j : adj_[i]) h = splitmix64(h ^ (std::uint64_t{i} << 32 | j));
    }
    return h;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.order_ == b.order_ && a.adj_ == b.adj_;
  }

 private:
  NodeOrder order_;
  std::vector<std::vector<Index>> adj_;
  std::size_t num_edges_ = 0;
};

// Graph without v and its incident edges. Ids of the remaining nodes are
// unchanged.
inline Graph remove_node(const Graph& g, NodeId v) {
  auto vi = g.order().find(v);
  if (!vi) throw ParameterError("remove_node: node " + std::to_string(v) + " not in graph");
  std::vector<std::size_t> keep;
  keep.reserve(g.num_nodes() - 1);
  for (std::size_t k = 0; k < g.num_nodes(); ++k) {
    if (k != *vi) keep.push_back(k);
  }
  return g.induced_by_index(keep);
}

// Component label per row index; labels are assigned in order of the
// smallest contained index.
inline std::vector<std::size_t> component_labels(const Graph& g,
                                                 std::size_t* count = nullptr) {
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(g.num_nodes(), kUnset);
  std::vector<std::size_t> stack;
  std::size_t next = 0;
  for (std::size_t s = 0; s < g.num_nodes(); ++s) {
    if (label[s] != kUnset) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      for (auto w : g.neighbors_at(u)) {
        if (label[w] == kUnset) {
          label[w] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

inline bool is_connected(const Graph& g) {
  std::size_t count = 0;
  component_labels(g, &count);
  return count <= 1;
}

// Largest component; ties go to the component holding the smallest id.
inline Graph largest_connected_component(const Graph& g) {
  if (g.empty()) throw ParameterError("largest_connected_component: empty graph");
  std::size_t count = 0;
  auto label = component_labels(g, &count);
  std::vector<std::size_t> sizes(count, 0);
  for (auto l : label) ++sizes[l];
  // Labels follow smallest index, hence smallest id, so the first maximum
  // wins the tie.
  std::size_t best = static_cast<std::size_t>(
      std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < label.size(); ++k) {
    if (label[k] == best) keep.push_back(k);
  }
  return g.induced_by_index(keep);
}

struct EdgeListStats {
  std::size_t lines = 0;
  std::size_t dropped = 0;  // self-loops and duplicates
};

// One edge per line as two whitespace-separated ids; '#' and '%' start
// comment lines. Tokens after the second are ignored (weights, timestamps).
inline Graph load_edge_list(std::istream& in, EdgeListStats* stats = nullptr) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::string line;
  std::size_t lineno = 0;
  auto next_token = [](std::string_view& s) {
    std::size_t b = s.find_first_not_of(" \t\r,");
    if (b == std::string_view::npos) {
      s = {};
      return std::string_view{};
    }
    std::size_t e = s.find_first_of(" \t\r,", b);
    if (e == std::string_view::npos) e = s.size();
    auto tok = s.substr(b, e - b);
    s.remove_prefix(e);
    return tok;
  };
  auto parse_id = [&](std::string_view tok) {
    NodeId v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size() || v < 0) {
      throw ParseError("invalid node id '" + std::string(tok) + "'", lineno);
    }
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view rest = line;
    auto first = next_token(rest);
    if (first.empty() || first.front() == '#' || first.front() == '%') continue;
    auto second = next_token(rest);
    if (second.empty()) throw ParseError("expected two node ids", lineno);
    edges.emplace_back(parse_id(first), parse_id(second));
  }
  if (edges.empty()) throw ParseError("edge list is empty");
  std::size_t dropped = 0;
  Graph g = Graph::from_edges(edges, &dropped);
  if (stats) {
    stats->lines = edges.size();
    stats->dropped = dropped;
  }
  return g;
}

// Writes edges sorted by (min id, max id). Isolated nodes cannot be
// represented in this format and are lost.
inline void save_edge_list(const Graph& g, std::ostream& out) {
  for (const auto& [a, b] : g.edges()) out << a << ' ' << b << '\n';
}

}  // namespace embattack
