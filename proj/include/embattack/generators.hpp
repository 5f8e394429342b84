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
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "embattack/error.hpp"
#include "embattack/graph.hpp"
#include "embattack/random.hpp"

namespace embattack {

// Preferential attachment: nodes 0..m-1 form a clique, then every further
// node links to m distinct existing nodes drawn with probability
// proportional to their current degree.
inline Graph generate_barabasi(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (m < 1 || n <= m) {
    throw ParameterError("barabasi: need n > m >= 1 (n=" + std::to_string(n) +
                         ", m=" + std::to_string(m) + ")");
  }
  Rng rng(seed);
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(m * (m - 1) / 2 + (n - m) * m);
  // Each node appears once per incident edge end.
  std::vector<NodeId> ends;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      edges.emplace_back(a, b);
      ends.push_back(static_cast<NodeId>(a));
      ends.push_back(static_cast<NodeId>(b));
    }
  }
  std::vector<NodeId> picked;
  for (std::size_t t = m; t < n; ++t) {
    picked.clear();
    while (picked.size() < m) {
      // The m == 1 seed is a lone node of degree zero.
      NodeId c = ends.empty() ? static_cast<NodeId>(uniform_index(rng, t))
                              : ends[uniform_index(rng, ends.size())];
      if (std::find(picked.begin(), picked.end(), c) == picked.end()) {
        picked.push_back(c);
      }
    }
    for (NodeId c : picked) {
      edges.emplace_back(c, static_cast<NodeId>(t));
      ends.push_back(c);
      ends.push_back(static_cast<NodeId>(t));
    }
  }
  std::vector<NodeId> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = static_cast<NodeId>(i);
  return Graph::from_edges(std::move(nodes), edges);
}

// Breadth-first collection from `start`, level by level. The level that
// would overshoot target_n is shuffled and truncated.
inline Graph snowball_sample_from(const Graph& g, std::size_t target_n, NodeId start,
                                  std::uint64_t seed) {
  if (target_n == 0) throw ParameterError("snowball: target size must be positive");
  if (target_n > g.num_nodes()) {
    throw ParameterError("snowball: target " + std::to_string(target_n) +
                         " exceeds graph size " + std::to_string(g.num_nodes()));
  }
  Rng rng(seed);
  std::vector<char> seen(g.num_nodes(), 0);
  std::vector<std::size_t> collected{g.index_of(start)};
  seen[collected.front()] = 1;
  std::vector<std::size_t> level = collected, next;
  while (collected.size() < target_n && !level.empty()) {
    next.clear();
    for (std::size_t u : level) {
      for (auto w : g.neighbors_at(u)) {
        if (!seen[w]) {
          seen[w] = 1;
          next.push_back(w);
        }
      }
    }
    std::sort(next.begin(), next.end());
    const std::size_t room = target_n - collected.size();
    if (next.size() > room) {
      shuffle(next, rng);
      next.resize(room);
    }
    collected.insert(collected.end(), next.begin(), next.end());
    level = next;
  }
  if (collected.size() < target_n) {
    throw ParameterError("snowball: reachable component has only " +
                         std::to_string(collected.size()) + " nodes, target " +
                         std::to_string(target_n));
  }
  return g.induced_by_index(collected);
}

// Start node drawn uniformly from the largest connected component.
inline Graph snowball_sample(const Graph& g, std::size_t target_n, std::uint64_t seed) {
  if (g.empty()) throw ParameterError("snowball: empty graph");
  Graph lcc = largest_connected_component(g);
  Rng rng(derive_seed(seed, "snowball-start"));
  NodeId start = lcc.id(uniform_index(rng, lcc.num_nodes()));
  return snowball_sample_from(g, target_n, start, seed);
}

struct DegreeBuckets {
  std::vector<NodeId> low, medium, high;
};

// Targets from the bottom decile, the two deciles around the median and
// the top decile of the degree ranking (ties by id). Windows widen to
// per_bucket on small graphs; buckets never share a node.
inline DegreeBuckets stratified_degree_sample(const Graph& g, std::size_t per_bucket,
                                              std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  if (per_bucket == 0 || n < 3 * per_bucket) {
    throw ParameterError("stratified sample: need at least " +
                         std::to_string(3 * per_bucket) + " nodes, graph has " +
                         std::to_string(n));
  }
  std::vector<std::size_t> ranked(n);
  for (std::size_t k = 0; k < n; ++k) ranked[k] = k;
  std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    return g.degree_at(a) < g.degree_at(b);
  });
  std::vector<char> taken(n, 0);
  Rng rng(seed);
  auto draw = [&](std::size_t lo, std::size_t hi) {
    // [lo, hi) positions in the ranking; widened until enough free nodes.
    std::vector<std::size_t> pool;
    for (;;) {
      pool.clear();
      for (std::size_t p = lo; p < hi; ++p) {
        if (!taken[ranked[p]]) pool.push_back(ranked[p]);
      }
      if (pool.size() >= per_bucket || (lo == 0 && hi == n)) break;
      if (lo > 0) --lo;
      if (hi < n) ++hi;
    }
    shuffle(pool, rng);
    pool.resize(per_bucket);
    std::sort(pool.begin(), pool.end());
    std::vector<NodeId> out;
    for (std::size_t k : pool) {
      taken[k] = 1;
      out.push_back(g.id(k));
    }
    return out;
  };
  const auto decile = static_cast<std::size_t>(std::ceil(n / 10.0));
  DegreeBuckets b;
  b.low = draw(0, std::min(n, decile));
  b.high = draw(n - std::min(n, decile), n);
  const std::size_t mid = n / 2;
  b.medium = draw(mid - std::min(mid, decile), std::min(n, mid + decile));
  return b;
}

}  // namespace embattack
