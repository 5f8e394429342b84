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

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "embattack/embedding.hpp"
#include "embattack/graph.hpp"
#include "embattack/line.hpp"
#include "embattack/random.hpp"

namespace embattack {

// Second-order biased walks. With p == q == 1 the walk is first-order and
// no per-arc tables are built.
class BiasedWalker {
 public:
  BiasedWalker(const Graph& g, double p, double q) : g_(g), uniform_(p == 1.0 && q == 1.0) {
    if (uniform_) return;
    offsets_.assign(g.num_nodes() + 1, 0);
    for (std::size_t i = 0; i < g.num_nodes(); ++i) offsets_[i + 1] = offsets_[i] + g.degree_at(i);
    tables_.resize(offsets_.back());
    std::vector<double> w;
    for (std::size_t prev = 0; prev < g.num_nodes(); ++prev) {
      auto nbrs = g.neighbors_at(prev);
      for (std::size_t a = 0; a < nbrs.size(); ++a) {
        const std::size_t cur = nbrs[a];
        auto next = g.neighbors_at(cur);
        w.assign(next.size(), 0.0);
        for (std::size_t b = 0; b < next.size(); ++b) {
          if (next[b] == prev) {
            w[b] = 1.0 / p;
          } else if (g.has_edge_at(prev, next[b])) {
            w[b] = 1.0;
          } else {
            w[b] = 1.0 / q;
          }
        }
        tables_[offsets_[prev] + a] = AliasTable(w);
      }
    }
  }

  // Row indices of a walk of at most `length` nodes; stops early at a node
  // without neighbors.
  std::vector<std::size_t> walk(std::size_t start, int length, Rng& rng) const {
    std::vector<std::size_t> path{start};
    path.reserve(static_cast<std::size_t>(length));
    while (static_cast<int>(path.size()) < length) {
      const std::size_t cur = path.back();
      auto nbrs = g_.neighbors_at(cur);
      if (nbrs.empty()) break;
      if (uniform_ || path.size() == 1) {
        path.push_back(nbrs[uniform_index(rng, nbrs.size())]);
        continue;
      }
      const std::size_t prev = path[path.size() - 2];
      auto pn = g_.neighbors_at(prev);
      const auto slot = static_cast<std::size_t>(
          std::lower_bound(pn.begin(), pn.end(), static_cast<Graph::Index>(cur)) - pn.begin());
      path.push_back(nbrs[tables_[offsets_[prev] + slot].sample(rng)]);
    }
    return path;
  }

 private:
  const Graph& g_;
  bool uniform_;
  std::vector<std::size_t> offsets_;
  std::vector<AliasTable> tables_;
};

// node2vec: biased walks from every node, then skip-gram with negative
// sampling over the walk corpus. Nodes that never appear as context keep
// their initialization.
inline Embedding train_node2vec(const Graph& g, const Node2VecParams& params, int dim,
                                std::uint64_t seed) {
  if (g.empty()) throw ParameterError("node2vec: empty graph");
  const std::size_t n = g.num_nodes();
  BiasedWalker walker(g, params.p, params.q);

  Rng walk_rng(derive_seed(seed, "node2vec-walks"));
  std::vector<std::vector<std::size_t>> walks;
  walks.reserve(n * static_cast<std::size_t>(params.walks_per_node));
  std::vector<std::size_t> starts(n);
  for (std::size_t i = 0; i < n; ++i) starts[i] = i;
  for (int r = 0; r < params.walks_per_node; ++r) {
    shuffle(starts, walk_rng);
    for (std::size_t s : starts) walks.push_back(walker.walk(s, params.walk_length, walk_rng));
  }

  std::vector<double> counts(n, 0.0);
  std::uint64_t tokens = 0;
  for (const auto& w : walks) {
    for (auto v : w) counts[v] += 1.0;
    tokens += w.size();
  }
  for (double& c : counts) c = std::pow(c, 0.75);
  const AliasTable noise(counts);

  const auto& sigmoid = detail::SigmoidTable::instance();
  Rng rng(derive_seed(seed, "node2vec-sgd"));
  std::vector<float> syn0(n * dim), syn1(n * dim, 0.f), err(dim);
  detail::init_uniform(syn0, dim, rng);
  const double total = static_cast<double>(tokens) * params.epochs + 1.0;
  std::uint64_t processed = 0;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    for (const auto& w : walks) {
      const auto len = static_cast<std::ptrdiff_t>(w.size());
      for (std::ptrdiff_t i = 0; i < len; ++i, ++processed) {
        const double rate =
            params.learning_rate * std::max(1e-4, 1.0 - static_cast<double>(processed) / total);
        const std::size_t center = w[i];
        const auto reach = static_cast<std::ptrdiff_t>(
            params.window - static_cast<int>(uniform_index(rng, params.window)));
        for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - reach);
             j <= std::min(len - 1, i + reach); ++j) {
          if (j == i) continue;
          float* in = syn0.data() + w[j] * dim;
          std::fill(err.begin(), err.end(), 0.f);
          for (int d = 0; d <= params.negatives; ++d) {
            std::size_t target = center;
            float label = 1.f;
            if (d > 0) {
              target = noise.sample(rng);
              if (target == center) continue;
              label = 0.f;
            }
            detail::sgns_update(in, syn1.data() + target * dim, err.data(),
                                static_cast<std::size_t>(dim), label, static_cast<float>(rate),
                                sigmoid);
          }
          for (int c = 0; c < dim; ++c) in[c] += err[c];
        }
      }
    }
  }
  RowMatrix out(static_cast<Eigen::Index>(n), dim);
  for (std::size_t r = 0; r < n; ++r) {
    for (int c = 0; c < dim; ++c) out(static_cast<Eigen::Index>(r), c) = syn0[r * dim + c];
  }
  guard_zero_rows(out);
  return Embedding{g.order(), std::move(out), "NODE2VEC", seed};
}

}  // namespace embattack
