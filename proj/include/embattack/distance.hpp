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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <iomanip>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "embattack/embed.hpp"
#include "embattack/embedding.hpp"
#include "embattack/error.hpp"
#include "embattack/graph.hpp"

namespace embattack {

// Symmetric pairwise cosine distances with zero diagonal.
struct DistanceMatrix {
  NodeOrder order;
  Eigen::MatrixXd values;

  std::size_t size() const noexcept { return order.size(); }

  // Same matrix with the row and column of `id` removed.
  DistanceMatrix without(NodeId id) const {
    const auto k = static_cast<Eigen::Index>(order.index_of(id));
    const Eigen::Index n = values.rows(), tail = n - k - 1;
    DistanceMatrix out{order.without(id), Eigen::MatrixXd(n - 1, n - 1)};
    out.values.topLeftCorner(k, k) = values.topLeftCorner(k, k);
    out.values.topRightCorner(k, tail) = values.topRightCorner(k, tail);
    out.values.bottomLeftCorner(tail, k) = values.bottomLeftCorner(tail, k);
    out.values.bottomRightCorner(tail, tail) = values.bottomRightCorner(tail, tail);
    return out;
  }
};

// Element-wise difference of two distance matrices over the same order.
struct DiffMatrix {
  NodeOrder order;
  Eigen::MatrixXd values;

  std::size_t size() const noexcept { return order.size(); }
};

inline DistanceMatrix cosine_distance_matrix(const Embedding& e) {
  RowMatrix unit = e.vectors;
  for (Eigen::Index r = 0; r < unit.rows(); ++r) {
    const double norm = unit.row(r).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw ParameterError("cosine distance: row of node " + std::to_string(e.order[r]) +
                           " has zero or non-finite norm");
    }
    unit.row(r) /= norm;
  }
  const Eigen::Index n = unit.rows();
  DistanceMatrix d{e.order, Eigen::MatrixXd(n, n)};
  d.values.noalias() = unit * unit.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    d.values(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::clamp(1.0 - d.values(i, j), 0.0, 2.0);
      d.values(i, j) = v;
      d.values(j, i) = v;
    }
  }
  return d;
}

// original - reduced. Orders must match exactly; rows are never realigned
// by position.
inline DiffMatrix diff_matrix(const DistanceMatrix& original, const DistanceMatrix& reduced) {
  if (!(original.order == reduced.order)) {
    throw MismatchError("diff_matrix: node orders differ (" + std::to_string(original.size()) +
                        " vs " + std::to_string(reduced.size()) + " nodes)");
  }
  return DiffMatrix{original.order, original.values - reduced.values};
}

// Sum of |a - b| over unordered off-diagonal pairs.
inline double embedding_distance(const DistanceMatrix& a, const DistanceMatrix& b) {
  if (!(a.order == b.order)) throw MismatchError("embedding_distance: node orders differ");
  const Eigen::Index n = a.values.rows();
  double sum = 0.0;
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) sum += std::abs(a.values(i, j) - b.values(i, j));
  }
  return sum;
}

inline double embedding_distance(const Embedding& a, const Embedding& b) {
  if (!(a.order == b.order)) throw MismatchError("embedding_distance: node orders differ");
  return embedding_distance(cosine_distance_matrix(a), cosine_distance_matrix(b));
}

// Seed of the k-th of several runs on one graph. Run 0 uses the caller's
// seed, so a single run matches the non-repeated pipeline.
inline std::uint64_t repeat_seed(std::uint64_t seed, std::size_t k) {
  return k == 0 ? seed : derive_seed(seed, "repeat", k);
}

// Trains `count` embeddings of g and keeps the one closest to `target`;
// the lowest index wins ties.
inline Embedding select_most_similar_embedding(const Embedding& target, const Graph& g,
                                               const EmbedSpec& spec, std::size_t count,
                                               std::uint64_t seed) {
  if (count < 1) throw ParameterError("select_most_similar_embedding: count must be >= 1");
  if (!(target.order == g.order())) {
    throw MismatchError("select_most_similar_embedding: target does not cover the graph");
  }
  Embedding best = embed(g, spec, repeat_seed(seed, 0));
  if (count == 1) return best;
  const DistanceMatrix reference = cosine_distance_matrix(target);
  double best_distance = embedding_distance(reference, cosine_distance_matrix(best));
  for (std::size_t k = 1; k < count; ++k) {
    Embedding candidate = embed(g, spec, repeat_seed(seed, k));
    const double d = embedding_distance(reference, cosine_distance_matrix(candidate));
    if (d < best_distance) {
      best_distance = d;
      best = std::move(candidate);
    }
  }
  return best;
}

// Entry-wise mean of the distance matrices of `count` embedding runs.
inline DistanceMatrix average_distance_matrix(const Graph& g, const EmbedSpec& spec,
                                              std::size_t count, std::uint64_t seed) {
  if (count < 1) throw ParameterError("average_distance_matrix: count must be >= 1");
  DistanceMatrix sum = cosine_distance_matrix(embed(g, spec, repeat_seed(seed, 0)));
  for (std::size_t k = 1; k < count; ++k) {
    sum.values += cosine_distance_matrix(embed(g, spec, repeat_seed(seed, k))).values;
  }
  if (count > 1) sum.values /= static_cast<double>(count);
  return sum;
}

// "n" header, then row k holds the k+1 entries d(k, 0..k) prefixed by the
// node id.
inline void save_distance_matrix(const DistanceMatrix& d, std::ostream& out) {
  out << d.size() << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k < d.size(); ++k) {
    out << d.order[k];
    for (std::size_t l = 0; l <= k; ++l) {
      out << ' ' << d.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
    }
    out << '\n';
  }
}

inline DistanceMatrix load_distance_matrix(std::istream& in) {
  long long n = 0;
  if (!(in >> n) || n < 1) throw ParseError("distance matrix: bad size header", 1);
  std::vector<NodeId> ids(static_cast<std::size_t>(n));
  Eigen::MatrixXd v(n, n);
  for (long long k = 0; k < n; ++k) {
    if (!(in >> ids[k])) throw ParseError("distance matrix: missing node id", k + 2);
    for (long long l = 0; l <= k; ++l) {
      if (!(in >> v(k, l))) throw ParseError("distance matrix: short row", k + 2);
      v(l, k) = v(k, l);
    }
  }
  NodeOrder order(ids);
  if (order.ids() != ids) throw ParseError("distance matrix: ids must be ascending");
  return DistanceMatrix{std::move(order), std::move(v)};
}

}  // namespace embattack
