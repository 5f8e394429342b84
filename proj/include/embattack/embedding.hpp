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
#include <cctype>
#include <charconv>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "embattack/error.hpp"
#include "embattack/graph.hpp"

namespace embattack {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Algorithm { kHope, kLine, kNode2Vec };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kHope: return "HOPE";
    case Algorithm::kLine: return "LINE";
    case Algorithm::kNode2Vec: return "NODE2VEC";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
  std::string up(s);
  for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "HOPE") return Algorithm::kHope;
  if (up == "LINE") return Algorithm::kLine;
  if (up == "NODE2VEC") return Algorithm::kNode2Vec;
  throw ParameterError("unknown embedding algorithm '" + std::string(s) + "'");
}

struct HopeParams {
  // Katz decay. Unset means half the reciprocal spectral radius.
  std::optional<double> beta;
};

struct LineParams {
  int negatives = 5;
  // Each undirected edge is two arcs; training draws this many samples per
  // arc for each of the two orders.
  double samples_per_arc = 100.0;
  double learning_rate = 0.025;
};

struct Node2VecParams {
  double p = 1.0;
  double q = 1.0;
  int walk_length = 80;
  int walks_per_node = 10;
  int window = 10;
  int negatives = 5;
  int epochs = 1;
  double learning_rate = 0.025;
};

// Algorithm choice plus its full parametrization.
struct EmbedSpec {
  Algorithm algorithm = Algorithm::kLine;
  int dim = 128;
  HopeParams hope;
  LineParams line;
  Node2VecParams node2vec;

  void validate() const {
    if (dim < 2 || dim % 2 != 0) {
      throw ParameterError("embedding dim must be even and >= 2, got " + std::to_string(dim));
    }
    if (hope.beta && !(*hope.beta > 0.0)) throw ParameterError("HOPE beta must be positive");
    if (line.negatives < 1 || !(line.samples_per_arc > 0) || !(line.learning_rate > 0)) {
      throw ParameterError("LINE parameters must be positive");
    }
    const auto& n = node2vec;
    if (!(n.p > 0) || !(n.q > 0) || n.walk_length < 1 || n.walks_per_node < 1 ||
        n.window < 1 || n.negatives < 1 || n.epochs < 1 || !(n.learning_rate > 0)) {
      throw ParameterError("node2vec parameters must be positive");
    }
  }

  static EmbedSpec hope_spec(int dim = 128) {
    EmbedSpec s;
    s.algorithm = Algorithm::kHope;
    s.dim = dim;
    return s;
  }
  static EmbedSpec line_spec(int dim = 128) {
    EmbedSpec s;
    s.algorithm = Algorithm::kLine;
    s.dim = dim;
    return s;
  }
  static EmbedSpec node2vec_spec(int dim = 128) {
    EmbedSpec s;
    s.algorithm = Algorithm::kNode2Vec;
    s.dim = dim;
    return s;
  }
};

// One row per node of `order`.
struct Embedding {
  NodeOrder order;
  RowMatrix vectors;
  std::string algorithm_tag;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return order.size(); }
  int dim() const noexcept { return static_cast<int>(vectors.cols()); }

  Eigen::Ref<const Eigen::RowVectorXd> row(NodeId id) const {
    return vectors.row(static_cast<Eigen::Index>(order.index_of(id)));
  }

  // Same embedding with the row of `id` dropped.
  Embedding without(NodeId id) const {
    const std::size_t k = order.index_of(id);
    Embedding out{order.without(id), RowMatrix(vectors.rows() - 1, vectors.cols()),
                  algorithm_tag, seed};
    const auto kk = static_cast<Eigen::Index>(k);
    out.vectors.topRows(kk) = vectors.topRows(kk);
    out.vectors.bottomRows(vectors.rows() - kk - 1) =
        vectors.bottomRows(vectors.rows() - kk - 1);
    return out;
  }
};

// Rows that are exactly zero get 1e-12 in their first component so cosine
// distances stay defined.
inline void guard_zero_rows(RowMatrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (m.cols() > 0 && m.row(r).isZero(0.0)) m(r, 0) += 1e-12;
  }
}

// Text format: "n d", then n lines "id x_1 ... x_d", ids ascending.
inline void save_embedding(const Embedding& e, std::ostream& out) {
  out << e.size() << ' ' << e.dim() << '\n';
  std::ostringstream row;
  row << std::setprecision(17);
  for (std::size_t k = 0; k < e.size(); ++k) {
    row.str({});
    row << e.order[k];
    for (int c = 0; c < e.dim(); ++c) row << ' ' << e.vectors(static_cast<Eigen::Index>(k), c);
    out << row.str() << '\n';
  }
}

inline Embedding load_embedding(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw ParseError("embedding file is empty");
  std::istringstream header(line);
  long long n = -1, d = -1;
  if (!(header >> n >> d) || n < 1 || d < 1) {
    throw ParseError("header must be 'n d' with positive values", lineno);
  }
  std::vector<std::pair<NodeId, std::vector<double>>> rows;
  rows.reserve(static_cast<std::size_t>(n));
  while (next_line()) {
    std::istringstream ss(line);
    NodeId id = 0;
    if (!(ss >> id) || id < 0) throw ParseError("bad node id", lineno);
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(d));
    double x = 0;
    while (ss >> x) v.push_back(x);
    if (!ss.eof()) throw ParseError("bad vector entry", lineno);
    if (static_cast<long long>(v.size()) != d) {
      throw ParseError("row has " + std::to_string(v.size()) + " values, header says " +
                           std::to_string(d),
                       lineno);
    }
    rows.emplace_back(id, std::move(v));
  }
  if (static_cast<long long>(rows.size()) != n) {
    throw ParseError("header announces " + std::to_string(n) + " rows, found " +
                     std::to_string(rows.size()));
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<NodeId> ids;
  for (const auto& r : rows) ids.push_back(r.first);
  Embedding e;
  e.order = NodeOrder(std::move(ids));
  e.vectors.resize(n, d);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (long long c = 0; c < d; ++c) e.vectors(static_cast<Eigen::Index>(k), c) = rows[k].second[c];
  }
  e.algorithm_tag = "loaded";
  return e;
}

}  // namespace embattack
