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

#include <cmath>
#include <optional>
#include <string>

#include "embattack/embedding.hpp"
#include "embattack/error.hpp"
#include "embattack/graph.hpp"
#include "embattack/svd.hpp"

namespace embattack {

inline Eigen::MatrixXd adjacency_matrix(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (auto j : g.neighbors_at(static_cast<std::size_t>(i))) a(i, j) = 1.0;
  }
  return a;
}

// Largest eigenvalue of the adjacency matrix. Iterates on A + I, whose
// dominant eigenvalue is unique even for bipartite graphs.
inline double spectral_radius(const Graph& g, int max_iter = 5000, double tol = 1e-13) {
  const std::size_t n = g.num_nodes();
  if (n == 0 || g.num_edges() == 0) return 0.0;
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), y(n);
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = x[i];
      for (auto j : g.neighbors_at(i)) s += x[j];
      y[i] = s;
    }
    double dot = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dot += x[i] * y[i];
      norm += y[i] * y[i];
    }
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
    const double next = dot - 1.0;
    if (it > 0 && std::abs(next - lambda) <= tol * std::max(1.0, next)) return next;
    lambda = next;
  }
  return lambda;
}

// Katz proximity S = (I - beta A)^{-1} beta A, formed densely (O(n^3)).
inline Eigen::MatrixXd katz_proximity(const Graph& g, double beta) {
  const double rho = spectral_radius(g);
  if (rho > 0.0 && beta * rho >= 1.0) {
    throw ParameterError("Katz series diverges: beta=" + std::to_string(beta) +
                         " >= 1/spectral radius=" + std::to_string(1.0 / rho));
  }
  const Eigen::MatrixXd ba = beta * adjacency_matrix(g);
  const auto n = ba.rows();
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - ba;
  return lhs.partialPivLu().solve(ba);
}

inline double default_katz_beta(const Graph& g) {
  const double rho = spectral_radius(g);
  if (rho <= 0.0) throw ParameterError("HOPE: rank-deficient proximity (graph has no edges)");
  return 0.5 / rho;
}

// Rows are [U sqrt(sigma) | V sqrt(sigma)] from a rank-(dim/2) SVD of the
// Katz matrix. Each left singular vector is signed so its largest-magnitude
// entry is positive.
inline Embedding train_hope(const Graph& g, int dim, std::optional<double> beta = {}) {
  if (g.empty()) throw ParameterError("HOPE: empty graph");
  if (dim < 2 || dim % 2 != 0) throw ParameterError("HOPE: dim must be even");
  const Eigen::Index half = dim / 2;
  if (half > static_cast<Eigen::Index>(g.num_nodes())) {
    throw ParameterError("HOPE: dim/2=" + std::to_string(half) + " exceeds node count " +
                         std::to_string(g.num_nodes()));
  }
  if (g.num_edges() == 0) throw ParameterError("HOPE: rank-deficient proximity (graph has no edges)");
  const double b = beta ? *beta : default_katz_beta(g);
  const Eigen::MatrixXd s = katz_proximity(g, b);

  TruncatedSvd f = truncated_svd(s, half);
  for (Eigen::Index c = 0; c < half; ++c) {
    Eigen::Index arg = 0;
    f.u.col(c).cwiseAbs().maxCoeff(&arg);
    if (f.u(arg, c) < 0) {
      f.u.col(c) *= -1.0;
      f.v.col(c) *= -1.0;
    }
  }
  const Eigen::VectorXd root = f.sigma.cwiseSqrt();
  Embedding e;
  e.order = g.order();
  e.vectors.resize(s.rows(), dim);
  e.vectors.leftCols(half) = f.u * root.asDiagonal();
  e.vectors.rightCols(half) = f.v * root.asDiagonal();
  guard_zero_rows(e.vectors);
  e.algorithm_tag = "HOPE";
  return e;
}

}  // namespace embattack
