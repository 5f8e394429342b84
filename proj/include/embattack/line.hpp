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
#include <cstdint>
#include <span>
#include <vector>

#include "embattack/embedding.hpp"
#include "embattack/error.hpp"
#include "embattack/graph.hpp"
#include "embattack/random.hpp"

namespace embattack {

namespace detail {

// Precomputed logistic function on [-6, 6], saturating outside.
class SigmoidTable {
 public:
  static constexpr int kSize = 1000;
  static constexpr double kBound = 6.0;

  SigmoidTable() {
    for (int i = 0; i < kSize; ++i) {
      double x = (2.0 * i / kSize - 1.0) * kBound;
      table_[i] = 1.0 / (1.0 + std::exp(-x));
    }
  }

  double operator()(double x) const {
    if (x > kBound) return 1.0;
    if (x < -kBound) return 0.0;
    return table_[std::min(kSize - 1, static_cast<int>((x + kBound) * kSize / kBound / 2.0))];
  }

  static const SigmoidTable& instance() {
    static const SigmoidTable t;
    return t;
  }

 private:
  std::array<double, kSize> table_{};
};

// One negative-sampling step: accumulates the gradient for `source` into
// `err` and updates `target` in place. The three rows never alias. Four
// partial sums keep the dot product vectorizable with a fixed summation
// order.
inline void sgns_update(const float* __restrict source, float* __restrict target,
                        float* __restrict err, std::size_t n, float label, float rate,
                        const SigmoidTable& sigmoid) {
  float acc[4] = {0.f, 0.f, 0.f, 0.f};
  const std::size_t blocked = n & ~std::size_t{3};
  for (std::size_t c = 0; c < blocked; c += 4) {
    for (std::size_t k = 0; k < 4; ++k) acc[k] += source[c + k] * target[c + k];
  }
  for (std::size_t c = blocked; c < n; ++c) acc[0] += source[c] * target[c];
  const float x = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  const float g = (label - static_cast<float>(sigmoid(x))) * rate;
  for (std::size_t i = 0; i < n; ++i) err[i] += g * target[i];
  for (std::size_t i = 0; i < n; ++i) target[i] += g * source[i];
}

inline void init_uniform(std::vector<float>& v, int dim, Rng& rng) {
  const double r = 0.5 / dim;
  for (float& x : v) x = static_cast<float>(uniform_real(rng, -r, r));
}

inline void normalize_rows(std::vector<float>& v, std::size_t rows, int dim) {
  for (std::size_t r = 0; r < rows; ++r) {
    float* row = v.data() + r * dim;
    double norm = 0.0;
    for (int c = 0; c < dim; ++c) norm += static_cast<double>(row[c]) * row[c];
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (int c = 0; c < dim; ++c) row[c] = static_cast<float>(row[c] / norm);
    }
  }
}

}  // namespace detail

// LINE: first-order and second-order proximity trained separately by edge
// sampling with negative sampling, dim/2 columns each. Both halves are L2
// row-normalized and concatenated (first order on the left).
inline Embedding train_line(const Graph& g, const LineParams& params, int dim,
                            std::uint64_t seed) {
  if (g.num_edges() == 0) throw ParameterError("LINE: graph has no edges");
  if (dim < 2 || dim % 2 != 0) throw ParameterError("LINE: dim must be even");
  const int half = dim / 2;
  const std::size_t n = g.num_nodes();

  // Every undirected edge contributes both arcs.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs;
  arcs.reserve(2 * g.num_edges());
  for (std::size_t i = 0; i < n; ++i) {
    for (auto j : g.neighbors_at(i)) arcs.emplace_back(static_cast<std::uint32_t>(i), j);
  }
  const std::vector<double> arc_weights(arcs.size(), 1.0);
  const AliasTable arc_sampler(arc_weights);
  std::vector<double> noise(n);
  for (std::size_t i = 0; i < n; ++i) noise[i] = std::pow(static_cast<double>(g.degree_at(i)), 0.75);
  const AliasTable noise_sampler(noise);

  const auto total = static_cast<std::uint64_t>(
      std::llround(params.samples_per_arc * static_cast<double>(arcs.size())));

  const auto& sigmoid = detail::SigmoidTable::instance();
  RowMatrix out(static_cast<Eigen::Index>(n), dim);
  std::vector<float> err(half);
  for (int order = 1; order <= 2; ++order) {
    Rng rng(derive_seed(seed, order == 1 ? "line-first" : "line-second"));
    std::vector<float> vertex(n * half), context(n * half, 0.f);
    detail::init_uniform(vertex, half, rng);
    std::vector<float>& targets = order == 1 ? vertex : context;
    for (std::uint64_t t = 0; t < total; ++t) {
      const double rate = params.learning_rate *
                          std::max(1e-4, 1.0 - static_cast<double>(t) / static_cast<double>(total));
      const auto [u, v] = arcs[arc_sampler.sample(rng)];
      std::fill(err.begin(), err.end(), 0.f);
      float* src = vertex.data() + std::size_t{u} * half;
      for (int d = 0; d <= params.negatives; ++d) {
        std::size_t target = v;
        float label = 1.f;
        if (d > 0) {
          target = noise_sampler.sample(rng);
          label = 0.f;
        }
        detail::sgns_update(src, targets.data() + target * half, err.data(),
                            static_cast<std::size_t>(half), label, static_cast<float>(rate),
                            sigmoid);
      }
      for (int c = 0; c < half; ++c) src[c] += err[c];
    }
    detail::normalize_rows(vertex, n, half);
    for (std::size_t r = 0; r < n; ++r) {
      for (int c = 0; c < half; ++c) {
        out(static_cast<Eigen::Index>(r), (order - 1) * half + c) = vertex[r * half + c];
      }
    }
  }
  guard_zero_rows(out);
  return Embedding{g.order(), std::move(out), "LINE", seed};
}

}  // namespace embattack
