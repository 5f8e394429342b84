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
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "embattack/error.hpp"
#include "embattack/graph.hpp"

namespace embattack {

struct ScoredNode {
  NodeId node;
  double score;
};

// Highest score first; equal scores by ascending node id.
inline void rank_scores(std::vector<ScoredNode>& s) {
  std::sort(s.begin(), s.end(), [](const ScoredNode& a, const ScoredNode& b) {
    return a.score != b.score ? a.score > b.score : a.node < b.node;
  });
}

namespace detail {

inline bool in_sorted(std::span<const NodeId> sorted, NodeId v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

inline std::vector<NodeId> sorted_copy(std::span<const NodeId> v) {
  std::vector<NodeId> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

}  // namespace detail

// Mann-Whitney AUC with half credit for ties. `label` names the attack in
// error messages.
inline double auc(std::span<const ScoredNode> scores, std::span<const NodeId> truth,
                  const std::string& label = "attack") {
  const auto pos = detail::sorted_copy(truth);
  std::vector<std::pair<double, int>> v;
  v.reserve(scores.size());
  std::size_t npos = 0;
  for (const auto& s : scores) {
    const int y = detail::in_sorted(pos, s.node) ? 1 : 0;
    npos += static_cast<std::size_t>(y);
    v.emplace_back(s.score, y);
  }
  const std::size_t nneg = v.size() - npos;
  if (npos == 0 || nneg == 0) {
    throw ParameterError("auc: " + label + " needs both positive and negative nodes (" +
                         std::to_string(npos) + " positive, " + std::to_string(nneg) +
                         " negative)");
  }
  std::sort(v.begin(), v.end());
  // Sum of mid-ranks of positives.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    std::size_t positives = 0;
    while (j < v.size() && v[j].first == v[i].first) positives += static_cast<std::size_t>(v[j++].second);
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    rank_sum += mid * static_cast<double>(positives);
    i = j;
  }
  const double p = static_cast<double>(npos), q = static_cast<double>(nneg);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

inline double precision_at_k(std::span<const ScoredNode> scores, std::span<const NodeId> truth,
                             std::size_t k = 10) {
  if (k == 0) throw ParameterError("precision_at_k: k must be positive");
  if (scores.size() < k) {
    throw ParameterError("precision_at_k: only " + std::to_string(scores.size()) +
                         " scored nodes for k=" + std::to_string(k));
  }
  std::vector<ScoredNode> ranked(scores.begin(), scores.end());
  rank_scores(ranked);
  const auto pos = detail::sorted_copy(truth);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += detail::in_sorted(pos, ranked[i].node) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(k);
}

struct F1Counts {
  std::size_t tp = 0, fp = 0, fn = 0;
  // No predictions and no truth: F1 is reported as 0.
  bool degenerate = false;

  double f1() const {
    const std::size_t denom = 2 * tp + fp + fn;
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  }

  F1Counts& operator+=(const F1Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

inline F1Counts f1_counts(std::span<const NodeId> predicted, std::span<const NodeId> truth) {
  const auto p = detail::sorted_copy(predicted), t = detail::sorted_copy(truth);
  F1Counts c;
  for (NodeId v : p) (detail::in_sorted(t, v) ? c.tp : c.fp)++;
  c.fn = t.size() - c.tp;
  c.degenerate = p.empty() && t.empty();
  return c;
}

struct AttackMetrics {
  double auc = 0.0;
  double precision_at_k = 0.0;
  F1Counts f1;
};

// Mean and standard error of the mean (sample deviation / sqrt(n)); the
// error is 0 for a single value.
inline std::pair<double, double> mean_and_stderr(std::span<const double> v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return {mean, sd / std::sqrt(static_cast<double>(v.size()))};
}

}  // namespace embattack
