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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "embattack/distance.hpp"
#include "embattack/embedding.hpp"
#include "embattack/error.hpp"
#include "embattack/graph.hpp"

namespace embattack {

// m-1 non-decreasing cut points. Bin b holds values x with
// cuts[b-1] <= x < cuts[b]; the last bin is closed on both ends.
struct BinBoundaries {
  std::vector<double> cuts;

  std::size_t bins() const noexcept { return cuts.size() + 1; }

  std::size_t bin_of(double x) const {
    return static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
  }
};

// Linear-interpolation quantile of a sorted sequence.
inline double sorted_quantile(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Equal-frequency cuts over a plain multiset.
inline BinBoundaries equal_frequency_bins(std::vector<double> values, std::size_t m) {
  if (m < 2) throw ParameterError("equal_frequency_bins: need m >= 2");
  if (values.size() < m) {
    throw ParameterError("equal_frequency_bins: " + std::to_string(values.size()) +
                         " values for " + std::to_string(m) + " bins");
  }
  std::sort(values.begin(), values.end());
  BinBoundaries b;
  b.cuts.reserve(m - 1);
  for (std::size_t k = 1; k < m; ++k) {
    b.cuts.push_back(sorted_quantile(values, static_cast<double>(k) / static_cast<double>(m)));
  }
  return b;
}

// Cuts at the k/m quantiles of the strictly off-diagonal entries, each
// unordered pair counted once.
inline BinBoundaries equal_frequency_bins(const DiffMatrix& d, std::size_t m) {
  const Eigen::Index n = d.values.rows();
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) values.push_back(d.values(i, j));
  }
  return equal_frequency_bins(std::move(values), m);
}

// Per-node rows of normalized bin counts followed by a degree feature.
// Training tables carry labels and the index of the comparison
// (shadow removal) each row came from.
struct FeatureTable {
  std::vector<NodeId> nodes;
  RowMatrix features;
  std::vector<int> labels;  // empty when unlabeled
  std::vector<int> groups;  // empty when from a single comparison

  std::size_t rows() const noexcept { return nodes.size(); }
  std::size_t width() const noexcept { return static_cast<std::size_t>(features.cols()); }
  bool labeled() const noexcept { return !labels.empty(); }

  // Appends the rows of `other` tagged with `group`.
  void append(const FeatureTable& other, int group) {
    if (rows() > 0 && width() != other.width()) {
      throw MismatchError("feature table width mismatch");
    }
    const Eigen::Index old = features.rows();
    RowMatrix merged(old + other.features.rows(), other.features.cols());
    if (old > 0) merged.topRows(old) = features;
    merged.bottomRows(other.features.rows()) = other.features;
    features = std::move(merged);
    nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
    labels.insert(labels.end(), other.labels.begin(), other.labels.end());
    groups.insert(groups.end(), other.nodes.size(), group);
  }

  // Rows whose group is below `limit`.
  FeatureTable first_groups(int limit) const {
    std::vector<Eigen::Index> keep;
    for (std::size_t r = 0; r < rows(); ++r) {
      if (groups.empty() || groups[r] < limit) keep.push_back(static_cast<Eigen::Index>(r));
    }
    FeatureTable out;
    out.features.resize(static_cast<Eigen::Index>(keep.size()), features.cols());
    for (std::size_t k = 0; k < keep.size(); ++k) {
      const auto r = keep[k];
      out.features.row(static_cast<Eigen::Index>(k)) = features.row(r);
      out.nodes.push_back(nodes[r]);
      if (!labels.empty()) out.labels.push_back(labels[r]);
      if (!groups.empty()) out.groups.push_back(groups[r]);
    }
    return out;
  }
};

// Row k: counts of {diff(k, l) : l != k} per bin divided by n-1, then
// deg(k) / max degree of g.
inline FeatureTable node_features(const DiffMatrix& d, const BinBoundaries& bins, const Graph& g) {
  if (!(d.order == g.order())) {
    throw MismatchError("node_features: difference matrix and graph cover different nodes");
  }
  const Eigen::Index n = d.values.rows();
  const auto m = static_cast<Eigen::Index>(bins.bins());
  FeatureTable t;
  t.nodes = d.order.ids();
  t.features = RowMatrix::Zero(n, m + 1);
  const double norm = n > 1 ? 1.0 / static_cast<double>(n - 1) : 0.0;
  const double max_degree = static_cast<double>(g.max_degree());
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) {
      if (l == k) continue;
      t.features(k, static_cast<Eigen::Index>(bins.bin_of(d.values(k, l)))) += 1.0;
    }
    t.features.row(k).head(m) *= norm;
    t.features(k, m) = max_degree > 0 ? static_cast<double>(g.degree_at(k)) / max_degree : 0.0;
  }
  return t;
}

}  // namespace embattack
