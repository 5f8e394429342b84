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
#include <concepts>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "embattack/classifiers.hpp"
#include "embattack/distance.hpp"
#include "embattack/embed.hpp"
#include "embattack/error.hpp"
#include "embattack/features.hpp"
#include "embattack/graph.hpp"
#include "embattack/metrics.hpp"
#include "embattack/parallel.hpp"
#include "embattack/random.hpp"

namespace embattack {

// Produces the distance matrices of freshly trained embeddings of a graph,
// one per variant. `references` (one per variant, possibly empty) hold the
// matrices the fresh ones will be compared against.
template <typename S>
concept DistanceSource = requires(const S& s, const Graph& g,
                                  std::span<const DistanceMatrix> references, std::uint64_t seed) {
  { s.variants() } -> std::convertible_to<std::size_t>;
  { s(g, references, seed) } -> std::same_as<std::vector<DistanceMatrix>>;
};

// One embedding run.
class SingleRun {
 public:
  explicit SingleRun(EmbedSpec spec) : spec_(std::move(spec)) {}

  std::size_t variants() const noexcept { return 1; }

  std::vector<DistanceMatrix> operator()(const Graph& g, std::span<const DistanceMatrix>,
                                         std::uint64_t seed) const {
    return {cosine_distance_matrix(embed(g, spec_, seed))};
  }

 private:
  EmbedSpec spec_;
};

// Variant v is the mean distance matrix of the first counts[v] runs. Runs
// are shared across variants.
class AveragedRuns {
 public:
  AveragedRuns(EmbedSpec spec, std::vector<std::size_t> counts)
      : spec_(std::move(spec)), counts_(std::move(counts)) {
    if (counts_.empty()) throw ParameterError("averaging counts must not be empty");
    for (auto c : counts_) {
      if (c < 1) throw ParameterError("averaging counts must be >= 1");
    }
  }

  std::size_t variants() const noexcept { return counts_.size(); }
  const std::vector<std::size_t>& counts() const noexcept { return counts_; }

  std::vector<DistanceMatrix> operator()(const Graph& g, std::span<const DistanceMatrix>,
                                         std::uint64_t seed) const {
    std::vector<DistanceMatrix> out(counts_.size());
    const std::size_t runs = *std::max_element(counts_.begin(), counts_.end());
    DistanceMatrix sum;
    for (std::size_t k = 0; k < runs; ++k) {
      DistanceMatrix d = cosine_distance_matrix(embed(g, spec_, repeat_seed(seed, k)));
      if (k == 0) {
        sum = std::move(d);
      } else {
        sum.values += d.values;
      }
      for (std::size_t v = 0; v < counts_.size(); ++v) {
        if (counts_[v] == k + 1) {
          out[v] = DistanceMatrix{sum.order, sum.values / static_cast<double>(k + 1)};
        }
      }
    }
    return out;
  }

 private:
  EmbedSpec spec_;
  std::vector<std::size_t> counts_;
};

// Variant v keeps, among the first counts[v] runs, the one whose distance
// matrix is closest to references[v]; the earliest run wins ties. Without
// references the first run is returned.
class MostSimilarRun {
 public:
  MostSimilarRun(EmbedSpec spec, std::vector<std::size_t> counts)
      : spec_(std::move(spec)), counts_(std::move(counts)) {
    if (counts_.empty()) throw ParameterError("candidate counts must not be empty");
    for (auto c : counts_) {
      if (c < 1) throw ParameterError("candidate counts must be >= 1");
    }
  }

  std::size_t variants() const noexcept { return counts_.size(); }
  const std::vector<std::size_t>& counts() const noexcept { return counts_; }

  std::vector<DistanceMatrix> operator()(const Graph& g, std::span<const DistanceMatrix> references,
                                         std::uint64_t seed) const {
    const std::size_t nv = counts_.size();
    if (!references.empty() && references.size() != nv) {
      throw MismatchError("most-similar selection: one reference per variant required");
    }
    std::vector<DistanceMatrix> best(nv);
    std::vector<double> best_distance(nv, std::numeric_limits<double>::infinity());
    const std::size_t runs =
        references.empty() ? 1 : *std::max_element(counts_.begin(), counts_.end());
    for (std::size_t k = 0; k < runs; ++k) {
      DistanceMatrix d = cosine_distance_matrix(embed(g, spec_, repeat_seed(seed, k)));
      for (std::size_t v = 0; v < nv; ++v) {
        if (k >= counts_[v] && !references.empty()) continue;
        const double dist = references.empty() ? 0.0 : embedding_distance(references[v], d);
        if (dist < best_distance[v]) {
          best_distance[v] = dist;
          best[v] = d;
        }
      }
    }
    return best;
  }

 private:
  EmbedSpec spec_;
  std::vector<std::size_t> counts_;
};

// Unlabeled features of one comparison for each requested bin count.
inline std::vector<FeatureTable> comparison_features(const DiffMatrix& diff, const Graph& g,
                                                     std::span<const std::size_t> bin_counts) {
  std::vector<FeatureTable> out;
  out.reserve(bin_counts.size());
  for (std::size_t m : bin_counts) {
    out.push_back(node_features(diff, equal_frequency_bins(diff, m), g));
  }
  return out;
}

// `count` distinct nodes of g in seeded random order. A smaller count with
// the same seed yields a prefix.
inline std::vector<NodeId> choose_shadow_nodes(const Graph& g, std::size_t count,
                                               std::uint64_t seed) {
  if (count >= g.num_nodes()) {
    throw ParameterError("shadow count " + std::to_string(count) + " must be below node count " +
                         std::to_string(g.num_nodes()));
  }
  std::vector<NodeId> ids = g.order().ids();
  Rng rng(derive_seed(seed, "shadow-select"));
  shuffle(ids, rng);
  ids.resize(count);
  return ids;
}

// Labeled training rows from shadow removals: for each shadow node v_j the
// reduced-side matrix without v_j is compared against fresh embeddings of
// G' minus v_j; rows of neighbors of v_j get label 1. Result is indexed
// [variant][bin count]; rows are pooled in shadow order and tagged with the
// shadow index.
template <DistanceSource Source>
std::vector<std::vector<FeatureTable>> shadow_training_tables(
    const Graph& g_prime, std::span<const DistanceMatrix> reduced, const Source& source,
    std::span<const std::size_t> bin_counts, std::span<const NodeId> shadow_nodes,
    std::uint64_t seed, unsigned threads = 1) {
  const std::size_t nv = reduced.size();
  if (nv != source.variants()) throw MismatchError("one reduced matrix per variant required");
  for (const auto& r : reduced) {
    if (!(r.order == g_prime.order())) {
      throw MismatchError("reduced-side distances do not cover the attacked graph");
    }
  }
  // [shadow][variant][bins]
  std::vector<std::vector<std::vector<FeatureTable>>> per_shadow(shadow_nodes.size());
  parallel_for(shadow_nodes.size(), threads, [&](std::size_t j) {
    const NodeId vj = shadow_nodes[j];
    const Graph shadow_graph = remove_node(g_prime, vj);
    std::vector<DistanceMatrix> refs;
    refs.reserve(nv);
    for (const auto& r : reduced) refs.push_back(r.without(vj));
    const auto fresh = source(shadow_graph, refs, derive_seed(seed, "shadow", j));
    const auto nbrs = g_prime.neighbors(vj);
    per_shadow[j].resize(nv);
    for (std::size_t v = 0; v < nv; ++v) {
      auto tables = comparison_features(diff_matrix(refs[v], fresh[v]), shadow_graph, bin_counts);
      for (auto& t : tables) {
        t.labels.resize(t.rows());
        for (std::size_t r = 0; r < t.rows(); ++r) {
          t.labels[r] = std::binary_search(nbrs.begin(), nbrs.end(), t.nodes[r]) ? 1 : 0;
        }
      }
      per_shadow[j][v] = std::move(tables);
    }
  });
  std::vector<std::vector<FeatureTable>> out(nv, std::vector<FeatureTable>(bin_counts.size()));
  for (std::size_t j = 0; j < per_shadow.size(); ++j) {
    for (std::size_t v = 0; v < nv; ++v) {
      for (std::size_t b = 0; b < bin_counts.size(); ++b) {
        out[v][b].append(per_shadow[j][v][b], static_cast<int>(j));
      }
    }
  }
  return out;
}

// Pooled labeled table from `num_shadow` shadow removals, with E' given.
inline FeatureTable generate_training_data(const Graph& g_prime, const Embedding& e_prime,
                                           const EmbedSpec& spec, std::size_t num_shadow,
                                           std::size_t m_bins, std::uint64_t seed,
                                           unsigned threads = 1) {
  if (!(e_prime.order == g_prime.order())) {
    throw MismatchError("generate_training_data: embedding does not cover the graph");
  }
  const auto shadows = choose_shadow_nodes(g_prime, num_shadow, seed);
  const std::vector<DistanceMatrix> reduced{cosine_distance_matrix(e_prime)};
  const std::size_t bins[] = {m_bins};
  auto tables = shadow_training_tables(g_prime, reduced, SingleRun(spec), bins, shadows, seed, threads);
  return std::move(tables[0][0]);
}

// Everything needed to classify one attack under several settings.
struct PreparedAttack {
  std::vector<std::size_t> bin_counts;
  std::vector<NodeId> shadow_nodes;
  std::vector<std::vector<FeatureTable>> attack;    // [variant][bins], rows = V(G')
  std::vector<std::vector<FeatureTable>> training;  // [variant][bins], labeled
};

// Steps up to the training table: E' (per variant), the attack difference
// matrix and its features, and the shadow training rows. `original` holds
// the given embedding's distances over V(G'), one per variant.
template <DistanceSource Source>
PreparedAttack prepare_attack(const Graph& g_prime, std::span<const DistanceMatrix> original,
                              const Source& source, std::vector<std::size_t> bin_counts,
                              std::size_t max_shadows, std::uint64_t seed, unsigned threads = 1) {
  if (original.size() != source.variants()) {
    throw MismatchError("one original distance matrix per variant required");
  }
  for (const auto& o : original) {
    if (!(o.order == g_prime.order())) {
      throw MismatchError("given embedding must cover exactly the nodes of the reduced graph");
    }
  }
  PreparedAttack p;
  p.bin_counts = std::move(bin_counts);
  p.shadow_nodes = choose_shadow_nodes(g_prime, max_shadows, seed);
  const auto reduced = source(g_prime, original, derive_seed(seed, "reduced"));
  for (std::size_t v = 0; v < original.size(); ++v) {
    p.attack.push_back(comparison_features(diff_matrix(original[v], reduced[v]), g_prime, p.bin_counts));
  }
  p.training = shadow_training_tables(g_prime, reduced, source, p.bin_counts, p.shadow_nodes, seed,
                                      threads);
  return p;
}

struct RankedNode {
  NodeId node;
  double score;
  int predicted;
};

// Fits on the rows of the first `shadows` shadow removals and scores every
// attack row. With `permutation_seed` the training labels are shuffled
// first (null baseline).
inline std::vector<RankedNode> classify_attack(const FeatureTable& attack, const FeatureTable& training,
                                               std::size_t shadows, ClassifierKind kind,
                                               std::uint64_t seed,
                                               std::optional<std::uint64_t> permutation_seed = {}) {
  FeatureTable train = training.first_groups(static_cast<int>(shadows));
  if (permutation_seed) {
    Rng rng(*permutation_seed);
    shuffle(train.labels, rng);
  }
  const ClassifierModel model = fit_classifier(kind, train, seed);
  const auto scores = model.predict_proba(attack);
  const auto decisions = model.predict(attack);
  std::vector<RankedNode> ranked(attack.rows());
  for (std::size_t r = 0; r < attack.rows(); ++r) ranked[r] = {attack.nodes[r], scores[r], decisions[r]};
  std::sort(ranked.begin(), ranked.end(), [](const RankedNode& a, const RankedNode& b) {
    return a.score != b.score ? a.score > b.score : a.node < b.node;
  });
  return ranked;
}

struct AttackConfig {
  std::size_t bins = 10;
  std::size_t shadows = 10;
  ClassifierKind classifier = ClassifierKind::kGaussianNB;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// Ranked neighbor candidates for one removed node.
struct AttackReport {
  std::optional<NodeId> target;
  std::vector<RankedNode> ranked;
  std::optional<std::vector<NodeId>> truth;
  EmbedSpec spec;
  AttackConfig config;
  // Grouping keys for evaluation (network, bucket, repetition, ...).
  std::map<std::string, std::string> labels;
  std::map<std::string, std::uint64_t> seeds;

  std::vector<ScoredNode> scores() const {
    std::vector<ScoredNode> s;
    s.reserve(ranked.size());
    for (const auto& r : ranked) s.push_back({r.node, r.score});
    return s;
  }

  std::vector<NodeId> predicted_neighbors() const {
    std::vector<NodeId> p;
    for (const auto& r : ranked) {
      if (r.predicted) p.push_back(r.node);
    }
    std::sort(p.begin(), p.end());
    return p;
  }
};

inline std::map<std::string, std::uint64_t> attack_seeds(std::uint64_t seed) {
  return {{"pipeline", seed},
          {"reduced", derive_seed(seed, "reduced")},
          {"shadow-select", derive_seed(seed, "shadow-select")},
          {"classifier", derive_seed(seed, "classifier")}};
}

// Full attack: trains E' on g_prime, compares it with the given embedding
// (which must already lack the removed node), learns from shadow removals
// and ranks every node of g_prime.
inline AttackReport run_attack(const Graph& g_prime, const Embedding& e_orig_minus,
                               const EmbedSpec& spec, const AttackConfig& config) {
  if (!(e_orig_minus.order == g_prime.order())) {
    throw MismatchError("run_attack: embedding rows (" + std::to_string(e_orig_minus.size()) +
                        ") do not match the reduced graph's nodes (" +
                        std::to_string(g_prime.num_nodes()) + ")");
  }
  const std::vector<DistanceMatrix> original{cosine_distance_matrix(e_orig_minus)};
  const PreparedAttack p = prepare_attack(g_prime, original, SingleRun(spec), {config.bins},
                                          config.shadows, config.seed, config.threads);
  AttackReport report;
  report.ranked = classify_attack(p.attack[0][0], p.training[0][0], config.shadows,
                                  config.classifier, derive_seed(config.seed, "classifier"));
  report.spec = spec;
  report.config = config;
  report.seeds = attack_seeds(config.seed);
  return report;
}

}  // namespace embattack
