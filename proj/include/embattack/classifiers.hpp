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
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "embattack/embedding.hpp"
#include "embattack/error.hpp"
#include "embattack/features.hpp"
#include "embattack/random.hpp"

namespace embattack {

enum class ClassifierKind { kGaussianNB, kKNearest, kDecisionTree, kRandomForest, kAdaBoost };

inline std::string to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::kGaussianNB: return "gnb";
    case ClassifierKind::kKNearest: return "knn";
    case ClassifierKind::kDecisionTree: return "dtree";
    case ClassifierKind::kRandomForest: return "rforest";
    case ClassifierKind::kAdaBoost: return "adaboost";
  }
  return "?";
}

inline ClassifierKind parse_classifier(std::string_view s) {
  if (s == "gnb") return ClassifierKind::kGaussianNB;
  if (s == "knn") return ClassifierKind::kKNearest;
  if (s == "dtree") return ClassifierKind::kDecisionTree;
  if (s == "rforest") return ClassifierKind::kRandomForest;
  if (s == "adaboost") return ClassifierKind::kAdaBoost;
  throw ParameterError("unknown classifier '" + std::string(s) +
                       "' (expected gnb|knn|dtree|rforest|adaboost)");
}

namespace detail {

inline void check_training_set(const RowMatrix& x, std::span<const int> y) {
  if (x.rows() == 0) throw ParameterError("classifier: empty training set");
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw MismatchError("classifier: " + std::to_string(x.rows()) + " rows but " +
                        std::to_string(y.size()) + " labels");
  }
  for (int label : y) {
    if (label != 0 && label != 1) throw ParameterError("classifier: labels must be 0 or 1");
  }
}

inline void check_width(const RowMatrix& x, Eigen::Index width) {
  if (x.cols() != width) {
    throw MismatchError("classifier: expected " + std::to_string(width) + " features, got " +
                        std::to_string(x.cols()));
  }
}

}  // namespace detail

// Gaussian naive Bayes. Per-class variances are smoothed by 1e-9 times the
// largest per-feature variance of the whole training set.
class GaussianNB {
 public:
  static GaussianNB fit(const RowMatrix& x, std::span<const int> y) {
    detail::check_training_set(x, y);
    GaussianNB m;
    m.width_ = x.cols();
    const double n = static_cast<double>(x.rows());
    const Eigen::RowVectorXd overall_mean = x.colwise().mean();
    const double max_var =
        ((x.rowwise() - overall_mean).array().square().colwise().sum() / n).maxCoeff();
    // All-constant features would leave zero variances; fall back to an
    // absolute floor so log-densities stay finite.
    const double eps = max_var > 0.0 ? 1e-9 * max_var : 1e-9;
    for (int c = 0; c < 2; ++c) {
      std::vector<Eigen::Index> rows;
      for (Eigen::Index r = 0; r < x.rows(); ++r) {
        if (y[r] == c) rows.push_back(r);
      }
      m.count_[c] = rows.size();
      m.mean_[c] = Eigen::RowVectorXd::Zero(x.cols());
      m.var_[c] = Eigen::RowVectorXd::Constant(x.cols(), eps);
      if (rows.empty()) continue;
      for (auto r : rows) m.mean_[c] += x.row(r);
      m.mean_[c] /= static_cast<double>(rows.size());
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(x.cols());
      for (auto r : rows) acc += (x.row(r) - m.mean_[c]).array().square().matrix();
      m.var_[c] = acc / static_cast<double>(rows.size());
      m.var_[c].array() += eps;
    }
    return m;
  }

  Eigen::Index width() const noexcept { return width_; }

  std::vector<double> predict_proba(const RowMatrix& x) const {
    detail::check_width(x, width_);
    std::vector<double> out(static_cast<std::size_t>(x.rows()));
    if (count_[0] == 0 || count_[1] == 0) {
      std::fill(out.begin(), out.end(), count_[1] > 0 ? 1.0 : 0.0);
      return out;
    }
    const double total = static_cast<double>(count_[0] + count_[1]);
    double log_norm[2];
    for (int c = 0; c < 2; ++c) {
      log_norm[c] = std::log(static_cast<double>(count_[c]) / total) -
                    0.5 * (2.0 * std::numbers::pi * var_[c].array()).log().sum();
    }
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      double joint[2];
      for (int c = 0; c < 2; ++c) {
        joint[c] = log_norm[c] -
                   0.5 * ((x.row(r) - mean_[c]).array().square() / var_[c].array()).sum();
      }
      // Logistic of the log-odds, evaluated on the stable side.
      const double z = joint[1] - joint[0];
      out[static_cast<std::size_t>(r)] =
          z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    }
    return out;
  }

  const Eigen::RowVectorXd& mean(int c) const { return mean_[c]; }
  const Eigen::RowVectorXd& variance(int c) const { return var_[c]; }

 private:
  Eigen::Index width_ = 0;
  std::size_t count_[2] = {0, 0};
  Eigen::RowVectorXd mean_[2];
  Eigen::RowVectorXd var_[2];
};

// k-nearest neighbors, Euclidean distance, vote fraction as probability.
// Equidistant neighbors are ranked by training row order.
class KNearest {
 public:
  static KNearest fit(const RowMatrix& x, std::span<const int> y, int k = 5) {
    detail::check_training_set(x, y);
    if (k < 1) throw ParameterError("knn: k must be >= 1");
    KNearest m;
    m.x_ = x;
    m.y_.assign(y.begin(), y.end());
    m.k_ = k;
    return m;
  }

  Eigen::Index width() const noexcept { return x_.cols(); }
  int k() const noexcept { return k_; }

  std::vector<double> predict_proba(const RowMatrix& x) const {
    detail::check_width(x, x_.cols());
    const auto n = static_cast<std::size_t>(x_.rows());
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_), n);
    std::vector<double> out(static_cast<std::size_t>(x.rows()));
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      for (std::size_t i = 0; i < n; ++i) {
        dist[i] = {(x_.row(static_cast<Eigen::Index>(i)) - x.row(r)).squaredNorm(), i};
      }
      std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
      int votes = 0;
      for (std::size_t i = 0; i < k; ++i) votes += y_[dist[i].second];
      out[static_cast<std::size_t>(r)] = static_cast<double>(votes) / static_cast<double>(k);
    }
    return out;
  }

 private:
  RowMatrix x_;
  std::vector<int> y_;
  int k_ = 5;
};

struct TreeParams {
  int max_depth = -1;  // unlimited
  std::size_t min_samples_split = 2;
  // Features examined per split; 0 means all.
  std::size_t max_features = 0;
};

// CART with Gini impurity and optional per-sample weights. Leaves store the
// weighted fraction of positive samples.
class DecisionTree {
 public:
  static DecisionTree fit(const RowMatrix& x, std::span<const int> y, const TreeParams& params = {},
                          std::span<const double> weights = {}, std::uint64_t seed = 0) {
    detail::check_training_set(x, y);
    if (!weights.empty() && weights.size() != y.size()) {
      throw MismatchError("decision tree: weight count differs from row count");
    }
    DecisionTree t;
    t.width_ = x.cols();
    Builder b{x, y, weights, params, Rng(seed), t.nodes_};
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < y.size(); ++r) {
      if (weights.empty() || weights[r] > 0.0) rows.push_back(r);
    }
    if (rows.empty()) throw ParameterError("decision tree: all sample weights are zero");
    b.grow(rows, 0);
    return t;
  }

  Eigen::Index width() const noexcept { return width_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  double proba_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
    std::size_t i = 0;
    while (nodes_[i].feature >= 0) {
      i = row(nodes_[i].feature) <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
    }
    return nodes_[i].value;
  }

  std::vector<double> predict_proba(const RowMatrix& x) const {
    detail::check_width(x, width_);
    std::vector<double> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index r = 0; r < x.rows(); ++r) out[static_cast<std::size_t>(r)] = proba_row(x.row(r));
    return out;
  }

 private:
  struct Node {
    Eigen::Index feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::size_t left = 0, right = 0;
    double value = 0.0;
  };

  struct Builder {
    const RowMatrix& x;
    std::span<const int> y;
    std::span<const double> w;
    const TreeParams& params;
    Rng rng;
    std::vector<Node>& nodes;

    double weight(std::size_t r) const { return w.empty() ? 1.0 : w[r]; }

    static double gini(double w0, double w1) {
      const double t = w0 + w1;
      if (t <= 0.0) return 0.0;
      const double p = w1 / t;
      return 2.0 * p * (1.0 - p);
    }

    std::size_t grow(std::vector<std::size_t>& rows, int depth) {
      const std::size_t id = nodes.size();
      nodes.emplace_back();
      double w0 = 0.0, w1 = 0.0;
      for (auto r : rows) (y[r] ? w1 : w0) += weight(r);
      nodes[id].value = w1 / (w0 + w1);
      const bool pure = w0 <= 0.0 || w1 <= 0.0;
      if (pure || rows.size() < params.min_samples_split ||
          (params.max_depth >= 0 && depth >= params.max_depth)) {
        return id;
      }

      std::vector<Eigen::Index> features(static_cast<std::size_t>(x.cols()));
      std::iota(features.begin(), features.end(), Eigen::Index{0});
      std::size_t budget = features.size();
      if (params.max_features > 0 && params.max_features < features.size()) {
        shuffle(features, rng);
        budget = params.max_features;
      }

      const double parent = gini(w0, w1) * (w0 + w1);
      double best_score = -1.0, best_threshold = 0.0;
      Eigen::Index best_feature = -1;
      std::vector<std::size_t> sorted = rows;
      for (std::size_t fi = 0; fi < features.size(); ++fi) {
        // Past the budget, keep looking only until some split is found.
        if (fi >= budget && best_feature >= 0) break;
        const Eigen::Index f = features[fi];
        std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
          return x(static_cast<Eigen::Index>(a), f) < x(static_cast<Eigen::Index>(b), f);
        });
        double l0 = 0.0, l1 = 0.0;
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
          const std::size_t r = sorted[i];
          (y[r] ? l1 : l0) += weight(r);
          const double here = x(static_cast<Eigen::Index>(r), f);
          const double next = x(static_cast<Eigen::Index>(sorted[i + 1]), f);
          if (!(next > here)) continue;
          const double r0 = w0 - l0, r1 = w1 - l1;
          const double score = parent - gini(l0, l1) * (l0 + l1) - gini(r0, r1) * (r0 + r1);
          if (score > best_score) {
            best_score = score;
            best_feature = f;
            best_threshold = here + (next - here) / 2.0;
            if (!(best_threshold < next)) best_threshold = here;
          }
        }
      }
      if (best_feature < 0) return id;

      std::vector<std::size_t> left, right;
      for (auto r : rows) {
        (x(static_cast<Eigen::Index>(r), best_feature) <= best_threshold ? left : right).push_back(r);
      }
      rows.clear();
      rows.shrink_to_fit();
      nodes[id].feature = best_feature;
      nodes[id].threshold = best_threshold;
      const std::size_t l = grow(left, depth + 1);
      const std::size_t r = grow(right, depth + 1);
      nodes[id].left = l;
      nodes[id].right = r;
      return id;
    }
  };

  Eigen::Index width_ = 0;
  std::vector<Node> nodes_;
};

struct ForestParams {
  std::size_t trees = 100;
  bool bootstrap = true;
  // 0 means floor(sqrt(width)).
  std::size_t max_features = 0;
};

// Bagged CART trees; probability is the mean of member leaf values.
class RandomForest {
 public:
  static RandomForest fit(const RowMatrix& x, std::span<const int> y, std::uint64_t seed,
                          const ForestParams& params = {}) {
    detail::check_training_set(x, y);
    if (params.trees < 1) throw ParameterError("random forest: need at least one tree");
    RandomForest f;
    f.width_ = x.cols();
    TreeParams tp;
    tp.max_features = params.max_features > 0
                          ? params.max_features
                          : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(
                                                         std::sqrt(static_cast<double>(x.cols())))));
    const auto n = static_cast<std::size_t>(x.rows());
    std::vector<double> counts(n, 1.0);
    for (std::size_t t = 0; t < params.trees; ++t) {
      const std::uint64_t tree_seed = derive_seed(seed, "forest-tree", t);
      if (params.bootstrap) {
        Rng rng(derive_seed(tree_seed, "bootstrap"));
        std::fill(counts.begin(), counts.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) counts[uniform_index(rng, n)] += 1.0;
      }
      f.trees_.push_back(DecisionTree::fit(x, y, tp, counts, tree_seed));
    }
    return f;
  }

  Eigen::Index width() const noexcept { return width_; }
  std::size_t size() const noexcept { return trees_.size(); }

  std::vector<double> predict_proba(const RowMatrix& x) const {
    detail::check_width(x, width_);
    std::vector<double> out(static_cast<std::size_t>(x.rows()), 0.0);
    for (const auto& t : trees_) {
      for (Eigen::Index r = 0; r < x.rows(); ++r) out[static_cast<std::size_t>(r)] += t.proba_row(x.row(r));
    }
    for (double& v : out) v /= static_cast<double>(trees_.size());
    return out;
  }

 private:
  Eigen::Index width_ = 0;
  std::vector<DecisionTree> trees_;
};

// Discrete AdaBoost (SAMME, two classes) over depth-1 trees. The
// probability is the logistic of the weight-normalized vote margin.
class AdaBoost {
 public:
  static AdaBoost fit(const RowMatrix& x, std::span<const int> y, std::size_t rounds = 50) {
    detail::check_training_set(x, y);
    AdaBoost a;
    a.width_ = x.cols();
    const auto n = static_cast<std::size_t>(x.rows());
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    TreeParams stump;
    stump.max_depth = 1;
    for (std::size_t t = 0; t < rounds; ++t) {
      DecisionTree tree = DecisionTree::fit(x, y, stump, w);
      const std::vector<double> p = tree.predict_proba(x);
      double err = 0.0, total = 0.0;
      std::vector<char> wrong(n);
      for (std::size_t i = 0; i < n; ++i) {
        wrong[i] = static_cast<char>((p[i] > 0.5 ? 1 : 0) != y[i]);
        if (wrong[i]) err += w[i];
        total += w[i];
      }
      err /= total;
      if (err <= 0.0) {
        a.members_.push_back({std::move(tree), 1.0});
        break;
      }
      if (err >= 0.5) {
        if (a.members_.empty()) a.members_.push_back({std::move(tree), 1.0});
        break;
      }
      const double alpha = std::log((1.0 - err) / err);
      a.members_.push_back({std::move(tree), alpha});
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (wrong[i]) w[i] *= std::exp(alpha);
        sum += w[i];
      }
      for (double& v : w) v /= sum;
    }
    return a;
  }

  Eigen::Index width() const noexcept { return width_; }
  std::size_t size() const noexcept { return members_.size(); }

  std::vector<double> predict_proba(const RowMatrix& x) const {
    detail::check_width(x, width_);
    double alpha_sum = 0.0;
    for (const auto& m : members_) alpha_sum += m.alpha;
    std::vector<double> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      double margin = 0.0;
      for (const auto& m : members_) margin += m.alpha * (m.tree.proba_row(x.row(r)) > 0.5 ? 1.0 : -1.0);
      margin /= alpha_sum;
      out[static_cast<std::size_t>(r)] = 1.0 / (1.0 + std::exp(-margin));
    }
    return out;
  }

 private:
  struct Member {
    DecisionTree tree;
    double alpha;
  };
  Eigen::Index width_ = 0;
  std::vector<Member> members_;
};

// A fitted model of any supported kind.
class ClassifierModel {
 public:
  using Variant = std::variant<GaussianNB, KNearest, DecisionTree, RandomForest, AdaBoost>;

  ClassifierModel(ClassifierKind kind, Variant model) : kind_(kind), model_(std::move(model)) {}

  ClassifierKind kind() const noexcept { return kind_; }
  const Variant& model() const noexcept { return model_; }

  Eigen::Index width() const {
    return std::visit([](const auto& m) { return m.width(); }, model_);
  }

  // Positive-class probability per row.
  std::vector<double> predict_proba(const RowMatrix& x) const {
    return std::visit([&](const auto& m) { return m.predict_proba(x); }, model_);
  }

  // score >= 0.5, except kNN where a tied vote goes to the negative class.
  std::vector<int> predict(const RowMatrix& x) const {
    const auto p = predict_proba(x);
    std::vector<int> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      out[i] = kind_ == ClassifierKind::kKNearest ? (p[i] > 0.5) : (p[i] >= 0.5);
    }
    return out;
  }

  std::vector<double> predict_proba(const FeatureTable& t) const { return predict_proba(t.features); }
  std::vector<int> predict(const FeatureTable& t) const { return predict(t.features); }

 private:
  ClassifierKind kind_;
  Variant model_;
};

inline ClassifierModel fit_classifier(ClassifierKind kind, const RowMatrix& x,
                                      std::span<const int> y, std::uint64_t seed) {
  switch (kind) {
    case ClassifierKind::kGaussianNB: return {kind, GaussianNB::fit(x, y)};
    case ClassifierKind::kKNearest: return {kind, KNearest::fit(x, y)};
    case ClassifierKind::kDecisionTree: return {kind, DecisionTree::fit(x, y)};
    case ClassifierKind::kRandomForest: return {kind, RandomForest::fit(x, y, seed)};
    case ClassifierKind::kAdaBoost: return {kind, AdaBoost::fit(x, y)};
  }
  throw ParameterError("unknown classifier kind");
}

inline ClassifierModel fit_classifier(ClassifierKind kind, const FeatureTable& table,
                                      std::uint64_t seed) {
  if (!table.labeled()) throw ParameterError("classifier: training table has no labels");
  return fit_classifier(kind, table.features, table.labels, seed);
}

}  // namespace embattack
