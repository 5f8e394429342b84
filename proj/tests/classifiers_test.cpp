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

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "embattack/classifiers.hpp"

namespace embattack {
namespace {

RowMatrix column(std::vector<double> v) {
  RowMatrix m(static_cast<Eigen::Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
  return m;
}

// Two noisy Gaussian blobs in `dims` dimensions.
std::pair<RowMatrix, std::vector<int>> blobs(std::size_t n, int dims, std::uint64_t seed) {
  Rng rng(seed);
  RowMatrix x(static_cast<Eigen::Index>(n), dims);
  std::vector<int> y(n);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i % 3 == 0 ? 1 : 0;
    for (int d = 0; d < dims; ++d) {
      x(static_cast<Eigen::Index>(i), d) = noise(rng) + (y[i] ? 1.5 : 0.0) * (d % 2 ? 1 : -1);
    }
  }
  return {x, y};
}

double normal_pdf(double x, double mean, double var) {
  return std::exp(-(x - mean) * (x - mean) / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
}

TEST(GaussianNBTest, OneDimensionalClosedForm) {
  const RowMatrix x = column({-1, -1.2, -0.8, 1, 1.2, 0.8});
  const std::vector<int> y = {0, 0, 0, 1, 1, 1};
  const GaussianNB m = GaussianNB::fit(x, y);
  // Population variances plus 1e-9 times the largest feature variance.
  const double overall = (1 + 1.44 + 0.64) * 2 / 6.0;
  const double var = 0.08 / 3 + 1e-9 * overall;
  EXPECT_NEAR(m.variance(0)(0), var, 1e-15);
  for (double q : {0.9, 0.0, -0.3, 2.5}) {
    const double p1 = normal_pdf(q, 1.0, var), p0 = normal_pdf(q, -1.0, var);
    const double expected = p1 / (p0 + p1);
    EXPECT_NEAR(m.predict_proba(column({q}))[0], expected, 1e-9) << q;
  }
  EXPECT_GT(m.predict_proba(column({0.9}))[0], 0.99);
}

TEST(GaussianNBTest, PriorsEnterThePosterior) {
  const RowMatrix x = column({0, 1, 2, 0.5, 1.5});
  const std::vector<int> y = {0, 0, 0, 1, 1};
  const GaussianNB m = GaussianNB::fit(x, y);
  const double v0 = 2.0 / 3 + 1e-9 * 0.5, v1 = 0.25 + 1e-9 * 0.5;
  const double a = 0.4 * normal_pdf(1.2, 1.0, v1), b = 0.6 * normal_pdf(1.2, 1.0, v0);
  EXPECT_NEAR(m.predict_proba(column({1.2}))[0], a / (a + b), 1e-9);
}

TEST(GaussianNBTest, SingleClassIsDegenerate) {
  const RowMatrix x = column({1, 2, 3});
  EXPECT_EQ(GaussianNB::fit(x, std::vector<int>{1, 1, 1}).predict_proba(column({-7, 9})),
            (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(GaussianNB::fit(x, std::vector<int>{0, 0, 0}).predict_proba(column({5})),
            (std::vector<double>{0.0}));
}

TEST(GaussianNBTest, ConstantFeaturesStayFinite) {
  RowMatrix x = RowMatrix::Constant(6, 3, 0.25);
  x(5, 1) = 0.3;
  const GaussianNB m = GaussianNB::fit(x, std::vector<int>{0, 1, 0, 1, 0, 1});
  for (double p : m.predict_proba(RowMatrix::Constant(2, 3, 0.9))) EXPECT_TRUE(std::isfinite(p));
}

TEST(GaussianNBTest, ScalingPreservesRanking) {
  auto [x, y] = blobs(200, 4, 3);
  auto [q, unused] = blobs(50, 4, 4);
  const auto a = GaussianNB::fit(x, y).predict_proba(q);
  const auto b = GaussianNB::fit(x * 3.7, y).predict_proba(q * 3.7);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (std::abs(a[i] - a[j]) > 1e-9) {
        EXPECT_EQ(a[i] < a[j], b[i] < b[j]);
      }
    }
  }
}

TEST(KNearestTest, ExactMatchWithKOne) {
  const RowMatrix x = column({0, 1, 2, 3});
  const KNearest m = KNearest::fit(x, std::vector<int>{0, 1, 1, 0}, 1);
  EXPECT_EQ(m.predict_proba(column({1, 3})), (std::vector<double>{1.0, 0.0}));
}

TEST(KNearestTest, VoteFractionAndTieGoesNegative) {
  const RowMatrix x = column({0, 1, 2, 3, 10, 11});
  const std::vector<int> y = {1, 1, 0, 0, 1, 1};
  const ClassifierModel m{ClassifierKind::kKNearest, KNearest::fit(x, y, 4)};
  EXPECT_DOUBLE_EQ(m.predict_proba(column({1.5}))[0], 0.5);
  EXPECT_EQ(m.predict(column({1.5}))[0], 0);
  const KNearest five = KNearest::fit(x, y);
  EXPECT_DOUBLE_EQ(five.predict_proba(column({0}))[0], 0.6);
}

TEST(DecisionTreeTest, FitsConsistentDataPerfectly) {
  auto [x, y] = blobs(300, 5, 9);
  const DecisionTree t = DecisionTree::fit(x, y);
  const auto p = t.predict_proba(x);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_EQ(p[i] >= 0.5 ? 1 : 0, y[i]);
}

TEST(DecisionTreeTest, DepthLimitAndWidthCheck) {
  auto [x, y] = blobs(100, 3, 1);
  TreeParams stump;
  stump.max_depth = 1;
  EXPECT_LE(DecisionTree::fit(x, y, stump).node_count(), 3u);
  EXPECT_THROW(DecisionTree::fit(x, y).predict_proba(RowMatrix::Zero(2, 4)), MismatchError);
}

TEST(RandomForestTest, SingleTreeWithoutBootstrapEqualsTree) {
  const RowMatrix x = column({0, 1, 2, 3, 4, 5});
  const std::vector<int> y = {0, 0, 0, 1, 1, 1};
  ForestParams fp;
  fp.trees = 1;
  fp.bootstrap = false;
  const auto forest = RandomForest::fit(x, y, 4, fp).predict_proba(column({-1, 2.4, 2.6, 9}));
  const auto tree = DecisionTree::fit(x, y).predict_proba(column({-1, 2.4, 2.6, 9}));
  EXPECT_EQ(forest, tree);
}

TEST(RandomForestTest, DeterministicGivenSeed) {
  auto [x, y] = blobs(150, 6, 2);
  const auto a = RandomForest::fit(x, y, 7).predict_proba(x);
  EXPECT_EQ(a, RandomForest::fit(x, y, 7).predict_proba(x));
  EXPECT_NE(a, RandomForest::fit(x, y, 8).predict_proba(x));
  EXPECT_EQ(RandomForest::fit(x, y, 7).size(), 100u);
}

// The best single threshold, found exhaustively, separates the data; so
// must boosting.
TEST(AdaBoostTest, SeparableDataIsLearnedExactly) {
  const std::vector<double> v = {0.3, -2, 1.7, 0.9, -0.4, 2.2, -1.1, 1.2};
  std::vector<int> y;
  for (double x : v) y.push_back(x > 1.0 ? 1 : 0);
  bool separable = false;
  for (double t : v) {
    bool ok = true;
    for (std::size_t i = 0; i < v.size(); ++i) ok = ok && ((v[i] > t) == (y[i] == 1));
    separable = separable || ok;
  }
  ASSERT_TRUE(separable);
  const ClassifierModel m{ClassifierKind::kAdaBoost, AdaBoost::fit(column(v), y)};
  EXPECT_EQ(m.predict(column(v)), y);
}

TEST(AdaBoostTest, BoostsBeyondAStump) {
  auto [x, y] = blobs(400, 4, 5);
  TreeParams stump;
  stump.max_depth = 1;
  auto accuracy = [&](const std::vector<double>& p) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < y.size(); ++i) ok += (p[i] >= 0.5) == (y[i] == 1);
    return static_cast<double>(ok) / y.size();
  };
  const AdaBoost a = AdaBoost::fit(x, y);
  EXPECT_GT(a.size(), 1u);
  EXPECT_LE(a.size(), 50u);
  EXPECT_GT(accuracy(a.predict_proba(x)), accuracy(DecisionTree::fit(x, y, stump).predict_proba(x)));
}

TEST(Classifiers, AllKindsAreProbabilitiesAndDeterministic) {
  auto [x, y] = blobs(120, 5, 6);
  for (auto kind : {ClassifierKind::kGaussianNB, ClassifierKind::kKNearest,
                    ClassifierKind::kDecisionTree, ClassifierKind::kRandomForest,
                    ClassifierKind::kAdaBoost}) {
    const auto a = fit_classifier(kind, x, y, 3).predict_proba(x);
    EXPECT_EQ(a, fit_classifier(kind, x, y, 3).predict_proba(x));
    for (double p : a) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
      EXPECT_NEAR(p + (1.0 - p), 1.0, 1e-12);
    }
    EXPECT_EQ(parse_classifier(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_classifier("svm"), ParameterError);
}

TEST(Classifiers, EmptyAndMismatchedTablesRejected) {
  EXPECT_THROW(GaussianNB::fit(RowMatrix(0, 2), std::vector<int>{}), ParameterError);
  EXPECT_THROW(GaussianNB::fit(RowMatrix::Zero(2, 2), std::vector<int>{0}), Error);
  EXPECT_THROW(fit_classifier(ClassifierKind::kGaussianNB, FeatureTable{}, 0), ParameterError);
}

}  // namespace
}  // namespace embattack
