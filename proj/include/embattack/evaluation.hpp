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
#include <cstdio>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "embattack/attack.hpp"
#include "embattack/error.hpp"
#include "embattack/metrics.hpp"
#include "embattack/serialization.hpp"

namespace embattack {

using GroupKey = std::map<std::string, std::string>;

inline std::string describe(const GroupKey& key) {
  std::string s;
  for (const auto& [k, v] : key) {
    if (!s.empty()) s += ',';
    s += k + '=' + v;
  }
  return s.empty() ? "attack" : s;
}

struct AttackEval {
  GroupKey labels;
  std::optional<NodeId> target;
  AttackMetrics metrics;
};

inline AttackEval evaluate_report(const AttackReport& r, std::size_t k = 10) {
  if (!r.truth) throw ParameterError("evaluate: report for " + describe(r.labels) + " has no truth set");
  AttackEval e;
  e.labels = r.labels;
  e.target = r.target;
  const auto scores = r.scores();
  e.metrics.auc = auc(scores, *r.truth, describe(r.labels));
  e.metrics.precision_at_k = precision_at_k(scores, *r.truth, k);
  e.metrics.f1 = f1_counts(r.predicted_neighbors(), *r.truth);
  return e;
}

// Metric summary of one group of attacks. Standard errors are taken over
// the repetitions of each target and averaged across targets.
struct GroupSummary {
  GroupKey key;
  std::size_t attacks = 0;
  double mean_auc = 0.0;
  double mean_precision = 0.0;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  double stderr_auc = 0.0;
  double stderr_precision = 0.0;
  double stderr_f1 = 0.0;
  F1Counts pooled;
};

// Standard error of one metric over the repetitions of one target.
struct StderrCell {
  GroupKey key;
  NodeId target = -1;
  std::string metric;
  std::size_t repetitions = 0;
  double mean = 0.0;
  double stderr = 0.0;
};

struct EvalReport {
  std::size_t precision_k = 10;
  std::vector<AttackEval> attacks;
  std::vector<GroupSummary> groups;
  std::vector<StderrCell> cells;

  const GroupSummary* find(const GroupKey& subset) const {
    for (const auto& g : groups) {
      bool match = true;
      for (const auto& [k, v] : subset) {
        auto it = g.key.find(k);
        if (it == g.key.end() || it->second != v) {
          match = false;
          break;
        }
      }
      if (match) return &g;
    }
    return nullptr;
  }
};

inline GroupKey project(const GroupKey& labels, std::span<const std::string> keys) {
  GroupKey out;
  for (const auto& k : keys) {
    auto it = labels.find(k);
    out[k] = it == labels.end() ? std::string("-") : it->second;
  }
  return out;
}

// Groups evaluated attacks by the given label names. `overrides` are
// written into every group key (used for pooled rows such as bucket=all).
inline void summarize(EvalReport& report, std::span<const AttackEval> evals,
                      std::span<const std::string> keys, const GroupKey& overrides = {}) {
  std::map<GroupKey, std::vector<const AttackEval*>> groups;
  for (const auto& e : evals) {
    GroupKey key = project(e.labels, keys);
    for (const auto& [k, v] : overrides) key[k] = v;
    groups[key].push_back(&e);
  }
  for (const auto& [key, members] : groups) {
    GroupSummary g;
    g.key = key;
    g.attacks = members.size();
    std::map<NodeId, std::vector<const AttackEval*>> by_target;
    for (const auto* e : members) {
      g.mean_auc += e->metrics.auc;
      g.mean_precision += e->metrics.precision_at_k;
      g.macro_f1 += e->metrics.f1.f1();
      g.pooled += e->metrics.f1;
      by_target[e->target.value_or(-1)].push_back(e);
    }
    const auto n = static_cast<double>(members.size());
    g.mean_auc /= n;
    g.mean_precision /= n;
    g.macro_f1 /= n;
    g.micro_f1 = g.pooled.f1();
    for (const auto& [target, reps] : by_target) {
      const std::pair<const char*, double AttackMetrics::*> plain[] = {
          {"auc", &AttackMetrics::auc}, {"precision", &AttackMetrics::precision_at_k}};
      std::vector<double> v;
      for (const auto& [name, field] : plain) {
        v.clear();
        for (const auto* e : reps) v.push_back(e->metrics.*field);
        auto [mean, se] = mean_and_stderr(v);
        report.cells.push_back({key, target, name, reps.size(), mean, se});
      }
      v.clear();
      for (const auto* e : reps) v.push_back(e->metrics.f1.f1());
      auto [mean, se] = mean_and_stderr(v);
      report.cells.push_back({key, target, "f1", reps.size(), mean, se});
    }
    double se_sum[3] = {0, 0, 0};
    std::size_t cells = 0;
    for (const auto& c : report.cells) {
      if (c.key != key) continue;
      se_sum[c.metric == "auc" ? 0 : c.metric == "precision" ? 1 : 2] += c.stderr;
      ++cells;
    }
    const double per_metric = static_cast<double>(cells) / 3.0;
    g.stderr_auc = se_sum[0] / per_metric;
    g.stderr_precision = se_sum[1] / per_metric;
    g.stderr_f1 = se_sum[2] / per_metric;
    report.groups.push_back(std::move(g));
  }
}

inline const std::vector<std::string>& default_grouping() {
  static const std::vector<std::string> keys{"network", "algorithm", "mode",   "count",
                                             "bins",    "shadows",   "classifier", "null",
                                             "bucket"};
  return keys;
}

// Evaluates every report and summarizes per group; when "bucket" is a
// grouping key, pooled rows with bucket=all are added.
inline EvalReport aggregate(std::span<const AttackReport> reports,
                            std::span<const std::string> keys = default_grouping(),
                            std::size_t k = 10) {
  if (reports.empty()) throw ParameterError("aggregate: no attack reports");
  EvalReport out;
  out.precision_k = k;
  out.attacks.reserve(reports.size());
  for (const auto& r : reports) out.attacks.push_back(evaluate_report(r, k));
  summarize(out, out.attacks, keys);
  if (std::find(keys.begin(), keys.end(), "bucket") != keys.end()) {
    std::vector<std::string> pooled;
    for (const auto& key : keys) {
      if (key != "bucket") pooled.push_back(key);
    }
    std::map<GroupKey, std::size_t> buckets;
    for (const auto& g : out.groups) {
      GroupKey rest = g.key;
      rest.erase("bucket");
      ++buckets[rest];
    }
    bool several = false;
    for (const auto& [rest, count] : buckets) several = several || count > 1;
    if (several) summarize(out, out.attacks, pooled, {{"bucket", "all"}});
  }
  return out;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace detail

// One row per group and metric.
inline void write_csv(const EvalReport& r, std::ostream& out) {
  std::vector<std::string> cols;
  for (const auto& g : r.groups) {
    for (const auto& [k, v] : g.key) {
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    }
  }
  for (const auto& c : cols) out << detail::csv_field(c) << ',';
  out << "metric,value,stderr,attacks\n";
  const std::string pk = "precision@" + std::to_string(r.precision_k);
  for (const auto& g : r.groups) {
    const std::tuple<std::string, double, std::string> rows[] = {
        {"auc", g.mean_auc, detail::fmt_double(g.stderr_auc)},
        {pk, g.mean_precision, detail::fmt_double(g.stderr_precision)},
        {"macro_f1", g.macro_f1, detail::fmt_double(g.stderr_f1)},
        {"micro_f1", g.micro_f1, ""}};
    for (const auto& [metric, value, se] : rows) {
      for (const auto& c : cols) {
        auto it = g.key.find(c);
        out << detail::csv_field(it == g.key.end() ? "" : it->second) << ',';
      }
      out << metric << ',' << detail::fmt_double(value) << ',' << se << ',' << g.attacks << '\n';
    }
  }
}

inline Json to_json(const EvalReport& r) {
  Json groups = Json::array();
  for (const auto& g : r.groups) {
    groups.push_back({{"key", g.key},
                      {"attacks", g.attacks},
                      {"auc", {{"mean", g.mean_auc}, {"stderr", g.stderr_auc}}},
                      {"precision_at_k", {{"mean", g.mean_precision}, {"stderr", g.stderr_precision}}},
                      {"macro_f1", {{"mean", g.macro_f1}, {"stderr", g.stderr_f1}}},
                      {"micro_f1", g.micro_f1},
                      {"pooled", {{"tp", g.pooled.tp}, {"fp", g.pooled.fp}, {"fn", g.pooled.fn}}}});
  }
  Json cells = Json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"key", c.key},
                     {"target", c.target},
                     {"metric", c.metric},
                     {"repetitions", c.repetitions},
                     {"mean", c.mean},
                     {"stderr", c.stderr}});
  }
  return {{"precision_k", r.precision_k}, {"groups", std::move(groups)}, {"cells", std::move(cells)}};
}

}  // namespace embattack
