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

// Acceptance run: one PASS/FAIL line per criterion. Criteria whose input
// data is not present report FAIL with the reason and do not affect the
// exit status; every other failure does.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "embattack/experiment.hpp"

namespace fs = std::filesystem;
using namespace embattack;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  bool data_missing = false;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

unsigned worker_count() {
  if (const char* env = std::getenv("EMBATTACK_THREADS")) return static_cast<unsigned>(std::atoi(env));
  return std::max(1u, std::thread::hardware_concurrency());
}

void progress(const std::string& s) { std::cerr << "  " << s << '\n'; }

// ---------------------------------------------------------------- 1

Outcome oracle_suite() {
  Rng rng(20260401);
  std::size_t failures = 0;
  std::ostringstream notes;

  // Equal-frequency bins against sort-and-split.
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + uniform_index(rng, 19);
    const std::size_t n = m * (1 + uniform_index(rng, 30));
    std::vector<double> v(n);
    for (double& x : v) x = uniform_real(rng, -2, 2);
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    const BinBoundaries b = equal_frequency_bins(v, m);
    for (std::size_t i = 0; i < n; ++i) {
      if (b.bin_of(sorted[i]) != i * m / n) {
        ++failures;
        break;
      }
    }
  }
  notes << "bins ok";

  // AUC against exhaustive pair counting.
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 80);
    std::vector<ScoredNode> s(n);
    std::vector<int> y(n);
    std::vector<NodeId> truth;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = {static_cast<NodeId>(i), static_cast<double>(uniform_index(rng, 10)) / 10.0};
      y[i] = i == 0 ? 1 : (i == 1 ? 0 : (uniform01(rng) < 0.4 ? 1 : 0));
      if (y[i]) truth.push_back(static_cast<NodeId>(i));
    }
    double wins = 0, pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (y[i] == 1 && y[j] == 0) {
          pairs += 1;
          wins += s[i].score > s[j].score ? 1.0 : (s[i].score == s[j].score ? 0.5 : 0.0);
        }
      }
    }
    if (std::abs(auc(s, truth) - wins / pairs) > 1e-12) ++failures;
  }
  notes << ", auc ok";

  // Gaussian naive Bayes posterior by hand.
  {
    RowMatrix x(6, 1);
    x << -1, -1.2, -0.8, 1, 1.2, 0.8;
    const std::vector<int> y = {0, 0, 0, 1, 1, 1};
    const GaussianNB m = GaussianNB::fit(x, y);
    const double var = 0.08 / 3 + 1e-9 * (3.08 / 3);
    auto pdf = [&](double q, double mu) {
      return std::exp(-(q - mu) * (q - mu) / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
    };
    double worst = 0;
    for (double q : {0.9, 0.05, -0.2, 1.4}) {
      RowMatrix r(1, 1);
      r << q;
      const double expected = pdf(q, 1) / (pdf(q, 1) + pdf(q, -1));
      worst = std::max(worst, std::abs(m.predict_proba(r)[0] - expected));
    }
    if (worst > 1e-9) ++failures;
    notes << ", gnb err " << worst;
  }

  // Katz proximity against Gauss-Jordan inversion on small graphs.
  double katz_worst = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 3 + seed % 8;
    Graph g = generate_barabasi(n, 1 + seed % std::min<std::size_t>(3, n - 1), seed);
    const double beta = (0.2 + 0.7 * uniform01(rng)) / spectral_radius(g);
    const Eigen::MatrixXd s = katz_proximity(g, beta);
    std::vector<std::vector<double>> a(n, std::vector<double>(2 * n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      a[i][i] = 1.0;
      a[i][n + i] = 1.0;
      for (auto j : g.neighbors_at(i)) a[i][j] -= beta;
    }
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t p = c;
      for (std::size_t r = c + 1; r < n; ++r) {
        if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
      }
      std::swap(a[c], a[p]);
      const double d = a[c][c];
      for (double& v : a[c]) v /= d;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == c) continue;
        const double f = a[r][c];
        for (std::size_t k = 0; k < 2 * n; ++k) a[r][k] -= f * a[c][k];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double v = 0;
        for (auto k : g.neighbors_at(j)) v += a[i][n + k] * beta;
        katz_worst = std::max(katz_worst, std::abs(v - s(static_cast<Eigen::Index>(i),
                                                            static_cast<Eigen::Index>(j))));
      }
    }
  }
  if (katz_worst > 1e-9) ++failures;
  notes << ", katz err " << katz_worst;

  // Macro- and micro-F1 against the pooled-count formula.
  {
    std::vector<AttackReport> reports;
    std::size_t tp = 0, fp = 0, fn = 0;
    double macro = 0;
    for (int a = 0; a < 12; ++a) {
      AttackReport r;
      r.target = a;
      std::vector<NodeId> truth;
      for (NodeId v = 0; v < 30; ++v) {
        const bool pos = uniform01(rng) < 0.2 || v == 0;
        const bool pred = uniform01(rng) < 0.3;
        if (pos) truth.push_back(v);
        r.ranked.push_back({v, uniform01(rng), pred ? 1 : 0});
        tp += pos && pred;
        fp += !pos && pred;
        fn += pos && !pred;
      }
      if (truth.size() == 30) truth.pop_back();
      r.truth = truth;
      const auto c = f1_counts(r.predicted_neighbors(), truth);
      const double d = 2.0 * c.tp + c.fp + c.fn;
      macro += d > 0 ? 2.0 * c.tp / d : 0.0;
      r.labels = {{"group", "g"}};
      reports.push_back(std::move(r));
    }
    // Recount the pooled totals from the final truth sets.
    tp = fp = fn = 0;
    for (const auto& r : reports) {
      const auto p = r.predicted_neighbors();
      for (NodeId v = 0; v < 30; ++v) {
        const bool pos = std::find(r.truth->begin(), r.truth->end(), v) != r.truth->end();
        const bool pred = std::find(p.begin(), p.end(), v) != p.end();
        tp += pos && pred;
        fp += !pos && pred;
        fn += pos && !pred;
      }
    }
    const EvalReport e = aggregate(reports, std::vector<std::string>{"group"});
    const double micro = 2.0 * tp / (2.0 * tp + fp + fn);
    if (std::abs(e.groups[0].micro_f1 - micro) > 1e-12 ||
        std::abs(e.groups[0].macro_f1 - macro / 12) > 1e-12) {
      ++failures;
    }
    notes << ", f1 ok";
  }
  return {failures == 0, notes.str() + "; " + std::to_string(failures) + " oracle mismatches"};
}

// ---------------------------------------------------------------- 2

Outcome determinism(const fs::path& work) {
  Graph g = generate_barabasi(1000, 5, 1);
  const Embedding a = embed(g, EmbedSpec::hope_spec(), 1), b = embed(g, EmbedSpec::hope_spec(), 2);
  const double emb_diff = (a.vectors - b.vectors).cwiseAbs().maxCoeff();
  const double dist_diff =
      (cosine_distance_matrix(a).values - cosine_distance_matrix(b).values).cwiseAbs().maxCoeff();

  ExperimentConfig c;
  c.dataset.nodes = 300;
  c.dataset.attachment = 4;
  c.embedding = EmbedSpec::hope_spec();
  c.targets_per_bucket = 2;
  c.repetitions = 2;
  c.seed = 5;
  c.threads = worker_count();
  c.output = (work / "hope_a").string();
  fs::remove_all(c.output);
  run_experiment(c);
  ExperimentConfig again = load_experiment_config(fs::path(c.output) / "manifest.json");
  again.output = (work / "hope_b").string();
  fs::remove_all(again.output);
  run_experiment(again);
  std::size_t files = 0, differing = 0;
  for (const auto& e : fs::recursive_directory_iterator(c.output)) {
    if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
    std::ifstream x(e.path(), std::ios::binary), y(fs::path(again.output) / fs::relative(e.path(), c.output),
                                                   std::ios::binary);
    std::stringstream sx, sy;
    sx << x.rdbuf();
    sy << y.rdbuf();
    ++files;
    differing += sx.str() != sy.str();
  }
  const bool pass = emb_diff <= 1e-9 && dist_diff <= 1e-9 && differing == 0 && files > 0;
  return {pass, "embedding max diff " + std::to_string(emb_diff) + ", distance max diff " +
                    std::to_string(dist_diff) + "; manifest rerun: " + std::to_string(files) +
                    " metric/report files, " + std::to_string(differing) + " differ"};
}

// ---------------------------------------------------------------- 3

Outcome pipeline_equivalence() {
  using Edges = std::vector<std::pair<NodeId, NodeId>>;
  Graph g = Graph::from_edges({}, Edges{{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6},
                                        {6, 7}, {7, 8}, {8, 9}, {9, 10}, {10, 11}, {0, 11},
                                        {3, 8}, {1, 6}, {4, 10}});
  const std::size_t n = 12;
  Rng rng(77);
  auto planted = [&](int dim) {
    Embedding e{g.order(), RowMatrix(12, dim), "planted", 0};
    for (Eigen::Index i = 0; i < e.vectors.size(); ++i) e.vectors.data()[i] = uniform_real(rng, -1, 1);
    return e;
  };
  double worst = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const Embedding orig = planted(8), red = planted(8);
    for (std::size_t m : {2u, 4u, 10u}) {
      const std::size_t bins[] = {m};
      const FeatureTable t = comparison_features(
          diff_matrix(cosine_distance_matrix(orig), cosine_distance_matrix(red)), g, bins)[0];
      // Straight-line steps.
      std::vector<std::vector<double>> diff(n, std::vector<double>(n, 0));
      std::vector<double> upper;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          double d[2];
          const Embedding* es[2] = {&orig, &red};
          for (int s = 0; s < 2; ++s) {
            double dot = 0, ni = 0, nj = 0;
            for (int c = 0; c < 8; ++c) {
              const double x = es[s]->vectors(static_cast<Eigen::Index>(i), c);
              const double y = es[s]->vectors(static_cast<Eigen::Index>(j), c);
              dot += x * y;
              ni += x * x;
              nj += y * y;
            }
            d[s] = 1 - dot / std::sqrt(ni * nj);
          }
          diff[i][j] = d[0] - d[1];
          if (i < j) upper.push_back(diff[i][j]);
        }
      }
      std::sort(upper.begin(), upper.end());
      std::vector<double> cuts;
      for (std::size_t k = 1; k < m; ++k) {
        const double pos = static_cast<double>(k) * (upper.size() - 1) / m;
        const auto lo = static_cast<std::size_t>(pos);
        const double frac = pos - lo;
        cuts.push_back(lo + 1 < upper.size() ? upper[lo] + frac * (upper[lo + 1] - upper[lo]) : upper[lo]);
      }
      std::size_t maxdeg = 0;
      for (NodeId v = 0; v < 12; ++v) maxdeg = std::max(maxdeg, g.degree(v));
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(m + 1, 0);
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          std::size_t bin = 0;
          while (bin < cuts.size() && diff[i][j] >= cuts[bin]) ++bin;
          row[bin] += 1.0 / (n - 1);
        }
        row[m] = static_cast<double>(g.degree(static_cast<NodeId>(i))) / maxdeg;
        for (std::size_t c = 0; c <= m; ++c) {
          worst = std::max(worst, std::abs(row[c] - t.features(static_cast<Eigen::Index>(i),
                                                               static_cast<Eigen::Index>(c))));
        }
      }
    }
  }
  return {worst <= 1e-12, "max feature difference " + std::to_string(worst) + " over 30 comparisons"};
}

// ---------------------------------------------------------------- 4-6, 10

ExperimentConfig line_barabasi() {
  ExperimentConfig c;
  c.dataset.nodes = 1000;
  c.dataset.attachment = 5;
  c.embedding = EmbedSpec::line_spec();
  c.targets_per_bucket = 5;
  c.repetitions = 5;
  c.seed = 2026;
  c.threads = worker_count();
  return c;
}

using EvalFilter = std::function<bool(const AttackEval&)>;

std::vector<double> collect(const EvalReport& r, const EvalFilter& keep,
                            double (*metric)(const AttackEval&)) {
  std::vector<double> out;
  for (const auto& a : r.attacks) {
    if (keep(a)) out.push_back(metric(a));
  }
  return out;
}

double auc_of(const AttackEval& a) { return a.metrics.auc; }
double precision_of(const AttackEval& a) { return a.metrics.precision_at_k; }

EvalFilter where(std::string null_flag, std::vector<std::string> buckets) {
  return [=](const AttackEval& a) {
    return a.labels.at("null") == null_flag &&
           std::find(buckets.begin(), buckets.end(), a.labels.at("bucket")) != buckets.end();
  };
}

struct Baseline {
  EvalReport eval;
  double auc_mh = 0, se_mh = 0, null_auc = 0;
};

// ---------------------------------------------------------------- 8

fs::path hamsterster_path() {
  if (const char* env = std::getenv("EMBATTACK_HAMSTERSTER")) return env;
  return fs::path(EMBATTACK_SOURCE_DIR) / "data" / "hamsterster.txt";
}

Outcome hope_real_graph() {
  const fs::path path = hamsterster_path();
  if (!fs::exists(path)) {
    Outcome o;
    o.data_missing = true;
    o.detail = "dataset not available at " + path.string() +
               " (set EMBATTACK_HAMSTERSTER to the edge list); criterion not evaluated";
    return o;
  }
  ExperimentConfig c;
  c.dataset.type = "edgelist";
  c.dataset.path = path.string();
  c.dataset.name = "hamsterster";
  c.embedding = EmbedSpec::hope_spec();
  c.buckets = {"medium", "high"};
  c.repetitions = 1;
  c.seed = 2026;
  c.threads = worker_count();
  const auto nets = prepare_networks(c, progress);
  const Graph& g = nets[0].graph;
  const bool shape = g.num_nodes() == 1788 && g.num_edges() == 12476;
  const ExperimentResult r = run_experiment_in_memory(c, progress);
  const auto aucs = collect(r.eval, where("0", {"medium", "high"}), auc_of);
  const auto [mean, se] = mean_and_stderr(aucs);
  return {shape && mean >= 0.65, "component " + std::to_string(g.num_nodes()) + " nodes / " +
                                     std::to_string(g.num_edges()) + " edges; HOPE medium/high mean AUC " +
                                     fmt(mean) + " +- " + fmt(se) + " over " +
                                     std::to_string(aucs.size()) + " attacks (target >= 0.65)"};
}

void report(int id, const std::string& name, const Outcome& o, int& hard_failures, double seconds) {
  std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << " (" << name << "): " << o.detail
            << "  [" << fmt(seconds, 1) << " s]" << std::endl;
  if (!o.pass && !o.data_missing) ++hard_failures;
}

template <typename F>
Outcome timed(F&& f, double& seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = f();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return o;
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "embattack_acceptance";
  fs::create_directories(work);
  std::cout << "workers: " << worker_count() << std::endl;
  int hard = 0;
  double s = 0;

  Outcome o = timed(oracle_suite, s);
  report(1, "oracle unit suite", o, hard, s);
  o = timed([&] { return determinism(work); }, s);
  report(2, "determinism", o, hard, s);
  o = timed(pipeline_equivalence, s);
  report(3, "pipeline brute-force equivalence", o, hard, s);

  // Shared LINE baseline: 15 targets x 5 repetitions, 20 label permutations each.
  Baseline base;
  double base_seconds = 0;
  {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig c = line_barabasi();
    c.null_permutations = 20;
    std::cerr << "baseline run (75 LINE attacks)...\n";
    const ExperimentResult r = run_experiment_in_memory(c, progress);
    base.eval = r.eval;
    const auto aucs = collect(base.eval, where("0", {"medium", "high"}), auc_of);
    std::tie(base.auc_mh, base.se_mh) = mean_and_stderr(aucs);
    base.null_auc = mean_and_stderr(collect(base.eval, where("1", {"medium", "high"}), auc_of)).first;
    base_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  std::cout << "baseline run: " << fmt(base_seconds, 1) << " s" << std::endl;

  o = {base.auc_mh >= 0.65 && base.auc_mh - base.null_auc >= 0.10,
       "medium/high mean AUC " + fmt(base.auc_mh) + " +- " + fmt(base.se_mh) + " (>= 0.65); null " +
           fmt(base.null_auc) + ", margin " + fmt(base.auc_mh - base.null_auc) + " (>= 0.10)"};
  report(4, "attack signal", o, hard, 0);

  {
    const double p_high = mean_and_stderr(collect(base.eval, where("0", {"high"}), precision_of)).first;
    const double p_low = mean_and_stderr(collect(base.eval, where("0", {"low"}), precision_of)).first;
    o = {p_high > p_low && p_low <= 0.15, "precision@10 high " + fmt(p_high) + " > low " + fmt(p_low) +
                                              ", low <= 0.15"};
    report(5, "degree monotonicity", o, hard, 0);
  }
  {
    const auto all_null = collect(base.eval, where("1", {"low", "medium", "high"}), auc_of);
    const double null_all = mean_and_stderr(all_null).first;
    o = {base.null_auc >= 0.45 && base.null_auc <= 0.55,
         "20 permutations x 50 medium/high attacks: mean AUC " + fmt(base.null_auc) +
             " in [0.45, 0.55] (all buckets: " + fmt(null_all) + ")"};
    report(6, "null calibration", o, hard, 0);
  }

  // Stability: averaging counts {1, 5, 10}, medium/high targets, one repetition.
  o = timed(
      [&] {
        ExperimentConfig c = line_barabasi();
        c.buckets = {"medium", "high"};
        c.repetitions = 1;
        std::cerr << "stability study (10 targets, counts 1/5/10)...\n";
        const ExperimentResult r = run_stability_study(c, {1, 5, 10}, false, progress);
        auto at = [&](const char* count) {
          return mean_and_stderr(collect(r.eval, [&](const AttackEval& a) {
                   return a.labels.at("count") == count;
                 }, auc_of)).first;
        };
        const double c1 = at("1"), c5 = at("5"), c10 = at("10");
        return Outcome{c10 >= c1, "mean AUC count 1: " + fmt(c1) + ", 5: " + fmt(c5) + ", 10: " +
                                      fmt(c10) + " (10 >= 1 required)"};
      },
      s);
  report(7, "stability trend", o, hard, s);

  o = timed(hope_real_graph, s);
  report(8, "HOPE on the real graph", o, hard, s);

  // Variation: candidate counts {1, 4} against the baseline.
  o = timed(
      [&] {
        ExperimentConfig c = line_barabasi();
        c.buckets = {"medium", "high"};
        c.repetitions = 1;
        std::cerr << "variation study (10 targets, counts 1/4)...\n";
        const ExperimentResult r = run_variation_study(c, {1, 4}, false, progress);
        auto at = [&](const char* count) {
          return mean_and_stderr(collect(r.eval, [&](const AttackEval& a) {
                   return a.labels.at("count") == count;
                 }, auc_of));
        };
        const auto [v1, se1] = at("1");
        const auto [v4, se4] = at("4");
        const double tolerance = std::sqrt(se1 * se1 + base.se_mh * base.se_mh);
        return Outcome{std::abs(v1 - base.auc_mh) <= tolerance,
                       "count 1 mean AUC " + fmt(v1) + " vs baseline " + fmt(base.auc_mh) +
                           " (|diff| " + fmt(std::abs(v1 - base.auc_mh)) + " <= combined SE " +
                           fmt(tolerance) + "); count 4: " + fmt(v4) + " +- " + fmt(se4)};
      },
      s);
  report(9, "variation parity", o, hard, s);

  {
    std::size_t cells = 0, small = 0;
    for (const auto& c : base.eval.cells) {
      if (c.key.at("bucket") == "all" || c.key.at("null") != "0") continue;
      ++cells;
      small += c.stderr <= 0.05;
    }
    const double frac = cells ? static_cast<double>(small) / cells : 0.0;
    o = {frac >= 0.8, std::to_string(small) + "/" + std::to_string(cells) +
                          " (target, metric) cells with SE <= 0.05 (" + fmt(100 * frac, 1) +
                          "%, >= 80% required)"};
    report(10, "repetition stability", o, hard, 0);
  }

  std::cout << (hard == 0 ? "acceptance: all evaluated criteria passed"
                          : "acceptance: " + std::to_string(hard) + " criteria failed")
            << std::endl;
  return hard == 0 ? 0 : 1;
}
