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
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "embattack/attack.hpp"
#include "embattack/evaluation.hpp"
#include "embattack/generators.hpp"
#include "embattack/graph.hpp"
#include "embattack/parallel.hpp"
#include "embattack/serialization.hpp"

namespace embattack {

inline constexpr const char* kVersionTag = "embattack 0.1.0";

enum class StudyMode { kBaseline, kStability, kVariation };

inline std::string to_string(StudyMode m) {
  switch (m) {
    case StudyMode::kBaseline: return "baseline";
    case StudyMode::kStability: return "stability";
    case StudyMode::kVariation: return "variation";
  }
  return "?";
}

inline StudyMode parse_study_mode(std::string_view s) {
  if (s == "baseline") return StudyMode::kBaseline;
  if (s == "stability") return StudyMode::kStability;
  if (s == "variation") return StudyMode::kVariation;
  throw ParameterError("unknown study mode '" + std::string(s) + "'");
}

struct DatasetConfig {
  std::string type = "barabasi";  // barabasi | edgelist
  std::size_t nodes = 1000;
  std::size_t attachment = 5;
  std::string path;
  std::optional<std::size_t> snowball;
  std::string name;  // defaults to a descriptive label
};

struct ExperimentConfig {
  DatasetConfig dataset;
  EmbedSpec embedding;
  // Attack parameters; each list is a sweep axis, a single value otherwise.
  std::vector<std::size_t> bins{10};
  std::vector<std::size_t> shadows{10};
  std::vector<ClassifierKind> classifiers{ClassifierKind::kGaussianNB};
  // Dataset sweeps (Barabási only); empty means the dataset values.
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> attachments;
  std::size_t targets_per_bucket = 5;
  std::vector<std::string> buckets{"low", "medium", "high"};
  std::size_t repetitions = 5;
  // Extra scorings per attack with shuffled training labels.
  std::size_t null_permutations = 0;
  std::size_t precision_k = 10;
  StudyMode mode = StudyMode::kBaseline;
  std::vector<std::size_t> counts{1};
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string output;

  void validate() const {
    embedding.validate();
    auto positive = [](const std::vector<std::size_t>& v, const char* what) {
      if (v.empty()) throw ParameterError(std::string(what) + " must not be empty");
      for (auto x : v) {
        if (x == 0) throw ParameterError(std::string(what) + " values must be positive");
      }
    };
    positive(bins, "bins");
    positive(shadows, "shadows");
    positive(counts, "counts");
    for (auto b : bins) {
      if (b < 2) throw ParameterError("bins values must be >= 2");
    }
    if (classifiers.empty()) throw ParameterError("classifiers must not be empty");
    if (targets_per_bucket == 0 || repetitions == 0 || precision_k == 0) {
      throw ParameterError("targets_per_bucket, repetitions and precision_k must be positive");
    }
    if (buckets.empty()) throw ParameterError("buckets must not be empty");
    for (const auto& b : buckets) {
      if (b != "low" && b != "medium" && b != "high") {
        throw ParameterError("unknown degree bucket '" + b + "'");
      }
    }
    if (dataset.type == "edgelist") {
      if (dataset.path.empty()) throw ParameterError("dataset.path required for edgelist datasets");
      if (!std::filesystem::exists(dataset.path)) {
        throw ParameterError("dataset file not found: " + dataset.path);
      }
    } else if (dataset.type != "barabasi") {
      throw ParameterError("unknown dataset type '" + dataset.type + "'");
    }
  }
};

inline Json to_json(const ExperimentConfig& c) {
  Json ds = {{"type", c.dataset.type}};
  if (c.dataset.type == "barabasi") {
    ds["nodes"] = c.dataset.nodes;
    ds["attachment"] = c.dataset.attachment;
  } else {
    ds["path"] = c.dataset.path;
    ds["snowball"] = c.dataset.snowball ? Json(*c.dataset.snowball) : Json(nullptr);
  }
  if (!c.dataset.name.empty()) ds["name"] = c.dataset.name;
  Json classifiers = Json::array();
  for (auto k : c.classifiers) classifiers.push_back(to_string(k));
  return {{"dataset", ds},
          {"embedding", to_json(c.embedding)},
          {"attack", {{"bins", c.bins}, {"shadows", c.shadows}, {"classifiers", classifiers}}},
          {"sweep", {{"sizes", c.sizes}, {"attachments", c.attachments}}},
          {"protocol",
           {{"targets_per_bucket", c.targets_per_bucket},
            {"buckets", c.buckets},
            {"repetitions", c.repetitions},
            {"null_permutations", c.null_permutations},
            {"precision_k", c.precision_k}}},
          {"study", {{"mode", to_string(c.mode)}, {"counts", c.counts}}},
          {"seed", c.seed},
          {"threads", c.threads},
          {"output", c.output}};
}

namespace detail {

// Accepts a scalar or a list for sweepable fields.
inline std::vector<std::size_t> size_list(const Json& j) {
  if (j.is_array()) return j.get<std::vector<std::size_t>>();
  return {j.get<std::size_t>()};
}

}  // namespace detail

// Reads a config; a run manifest is accepted as well (its "config" entry is
// used). Missing fields keep their defaults.
inline ExperimentConfig experiment_config_from_json(const Json& root) {
  const Json& j = root.contains("config") && root.contains("version") ? root.at("config") : root;
  ExperimentConfig c;
  try {
    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      detail::read_optional(d, "type", c.dataset.type);
      detail::read_optional(d, "nodes", c.dataset.nodes);
      detail::read_optional(d, "attachment", c.dataset.attachment);
      detail::read_optional(d, "path", c.dataset.path);
      detail::read_optional(d, "name", c.dataset.name);
      if (d.contains("snowball") && !d.at("snowball").is_null()) {
        c.dataset.snowball = d.at("snowball").get<std::size_t>();
      }
    }
    if (j.contains("embedding")) c.embedding = embed_spec_from_json(j.at("embedding"));
    if (j.contains("attack")) {
      const auto& a = j.at("attack");
      if (a.contains("bins")) c.bins = detail::size_list(a.at("bins"));
      if (a.contains("shadows")) c.shadows = detail::size_list(a.at("shadows"));
      const char* key = a.contains("classifiers") ? "classifiers" : "classifier";
      if (a.contains(key)) {
        c.classifiers.clear();
        const auto& v = a.at(key);
        if (v.is_array()) {
          for (const auto& s : v) c.classifiers.push_back(parse_classifier(s.get<std::string>()));
        } else {
          c.classifiers.push_back(parse_classifier(v.get<std::string>()));
        }
      }
    }
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      if (s.contains("sizes")) c.sizes = detail::size_list(s.at("sizes"));
      if (s.contains("attachments")) c.attachments = detail::size_list(s.at("attachments"));
      if (s.contains("bins")) c.bins = detail::size_list(s.at("bins"));
      if (s.contains("shadows")) c.shadows = detail::size_list(s.at("shadows"));
      if (s.contains("classifiers")) {
        c.classifiers.clear();
        for (const auto& v : s.at("classifiers")) c.classifiers.push_back(parse_classifier(v.get<std::string>()));
      }
    }
    if (j.contains("protocol")) {
      const auto& p = j.at("protocol");
      detail::read_optional(p, "targets_per_bucket", c.targets_per_bucket);
      detail::read_optional(p, "buckets", c.buckets);
      detail::read_optional(p, "repetitions", c.repetitions);
      detail::read_optional(p, "null_permutations", c.null_permutations);
      detail::read_optional(p, "precision_k", c.precision_k);
    }
    if (j.contains("study")) {
      const auto& s = j.at("study");
      if (s.contains("mode")) c.mode = parse_study_mode(s.at("mode").get<std::string>());
      if (s.contains("counts")) c.counts = detail::size_list(s.at("counts"));
    }
    detail::read_optional(j, "seed", c.seed);
    detail::read_optional(j, "threads", c.threads);
    detail::read_optional(j, "output", c.output);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("experiment config: ") + e.what());
  }
  return c;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file: " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return experiment_config_from_json(j);
}

// One prepared network with its attack targets.
struct Network {
  std::string name;
  Graph graph;
  std::uint64_t seed = 0;
  DegreeBuckets targets;
};

struct AttackJob {
  std::size_t network = 0;
  std::string bucket;
  NodeId target = 0;
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
};

struct RunManifest {
  Json config;
  std::vector<Json> networks;
  std::vector<AttackJob> jobs;
  std::vector<std::string> artifacts;
  double seconds = 0.0;
  std::string version = kVersionTag;
};

struct ExperimentResult {
  RunManifest manifest;
  std::vector<AttackReport> reports;
  EvalReport eval;
};

using Logger = std::function<void(const std::string&)>;

inline std::vector<Network> prepare_networks(const ExperimentConfig& c, const Logger& log = {}) {
  std::vector<Network> out;
  auto add = [&](std::string name, Graph g) {
    if (!is_connected(g)) {
      if (log) log("warning: " + name + " is disconnected; using its largest connected component");
      g = largest_connected_component(g);
    }
    Network n;
    n.name = std::move(name);
    n.seed = derive_seed(c.seed, "network:" + n.name);
    n.targets = stratified_degree_sample(g, c.targets_per_bucket, derive_seed(n.seed, "targets"));
    n.graph = std::move(g);
    out.push_back(std::move(n));
  };
  if (c.dataset.type == "barabasi") {
    const auto sizes = c.sizes.empty() ? std::vector<std::size_t>{c.dataset.nodes} : c.sizes;
    const auto ms =
        c.attachments.empty() ? std::vector<std::size_t>{c.dataset.attachment} : c.attachments;
    for (auto n : sizes) {
      for (auto m : ms) {
        std::string name = "barabasi-n" + std::to_string(n) + "-m" + std::to_string(m);
        if (!c.dataset.name.empty() && sizes.size() == 1 && ms.size() == 1) name = c.dataset.name;
        add(name, generate_barabasi(n, m, derive_seed(c.seed, "dataset:" + name)));
      }
    }
  } else {
    std::ifstream in(c.dataset.path);
    if (!in) throw ParameterError("cannot open dataset file: " + c.dataset.path);
    EdgeListStats stats;
    Graph g = load_edge_list(in, &stats);
    if (log && stats.dropped > 0) {
      log(c.dataset.path + ": dropped " + std::to_string(stats.dropped) +
          " self-loop/duplicate lines");
    }
    std::string name = c.dataset.name.empty()
                           ? std::filesystem::path(c.dataset.path).stem().string()
                           : c.dataset.name;
    if (c.dataset.snowball) {
      g = snowball_sample(g, *c.dataset.snowball, derive_seed(c.seed, "snowball:" + name));
    }
    add(name, std::move(g));
  }
  return out;
}

inline std::vector<AttackJob> plan_jobs(const ExperimentConfig& c, const std::vector<Network>& nets) {
  std::vector<AttackJob> jobs;
  for (std::size_t k = 0; k < nets.size(); ++k) {
    for (const auto& bucket : c.buckets) {
      const auto& targets = bucket == "low"      ? nets[k].targets.low
                            : bucket == "medium" ? nets[k].targets.medium
                                                 : nets[k].targets.high;
      for (NodeId t : targets) {
        for (std::size_t r = 0; r < c.repetitions; ++r) {
          jobs.push_back({k, bucket, t, r,
                          derive_seed(nets[k].seed, "job:" + std::to_string(t), r)});
        }
      }
    }
  }
  return jobs;
}

namespace detail {

template <DistanceSource Source>
std::vector<AttackReport> run_job_with(const ExperimentConfig& c, const Network& net,
                                       const AttackJob& job, const Source& source,
                                       std::vector<DistanceMatrix> original) {
  const Graph g_prime = remove_node(net.graph, job.target);
  const std::uint64_t pipeline = derive_seed(job.seed, "pipeline");
  const std::size_t max_shadows = *std::max_element(c.shadows.begin(), c.shadows.end());
  const PreparedAttack p = prepare_attack(g_prime, original, source, c.bins, max_shadows, pipeline);

  std::vector<NodeId> truth = net.graph.neighbors(job.target);
  std::vector<AttackReport> out;
  for (std::size_t v = 0; v < source.variants(); ++v) {
    for (std::size_t b = 0; b < c.bins.size(); ++b) {
      for (std::size_t s : c.shadows) {
        for (auto kind : c.classifiers) {
          for (std::size_t perm = 0; perm <= c.null_permutations; ++perm) {
            AttackReport r;
            const bool null_run = perm > 0;
            const std::uint64_t perm_seed = derive_seed(pipeline, "permutation", perm);
            r.ranked = classify_attack(p.attack[v][b], p.training[v][b], s, kind,
                                       derive_seed(pipeline, "classifier"),
                                       null_run ? std::optional<std::uint64_t>(perm_seed)
                                                : std::nullopt);
            r.target = job.target;
            r.truth = truth;
            r.spec = c.embedding;
            r.config = {c.bins[b], s, kind, pipeline, 1};
            r.seeds = attack_seeds(pipeline);
            r.seeds["job"] = job.seed;
            r.seeds["original"] = derive_seed(job.seed, "original");
            if (null_run) r.seeds["permutation"] = perm_seed;
            r.labels = {{"network", net.name},
                        {"algorithm", to_string(c.embedding.algorithm)},
                        {"mode", to_string(c.mode)},
                        {"count", std::to_string(c.mode == StudyMode::kBaseline ? 1 : c.counts[v])},
                        {"bins", std::to_string(c.bins[b])},
                        {"shadows", std::to_string(s)},
                        {"classifier", to_string(kind)},
                        {"null", null_run ? "1" : "0"},
                        {"bucket", job.bucket},
                        {"target", std::to_string(job.target)},
                        {"repetition", std::to_string(job.repetition)}};
            if (null_run) r.labels["permutation"] = std::to_string(perm);
            out.push_back(std::move(r));
          }
        }
      }
    }
  }
  return out;
}

}  // namespace detail

// All reports of one (target, repetition) job. The embedding of the full
// graph uses the job's "original" seed in every mode, so count 1 of a study
// reproduces the baseline.
inline std::vector<AttackReport> run_job(const ExperimentConfig& c, const Network& net,
                                         const AttackJob& job) {
  const std::uint64_t original_seed = derive_seed(job.seed, "original");
  switch (c.mode) {
    case StudyMode::kBaseline: {
      SingleRun source(c.embedding);
      std::vector<DistanceMatrix> original{
          cosine_distance_matrix(embed(net.graph, c.embedding, original_seed)).without(job.target)};
      return detail::run_job_with(c, net, job, source, std::move(original));
    }
    case StudyMode::kStability: {
      AveragedRuns source(c.embedding, c.counts);
      auto original = source(net.graph, {}, original_seed);
      for (auto& d : original) d = d.without(job.target);
      return detail::run_job_with(c, net, job, source, std::move(original));
    }
    case StudyMode::kVariation: {
      MostSimilarRun source(c.embedding, c.counts);
      const DistanceMatrix single =
          cosine_distance_matrix(embed(net.graph, c.embedding, original_seed)).without(job.target);
      std::vector<DistanceMatrix> original(c.counts.size(), single);
      return detail::run_job_with(c, net, job, source, std::move(original));
    }
  }
  throw ParameterError("unknown study mode");
}

// Runs the whole protocol in memory. Jobs run on c.threads workers; the
// report order is the job order regardless of scheduling.
inline ExperimentResult run_experiment_in_memory(const ExperimentConfig& c, const Logger& log = {}) {
  c.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto nets = prepare_networks(c, log);
  const auto jobs = plan_jobs(c, nets);
  std::vector<std::vector<AttackReport>> per_job(jobs.size());
  std::atomic<std::size_t> done{0};
  std::mutex log_mu;
  parallel_for(jobs.size(), c.threads, [&](std::size_t i) {
    per_job[i] = run_job(c, nets[jobs[i].network], jobs[i]);
    const std::size_t finished = ++done;
    if (log) {
      std::lock_guard lock(log_mu);
      log("attack " + std::to_string(finished) + "/" + std::to_string(jobs.size()) + " done (" +
          nets[jobs[i].network].name + ", target " + std::to_string(jobs[i].target) + ", rep " +
          std::to_string(jobs[i].repetition) + ")");
    }
  });
  ExperimentResult res;
  for (auto& reports : per_job) {
    for (auto& r : reports) res.reports.push_back(std::move(r));
  }
  res.eval = aggregate(res.reports, default_grouping(), c.precision_k);
  res.manifest.config = to_json(c);
  for (const auto& n : nets) {
    res.manifest.networks.push_back({{"name", n.name},
                                     {"nodes", n.graph.num_nodes()},
                                     {"edges", n.graph.num_edges()},
                                     {"fingerprint", n.graph.fingerprint()},
                                     {"seed", n.seed},
                                     {"targets",
                                      {{"low", n.targets.low},
                                       {"medium", n.targets.medium},
                                       {"high", n.targets.high}}}});
  }
  res.manifest.jobs = jobs;
  res.manifest.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

inline std::string report_relative_path(const AttackReport& r) {
  auto get = [&](const char* k) {
    auto it = r.labels.find(k);
    return it == r.labels.end() ? std::string("x") : it->second;
  };
  std::string dir = get("mode") + "-c" + get("count") + "/b" + get("bins") + "-s" + get("shadows") +
                    "-" + get("classifier");
  if (get("null") == "1") dir += "-null" + get("permutation");
  return "reports/" + get("network") + "/" + dir + "/t" + get("target") + "-r" + get("repetition") +
         ".json";
}

// Refuses to write into a non-empty directory unless `force`.
inline void prepare_output_dir(const std::filesystem::path& dir, bool force) {
  namespace fs = std::filesystem;
  if (fs::exists(dir) && !fs::is_empty(dir) && !force) {
    throw ParameterError("output directory " + dir.string() + " is not empty (use --force)");
  }
  fs::create_directories(dir);
}

inline Json to_json(const RunManifest& m) {
  Json jobs = Json::array();
  for (const auto& j : m.jobs) {
    jobs.push_back({{"network", j.network},
                    {"bucket", j.bucket},
                    {"target", j.target},
                    {"repetition", j.repetition},
                    {"seed", j.seed}});
  }
  return {{"version", m.version},
          {"config", m.config},
          {"networks", m.networks},
          {"jobs", jobs},
          {"artifacts", m.artifacts},
          {"timings", {{"total_seconds", m.seconds}}}};
}

// Writes per-attack reports, eval.csv, eval.json and manifest.json.
// Everything except the manifest's timing is a deterministic function of
// the config.
inline void write_experiment(ExperimentResult& res, const std::filesystem::path& dir, bool force) {
  namespace fs = std::filesystem;
  prepare_output_dir(dir, force);
  auto write = [&](const std::string& rel, const std::function<void(std::ostream&)>& body) {
    const fs::path p = dir / rel;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    body(out);
    res.manifest.artifacts.push_back(rel);
  };
  for (const auto& r : res.reports) {
    write(report_relative_path(r), [&](std::ostream& o) { o << to_json(r).dump(1) << '\n'; });
  }
  write("eval.csv", [&](std::ostream& o) { write_csv(res.eval, o); });
  write("eval.json", [&](std::ostream& o) { o << to_json(res.eval).dump(2) << '\n'; });
  res.manifest.artifacts.push_back("manifest.json");
  std::ofstream m(dir / "manifest.json", std::ios::binary);
  m << to_json(res.manifest).dump(2) << '\n';
}

inline ExperimentResult run_experiment(const ExperimentConfig& c, bool force = false,
                                       const Logger& log = {}) {
  if (!c.output.empty()) prepare_output_dir(c.output, force);
  ExperimentResult res = run_experiment_in_memory(c, log);
  if (!c.output.empty()) write_experiment(res, c.output, true);
  return res;
}

// Averaging study: every distance matrix in the pipeline becomes the mean
// over `counts` embedding runs; one group per count.
inline ExperimentResult run_stability_study(ExperimentConfig c, std::vector<std::size_t> counts,
                                            bool force = false, const Logger& log = {}) {
  c.mode = StudyMode::kStability;
  c.counts = std::move(counts);
  return run_experiment(c, force, log);
}

// Variation study: E' and every E'' are the most similar of `counts`
// candidate runs; one group per count.
inline ExperimentResult run_variation_study(ExperimentConfig c, std::vector<std::size_t> counts,
                                            bool force = false, const Logger& log = {}) {
  c.mode = StudyMode::kVariation;
  c.counts = std::move(counts);
  return run_experiment(c, force, log);
}

// Reads every *.json attack report under `dir`, in path order.
inline std::vector<AttackReport> load_reports(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ParameterError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".json") continue;
    const auto name = e.path().filename().string();
    if (name == "manifest.json" || name == "eval.json") continue;
    files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<AttackReport> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    try {
      out.push_back(attack_report_from_json(Json::parse(in)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(f.string() + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(f.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace embattack
