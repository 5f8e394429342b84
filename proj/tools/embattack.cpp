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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "embattack/attack.hpp"
#include "embattack/embed.hpp"
#include "embattack/evaluation.hpp"
#include "embattack/experiment.hpp"
#include "embattack/generators.hpp"
#include "embattack/graph.hpp"
#include "embattack/serialization.hpp"

namespace fs = std::filesystem;
using namespace embattack;

namespace {

void log_line(const std::string& s) { std::cerr << s << '\n'; }

Graph read_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open graph file: " + path);
  EdgeListStats stats;
  Graph g = load_edge_list(in, &stats);
  if (stats.dropped > 0) {
    log_line(path + ": dropped " + std::to_string(stats.dropped) + " self-loop/duplicate lines");
  }
  return g;
}

std::ofstream open_out(const std::string& path, bool force) {
  if (path.empty()) throw ParameterError("--out is required");
  if (fs::exists(path) && !force) {
    throw ParameterError("refusing to overwrite " + path + " (use --force)");
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write " + path);
  return out;
}

struct SpecFlags {
  std::string algorithm = "line";
  int dim = 128;
  std::string spec_path;

  void add(CLI::App* app) {
    app->add_option("--algorithm", algorithm, "hope | line | node2vec")->capture_default_str();
    app->add_option("--dim", dim, "embedding dimension")->capture_default_str();
    app->add_option("--spec", spec_path, "JSON embedding spec (overrides --algorithm/--dim)");
  }

  EmbedSpec resolve() const {
    if (!spec_path.empty()) {
      std::ifstream in(spec_path);
      if (!in) throw ParameterError("cannot open spec file: " + spec_path);
      return embed_spec_from_json(Json::parse(in));
    }
    EmbedSpec s;
    s.algorithm = parse_algorithm(algorithm);
    s.dim = dim;
    return s;
  }
};

struct StudyFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<unsigned> threads;
  bool force = false;
  std::vector<std::size_t> counts;

  void add(CLI::App* app, bool with_counts) {
    app->add_option("--config", config, "experiment config or run manifest")->required();
    app->add_option("--seed", seed, "master seed (overrides the config)");
    app->add_option("--out", out, "output directory (overrides the config)");
    app->add_option("--threads", threads, "worker threads (overrides the config)");
    app->add_flag("--force", force, "write into a non-empty output directory");
    if (with_counts) {
      app->add_option("--counts", counts, "embeddings per network, e.g. --counts 1 5 10")
          ->delimiter(',');
    }
  }

  ExperimentConfig resolve() const {
    if (!fs::exists(config)) throw ParameterError("config file not found: " + config);
    ExperimentConfig c = load_experiment_config(config);
    if (seed) c.seed = *seed;
    if (!out.empty()) c.output = out;
    if (threads) c.threads = *threads;
    return c;
  }
};

void print_summary(const EvalReport& r) {
  std::ostringstream s;
  write_csv(r, s);
  std::cout << s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Node-removal attacks on network embeddings"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a graph as an edge list");
  gen->require_subcommand(1);
  std::string gen_out;
  bool gen_force = false;
  std::uint64_t gen_seed = 1;
  auto* ba = gen->add_subcommand("barabasi", "preferential-attachment graph");
  std::size_t ba_n = 1000, ba_m = 5;
  ba->add_option("--nodes", ba_n)->capture_default_str();
  ba->add_option("--attachment", ba_m)->capture_default_str();
  auto* snow = gen->add_subcommand("snowball", "snowball sample of an edge list");
  std::string snow_in;
  std::size_t snow_n = 0;
  std::optional<NodeId> snow_start;
  snow->add_option("--input", snow_in)->required();
  snow->add_option("--nodes", snow_n)->required();
  snow->add_option("--start", snow_start, "start node (default: seeded pick)");
  for (auto* sub : {ba, snow}) {
    sub->add_option("--seed", gen_seed)->capture_default_str();
    sub->add_option("--out", gen_out, "edge-list file")->required();
    sub->add_flag("--force", gen_force);
  }

  // embed
  auto* emb = app.add_subcommand("embed", "train an embedding of an edge list");
  std::string emb_graph, emb_out;
  std::uint64_t emb_seed = 1;
  bool emb_force = false;
  SpecFlags emb_spec;
  emb->add_option("--graph", emb_graph)->required();
  emb->add_option("--seed", emb_seed)->capture_default_str();
  emb->add_option("--out", emb_out, "embedding file")->required();
  emb->add_flag("--force", emb_force);
  emb_spec.add(emb);

  // attack
  auto* atk = app.add_subcommand("attack", "attack one removed node");
  std::string atk_graph, atk_emb, atk_out, atk_clf = "gnb";
  std::optional<NodeId> atk_target;
  std::uint64_t atk_seed = 1;
  std::size_t atk_bins = 10, atk_shadows = 10, atk_k = 10;
  unsigned atk_threads = 1;
  bool atk_force = false;
  SpecFlags atk_spec;
  atk->add_option("--graph", atk_graph, "graph (with the target, or already without it)")
      ->required();
  atk->add_option("--embedding", atk_emb, "embedding of the original graph")->required();
  atk->add_option("--target", atk_target, "removed node; removed from graph and embedding");
  atk->add_option("--bins", atk_bins)->capture_default_str();
  atk->add_option("--shadows", atk_shadows)->capture_default_str();
  atk->add_option("--classifier", atk_clf, "gnb | knn | dtree | rforest | adaboost")
      ->capture_default_str();
  atk->add_option("--k", atk_k, "precision cutoff for the printed summary")->capture_default_str();
  atk->add_option("--seed", atk_seed)->capture_default_str();
  atk->add_option("--threads", atk_threads)->capture_default_str();
  atk->add_option("--out", atk_out, "report file")->required();
  atk->add_flag("--force", atk_force);
  atk_spec.add(atk);

  // experiment / stability / variation
  auto* exp = app.add_subcommand("experiment", "run the full protocol from a config");
  StudyFlags exp_flags;
  exp_flags.add(exp, false);
  auto* stab = app.add_subcommand("stability", "averaged-embedding study");
  StudyFlags stab_flags;
  stab_flags.add(stab, true);
  auto* var = app.add_subcommand("variation", "most-similar-embedding study");
  StudyFlags var_flags;
  var_flags.add(var, true);

  // eval
  auto* ev = app.add_subcommand("eval", "recompute metrics from stored reports");
  std::string ev_dir, ev_out;
  std::size_t ev_k = 10;
  bool ev_force = false;
  ev->add_option("dir", ev_dir, "directory of attack reports")->required();
  ev->add_option("--k", ev_k, "precision cutoff")->capture_default_str();
  ev->add_option("--out", ev_out, "CSV file (default: stdout)");
  ev->add_flag("--force", ev_force);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (gen->parsed()) {
      Graph g;
      if (ba->parsed()) {
        g = generate_barabasi(ba_n, ba_m, gen_seed);
      } else {
        Graph src = read_graph(snow_in);
        g = snow_start ? snowball_sample_from(src, snow_n, *snow_start, gen_seed)
                       : snowball_sample(src, snow_n, gen_seed);
      }
      auto out = open_out(gen_out, gen_force);
      save_edge_list(g, out);
      log_line("wrote " + std::to_string(g.num_nodes()) + " nodes, " +
               std::to_string(g.num_edges()) + " edges to " + gen_out);
    } else if (emb->parsed()) {
      const EmbedSpec spec = emb_spec.resolve();
      const Graph g = read_graph(emb_graph);
      const Embedding e = embed(g, spec, emb_seed);
      auto out = open_out(emb_out, emb_force);
      save_embedding(e, out);
    } else if (atk->parsed()) {
      const EmbedSpec spec = atk_spec.resolve();
      Graph g = read_graph(atk_graph);
      std::ifstream ein(atk_emb);
      if (!ein) throw ParameterError("cannot open embedding file: " + atk_emb);
      Embedding e = load_embedding(ein);
      std::optional<std::vector<NodeId>> truth;
      if (atk_target && g.order().contains(*atk_target)) {
        truth = g.neighbors(*atk_target);
        g = remove_node(g, *atk_target);
      } else if (atk_target) {
        log_line("target " + std::to_string(*atk_target) +
                 " is not in the graph; treating it as already removed");
      }
      if (atk_target && e.order.contains(*atk_target)) e = e.without(*atk_target);
      AttackConfig cfg{atk_bins, atk_shadows, parse_classifier(atk_clf), atk_seed, atk_threads};
      AttackReport r = run_attack(g, e, spec, cfg);
      r.target = atk_target;
      r.truth = truth;
      r.labels = {{"algorithm", to_string(spec.algorithm)},
                  {"bins", std::to_string(atk_bins)},
                  {"shadows", std::to_string(atk_shadows)},
                  {"classifier", atk_clf}};
      if (atk_target) r.labels["target"] = std::to_string(*atk_target);
      auto out = open_out(atk_out, atk_force);
      out << to_json(r).dump(1) << '\n';
      if (truth) {
        const AttackEval ev_r = evaluate_report(r, atk_k);
        std::cout << "auc " << ev_r.metrics.auc << "\nprecision@" << atk_k << ' '
                  << ev_r.metrics.precision_at_k << "\nf1 " << ev_r.metrics.f1.f1() << '\n';
      }
    } else if (exp->parsed() || stab->parsed() || var->parsed()) {
      const StudyFlags& f = exp->parsed() ? exp_flags : stab->parsed() ? stab_flags : var_flags;
      ExperimentConfig c = f.resolve();
      if (c.output.empty()) throw ParameterError("no output directory (config 'output' or --out)");
      ExperimentResult res;
      if (exp->parsed()) {
        c.validate();
        res = run_experiment(c, f.force, log_line);
      } else {
        auto counts = f.counts.empty() ? c.counts : f.counts;
        res = stab->parsed() ? run_stability_study(c, counts, f.force, log_line)
                             : run_variation_study(c, counts, f.force, log_line);
      }
      print_summary(res.eval);
    } else if (ev->parsed()) {
      const auto reports = load_reports(ev_dir);
      if (reports.empty()) throw ParameterError("no attack reports under " + ev_dir);
      const EvalReport r = aggregate(reports, default_grouping(), ev_k);
      if (ev_out.empty()) {
        write_csv(r, std::cout);
      } else {
        auto out = open_out(ev_out, ev_force);
        write_csv(r, out);
      }
      log_line("aggregated " + std::to_string(reports.size()) + " reports");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
