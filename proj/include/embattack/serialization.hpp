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

#include <string>

#include "json.hpp"

#include "embattack/attack.hpp"
#include "embattack/classifiers.hpp"
#include "embattack/embedding.hpp"
#include "embattack/error.hpp"

namespace embattack {

using Json = nlohmann::ordered_json;

namespace detail {

template <typename T>
void read_optional(const Json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("field '") + key + "': " + e.what());
    }
  }
}

}  // namespace detail

inline Json to_json(const EmbedSpec& s) {
  Json j;
  j["algorithm"] = to_string(s.algorithm);
  j["dim"] = s.dim;
  switch (s.algorithm) {
    case Algorithm::kHope:
      j["hope"] = Json::object();
      if (s.hope.beta) j["hope"]["beta"] = *s.hope.beta;
      break;
    case Algorithm::kLine:
      j["line"] = {{"negatives", s.line.negatives},
                   {"samples_per_arc", s.line.samples_per_arc},
                   {"learning_rate", s.line.learning_rate}};
      break;
    case Algorithm::kNode2Vec:
      j["node2vec"] = {{"p", s.node2vec.p},
                       {"q", s.node2vec.q},
                       {"walk_length", s.node2vec.walk_length},
                       {"walks_per_node", s.node2vec.walks_per_node},
                       {"window", s.node2vec.window},
                       {"negatives", s.node2vec.negatives},
                       {"epochs", s.node2vec.epochs},
                       {"learning_rate", s.node2vec.learning_rate}};
      break;
  }
  return j;
}

inline EmbedSpec embed_spec_from_json(const Json& j) {
  EmbedSpec s;
  if (j.contains("algorithm")) s.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  detail::read_optional(j, "dim", s.dim);
  if (j.contains("hope")) {
    const auto& h = j.at("hope");
    if (h.contains("beta")) s.hope.beta = h.at("beta").get<double>();
  }
  if (j.contains("line")) {
    const auto& l = j.at("line");
    detail::read_optional(l, "negatives", s.line.negatives);
    detail::read_optional(l, "samples_per_arc", s.line.samples_per_arc);
    detail::read_optional(l, "learning_rate", s.line.learning_rate);
  }
  if (j.contains("node2vec")) {
    const auto& n = j.at("node2vec");
    detail::read_optional(n, "p", s.node2vec.p);
    detail::read_optional(n, "q", s.node2vec.q);
    detail::read_optional(n, "walk_length", s.node2vec.walk_length);
    detail::read_optional(n, "walks_per_node", s.node2vec.walks_per_node);
    detail::read_optional(n, "window", s.node2vec.window);
    detail::read_optional(n, "negatives", s.node2vec.negatives);
    detail::read_optional(n, "epochs", s.node2vec.epochs);
    detail::read_optional(n, "learning_rate", s.node2vec.learning_rate);
  }
  s.validate();
  return s;
}

inline Json to_json(const AttackReport& r) {
  Json j;
  j["target"] = r.target ? Json(*r.target) : Json(nullptr);
  Json ranked = Json::array();
  for (const auto& n : r.ranked) {
    ranked.push_back({{"node", n.node}, {"score", n.score}, {"predicted", n.predicted != 0}});
  }
  j["ranked"] = std::move(ranked);
  j["truth"] = r.truth ? Json(*r.truth) : Json(nullptr);
  j["config"] = {{"embedding", to_json(r.spec)},
                 {"bins", r.config.bins},
                 {"shadows", r.config.shadows},
                 {"classifier", to_string(r.config.classifier)}};
  j["labels"] = r.labels;
  j["seeds"] = r.seeds;
  return j;
}

inline AttackReport attack_report_from_json(const Json& j) {
  try {
    AttackReport r;
    if (!j.at("target").is_null()) r.target = j.at("target").get<NodeId>();
    for (const auto& n : j.at("ranked")) {
      r.ranked.push_back({n.at("node").get<NodeId>(), n.at("score").get<double>(),
                          n.at("predicted").get<bool>() ? 1 : 0});
    }
    if (j.contains("truth") && !j.at("truth").is_null()) {
      r.truth = j.at("truth").get<std::vector<NodeId>>();
    }
    const auto& c = j.at("config");
    r.spec = embed_spec_from_json(c.at("embedding"));
    r.config.bins = c.at("bins").get<std::size_t>();
    r.config.shadows = c.at("shadows").get<std::size_t>();
    r.config.classifier = parse_classifier(c.at("classifier").get<std::string>());
    if (j.contains("labels")) r.labels = j.at("labels").get<std::map<std::string, std::string>>();
    if (j.contains("seeds")) r.seeds = j.at("seeds").get<std::map<std::string, std::uint64_t>>();
    if (r.seeds.contains("pipeline")) r.config.seed = r.seeds.at("pipeline");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("attack report: ") + e.what());
  }
}

}  // namespace embattack
