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

#include <cstdint>

#include "embattack/embedding.hpp"
#include "embattack/graph.hpp"
#include "embattack/hope.hpp"
#include "embattack/line.hpp"
#include "embattack/node2vec.hpp"

namespace embattack {

// Trains an embedding of g as described by spec. A pure function of its
// arguments; HOPE ignores the seed.
inline Embedding embed(const Graph& g, const EmbedSpec& spec, std::uint64_t seed) {
  spec.validate();
  if (g.empty()) throw ParameterError("embed: empty graph");
  Embedding e;
  switch (spec.algorithm) {
    case Algorithm::kHope:
      e = train_hope(g, spec.dim, spec.hope.beta);
      break;
    case Algorithm::kLine:
      e = train_line(g, spec.line, spec.dim, seed);
      break;
    case Algorithm::kNode2Vec:
      e = train_node2vec(g, spec.node2vec, spec.dim, seed);
      break;
    default:
      throw ParameterError("embed: unknown algorithm");
  }
  e.seed = seed;
  return e;
}

}  // namespace embattack
