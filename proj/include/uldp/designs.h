// Copyright 2026 The uldp-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Combinatorial (v, b, r, k, lambda) block designs on the vertex set [v].

#ifndef ULDP_DESIGNS_H_
#define ULDP_DESIGNS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace uldp {

// Sorted 0-based vertex list.
using Edge = std::vector<int>;

struct DesignParams {
  std::int64_t b = 0;
  std::int64_t r = 0;
  int k = 0;
  std::int64_t lambda = 0;

  friend bool operator==(const DesignParams&, const DesignParams&) = default;
};

// Result of checking the block-design symmetries. On failure, `message`
// names the first violated property and `witness` lists the offending
// vertex, pair, or edge (0-based).
struct DesignReport {
  bool ok = false;
  std::string message;
  std::vector<int> witness;
  DesignParams params;
};

// Largest complete design that will be materialized.
inline constexpr std::int64_t kMaxMaterializedEdges = 1'000'000;

class BlockDesign {
 public:
  // Validates and throws DesignError when the edges are not a block design.
  BlockDesign(int v, std::vector<Edge> edges);

  int v() const { return v_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const DesignParams& params() const { return params_; }
  std::int64_t b() const { return params_.b; }
  std::int64_t r() const { return params_.r; }
  int k() const { return params_.k; }
  std::int64_t lambda() const { return params_.lambda; }

 private:
  struct Trusted {};
  BlockDesign(int v, std::vector<Edge> edges, DesignParams params, Trusted);
  friend BlockDesign complete_design(int v, int k);

  int v_;
  std::vector<Edge> edges_;
  DesignParams params_;
};

// Exact binomial coefficient; throws DomainError on 64-bit overflow.
std::int64_t binomial(int n, int k);

// All size-k subsets of [v], in lexicographic order. Refuses more than
// kMaxMaterializedEdges edges.
BlockDesign complete_design(int v, int k);

// Checks regularity, uniformity and pairwise balance of an edge list.
// Edges may be unsorted; duplicates count as distinct edges.
DesignReport validate_design(int v, const std::vector<Edge>& edges);

// {"v": int, "edges": [[int, ...], ...]} with 1-based vertices.
BlockDesign design_from_json(const nlohmann::json& j);
nlohmann::json design_to_json(const BlockDesign& design);

}  // namespace uldp

#endif  // ULDP_DESIGNS_H_
