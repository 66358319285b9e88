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

#include "uldp/designs.h"

#include <algorithm>
#include <limits>
#include <string>

#include "uldp/errors.h"

namespace uldp {
namespace {

std::string edge_string(const Edge& edge) {
  std::string out = "{";
  for (size_t i = 0; i < edge.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(edge[i] + 1);
  }
  return out + "}";
}

DesignReport fail(std::string message, std::vector<int> witness) {
  DesignReport report;
  report.ok = false;
  report.message = std::move(message);
  report.witness = std::move(witness);
  return report;
}

}  // namespace

std::int64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // result * (n - k + i) / i is exact at every step.
    const std::int64_t factor = n - k + i;
    if (result > std::numeric_limits<std::int64_t>::max() / factor) {
      throw DomainError("binomial coefficient overflows 64 bits");
    }
    result = result * factor / i;
  }
  return result;
}

BlockDesign::BlockDesign(int v, std::vector<Edge> edges) : v_(v) {
  for (Edge& edge : edges) std::sort(edge.begin(), edge.end());
  DesignReport report = validate_design(v, edges);
  if (!report.ok) throw DesignError(report.message);
  edges_ = std::move(edges);
  params_ = report.params;
}

BlockDesign::BlockDesign(int v, std::vector<Edge> edges, DesignParams params,
                         Trusted)
    : v_(v), edges_(std::move(edges)), params_(params) {}

BlockDesign complete_design(int v, int k) {
  if (v < 1 || k < 1 || k > v) {
    throw DomainError("complete design requires 1 <= k <= v");
  }
  const std::int64_t b = binomial(v, k);
  if (b > kMaxMaterializedEdges) {
    throw DomainError("complete design with " + std::to_string(b) +
                      " edges exceeds the materialization limit");
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(b));
  Edge current(k);
  for (int i = 0; i < k; ++i) current[i] = i;
  while (true) {
    edges.push_back(current);
    int i = k - 1;
    while (i >= 0 && current[i] == v - k + i) --i;
    if (i < 0) break;
    ++current[i];
    for (int j = i + 1; j < k; ++j) current[j] = current[j - 1] + 1;
  }
  DesignParams params;
  params.b = b;
  params.r = binomial(v - 1, k - 1);
  params.k = k;
  params.lambda = k >= 2 ? binomial(v - 2, k - 2) : 0;
  return BlockDesign(v, std::move(edges), params, BlockDesign::Trusted{});
}

DesignReport validate_design(int v, const std::vector<Edge>& edges) {
  if (v < 1) return fail("vertex count must be >= 1", {});
  if (edges.empty()) return fail("design has no edges", {});

  std::vector<Edge> sorted = edges;
  for (Edge& edge : sorted) std::sort(edge.begin(), edge.end());

  const int k = static_cast<int>(sorted.front().size());
  for (const Edge& edge : sorted) {
    if (edge.empty()) return fail("empty edge", {});
    if (edge.front() < 0 || edge.back() >= v) {
      return fail("edge " + edge_string(edge) + " has a vertex outside [v]",
                  edge);
    }
    if (std::adjacent_find(edge.begin(), edge.end()) != edge.end()) {
      return fail("edge " + edge_string(edge) + " repeats a vertex", edge);
    }
    if (static_cast<int>(edge.size()) != k) {
      return fail("not uniform: edge " + edge_string(edge) + " has size " +
                      std::to_string(edge.size()) + ", first edge has size " +
                      std::to_string(k),
                  edge);
    }
  }

  std::vector<std::int64_t> degree(v, 0);
  for (const Edge& edge : sorted) {
    for (int x : edge) ++degree[x];
  }
  for (int x = 1; x < v; ++x) {
    if (degree[x] != degree[0]) {
      return fail("not regular: vertex 1 has degree " +
                      std::to_string(degree[0]) + ", vertex " +
                      std::to_string(x + 1) + " has degree " +
                      std::to_string(degree[x]),
                  {0, x});
    }
  }

  std::int64_t lambda = 0;
  if (v >= 2) {
    std::vector<std::int64_t> pairs(static_cast<size_t>(v) * v, 0);
    for (const Edge& edge : sorted) {
      for (size_t i = 0; i < edge.size(); ++i) {
        for (size_t j = i + 1; j < edge.size(); ++j) {
          ++pairs[static_cast<size_t>(edge[i]) * v + edge[j]];
        }
      }
    }
    lambda = pairs[1];
    for (int x = 0; x < v; ++x) {
      for (int y = x + 1; y < v; ++y) {
        const std::int64_t count = pairs[static_cast<size_t>(x) * v + y];
        if (count != lambda) {
          return fail("not pairwise balanced: pair {1,2} lies in " +
                          std::to_string(lambda) + " edges, pair {" +
                          std::to_string(x + 1) + "," + std::to_string(y + 1) +
                          "} lies in " + std::to_string(count),
                      {x, y});
        }
      }
    }
  }

  DesignParams params;
  params.b = static_cast<std::int64_t>(sorted.size());
  params.r = degree[0];
  params.k = k;
  params.lambda = lambda;

  if (params.b * k != static_cast<std::int64_t>(v) * params.r ||
      params.r * (k - 1) != lambda * (v - 1)) {
    return fail("parameter identities bk = vr, r(k-1) = lambda(v-1) fail", {});
  }
  // Fisher's inequality b >= v only binds for non-trivial designs (k < v).
  if (!(params.b >= params.r && params.r >= params.lambda && v >= k) ||
      (k < v && params.b < v)) {
    return fail("parameter inequalities b >= v >= k, b >= r >= lambda fail",
                {});
  }

  DesignReport report;
  report.ok = true;
  report.message = "ok";
  report.params = params;
  return report;
}

BlockDesign design_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("v") || !j.contains("edges")) {
    throw DesignError("design JSON needs \"v\" and \"edges\"");
  }
  const int v = j.at("v").get<int>();
  std::vector<Edge> edges;
  for (const auto& raw : j.at("edges")) {
    Edge edge;
    for (const auto& vertex : raw) edge.push_back(vertex.get<int>() - 1);
    edges.push_back(std::move(edge));
  }
  return BlockDesign(v, std::move(edges));
}

nlohmann::json design_to_json(const BlockDesign& design) {
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& edge : design.edges()) {
    nlohmann::json row = nlohmann::json::array();
    for (int x : edge) row.push_back(x + 1);
    edges.push_back(std::move(row));
  }
  return {{"v", design.v()}, {"edges", std::move(edges)}};
}

}  // namespace uldp
