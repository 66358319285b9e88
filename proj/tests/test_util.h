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

// Shared helpers for the unit and acceptance tests.

#ifndef ULDP_TESTS_TEST_UTIL_H_
#define ULDP_TESTS_TEST_UTIL_H_

#include <cmath>
#include <random>
#include <vector>

#include "uldp/core.h"
#include "uldp/estimation.h"
#include "uldp/mechanisms.h"
#include "uldp/put.h"

namespace uldp::test_util {

inline std::vector<double> random_simplex(std::mt19937_64& gen, int n) {
  std::exponential_distribution<double> exp(1.0);
  std::vector<double> t(n);
  double total = 0.0;
  for (double& x : t) total += (x = exp(gen));
  for (double& x : t) x /= total;
  return t;
}

// Random gamma satisfying the extremal row-sum condition: random weights on
// every nonempty subset, singletons topped up until every symbol has the
// same membership mass, then a common rescaling.
inline GammaWeights random_feasible_gamma(std::mt19937_64& gen, int v,
                                          double epsilon) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GammaWeights gamma;
  for (int mask = 1; mask < (1 << v); ++mask) {
    if (unit(gen) < 0.4) continue;
    GammaEntry entry;
    for (int x = 0; x < v; ++x) {
      if (mask & (1 << x)) entry.subset.push_back(x);
    }
    entry.gamma = unit(gen);
    gamma.push_back(entry);
  }
  std::vector<double> member(v, 0.0);
  for (const auto& e : gamma) {
    for (int x : e.subset) member[x] += e.gamma;
  }
  double top = 0.0;
  for (double m : member) top = std::max(top, m);
  for (int x = 0; x < v; ++x) {
    if (top - member[x] > 0.0) gamma.push_back({{x}, top - member[x]});
  }
  if (top == 0.0) {
    for (int x = 0; x < v; ++x) gamma.push_back({{x}, 1.0});
    top = 1.0;
  }
  double total = 0.0;
  for (const auto& e : gamma) total += e.gamma;
  const double scale = total + std::expm1(epsilon) * top;
  for (auto& e : gamma) e.gamma /= scale;
  return gamma;
}

// Estimate for one output straight from the score-projection definition:
// P^(alpha) + sum_i M_i / d_i * Pi_i(eta_{P^(alpha)}(y)). Needs alpha in
// (0, 1) so that P^(alpha) is strictly positive.
inline std::vector<double> estimate_by_projection(const Mechanism& m,
                                                  double alpha,
                                                  const OutputSymbol& y) {
  const Partition part(m.w(), m.v());
  const Distribution p = p_alpha(part, alpha);
  const std::vector<double> eta = score_vector(m, p, y);
  const ObjectiveValue terms =
      objective(m.w(), m.v(), m.epsilon(), alpha, size_distribution(m));
  const double per_term[3] = {terms.m1, terms.m2, terms.m3};
  const auto dims = part.block_dims();
  std::vector<double> out = p.vec();
  for (int i = 0; i < 3; ++i) {
    if (dims[i] == 0) continue;
    const std::vector<double> proj = project_subspace(part, eta, i + 1);
    for (int x = 0; x < m.w(); ++x) out[x] += per_term[i] / dims[i] * proj[x];
  }
  return out;
}

}  // namespace uldp::test_util

#endif  // ULDP_TESTS_TEST_UTIL_H_
