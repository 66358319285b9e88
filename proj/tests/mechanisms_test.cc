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

#include "uldp/mechanisms.h"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "test_util.h"
#include "uldp/errors.h"

namespace uldp {
namespace {

using test_util::random_feasible_gamma;
using test_util::random_simplex;

OutputSymbol prot(std::vector<int> s) {
  return {OutputKind::kProtected, std::move(s)};
}
OutputSymbol inv(int x) { return {OutputKind::kInvertible, {x}}; }

double max_row_sum_error(const Eigen::MatrixXd& q) {
  return (q.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

TEST(OutputSymbolTest, OrderingAndFormatting) {
  EXPECT_LT(prot({2}), prot({0, 1}));
  EXPECT_LT(prot({0, 1}), prot({0, 2}));
  EXPECT_LT(prot({0, 1, 2}), inv(3));
  EXPECT_LT(inv(3), inv(4));
  EXPECT_EQ(to_string(prot({0, 2})), "P{1,3}");
  EXPECT_EQ(to_string(inv(4)), "I{5}");
}

TEST(BdMechanismTest, TwoSymbolsLnTwo) {
  const Mechanism m = bd_mechanism(complete_design(2, 1), std::log(2.0));
  const Eigen::MatrixXd& q = m.matrix();
  EXPECT_NEAR(q(0, 0), 2.0 / 3, 1e-15);
  EXPECT_NEAR(q(0, 1), 1.0 / 3, 1e-15);
  EXPECT_NEAR(q(1, 1), 2.0 / 3, 1e-15);
}

TEST(BdMechanismTest, RowSumsAndRatio) {
  const Mechanism m = bd_mechanism(complete_design(4, 2), 1.0);
  const Eigen::MatrixXd& q = m.matrix();
  EXPECT_LE(max_row_sum_error(q), 1e-15);
  EXPECT_NEAR(q.maxCoeff() / q.minCoeff(), std::exp(1.0), 1e-14);
  EXPECT_THROW(bd_mechanism(complete_design(4, 2), 0.0), DomainError);
}

TEST(ExtremalTest, TwoSensitiveSingletons) {
  const double eps = 0.7, e = std::exp(eps);
  const GammaWeights gamma{
      {{0}, 1 / (e + 1)}, {{1}, 1 / (e + 1)}, {{0, 1}, 0.0}};
  EXPECT_NEAR(gamma_feasibility_residual(2, eps, gamma).first, 0.0, 1e-15);
  const Mechanism m = extremal_from_gamma(Partition(4, 2), eps, gamma);
  // Zero-weight protected outputs are dropped.
  EXPECT_EQ(m.find_output(prot({0, 1})), -1);
  EXPECT_EQ(m.num_outputs(), 4);
  EXPECT_NEAR(m.invertible_mass(), 1.0 - 2 / (e + 1), 1e-15);
  const Eigen::MatrixXd& q = m.matrix();
  EXPECT_NEAR(q(2, m.find_output(inv(2))), 1.0 - 2 / (e + 1), 1e-15);
  EXPECT_EQ(q(2, m.find_output(inv(3))), 0.0);
}

TEST(ExtremalTest, InfeasibleGammaReportsWorstInput) {
  const GammaWeights gamma{{{0}, 0.3}, {{1}, 0.2}};
  try {
    extremal_from_gamma(Partition(3, 2), 1.0, gamma);
    FAIL() << "expected FeasibilityError";
  } catch (const FeasibilityError& err) {
    // Row sums: x=0 -> 0.5 + 0.3(e-1), x=1 -> 0.5 + 0.2(e-1).
    const double r0 = 0.5 + 0.3 * std::expm1(1.0) - 1.0;
    const double r1 = 0.5 + 0.2 * std::expm1(1.0) - 1.0;
    EXPECT_EQ(err.worst_input(), std::abs(r0) > std::abs(r1) ? 0 : 1);
  }
}

TEST(ExtremalTest, StaircaseStructure) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int v = 1 + static_cast<int>(gen() % 4);
    const int w = v + 1 + static_cast<int>(gen() % 3);
    const double eps = 0.2 + 0.2 * trial;
    const GammaWeights gamma = random_feasible_gamma(gen, v, eps);
    const Mechanism m = extremal_from_gamma(Partition(w, v), eps, gamma);
    const Eigen::MatrixXd& q = m.matrix();
    EXPECT_LE(max_row_sum_error(q), 1e-12);
    std::map<std::vector<int>, double> merged;
    for (const auto& g : gamma) merged[g.subset] += g.gamma;
    for (const auto& [subset, weight] : merged) {
      if (weight == 0.0) continue;
      const int col = m.find_output(prot(subset));
      ASSERT_GE(col, 0);
      for (int x = 0; x < w; ++x) {
        const bool in =
            std::find(subset.begin(), subset.end(), x) != subset.end();
        const double want = x < v && in ? weight * std::exp(eps) : weight;
        EXPECT_NEAR(q(x, col), want, 1e-14);
      }
    }
    EXPECT_TRUE(validate_uldp(m).ok);
  }
}

TEST(UbdMechanismTest, RandomizedResponseStructure) {
  const int w = 6, v = 3;
  const double eps = 1.2, e = std::exp(eps);
  const Mechanism m = ubd_mechanism(Partition(w, v), eps, vertex(v, 1));
  const Eigen::MatrixXd& q = m.matrix();
  for (int x = 0; x < v; ++x) {
    for (int y = 0; y < v; ++y) {
      EXPECT_NEAR(q(x, m.find_output(prot({y}))),
                  (x == y ? e : 1.0) / (e + v - 1), 1e-15);
    }
  }
  for (int x = v; x < w; ++x) {
    EXPECT_NEAR(q(x, m.find_output(inv(x))), (e - 1) / (e + v - 1), 1e-15);
  }
}

TEST(UbdMechanismTest, SmallWorkedExample) {
  const Mechanism m =
      ubd_mechanism(Partition(3, 2), std::log(2.0), vertex(2, 1));
  ASSERT_TRUE(m.gamma().has_value());
  EXPECT_NEAR((*m.gamma())[m.find_output(prot({0}))], 1.0 / 3, 1e-15);
  EXPECT_NEAR((*m.gamma())[m.find_output(prot({1}))], 1.0 / 3, 1e-15);
  EXPECT_NEAR(m.invertible_mass(), 1.0 / 3, 1e-15);
}

TEST(UbdMechanismTest, RandomMixturesAreValid) {
  std::mt19937_64 gen(22);
  for (int trial = 0; trial < 30; ++trial) {
    const int v = 1 + static_cast<int>(gen() % 5);
    const int w = v + 1 + static_cast<int>(gen() % 4);
    const double eps = 0.1 + 0.15 * trial;
    const std::vector<double> t = random_simplex(gen, v);
    const Mechanism m = ubd_mechanism(Partition(w, v), eps, t);
    const Eigen::MatrixXd& q = m.matrix();
    EXPECT_LE(max_row_sum_error(q), 1e-12);
    const UldpReport report = validate_uldp(m);
    EXPECT_TRUE(report.ok) << report.message;
    GammaWeights gamma;
    for (int col = 0; col < m.num_outputs(); ++col) {
      if (m.outputs()[col].kind == OutputKind::kProtected) {
        gamma.push_back({m.outputs()[col].subset, (*m.gamma())[col]});
      }
    }
    EXPECT_LE(gamma_feasibility_residual(v, eps, gamma).first, 1e-12);
    // Size-k protected mass is t_k for every sensitive input.
    for (int x = 0; x < v; ++x) {
      std::vector<double> by_size(v, 0.0);
      for (int col = 0; col < m.num_outputs(); ++col) {
        const auto& y = m.outputs()[col];
        if (y.kind == OutputKind::kProtected) {
          by_size[y.subset.size() - 1] += q(x, col);
        }
      }
      for (int k = 0; k < v; ++k) EXPECT_NEAR(by_size[k], t[k], 1e-12);
    }
    double expected_inv = 0.0;
    const double e = std::exp(eps);
    for (int k = 1; k <= v; ++k) {
      expected_inv += t[k - 1] * k * (e - 1) / (k * e + v - k);
    }
    for (int x = v; x < w; ++x) {
      EXPECT_NEAR(q(x, m.find_output(inv(x))), expected_inv, 1e-12);
    }
  }
}

TEST(UbdMechanismTest, CustomDesignsAndErrors) {
  const std::vector<Edge> fano{{0, 1, 2}, {0, 3, 4}, {0, 5, 6}, {1, 3, 5},
                               {1, 4, 6}, {2, 3, 6}, {2, 4, 5}};
  std::map<int, BlockDesign> designs;
  designs.emplace(3, BlockDesign(7, fano));
  std::vector<double> t(7, 0.0);
  t[2] = 1.0;
  const Mechanism m = ubd_mechanism(Partition(9, 7), 0.8, t, &designs);
  EXPECT_EQ(m.num_outputs(), 7 + 2);
  EXPECT_TRUE(validate_uldp(m).ok);
  EXPECT_THROW(
      ubd_mechanism(Partition(9, 7), 0.8, t, &designs, Backend::kStreaming),
      DomainError);
  EXPECT_THROW(ubd_mechanism(Partition(9, 7), 0.8, {0.5, 0.4, 0, 0, 0, 0, 0}),
               DomainError);
  std::map<int, BlockDesign> wrong;
  wrong.emplace(2, complete_design(7, 3));
  std::vector<double> t2(7, 0.0);
  t2[1] = 1.0;
  EXPECT_THROW(ubd_mechanism(Partition(9, 7), 0.8, t2, &wrong), DomainError);
}

TEST(ValidateUldpTest, MangatStyle) {
  const double eps = 1.0;
  for (double q : {0.2, std::exp(-eps), 0.5}) {
    Eigen::MatrixXd mat(2, 2);
    mat << 1.0, 0.0, q, 1.0 - q;
    const Mechanism m =
        Mechanism::from_matrix(2, 1, eps, {prot({0}), inv(1)}, mat);
    EXPECT_EQ(validate_uldp(m).ok, q >= std::exp(-eps)) << "q=" << q;
  }
}

TEST(ValidateUldpTest, RatioViolationWitness) {
  const double eps = 0.5, e = std::exp(eps);
  Eigen::MatrixXd mat(3, 2);
  const double a = (e + 0.1) / (e + 0.1 + 1), b = 1.0 / (e + 0.1 + 1);
  mat << a, 1 - a, b, 1 - b, 0.5, 0.5;
  const Mechanism m =
      Mechanism::from_matrix(3, 2, eps, {prot({0}), prot({1})}, mat);
  const UldpReport report = validate_uldp(m);
  EXPECT_FALSE(report.ok);
  EXPECT_EQ(report.y, 0);
  EXPECT_EQ(report.x, 0);
  EXPECT_EQ(report.x2, 1);
}

TEST(ValidateUldpTest, InvertibleColumnMustHaveOneSource) {
  Eigen::MatrixXd mat(3, 3);
  mat << 0.5, 0.5, 0.0,  //
      0.5, 0.5, 0.0,     //
      0.3, 0.3, 0.4;
  mat(0, 2) = 0.1;
  mat(0, 0) = 0.4;
  const Mechanism m =
      Mechanism::from_matrix(3, 2, 1.0, {prot({0}), prot({1}), inv(2)}, mat);
  const UldpReport report = validate_uldp(m);
  EXPECT_FALSE(report.ok);
  EXPECT_EQ(report.y, 2);
}

TEST(ValidateUldpTest, NoInvertibleOutputsIsAllowed) {
  const double eps = std::log(2.0);
  Eigen::MatrixXd mat(3, 2);
  mat << 2.0 / 3, 1.0 / 3, 1.0 / 3, 2.0 / 3, 0.5, 0.5;
  const Mechanism m =
      Mechanism::from_matrix(3, 2, eps, {prot({0}), prot({1})}, mat);
  EXPECT_TRUE(validate_uldp(m).ok) << validate_uldp(m).message;
}

TEST(ValidateUldpTest, RowSumViolation) {
  Eigen::MatrixXd mat(2, 2);
  mat << 0.9, 0.0, 0.5, 0.5;
  const Mechanism m =
      Mechanism::from_matrix(2, 1, 1.0, {prot({0}), inv(1)}, mat);
  EXPECT_FALSE(validate_uldp(m).ok);
}

TEST(FromMatrixTest, RejectsMalformedInput) {
  Eigen::MatrixXd mat = Eigen::MatrixXd::Constant(2, 2, 0.5);
  EXPECT_THROW(Mechanism::from_matrix(2, 1, 1.0, {prot({0})}, mat),
               DomainError);
  EXPECT_THROW(Mechanism::from_matrix(2, 1, 1.0, {prot({1}), inv(1)}, mat),
               DomainError);
  EXPECT_THROW(Mechanism::from_matrix(2, 1, 1.0, {prot({0}), inv(0)}, mat),
               DomainError);
  mat(0, 0) = -0.1;
  EXPECT_THROW(Mechanism::from_matrix(2, 1, 1.0, {prot({0}), inv(1)}, mat),
               DomainError);
}

TEST(SampleTest, DeterministicRow) {
  Eigen::MatrixXd mat(2, 2);
  mat << 1.0, 0.0, 0.0, 1.0;
  const Mechanism m =
      Mechanism::from_matrix(2, 1, 1.0, {prot({0}), inv(1)}, mat);
  CounterRng rng(5, 0, 0);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_output(m, 1, rng), inv(1));
}

// Empirical frequencies against the dense matrix, 4 sigma per cell.
void expect_matches_dense(const Mechanism& sampler, const Mechanism& dense,
                          int draws, std::uint64_t seed) {
  for (int x = 0; x < dense.w(); ++x) {
    std::vector<int> counts(dense.num_outputs(), 0);
    CounterRng rng(seed, x, 0);
    OutputSymbol y;
    for (int i = 0; i < draws; ++i) {
      sample_into(sampler, x, rng, y);
      const int col = dense.find_output(y);
      ASSERT_GE(col, 0) << to_string(y);
      ++counts[col];
    }
    for (int col = 0; col < dense.num_outputs(); ++col) {
      const double p = dense.matrix()(x, col);
      const double sd = std::sqrt(draws * p * (1 - p));
      EXPECT_LE(std::abs(counts[col] - draws * p), 4 * sd + 1e-9)
          << "x=" << x << " y=" << to_string(dense.outputs()[col]);
    }
  }
}

TEST(SampleTest, DenseFrequenciesMatchMatrix) {
  const std::vector<double> t{0.3, 0.5, 0.2};
  const Mechanism m = ubd_mechanism(Partition(5, 3), 0.9, t);
  expect_matches_dense(m, m, 200000, 31);
}

TEST(SampleTest, StreamingMatchesDense) {
  const Partition part(6, 4);
  const std::vector<double> t{0.0, 1.0, 0.0, 0.0};
  const Mechanism dense = ubd_mechanism(part, 0.7, t);
  const Mechanism stream =
      ubd_mechanism(part, 0.7, t, nullptr, Backend::kStreaming);
  EXPECT_THROW(stream.matrix(), UnsupportedBackendError);
  expect_matches_dense(stream, dense, 200000, 32);
  const std::vector<double> mix{0.25, 0.25, 0.25, 0.25};
  expect_matches_dense(
      ubd_mechanism(part, 1.3, mix, nullptr, Backend::kStreaming),
      ubd_mechanism(part, 1.3, mix), 200000, 33);
}

TEST(MechanismJsonTest, RoundTrip) {
  const Mechanism m = ubd_mechanism(Partition(5, 3), 0.9, {0.3, 0.5, 0.2});
  const nlohmann::json j = mechanism_to_json(m);
  EXPECT_EQ(j["outputs"][0]["kind"], "protected");
  EXPECT_EQ(j["outputs"][0]["subset"], (nlohmann::json{1}));
  const Mechanism back = mechanism_from_json(j);
  EXPECT_EQ(back.outputs(), m.outputs());
  EXPECT_LE((back.matrix() - m.matrix()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_TRUE(validate_uldp(back).ok);
}

}  // namespace
}  // namespace uldp
