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

#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "uldp/errors.h"

namespace uldp {
namespace {

TEST(CompleteDesignTest, TwoVerticesSingletons) {
  const BlockDesign d = complete_design(2, 1);
  EXPECT_EQ(d.edges(), (std::vector<Edge>{{0}, {1}}));
  EXPECT_EQ(d.b(), 2);
  EXPECT_EQ(d.r(), 1);
  EXPECT_EQ(d.lambda(), 0);
}

TEST(CompleteDesignTest, FourVerticesPairs) {
  const BlockDesign d = complete_design(4, 2);
  EXPECT_EQ(d.b(), 6);
  EXPECT_EQ(d.r(), 3);
  EXPECT_EQ(d.k(), 2);
  EXPECT_EQ(d.lambda(), 1);
}

TEST(CompleteDesignTest, SingleVertex) {
  const BlockDesign d = complete_design(1, 1);
  EXPECT_EQ(d.params(), (DesignParams{1, 1, 1, 0}));
}

TEST(CompleteDesignTest, RejectsBadSize) {
  EXPECT_THROW(complete_design(3, 0), DomainError);
  EXPECT_THROW(complete_design(3, 4), DomainError);
  // C(40, 20) is far beyond the materialization cap.
  EXPECT_THROW(complete_design(40, 20), DomainError);
}

TEST(CompleteDesignTest, ValidatesAndSatisfiesIdentities) {
  for (int v = 1; v <= 12; ++v) {
    for (int k = 1; k <= v; ++k) {
      const BlockDesign d = complete_design(v, k);
      const DesignReport report = validate_design(v, d.edges());
      ASSERT_TRUE(report.ok)
          << "v=" << v << " k=" << k << ": " << report.message;
      EXPECT_EQ(report.params, d.params());
      EXPECT_EQ(d.b() * k, v * d.r());
      EXPECT_EQ(d.r() * (k - 1), d.lambda() * (v - 1));
      EXPECT_EQ(d.b(), binomial(v, k));
      std::set<Edge> unique(d.edges().begin(), d.edges().end());
      EXPECT_EQ(static_cast<std::int64_t>(unique.size()), d.b());
    }
  }
}

TEST(ValidateDesignTest, IrregularWitness) {
  const DesignReport report = validate_design(3, {{0, 1}, {0, 2}});
  EXPECT_FALSE(report.ok);
  EXPECT_EQ(report.witness, (std::vector<int>{0, 1}));
  EXPECT_NE(report.message.find("regular"), std::string::npos);
}

TEST(ValidateDesignTest, FanoPlane) {
  const std::vector<Edge> fano{{0, 1, 2}, {0, 3, 4}, {0, 5, 6}, {1, 3, 5},
                               {1, 4, 6}, {2, 3, 6}, {2, 4, 5}};
  const DesignReport report = validate_design(7, fano);
  ASSERT_TRUE(report.ok) << report.message;
  EXPECT_EQ(report.params, (DesignParams{7, 3, 3, 1}));
  // Independent incidence count.
  for (int x = 0; x < 7; ++x) {
    int deg = 0;
    for (const Edge& e : fano) deg += std::count(e.begin(), e.end(), x);
    EXPECT_EQ(deg, 3);
  }
}

TEST(ValidateDesignTest, DetectsDefects) {
  EXPECT_FALSE(validate_design(3, {}).ok);
  EXPECT_FALSE(validate_design(3, {{0, 3}}).ok);
  EXPECT_FALSE(validate_design(3, {{0, 0}}).ok);
  EXPECT_FALSE(validate_design(3, {{0, 1}, {2}}).ok);
  // Regular and uniform but unbalanced: a 4-cycle.
  const DesignReport cycle =
      validate_design(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  EXPECT_FALSE(cycle.ok);
  EXPECT_EQ(cycle.witness.size(), 2u);
  EXPECT_THROW(BlockDesign(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}), DesignError);
}

TEST(ValidateDesignTest, RepeatedCompleteDesignIsADesign) {
  std::vector<Edge> edges = complete_design(4, 2).edges();
  const auto copy = edges;
  edges.insert(edges.end(), copy.begin(), copy.end());
  const DesignReport report = validate_design(4, edges);
  ASSERT_TRUE(report.ok);
  EXPECT_EQ(report.params, (DesignParams{12, 6, 2, 2}));
}

TEST(DesignJsonTest, RoundTripOneBased) {
  const BlockDesign d = complete_design(4, 2);
  const nlohmann::json j = design_to_json(d);
  EXPECT_EQ(j["edges"][0], (nlohmann::json{1, 2}));
  const BlockDesign back = design_from_json(j);
  EXPECT_EQ(back.edges(), d.edges());
  EXPECT_EQ(back.params(), d.params());
  EXPECT_THROW(design_from_json(nlohmann::json{{"v", 3}}), DesignError);
}

TEST(BinomialTest, Values) {
  EXPECT_EQ(binomial(5, 2), 10);
  EXPECT_EQ(binomial(30, 15), 155117520);
  EXPECT_EQ(binomial(4, 0), 1);
  EXPECT_EQ(binomial(4, 5), 0);
}

}  // namespace
}  // namespace uldp
