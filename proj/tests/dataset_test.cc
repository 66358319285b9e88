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

#include "uldp/dataset.h"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "uldp/errors.h"

namespace uldp {
namespace {

using nlohmann::json;

DatasetSchema two_by_three(json predicate) {
  return DatasetSchema({{"a", {"x", "y"}}, {"b", {"p", "q", "r"}}},
                       std::move(predicate));
}

Encoding encode_text(const std::string& text, const DatasetSchema& schema) {
  std::istringstream in(text);
  return encode_dataset(in, schema);
}

json load(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

TEST(SchemaTest, CrossProductSize) {
  std::vector<Column> cols;
  int i = 0;
  for (int count : {4, 2, 2, 3, 2, 3}) {
    Column col{"c" + std::to_string(i++), {}};
    for (int c = 0; c < count; ++c) col.categories.push_back(std::to_string(c));
    cols.push_back(col);
  }
  const DatasetSchema schema(cols, {{"column", "c0"}, {"equals", "0"}});
  EXPECT_EQ(schema.raw_size(), 288);
  for (std::int64_t code = 0; code < 288; ++code) {
    EXPECT_EQ(schema.encode_raw(schema.decode_raw(code)), code);
  }
}

TEST(SchemaTest, PredicateForms) {
  const DatasetSchema schema =
      two_by_three({{"any",
                     {{{"all",
                        {{{"column", "a"}, {"equals", "y"}},
                         {{"column", "b"}, {"in", {"q", "r"}}}}}},
                      {{"column", "b"}, {"equals", "p"}}}}});
  // (a=y and b in {q,r}) or b=p
  EXPECT_TRUE(schema.sensitive({0, 0}));
  EXPECT_FALSE(schema.sensitive({0, 1}));
  EXPECT_TRUE(schema.sensitive({1, 2}));
  EXPECT_TRUE(schema.sensitive({1, 0}));
}

TEST(SchemaTest, RejectsMalformedSchemas) {
  EXPECT_THROW(two_by_three({{"column", "z"}, {"equals", "x"}}), DomainError);
  EXPECT_THROW(two_by_three({{"column", "a"}, {"equals", "z"}}), DomainError);
  EXPECT_THROW(two_by_three({{"column", "a"}}), DomainError);
  EXPECT_THROW(two_by_three({{"all", json::array()}}), DomainError);
  EXPECT_THROW(DatasetSchema({{"a", {}}}, {{"column", "a"}, {"equals", "x"}}),
               DomainError);
  EXPECT_THROW(
      DatasetSchema({{"a", {"x", "x"}}}, {{"column", "a"}, {"equals", "x"}}),
      DomainError);
  EXPECT_THROW(schema_from_json(json{{"columns", 3}}), DomainError);
}

TEST(SchemaTest, JsonRoundTrip) {
  const DatasetSchema schema = two_by_three({{"column", "a"}, {"equals", "x"}});
  const DatasetSchema back = schema_from_json(schema_to_json(schema));
  EXPECT_EQ(schema_to_json(back), schema_to_json(schema));
}

TEST(SplitCsvTest, QuotedFields) {
  EXPECT_EQ(split_csv_line("a,b,,c"),
            (std::vector<std::string>{"a", "b", "", "c"}));
  EXPECT_EQ(split_csv_line("\"x,y\",\"he said \"\"hi\"\"\"\r"),
            (std::vector<std::string>{"x,y", "he said \"hi\""}));
}

TEST(EncodeTest, SensitiveFirstAndEmptyCellsDropped) {
  const DatasetSchema schema = two_by_three({{"column", "b"}, {"equals", "q"}});
  // Cell (x, r) never occurs.
  const Encoding enc =
      encode_text("id,b,a\n1,p,x\n2,q,x\n3,q,y\n4,p,y\n5,r,y\n6,q,x\n", schema);
  EXPECT_EQ(enc.raw_size, 6);
  EXPECT_EQ(enc.w, 5);
  EXPECT_EQ(enc.v, 2);
  EXPECT_EQ(enc.records, 6);
  ASSERT_EQ(enc.symbols.size(), 5u);
  EXPECT_EQ(enc.symbols[0].values, (std::vector<int>{0, 1}));
  EXPECT_EQ(enc.symbols[0].count, 2);
  EXPECT_EQ(enc.symbols[1].values, (std::vector<int>{1, 1}));
  EXPECT_TRUE(enc.symbols[1].sensitive);
  EXPECT_FALSE(enc.symbols[2].sensitive);
  EXPECT_EQ(enc.records_as_symbols, (std::vector<int>{2, 0, 1, 3, 4, 0}));
  const Distribution p = enc.empirical();
  EXPECT_DOUBLE_EQ(p[0], 2.0 / 6);
  const json mapping = encoding_to_json(enc, schema);
  EXPECT_EQ(mapping["symbols"][0]["label"], 1);
  EXPECT_EQ(mapping["symbols"][0]["values"]["b"], "q");
  EXPECT_EQ(mapping["w"], 5);
}

TEST(EncodeTest, ConjunctionCountsIntersectionCells) {
  const DatasetSchema schema =
      two_by_three({{"all",
                     {{{"column", "a"}, {"equals", "y"}},
                      {{"column", "b"}, {"in", {"p", "q"}}}}}});
  std::string csv = "a,b\n";
  for (const char* a : {"x", "y"}) {
    for (const char* b : {"p", "q", "r"})
      csv += std::string(a) + "," + b + "\n";
  }
  const Encoding enc = encode_text(csv, schema);
  EXPECT_EQ(enc.w, 6);
  EXPECT_EQ(enc.v, 2);
}

TEST(EncodeTest, RowErrorsAreReportedAndSkipped) {
  const DatasetSchema schema = two_by_three({{"column", "a"}, {"equals", "x"}});
  const Encoding enc = encode_text("a,b\nx,p\nz,p\ny,q\nx\ny,p\n\n", schema);
  EXPECT_EQ(enc.records, 3);
  ASSERT_EQ(enc.errors.size(), 2u);
  EXPECT_EQ(enc.errors[0].line, 3);
  EXPECT_NE(enc.errors[0].message.find("'z'"), std::string::npos);
  EXPECT_EQ(enc.errors[1].line, 5);
}

TEST(EncodeTest, AlphabetErrors) {
  const DatasetSchema schema = two_by_three({{"column", "a"}, {"equals", "x"}});
  EXPECT_THROW(encode_text("a,b\nx,p\nx,q\n", schema), DomainError);
  EXPECT_THROW(encode_text("a,b\ny,p\ny,q\n", schema), DomainError);
  EXPECT_THROW(encode_text("a,c\nx,p\n", schema), DomainError);
  EXPECT_THROW(encode_text("", schema), DomainError);
  EXPECT_THROW(encode_text("a,b\nz,z\n", schema), DomainError);
}

TEST(BundledDataTest, SyntheticRecordsMatchTargetAlphabets) {
  const std::string dir = ULDP_DATA_DIR;
  for (const auto& [name, v] : std::vector<std::pair<std::string, int>>{
           {"stringent", 35}, {"permissive", 253}}) {
    const DatasetSchema schema =
        schema_from_json(load(dir + "/pums_" + name + ".json"));
    EXPECT_EQ(schema.raw_size(), 288);
    std::ifstream csv(dir + "/synthetic_pums.csv");
    const Encoding enc = encode_dataset(csv, schema);
    EXPECT_EQ(enc.w, 277) << name;
    EXPECT_EQ(enc.v, v) << name;
    EXPECT_EQ(enc.records, 50000);
    EXPECT_TRUE(enc.errors.empty());
  }
}

}  // namespace
}  // namespace uldp
