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

// Categorical records to a finite alphabet. Each record is mapped to the
// cross-product code of its column values; codes that never occur are
// dropped and the survivors are relabeled so that sensitive symbols come
// first, matching the library convention that [v] is the sensitive set.

#ifndef ULDP_DATASET_H_
#define ULDP_DATASET_H_

#include <cstdint>
#include <istream>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "uldp/core.h"

namespace uldp {

struct Column {
  std::string name;
  std::vector<std::string> categories;
};

// Boolean expression over column values. JSON forms:
//   {"all": [expr, ...]}   {"any": [expr, ...]}
//   {"column": name, "equals": value}   {"column": name, "in": [values]}
class Predicate {
 public:
  enum class Op { kAll, kAny, kEquals, kIn };

  Predicate(Op op, int column, std::vector<int> values,
            std::vector<Predicate> children);

  // `values` holds category indices per column.
  bool eval(const std::vector<int>& values) const;

 private:
  Op op_;
  int column_;
  std::vector<int> values_;
  std::vector<Predicate> children_;
};

class DatasetSchema {
 public:
  DatasetSchema(std::vector<Column> columns, nlohmann::json predicate);

  const std::vector<Column>& columns() const { return columns_; }
  const nlohmann::json& predicate_json() const { return predicate_json_; }

  // Product of the category counts.
  std::int64_t raw_size() const;
  int column_index(const std::string& name) const;
  int category_index(int column, const std::string& value) const;
  bool sensitive(const std::vector<int>& values) const;
  std::vector<int> decode_raw(std::int64_t code) const;
  std::int64_t encode_raw(const std::vector<int>& values) const;

 private:
  std::vector<Column> columns_;
  nlohmann::json predicate_json_;
  std::unique_ptr<Predicate> predicate_;
};

DatasetSchema schema_from_json(const nlohmann::json& j);
nlohmann::json schema_to_json(const DatasetSchema& schema);

struct RowError {
  std::int64_t line = 0;  // 1-based line in the CSV, header is line 1
  std::string message;
};

struct EncodedSymbol {
  int label = 0;  // 1-based alphabet label
  std::int64_t raw_code = 0;
  bool sensitive = false;
  std::int64_t count = 0;
  std::vector<int> values;
};

struct Encoding {
  int w = 0;
  int v = 0;
  std::int64_t raw_size = 0;
  std::int64_t records = 0;
  std::vector<EncodedSymbol> symbols;  // ordered by label
  std::vector<RowError> errors;
  // 0-based symbol per valid record, in file order.
  std::vector<int> records_as_symbols;

  Distribution empirical() const;
};

// Reads a headered CSV. Rows with unknown values or the wrong number of
// fields are reported in `errors` and skipped. Throws DomainError when no
// symbol or every symbol is sensitive.
Encoding encode_dataset(std::istream& csv, const DatasetSchema& schema);

// Mapping file for decoding estimates back to column values.
nlohmann::json encoding_to_json(const Encoding& enc,
                                const DatasetSchema& schema);

// Splits one CSV line; supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace uldp

#endif  // ULDP_DATASET_H_
