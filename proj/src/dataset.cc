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

#include <algorithm>
#include <map>
#include <utility>

#include "uldp/errors.h"

namespace uldp {
namespace {

// Alphabets are indexed by int; anything larger is not a usable alphabet.
constexpr std::int64_t kMaxRawSize = std::int64_t{1} << 30;

Predicate parse_predicate(const nlohmann::json& j,
                          const std::vector<Column>& columns) {
  if (!j.is_object()) throw DomainError("predicate must be a JSON object");
  auto children = [&](const char* key) {
    const auto& list = j.at(key);
    if (!list.is_array() || list.empty()) {
      throw DomainError(std::string("predicate '") + key +
                        "' needs a nonempty array");
    }
    std::vector<Predicate> out;
    for (const auto& child : list)
      out.push_back(parse_predicate(child, columns));
    return out;
  };
  if (j.contains("all")) return {Predicate::Op::kAll, -1, {}, children("all")};
  if (j.contains("any")) return {Predicate::Op::kAny, -1, {}, children("any")};
  if (!j.contains("column")) {
    throw DomainError("predicate needs one of all, any, column: " + j.dump());
  }
  const std::string name = j.at("column").get<std::string>();
  int col = -1;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) col = static_cast<int>(i);
  }
  if (col < 0) throw DomainError("predicate refers to unknown column " + name);
  auto index_of = [&](const std::string& value) {
    const auto& cats = columns[col].categories;
    const auto it = std::find(cats.begin(), cats.end(), value);
    if (it == cats.end()) {
      throw DomainError("predicate value '" + value +
                        "' is not a category of " + name);
    }
    return static_cast<int>(it - cats.begin());
  };
  if (j.contains("equals")) {
    return {Predicate::Op::kEquals,
            col,
            {index_of(j.at("equals").get<std::string>())},
            {}};
  }
  if (j.contains("in")) {
    std::vector<int> values;
    for (const auto& value : j.at("in")) {
      values.push_back(index_of(value.get<std::string>()));
    }
    return {Predicate::Op::kIn, col, std::move(values), {}};
  }
  throw DomainError("column predicate needs 'equals' or 'in': " + j.dump());
}

}  // namespace

Predicate::Predicate(Op op, int column, std::vector<int> values,
                     std::vector<Predicate> children)
    : op_(op),
      column_(column),
      values_(std::move(values)),
      children_(std::move(children)) {}

bool Predicate::eval(const std::vector<int>& values) const {
  switch (op_) {
    case Op::kAll:
      return std::all_of(children_.begin(), children_.end(),
                         [&](const Predicate& p) { return p.eval(values); });
    case Op::kAny:
      return std::any_of(children_.begin(), children_.end(),
                         [&](const Predicate& p) { return p.eval(values); });
    case Op::kEquals:
    case Op::kIn:
      return std::find(values_.begin(), values_.end(), values[column_]) !=
             values_.end();
  }
  return false;
}

DatasetSchema::DatasetSchema(std::vector<Column> columns,
                             nlohmann::json predicate)
    : columns_(std::move(columns)), predicate_json_(std::move(predicate)) {
  if (columns_.empty()) throw DomainError("schema needs at least one column");
  std::int64_t size = 1;
  for (const auto& col : columns_) {
    if (col.categories.empty()) {
      throw DomainError("column " + col.name + " has no categories");
    }
    std::vector<std::string> sorted = col.categories;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw DomainError("column " + col.name + " repeats a category");
    }
    size *= static_cast<std::int64_t>(col.categories.size());
    if (size > kMaxRawSize) throw DomainError("cross product is too large");
  }
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (columns_[i].name == columns_[j].name) {
        throw DomainError("duplicate column " + columns_[i].name);
      }
    }
  }
  predicate_ =
      std::make_unique<Predicate>(parse_predicate(predicate_json_, columns_));
}

std::int64_t DatasetSchema::raw_size() const {
  std::int64_t size = 1;
  for (const auto& col : columns_) size *= col.categories.size();
  return size;
}

int DatasetSchema::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int DatasetSchema::category_index(int column, const std::string& value) const {
  const auto& cats = columns_[column].categories;
  const auto it = std::find(cats.begin(), cats.end(), value);
  return it == cats.end() ? -1 : static_cast<int>(it - cats.begin());
}

bool DatasetSchema::sensitive(const std::vector<int>& values) const {
  return predicate_->eval(values);
}

// Mixed radix with the first column most significant.
std::int64_t DatasetSchema::encode_raw(const std::vector<int>& values) const {
  std::int64_t code = 0;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    code = code * static_cast<std::int64_t>(columns_[i].categories.size()) +
           values[i];
  }
  return code;
}

std::vector<int> DatasetSchema::decode_raw(std::int64_t code) const {
  std::vector<int> values(columns_.size());
  for (std::size_t i = columns_.size(); i-- > 0;) {
    const auto radix = static_cast<std::int64_t>(columns_[i].categories.size());
    values[i] = static_cast<int>(code % radix);
    code /= radix;
  }
  return values;
}

DatasetSchema schema_from_json(const nlohmann::json& j) {
  try {
    std::vector<Column> columns;
    for (const auto& col : j.at("columns")) {
      columns.push_back({col.at("name").get<std::string>(),
                         col.at("categories").get<std::vector<std::string>>()});
    }
    return DatasetSchema(std::move(columns), j.at("sensitive"));
  } catch (const nlohmann::json::exception& err) {
    throw DomainError(std::string("malformed schema: ") + err.what());
  }
}

nlohmann::json schema_to_json(const DatasetSchema& schema) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& col : schema.columns()) {
    cols.push_back({{"name", col.name}, {"categories", col.categories}});
  }
  return {{"columns", cols}, {"sensitive", schema.predicate_json()}};
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

Distribution Encoding::empirical() const {
  std::vector<double> p(w);
  for (int i = 0; i < w; ++i) {
    p[i] = static_cast<double>(symbols[i].count) / static_cast<double>(records);
  }
  return Distribution(std::move(p));
}

Encoding encode_dataset(std::istream& csv, const DatasetSchema& schema) {
  std::string line;
  if (!std::getline(csv, line)) throw DomainError("dataset is empty");
  const std::vector<std::string> header = split_csv_line(line);
  const auto& columns = schema.columns();
  std::vector<int> field_of(columns.size(), -1);
  for (std::size_t f = 0; f < header.size(); ++f) {
    const int col = schema.column_index(header[f]);
    if (col >= 0) field_of[col] = static_cast<int>(f);
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (field_of[c] < 0) {
      throw DomainError("dataset has no column " + columns[c].name);
    }
  }

  Encoding enc;
  enc.raw_size = schema.raw_size();
  std::map<std::int64_t, std::int64_t> counts;
  std::vector<std::int64_t> raw_records;
  std::int64_t line_no = 1;
  std::vector<int> values(columns.size());
  while (std::getline(csv, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      enc.errors.push_back(
          {line_no, "expected " + std::to_string(header.size()) +
                        " fields, got " + std::to_string(fields.size())});
      continue;
    }
    bool ok = true;
    for (std::size_t c = 0; c < columns.size() && ok; ++c) {
      values[c] =
          schema.category_index(static_cast<int>(c), fields[field_of[c]]);
      if (values[c] < 0) {
        enc.errors.push_back({line_no, "unknown value '" + fields[field_of[c]] +
                                           "' in column " + columns[c].name});
        ok = false;
      }
    }
    if (!ok) continue;
    const std::int64_t code = schema.encode_raw(values);
    ++counts[code];
    raw_records.push_back(code);
  }
  enc.records = static_cast<std::int64_t>(raw_records.size());
  if (enc.records == 0) throw DomainError("dataset has no valid records");

  // Sensitive codes first, each group in raw-code order.
  for (const bool want_sensitive : {true, false}) {
    for (const auto& [code, count] : counts) {
      std::vector<int> vals = schema.decode_raw(code);
      if (schema.sensitive(vals) != want_sensitive) continue;
      EncodedSymbol sym;
      sym.label = static_cast<int>(enc.symbols.size()) + 1;
      sym.raw_code = code;
      sym.sensitive = want_sensitive;
      sym.count = count;
      sym.values = std::move(vals);
      enc.symbols.push_back(std::move(sym));
    }
    if (want_sensitive) enc.v = static_cast<int>(enc.symbols.size());
  }
  enc.w = static_cast<int>(enc.symbols.size());
  if (enc.v < 1 || enc.v >= enc.w) {
    throw DomainError("encoded alphabet has v=" + std::to_string(enc.v) +
                      " sensitive of w=" + std::to_string(enc.w) +
                      " symbols; need 1 <= v < w");
  }
  std::map<std::int64_t, int> label_of;
  for (const auto& sym : enc.symbols) label_of[sym.raw_code] = sym.label - 1;
  enc.records_as_symbols.reserve(raw_records.size());
  for (std::int64_t code : raw_records) {
    enc.records_as_symbols.push_back(label_of[code]);
  }
  return enc;
}

nlohmann::json encoding_to_json(const Encoding& enc,
                                const DatasetSchema& schema) {
  nlohmann::json symbols = nlohmann::json::array();
  for (const auto& sym : enc.symbols) {
    nlohmann::json values = nlohmann::json::object();
    for (std::size_t c = 0; c < schema.columns().size(); ++c) {
      values[schema.columns()[c].name] =
          schema.columns()[c].categories[sym.values[c]];
    }
    symbols.push_back({{"label", sym.label},
                       {"raw_code", sym.raw_code},
                       {"sensitive", sym.sensitive},
                       {"count", sym.count},
                       {"probability", static_cast<double>(sym.count) /
                                           static_cast<double>(enc.records)},
                       {"values", values}});
  }
  return {{"w", enc.w},
          {"v", enc.v},
          {"raw_size", enc.raw_size},
          {"records", enc.records},
          {"rejected_rows", enc.errors.size()},
          {"schema", schema_to_json(schema)},
          {"symbols", symbols}};
}

}  // namespace uldp
