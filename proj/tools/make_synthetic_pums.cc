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

// Writes a synthetic census-style CSV over the columns of two schemas that
// share columns and differ in their sensitivity predicate. A fixed number
// of cells is left empty: `--empty-both` inside both sensitive sets and the
// rest sensitive only under the permissive predicate. Every other cell
// occurs at least once, so the encoded alphabet sizes are exact.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <vector>

#include "CLI11.hpp"
#include "uldp/dataset.h"
#include "uldp/rng.h"

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(in);
}

// Partial Fisher-Yates: the first `count` entries of a shuffled copy.
std::vector<std::int64_t> pick(std::vector<std::int64_t> pool, int count,
                               uldp::CounterRng& rng) {
  if (count > static_cast<int>(pool.size())) {
    throw std::runtime_error("not enough cells to leave empty");
  }
  for (int i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::ptrdiff_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic categorical survey records"};
  std::string stringent_path, permissive_path, out_path;
  std::int64_t n = 50000;
  std::uint64_t seed = 2026;
  int empty_both = 1, empty_permissive = 10;
  app.add_option("--stringent", stringent_path)->required();
  app.add_option("--permissive", permissive_path)->required();
  app.add_option("--n", n)->capture_default_str();
  app.add_option("--seed", seed)->capture_default_str();
  app.add_option("--empty-both", empty_both)->capture_default_str();
  app.add_option("--empty-permissive", empty_permissive)->capture_default_str();
  app.add_option("--out", out_path, "Output CSV (default stdout)");
  CLI11_PARSE(app, argc, argv);

  try {
    const uldp::DatasetSchema strict =
        uldp::schema_from_json(read_json(stringent_path));
    const uldp::DatasetSchema loose =
        uldp::schema_from_json(read_json(permissive_path));
    if (uldp::schema_to_json(strict)["columns"] !=
        uldp::schema_to_json(loose)["columns"]) {
      throw std::runtime_error("schemas must share their columns");
    }
    const std::int64_t raw = strict.raw_size();
    std::vector<std::int64_t> both, loose_only;
    for (std::int64_t code = 0; code < raw; ++code) {
      const auto values = strict.decode_raw(code);
      const bool s = strict.sensitive(values), l = loose.sensitive(values);
      if (s && !l) {
        throw std::runtime_error("stringent set must lie inside permissive");
      }
      if (s) both.push_back(code);
      if (l && !s) loose_only.push_back(code);
    }
    uldp::CounterRng rng(seed, 0, 0);
    std::vector<bool> empty(raw, false);
    for (auto code : pick(both, empty_both, rng)) empty[code] = true;
    for (auto code : pick(loose_only, empty_permissive, rng))
      empty[code] = true;

    // Heavy-tailed cell weights: squared exponentials.
    std::vector<std::int64_t> cells;
    std::vector<double> cdf;
    double acc = 0.0;
    for (std::int64_t code = 0; code < raw; ++code) {
      if (empty[code]) continue;
      const double e = -std::log1p(-rng.uniform());
      acc += e * e + 0.01;
      cells.push_back(code);
      cdf.push_back(acc);
    }
    if (n < static_cast<std::int64_t>(cells.size())) {
      throw std::runtime_error("n must cover every nonempty cell");
    }
    std::vector<std::int64_t> records(cells);
    for (std::int64_t i = static_cast<std::int64_t>(cells.size()); i < n; ++i) {
      const double u = rng.uniform() * acc;
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      records.push_back(
          cells[std::min<std::size_t>(it - cdf.begin(), cells.size() - 1)]);
    }
    for (std::int64_t i = n - 1; i > 0; --i) {
      std::swap(records[i], records[rng.below(i + 1)]);
    }

    std::ofstream file;
    if (!out_path.empty()) file.open(out_path);
    std::ostream& out = out_path.empty() ? std::cout : file;
    out << "serial";
    for (const auto& col : strict.columns()) out << ',' << col.name;
    out << '\n';
    for (std::int64_t i = 0; i < n; ++i) {
      out << i + 1;
      const auto values = strict.decode_raw(records[i]);
      for (std::size_t c = 0; c < values.size(); ++c) {
        out << ',' << strict.columns()[c].categories[values[c]];
      }
      out << '\n';
    }
    if (!out) throw std::runtime_error("write failed");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
