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

#include "commands.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "uldp/dataset.h"
#include "uldp/errors.h"
#include "uldp/estimation.h"
#include "uldp/mechanisms.h"
#include "uldp/parallel.h"
#include "uldp/sim.h"

namespace uldp::cli {
namespace {

constexpr const char* kSweepSchema = "# uldp-lab sweep v1";
constexpr const char* kSimulateSchema = "# uldp-lab simulate v1";

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError("malformed JSON in " + path + ": " + e.what());
  }
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw DomainError("write failed for " + path);
}

DatasetSchema load_schema(const std::string& path) {
  return schema_from_json(read_json(path));
}

Encoding load_encoding(const std::string& dataset, const DatasetSchema& schema,
                       std::ostream& err) {
  std::ifstream in(dataset);
  if (!in) throw DomainError("cannot open " + dataset);
  Encoding enc = encode_dataset(in, schema);
  constexpr std::size_t kShown = 20;
  for (std::size_t i = 0; i < enc.errors.size() && i < kShown; ++i) {
    err << dataset << ":" << enc.errors[i].line << ": " << enc.errors[i].message
        << "\n";
  }
  if (enc.errors.size() > kShown) {
    err << dataset << ": " << enc.errors.size() - kShown
        << " more rejected rows\n";
  }
  return enc;
}

// M*(v, v, eps); a one-symbol alphabet is known exactly, so the bound is 0.
double ldp_lower(int v, double epsilon) {
  return v == 1 ? 0.0 : ldp_optimum(v, epsilon).value;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string format_t(const std::vector<double>& t) {
  std::string out;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] == 0.0) continue;
    if (!out.empty()) out += ';';
    out += std::to_string(k + 1) + ":" + format_double(t[k]);
  }
  return out;
}

int cmd_put(const PutArgs& args, std::ostream& out, std::ostream& err) {
  const Partition part(args.w, args.v);
  const SaddleSolution s = solve_put(args.w, args.v, args.epsilon);
  nlohmann::json j = {{"w", args.w},
                      {"v", args.v},
                      {"epsilon", args.epsilon},
                      {"alpha_star", s.alpha_star},
                      {"t_star", s.t_star},
                      {"value", s.value},
                      {"method", to_string(s.method)},
                      {"certificate", s.certificate},
                      {"m_ldp_lower", ldp_lower(args.v, args.epsilon)}};
  if (const auto th = thresholds(args.w, args.v)) {
    j["eps_low"] = th->eps_low;
    j["eps_high"] = th->eps_high;
  }
  out << j.dump(2) << "\n";
  if (!args.mechanism_out.empty()) {
    const Mechanism m = ubd_mechanism(part, args.epsilon, s.t_star);
    write_json(args.mechanism_out, mechanism_to_json(m));
    err << "wrote " << args.mechanism_out << "\n";
  }
  return kExitOk;
}

std::vector<double> sweep_grid(const SweepArgs& args) {
  if (!(args.eps_min > 0.0) || !(args.eps_max > args.eps_min)) {
    throw DomainError("sweep requires 0 < eps-min < eps-max");
  }
  if (args.points < 2) throw DomainError("sweep requires points >= 2");
  std::vector<double> grid;
  const double lo = std::log(args.eps_min), hi = std::log(args.eps_max);
  for (int i = 0; i < args.points; ++i) {
    grid.push_back(i + 1 == args.points
                       ? args.eps_max
                       : std::exp(lo + (hi - lo) * i / (args.points - 1)));
  }
  grid.front() = args.eps_min;
  if (const auto th = thresholds(args.w, args.v)) {
    for (double b : {th->eps_low, th->eps_high}) {
      if (b >= args.eps_min && b <= args.eps_max) grid.push_back(b);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<SweepRow> sweep_rows(const SweepArgs& args) {
  (void)Partition(args.w, args.v);  // validates (w, v)
  const std::vector<double> grid = sweep_grid(args);
  std::vector<SweepRow> rows(grid.size());
  parallel_for(static_cast<int>(grid.size()), args.workers, [&](int i) {
    const double eps = grid[i];
    const SaddleSolution s = solve_put(args.w, args.v, eps);
    SweepRow& row = rows[i];
    row.epsilon = eps;
    row.alpha_star = s.alpha_star;
    row.t_star = s.t_star;
    row.m_star = s.value;
    row.r_ubd =
        ubd_asymptotic_error(args.w, args.v, eps, s.alpha_star, s.t_star);
    for (int k = 1; k < args.v; ++k) {
      const double r = uss_worst_case_error(args.w, args.v, eps, k);
      if (!row.r_uss_min || r < *row.r_uss_min) row.r_uss_min = r;
    }
    row.m_ldp_lower = ldp_lower(args.v, eps);
    row.method = s.method;
  });
  return rows;
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  const std::vector<SweepRow> rows = sweep_rows(args);
  out << kSweepSchema << " w=" << args.w << " v=" << args.v << "\n";
  out << "epsilon,alpha_star,t_star,m_star,r_ubd,r_uss_min,m_ldp_lower,"
         "method\n";
  for (const SweepRow& row : rows) {
    out << format_double(row.epsilon) << ',' << format_double(row.alpha_star)
        << ',' << format_t(row.t_star) << ',' << format_double(row.m_star)
        << ',' << format_double(row.r_ubd) << ','
        << (row.r_uss_min ? format_double(*row.r_uss_min) : "") << ','
        << format_double(row.m_ldp_lower) << ',' << to_string(row.method)
        << "\n";
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].m_star > rows[i - 1].m_star * (1.0 + 1e-9)) {
      err << "warning: m_star increases from eps=" << rows[i - 1].epsilon
          << " to eps=" << rows[i].epsilon << "\n";
    }
  }
  return kExitOk;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out,
                 std::ostream& err) {
  int w = args.w, v = args.v;
  std::optional<Distribution> data_p;
  if (!args.dataset.empty() || !args.schema.empty()) {
    if (args.dataset.empty() || args.schema.empty()) {
      throw DomainError("dataset mode needs both --dataset and --schema");
    }
    if (args.beta) throw DomainError("--beta does not apply in dataset mode");
    const DatasetSchema schema = load_schema(args.schema);
    const Encoding enc = load_encoding(args.dataset, schema, err);
    if ((w != 0 && w != enc.w) || (v != 0 && v != enc.v)) {
      throw DomainError("dataset encodes to w=" + std::to_string(enc.w) +
                        " v=" + std::to_string(enc.v) +
                        ", which contradicts --w/--v");
    }
    w = enc.w;
    v = enc.v;
    data_p = enc.empirical();
  }
  const Partition part(w, v);

  double alpha;
  std::vector<double> t;
  if (!args.params.empty()) {
    const nlohmann::json j = read_json(args.params);
    try {
      alpha = j.at("alpha").get<double>();
      t = j.at("t").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw DomainError("params needs numeric 'alpha' and array 't': " +
                        std::string(e.what()));
    }
  } else {
    const SaddleSolution s = solve_put(w, v, args.epsilon);
    alpha = s.alpha_star;
    t = s.t_star;
  }

  const Mechanism m =
      ubd_mechanism(part, args.epsilon, t, nullptr, Backend::kStreaming);
  const EstimatorTable table = ubd_estimator_table(m, alpha);
  const Distribution p =
      data_p ? *data_p : p_alpha(part, args.beta.value_or(alpha));
  const SimResult r =
      run_trials(m, table, p, {args.n, args.trials, args.seed, args.workers});

  out << kSimulateSchema << "\n";
  out << "w,v,epsilon,alpha,n,trials,seed,mean_scaled_mse,stderr,theory\n";
  out << w << ',' << v << ',' << format_double(args.epsilon) << ','
      << format_double(alpha) << ',' << args.n << ',' << args.trials << ','
      << args.seed << ',' << format_double(r.mean_scaled_mse) << ','
      << format_double(r.stderr_mse) << ',' << format_double(r.theory) << "\n";
  return kExitOk;
}

int cmd_encode(const EncodeArgs& args, std::ostream& out, std::ostream& err) {
  const DatasetSchema schema = load_schema(args.schema);
  const Encoding enc = load_encoding(args.dataset, schema, err);
  out << "raw_size=" << enc.raw_size << " w=" << enc.w << " v=" << enc.v
      << " records=" << enc.records << " rejected=" << enc.errors.size()
      << "\n";
  if (!args.mapping_out.empty()) {
    write_json(args.mapping_out, encoding_to_json(enc, schema));
    err << "wrote " << args.mapping_out << "\n";
  }
  return kExitOk;
}

int cmd_validate(const std::string& mechanism_path, std::ostream& out,
                 std::ostream& /*err*/) {
  const Mechanism m = mechanism_from_json(read_json(mechanism_path));
  const UldpReport report = validate_uldp(m);
  if (report.ok) {
    out << "PASS w=" << m.w() << " v=" << m.v()
        << " eps=" << format_double(m.epsilon()) << "\n";
    return kExitOk;
  }
  out << "FAIL " << report.message;
  // Witness labels are 1-based like every other user-facing symbol.
  if (report.x >= 0) out << " x=" << report.x + 1;
  if (report.x2 >= 0) out << " x'=" << report.x2 + 1;
  if (report.y >= 0) out << " y=" << to_string(m.outputs()[report.y]);
  out << "\n";
  return kExitCheckFailed;
}

}  // namespace uldp::cli
