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

// Subcommands of uldp_lab. Each writes its primary output to `out`,
// diagnostics to `err`, and returns the process exit code. Library errors
// propagate as exceptions; main() maps them to exit code 2.

#ifndef ULDP_TOOLS_COMMANDS_H_
#define ULDP_TOOLS_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "uldp/put.h"

namespace uldp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitError = 2;

struct PutArgs {
  int w = 0;
  int v = 0;
  double epsilon = 0.0;
  std::string mechanism_out;  // optional dense mechanism JSON
};
int cmd_put(const PutArgs& args, std::ostream& out, std::ostream& err);

struct SweepArgs {
  int w = 0;
  int v = 0;
  double eps_min = 0.1;
  double eps_max = 10.0;
  int points = 30;
  int workers = 1;
};

struct SweepRow {
  double epsilon = 0.0;
  double alpha_star = 0.0;
  std::vector<double> t_star;
  double m_star = 0.0;
  double r_ubd = 0.0;
  std::optional<double> r_uss_min;  // uSS needs 1 <= k < v
  double m_ldp_lower = 0.0;
  SolveMethod method = SolveMethod::kNumerical;
};

// Log-spaced grid between the endpoints plus the regime boundaries that
// fall inside, sorted and deduplicated.
std::vector<double> sweep_grid(const SweepArgs& args);
std::vector<SweepRow> sweep_rows(const SweepArgs& args);
// "k:weight" pairs with 1-based k, separated by ';', zero weights omitted.
std::string format_t(const std::vector<double>& t);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);

struct SimulateArgs {
  int w = 0;  // taken from the encoding in dataset mode
  int v = 0;
  double epsilon = 0.0;
  std::string params;  // JSON {"alpha": a, "t": [...]}; saddle point if empty
  std::string dataset;
  std::string schema;
  std::optional<double> beta;  // simulate at P^(beta) instead of P^(alpha)
  std::int64_t n = 10000;
  int trials = 20;
  std::uint64_t seed = 0;
  int workers = 1;
};
int cmd_simulate(const SimulateArgs& args, std::ostream& out,
                 std::ostream& err);

struct EncodeArgs {
  std::string dataset;
  std::string schema;
  std::string mapping_out;  // optional mapping JSON
};
int cmd_encode(const EncodeArgs& args, std::ostream& out, std::ostream& err);

int cmd_validate(const std::string& mechanism_path, std::ostream& out,
                 std::ostream& err);

// printf("%.17g"), which round-trips every double.
std::string format_double(double x);

}  // namespace uldp::cli

#endif  // ULDP_TOOLS_COMMANDS_H_
