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

#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "commands.h"
#include "uldp/errors.h"

namespace {

// Routes output to --out when given, else stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw uldp::DomainError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close() {
    if (file_) {
      file_->close();
      if (!*file_) throw uldp::DomainError("write failed");
    }
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace uldp::cli;
  CLI::App app{"Utility-optimized LDP: privacy-utility tradeoff toolkit"};
  app.require_subcommand(1);
  std::string out_path;

  PutArgs put;
  auto* put_cmd = app.add_subcommand("put", "Optimal uBD parameters as JSON");
  put_cmd->add_option("--w", put.w, "Alphabet size")->required();
  put_cmd->add_option("--v", put.v, "Number of sensitive symbols")->required();
  put_cmd->add_option("--eps", put.epsilon, "Privacy budget")->required();
  put_cmd->add_option("--mechanism-out", put.mechanism_out,
                      "Write the optimal dense mechanism as JSON");
  put_cmd->add_option("--out", out_path, "Output file (default stdout)");

  SweepArgs sweep;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "Tradeoff curve over eps as CSV");
  sweep_cmd->add_option("--w", sweep.w)->required();
  sweep_cmd->add_option("--v", sweep.v)->required();
  sweep_cmd->add_option("--eps-min", sweep.eps_min, "Smallest eps")
      ->capture_default_str();
  sweep_cmd->add_option("--eps-max", sweep.eps_max, "Largest eps")
      ->capture_default_str();
  sweep_cmd->add_option("--points", sweep.points, "Log-spaced grid points")
      ->capture_default_str();
  sweep_cmd->add_option("--workers", sweep.workers)->capture_default_str();
  sweep_cmd->add_option("--out", out_path, "Output CSV (default stdout)");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo MSE as CSV");
  sim_cmd->add_option("--w", sim.w);
  sim_cmd->add_option("--v", sim.v);
  sim_cmd->add_option("--eps", sim.epsilon)->required();
  sim_cmd->add_option("--params", sim.params,
                      "JSON with alpha and t (default: optimal parameters)");
  sim_cmd->add_option("--dataset", sim.dataset, "CSV records");
  sim_cmd->add_option("--schema", sim.schema, "Schema JSON for --dataset");
  sim_cmd
      ->add_option("--beta", sim.beta,
                   "Simulate at the beta mixture instead of alpha")
      ->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--n", sim.n, "Clients per trial")->capture_default_str();
  sim_cmd->add_option("--trials", sim.trials)->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed)
      ->envname("ULDP_LAB_SEED")
      ->capture_default_str();
  sim_cmd->add_option("--workers", sim.workers)->capture_default_str();
  sim_cmd->add_option("--out", out_path, "Output CSV (default stdout)");

  EncodeArgs enc;
  auto* enc_cmd = app.add_subcommand("encode", "Encode categorical records");
  enc_cmd->add_option("--dataset", enc.dataset)->required();
  enc_cmd->add_option("--schema", enc.schema)->required();
  enc_cmd->add_option("--out", enc.mapping_out, "Mapping JSON");

  std::string mechanism_path;
  auto* val_cmd = app.add_subcommand("validate",
                                     "Check a mechanism JSON against the "
                                     "utility-optimized LDP conditions");
  val_cmd->add_option("mechanism", mechanism_path, "Mechanism JSON")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*enc_cmd) return cmd_encode(enc, std::cout, std::cerr);
    if (*val_cmd) return cmd_validate(mechanism_path, std::cout, std::cerr);
    Output out(out_path);
    int code = kExitError;
    if (*put_cmd) code = cmd_put(put, out.stream(), std::cerr);
    if (*sweep_cmd) code = cmd_sweep(sweep, out.stream(), std::cerr);
    if (*sim_cmd) code = cmd_simulate(sim, out.stream(), std::cerr);
    out.close();
    return code;
  } catch (const uldp::SolverError& e) {
    std::cerr << "error: " << e.what() << " (certificate " << e.certificate()
              << ")\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitError;
}
