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

// Monte Carlo harness and exact error computations for uBD schemes.
//
// Client i of trial j draws from the stream (seed, j, i), so results do not
// depend on the number of workers.

#ifndef ULDP_SIM_H_
#define ULDP_SIM_H_

#include <cstdint>
#include <ostream>
#include <vector>

#include "uldp/core.h"
#include "uldp/estimation.h"
#include "uldp/mechanisms.h"

namespace uldp {

struct SimConfig {
  std::int64_t n = 1;
  int trials = 1;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct SimResult {
  double mean_scaled_mse = 0.0;
  double stderr_mse = 0.0;
  double theory = 0.0;
  // Per-coordinate mean and standard error of the estimates across trials.
  std::vector<double> mean_estimate;
  std::vector<double> estimate_stderr;
};

SimResult run_trials(const Mechanism& m, const EstimatorTable& table,
                     const Distribution& p, const SimConfig& cfg);

// n * R_n at P from the output-class probabilities; needs no matrix.
double exact_scaled_mse(const EstimatorTable& table, const Distribution& p);

// sum_x P_x sum_y Q(y|x) ||P_hat_1(y) - P||^2 over the dense matrix.
double exact_scaled_mse_dense(const Mechanism& m, const EstimatorTable& table,
                              const Distribution& p);

// Dense R_1 at P^(beta) for every beta in `betas`.
std::vector<double> exact_beta_curve(const Mechanism& m,
                                     const EstimatorTable& table,
                                     const std::vector<double>& betas);

struct SweepPoint {
  double beta = 0.0;
  SimResult result;
  double theory = 0.0;
};

// Simulates at P^(beta) for each grid point; `theory` is the closed-form
// error of the scheme at P^(beta).
std::vector<SweepPoint> worst_case_sweep(const Mechanism& m,
                                         const EstimatorTable& table,
                                         const std::vector<double>& beta_grid,
                                         const SimConfig& cfg);

// Distribution MSE from frequency MSE: adds (1 - sum P_x^2) / n.
// Writes "beta,empirical,stderr,theory" rows with full precision.
void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);

double freq_mse_translate(std::int64_t n, const Distribution& p,
                          double freq_mse);

}  // namespace uldp

#endif  // ULDP_SIM_H_
