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

// Privacy-utility tradeoff (PUT) under utility-optimized LDP.
//
// The optimal worst-case scaled error M*(w, v, eps) is the value of the
// concave-convex game sup_alpha inf_t M(alpha, t) over alpha in [0, 1] and
// mixtures t on the simplex of block sizes 1..v. M = M1 + M2 + M3 where each
// term is a constant divided by a linear form in t:
//
//   M1 = (v-1)^2 / (v D^2 sum_k t_k k(v-k) / ((a k D + v)(k D + v)))
//   M2 = (w-v-1)(1-a) / ((w-v) D sum_k t_k k / (k D + v))
//   M3 = w (1-a) / (v (w-v) D sum_k t_k k / (a k D + v))
//
// with D = e^eps - 1 and a = alpha. Mixtures are passed as vectors of length
// v with t[k-1] = t_k.

#ifndef ULDP_PUT_H_
#define ULDP_PUT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uldp/core.h"

namespace uldp {

struct ObjectiveValue {
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double total = 0.0;

  bool finite() const;
};

// Throws DomainError for eps <= 0, alpha outside [0, 1], or t off the simplex.
ObjectiveValue objective(int w, int v, double epsilon, double alpha,
                         std::span<const double> t);

// Analytic dM/dalpha. Throws DomainError when M is infinite.
double objective_dalpha(int w, int v, double epsilon, double alpha,
                        std::span<const double> t);

// Analytic gradient of M with respect to t (components may be -inf only
// when M itself is infinite).
std::vector<double> objective_dt(int w, int v, double epsilon, double alpha,
                                 std::span<const double> t);

// Point mass delta^(k; v).
std::vector<double> vertex(int v, int k);

struct InnerOptions {
  // Stop when the Frank-Wolfe duality gap falls below this fraction of M.
  double relative_gap = 1e-12;
  int max_iterations = 200000;
};

struct InnerSolution {
  std::vector<double> t;
  double value = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

// Minimizes M(alpha, .) over the simplex by pairwise Frank-Wolfe with exact
// line search, started from the best vertex.
InnerSolution inner_min_t(int w, int v, double epsilon, double alpha,
                          const InnerOptions& options = {});

enum class SolveMethod { kClosedForm, kNumerical };

std::string to_string(SolveMethod method);

struct SaddleSolution {
  double alpha_star = 0.0;
  std::vector<double> t_star;
  double value = 0.0;
  SolveMethod method = SolveMethod::kNumerical;
  // Largest relative violation of M(a, t*) <= M(a*, t*) <= M(a*, t) over the
  // verification grids.
  double certificate = 0.0;
};

struct SaddleOptions {
  double alpha_tolerance = 1e-12;
  double certificate_tolerance = 1e-6;
  std::uint64_t grid_seed = 0x5eed5eedULL;
  InnerOptions inner;
};

// Saddle-point verification on a 21-point alpha grid and a t grid of all
// finite vertices plus 2v random mixtures.
double saddle_certificate(int w, int v, double epsilon, double alpha_star,
                          std::span<const double> t_star,
                          std::uint64_t seed = 0x5eed5eedULL);

// Numerical saddle point. The outer maximization of the concave function
// g(alpha) = inf_t M(alpha, t) bisects on the sign of dM/dalpha at the inner
// minimizer, which is a supergradient of g. Throws SolverError when the
// certificate exceeds the tolerance.
SaddleSolution saddle_solve(int w, int v, double epsilon,
                            const SaddleOptions& options = {});

// Closed-form saddle point when (w, v, eps) lies in a regime that admits one.
std::optional<SaddleSolution> closed_form(int w, int v, double epsilon);

// Closed form when available, otherwise the numerical solver.
SaddleSolution solve_put(int w, int v, double epsilon,
                         const SaddleOptions& options = {});

struct RegimeThresholds {
  double eps_low = 0.0;
  double eps_high = 0.0;
};

// Boundaries of the regime without a closed form; nullopt for v = 1, where
// a closed form exists for every eps.
std::optional<RegimeThresholds> thresholds(int w, int v);

// E(v, k) = ln sqrt((v-k)(v-k-1) / (k(k+1))), with E(v, 0) = +inf.
double e_threshold(int v, int k);

// Asymptotic error of the k-uniform block-design LDP scheme on [v].
double r_bd(int v, int k, double epsilon);

struct LdpOptimum {
  std::vector<int> k_star;
  double value = 0.0;
};

// Optimal block sizes K*(v, eps) and M*(v, v, eps) = min_k R^BD(v, k, eps).
LdpOptimum ldp_optimum(int v, double epsilon);

// Worst-case scaled error of the (w, v, eps, alpha, t) uBD scheme: the
// maximum over beta in [0, 1] of the concave quadratic
// -c (beta - alpha)^2 + (beta - alpha) F + M, c = w / (v (w - v)).
double ubd_asymptotic_error(int w, int v, double epsilon, double alpha,
                            std::span<const double> t);

// Scaled error n * R_n(Q, P_hat; P^(beta)) of the same scheme.
double ubd_error_at_beta(int w, int v, double epsilon, double alpha,
                         std::span<const double> t, double beta);

struct UssCoefficients {
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
};

// Coefficients of the utility-optimized subset selection error, 1 <= k < v.
UssCoefficients uss_coefficients(int v, double epsilon, int k);

// Scaled error of uSS with subset size k at the data distribution P.
double uss_error(int w, int v, double epsilon, int k, const Distribution& p);

// sup_P of uss_error: attained at P^(beta) for the maximizing beta.
double uss_worst_case_error(int w, int v, double epsilon, int k);

}  // namespace uldp

#endif  // ULDP_PUT_H_
