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

// Score vectors, Fisher information and the uBD estimator family.
//
// The uBD estimator for a single output is a function of the output kind,
// its size and whether x belongs to it. EstimatorTable stores exactly those
// coefficients, and SufficientStats stores exactly the counts needed to
// average them over a sample.

#ifndef ULDP_ESTIMATION_H_
#define ULDP_ESTIMATION_H_

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "uldp/core.h"
#include "uldp/mechanisms.h"

namespace uldp {

// eta(y)_x = Q(y|x) / Q_P(y). Dense backend only.
std::vector<double> score_vector(const Mechanism& m, const Distribution& p,
                                 const OutputSymbol& y);

struct FisherMatrix {
  DirectionBasis basis;
  Eigen::MatrixXd j;
};

// J_ij = sum_y <Q_y, h_i> <Q_y, h_j> / Q_P(y) over outputs with Q_P(y) > 0.
FisherMatrix fisher_information(const Mechanism& m, const Distribution& p,
                                const DirectionBasis& basis);

// Mixture t(Q): distribution of |Y| for Y ~ Q_{P^(1)} (extremal mechanisms).
std::vector<double> size_distribution(const Mechanism& m);

// |tr(B_i) - d_i^2 / M_i(alpha, t(Q))| for the three diagonal blocks B_i of
// the Fisher matrix at P^(alpha).
std::array<double, 3> block_trace_check(const Mechanism& m, double alpha);

struct EstimatorTable {
  int w = 0;
  int v = 0;
  double epsilon = 0.0;
  double alpha = 0.0;
  std::vector<double> t;

  // Indexed by k-1; meaningful where t_k > 0.
  std::vector<double> member;         // x in [v], x in y, |y| = k
  std::vector<double> non_member;     // x in [v], x not in y, |y| = k
  std::vector<double> non_sensitive;  // x outside [v], protected y, |y| = k
  double invertible_sensitive = 0.0;  // x in [v], invertible y
  double invertible_self = 0.0;       // y = {x}
  double invertible_other = 0.0;      // y = {x'}, x' != x, x outside [v]

  // Full estimate vector for one output.
  std::vector<double> estimate(const OutputSymbol& y) const;
};

// Throws EstimatorDegenerateError for t = delta^(v) with v >= 2.
EstimatorTable ubd_estimator_table(const Partition& part, double epsilon,
                                   const std::vector<double>& t, double alpha);
// Uses the mechanism's mixture; throws DomainError for non-uBD mechanisms.
EstimatorTable ubd_estimator_table(const Mechanism& m, double alpha);

class SufficientStats {
 public:
  SufficientStats(int w, int v);

  int w() const { return w_; }
  int v() const { return v_; }
  std::int64_t n() const { return n_; }
  std::int64_t size_count(int k) const { return size_[k - 1]; }
  std::int64_t member_count(int k, int x) const {
    return member_[static_cast<std::size_t>(k - 1) * v_ + x];
  }
  std::int64_t invertible_count(int x) const { return invertible_[x - v_]; }

  void add(const OutputSymbol& y);
  void merge(const SufficientStats& other);

  // Throws DomainError unless the count identities hold.
  void validate() const;

  // "section,k,x,count" rows for debugging.
  std::string to_csv() const;

 private:
  int w_;
  int v_;
  std::int64_t n_ = 0;
  std::vector<std::int64_t> size_;
  std::vector<std::int64_t> member_;
  std::vector<std::int64_t> invertible_;
};

// Mean of the per-output estimates over the sample summarized by `stats`.
std::vector<double> estimate_from_stats(const EstimatorTable& table,
                                        const SufficientStats& stats);

}  // namespace uldp

#endif  // ULDP_ESTIMATION_H_
