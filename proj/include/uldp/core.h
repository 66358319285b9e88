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

// Simplex arithmetic on the input alphabet [w] with sensitive set [v].
//
// Symbols are 0-based inside the library: sensitive symbols are 0..v-1 and
// non-sensitive symbols are v..w-1. File formats and the CLI use 1-based
// labels.

#ifndef ULDP_CORE_H_
#define ULDP_CORE_H_

#include <Eigen/Dense>
#include <array>
#include <span>
#include <vector>

namespace uldp {

inline constexpr double kSimplexTolerance = 1e-12;

// Alphabet [w] split into sensitive [v] and non-sensitive [v+1..w].
class Partition {
 public:
  // Throws DomainError unless 1 <= v < w.
  Partition(int w, int v);

  int w() const { return w_; }
  int v() const { return v_; }
  int non_sensitive() const { return w_ - v_; }
  bool is_sensitive(int x) const { return x < v_; }

  // Subspace dimensions (v-1, w-v-1, 1).
  std::array<int, 3> block_dims() const { return {v_ - 1, w_ - v_ - 1, 1}; }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  int w_;
  int v_;
};

// Probability vector on [w].
class Distribution {
 public:
  // Validates nonnegativity and |sum - 1| <= kSimplexTolerance, then
  // renormalizes. Throws DomainError otherwise.
  explicit Distribution(std::vector<double> p);

  int w() const { return static_cast<int>(p_.size()); }
  double operator[](int x) const { return p_[x]; }
  std::span<const double> values() const { return p_; }
  const std::vector<double>& vec() const { return p_; }

  double mass(int begin, int end) const;
  double sum_of_squares() const;
  bool strictly_positive() const;

 private:
  std::vector<double> p_;
};

// Orthonormal basis of the zero-sum direction space, grouped by subspace.
struct DirectionBasis {
  int w = 0;
  int v = 0;
  // w x (w-1); columns [0, d1) span H1, [d1, d1+d2) span H2, last spans H3.
  Eigen::MatrixXd vectors;
  std::array<int, 3> dims{};

  // Offset of the first column of block i (0-based block index).
  int block_offset(int block) const;
};

// Mixture of uniform-on-sensitive (weight alpha) and uniform-on-non-sensitive.
Distribution p_alpha(const Partition& part, double alpha);

// Orthogonal projection onto H_i, i in {1, 2, 3}.
std::vector<double> project_subspace(const Partition& part,
                                     std::span<const double> h, int i);

// Helmert contrasts inside each block plus the normalized H3 generator.
DirectionBasis direction_basis(const Partition& part);

}  // namespace uldp

#endif  // ULDP_CORE_H_
