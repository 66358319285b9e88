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

#include "uldp/core.h"

#include <cmath>
#include <numeric>
#include <string>

#include "uldp/errors.h"

namespace uldp {

Partition::Partition(int w, int v) : w_(w), v_(v) {
  if (v < 1 || v >= w) {
    throw DomainError("v < w required: partition needs 1 <= v < w (got w=" +
                      std::to_string(w) + ", v=" + std::to_string(v) + ")");
  }
}

Distribution::Distribution(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) throw DomainError("distribution must be nonempty");
  double total = 0.0;
  for (double value : p_) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw DomainError("distribution entries must be finite and >= 0");
    }
    total += value;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    throw DomainError(
        "distribution does not sum to 1 (sum=" + std::to_string(total) + ")");
  }
  for (double& value : p_) value /= total;
}

double Distribution::mass(int begin, int end) const {
  return std::accumulate(p_.begin() + begin, p_.begin() + end, 0.0);
}

double Distribution::sum_of_squares() const {
  return std::inner_product(p_.begin(), p_.end(), p_.begin(), 0.0);
}

bool Distribution::strictly_positive() const {
  for (double value : p_) {
    if (value <= 0.0) return false;
  }
  return true;
}

int DirectionBasis::block_offset(int block) const {
  int offset = 0;
  for (int b = 0; b < block; ++b) offset += dims[b];
  return offset;
}

Distribution p_alpha(const Partition& part, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha must lie in [0, 1]");
  }
  const int w = part.w();
  const int v = part.v();
  std::vector<double> p(w);
  for (int x = 0; x < w; ++x) {
    p[x] = part.is_sensitive(x) ? alpha / v : (1.0 - alpha) / (w - v);
  }
  return Distribution(std::move(p));
}

std::vector<double> project_subspace(const Partition& part,
                                     std::span<const double> h, int i) {
  const int w = part.w();
  const int v = part.v();
  if (static_cast<int>(h.size()) != w) {
    throw DomainError("projection input has wrong length");
  }
  std::vector<double> out(w, 0.0);
  switch (i) {
    case 1: {
      const double mean = std::accumulate(h.begin(), h.begin() + v, 0.0) / v;
      for (int x = 0; x < v; ++x) out[x] = h[x] - mean;
      break;
    }
    case 2: {
      const double mean =
          std::accumulate(h.begin() + v, h.end(), 0.0) / (w - v);
      for (int x = v; x < w; ++x) out[x] = h[x] - mean;
      break;
    }
    case 3: {
      // Generator u = ((w-v) 1_v, -v 1_{w-v}) with |u|^2 = v w (w-v).
      const double sens = std::accumulate(h.begin(), h.begin() + v, 0.0);
      const double non = std::accumulate(h.begin() + v, h.end(), 0.0);
      const double coef =
          ((w - v) * sens - v * non) / (static_cast<double>(v) * w * (w - v));
      for (int x = 0; x < w; ++x) {
        out[x] = coef * (part.is_sensitive(x) ? (w - v) : -v);
      }
      break;
    }
    default:
      throw DomainError("subspace index must be 1, 2 or 3");
  }
  return out;
}

namespace {

// Helmert contrasts on coordinates [begin, begin+size); writes size-1 columns
// starting at column `col`.
void fill_helmert(Eigen::MatrixXd& basis, int begin, int size, int col) {
  for (int j = 1; j < size; ++j) {
    const double norm = std::sqrt(static_cast<double>(j) * (j + 1));
    for (int x = 0; x < j; ++x) basis(begin + x, col) = 1.0 / norm;
    basis(begin + j, col) = -static_cast<double>(j) / norm;
    ++col;
  }
}

}  // namespace

DirectionBasis direction_basis(const Partition& part) {
  const int w = part.w();
  const int v = part.v();
  DirectionBasis basis;
  basis.w = w;
  basis.v = v;
  basis.dims = part.block_dims();
  basis.vectors = Eigen::MatrixXd::Zero(w, w - 1);
  fill_helmert(basis.vectors, 0, v, 0);
  fill_helmert(basis.vectors, v, w - v, v - 1);
  const double norm = std::sqrt(static_cast<double>(v) * w * (w - v));
  for (int x = 0; x < w; ++x) {
    basis.vectors(x, w - 2) = (x < v ? (w - v) : -v) / norm;
  }
  return basis;
}

}  // namespace uldp
