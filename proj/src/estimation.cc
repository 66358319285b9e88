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

#include "uldp/estimation.h"

#include <cmath>
#include <sstream>

#include "uldp/errors.h"
#include "uldp/put.h"

namespace uldp {
namespace {

const Eigen::MatrixXd& dense_matrix(const Mechanism& m, const char* what) {
  if (m.backend() != Backend::kDense) {
    throw UnsupportedBackendError(std::string(what) +
                                  " requires the dense backend");
  }
  return m.matrix();
}

// Q_P(y) for every output column.
Eigen::VectorXd output_marginal(const Eigen::MatrixXd& q,
                                const Distribution& p) {
  const Eigen::Map<const Eigen::VectorXd> pv(p.vec().data(), p.w());
  return q.transpose() * pv;
}

void check_distribution(const Mechanism& m, const Distribution& p) {
  if (p.w() != m.w()) throw DomainError("distribution length must equal w");
  if (!p.strictly_positive()) {
    throw DomainError("distribution must be strictly positive");
  }
}

}  // namespace

std::vector<double> score_vector(const Mechanism& m, const Distribution& p,
                                 const OutputSymbol& y) {
  const Eigen::MatrixXd& q = dense_matrix(m, "score_vector");
  check_distribution(m, p);
  const int col = m.find_output(y);
  if (col < 0) throw DomainError("output " + to_string(y) + " not in alphabet");
  double marginal = 0.0;
  for (int x = 0; x < m.w(); ++x) marginal += p[x] * q(x, col);
  if (!(marginal > 0.0)) {
    throw UndefinedScoreError("output " + to_string(y) +
                              " has zero marginal probability");
  }
  std::vector<double> eta(m.w());
  for (int x = 0; x < m.w(); ++x) eta[x] = q(x, col) / marginal;
  return eta;
}

FisherMatrix fisher_information(const Mechanism& m, const Distribution& p,
                                const DirectionBasis& basis) {
  const Eigen::MatrixXd& q = dense_matrix(m, "fisher_information");
  check_distribution(m, p);
  if (basis.w != m.w() || basis.vectors.rows() != m.w()) {
    throw DomainError("direction basis does not match the mechanism");
  }
  const Eigen::VectorXd marginal = output_marginal(q, p);
  Eigen::MatrixXd g = basis.vectors.transpose() * q;
  for (Eigen::Index col = 0; col < g.cols(); ++col) {
    g.col(col) *= marginal(col) > 0.0 ? 1.0 / std::sqrt(marginal(col)) : 0.0;
  }
  FisherMatrix out;
  out.basis = basis;
  out.j = g * g.transpose();
  out.j = 0.5 * (out.j + out.j.transpose()).eval();
  return out;
}

std::vector<double> size_distribution(const Mechanism& m) {
  if (m.backend() == Backend::kStreaming) return *m.mixture();
  const Eigen::MatrixXd& q = m.matrix();
  const int v = m.v();
  std::vector<double> t(v, 0.0);
  const auto& outputs = m.outputs();
  for (std::size_t col = 0; col < outputs.size(); ++col) {
    if (outputs[col].kind != OutputKind::kProtected) continue;
    const int k = static_cast<int>(outputs[col].subset.size());
    t[k - 1] += q.col(col).head(v).sum() / v;
  }
  return t;
}

std::array<double, 3> block_trace_check(const Mechanism& m, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("block trace check requires alpha in (0, 1)");
  }
  const Partition part(m.w(), m.v());
  const DirectionBasis basis = direction_basis(part);
  const FisherMatrix fisher =
      fisher_information(m, p_alpha(part, alpha), basis);
  const ObjectiveValue terms =
      objective(m.w(), m.v(), m.epsilon(), alpha, size_distribution(m));
  const std::array<double, 3> per_term{terms.m1, terms.m2, terms.m3};
  std::array<double, 3> residual{};
  for (int i = 0; i < 3; ++i) {
    const int d = basis.dims[i];
    if (d == 0) continue;
    const int off = basis.block_offset(i);
    const double trace = fisher.j.block(off, off, d, d).trace();
    const double expected = double(d) * d / per_term[i];
    residual[i] = std::abs(trace - expected);
  }
  return residual;
}

std::vector<double> EstimatorTable::estimate(const OutputSymbol& y) const {
  std::vector<double> out(w);
  if (y.kind == OutputKind::kProtected) {
    const int k = static_cast<int>(y.subset.size());
    if (k < 1 || k > v) throw DomainError("protected output size out of range");
    for (int x = 0; x < v; ++x) out[x] = non_member[k - 1];
    for (int x : y.subset) out[x] = member[k - 1];
    for (int x = v; x < w; ++x) out[x] = non_sensitive[k - 1];
  } else {
    const int label = y.subset.at(0);
    if (label < v || label >= w) {
      throw DomainError("invertible output must be a non-sensitive symbol");
    }
    for (int x = 0; x < v; ++x) out[x] = invertible_sensitive;
    for (int x = v; x < w; ++x) out[x] = invertible_other;
    out[label] = invertible_self;
  }
  return out;
}

EstimatorTable ubd_estimator_table(const Partition& part, double epsilon,
                                   const std::vector<double>& t, double alpha) {
  const int w = part.w();
  const int v = part.v();
  // Validates epsilon, alpha and t.
  const ObjectiveValue value = objective(w, v, epsilon, alpha, t);
  if (!value.finite()) {
    throw EstimatorDegenerateError(
        "uBD estimator is undefined for the all-sensitive mixture delta^(v)");
  }
  const double d = std::expm1(epsilon);
  double a1 = 0.0, a2 = 0.0, a3 = 0.0;
  for (int k = 1; k <= v; ++k) {
    const double s = alpha * k * d + v;
    const double m = k * d + v;
    a1 += t[k - 1] * k * (v - k) / (s * m);
    a2 += t[k - 1] * k / m;
    a3 += t[k - 1] * k / s;
  }
  const double n = w - v;

  EstimatorTable table;
  table.w = w;
  table.v = v;
  table.epsilon = epsilon;
  table.alpha = alpha;
  table.t = t;
  table.member.resize(v);
  table.non_member.resize(v);
  table.non_sensitive.resize(v);
  for (int k = 1; k <= v; ++k) {
    const double s = alpha * k * d + v;
    const double h3 = (1.0 - alpha) * k / (v * a3 * s);
    double in = 0.0, out = 0.0;
    if (v > 1) {
      const double h1 = (v - 1) / (v * d * a1 * s);
      in = h1 * (v - k);
      out = -h1 * k;
    }
    table.member[k - 1] = alpha / v + in + h3;
    table.non_member[k - 1] = alpha / v + out + h3;
    table.non_sensitive[k - 1] =
        (1.0 - alpha) / n - (1.0 - alpha) * k / (n * a3 * s);
  }
  table.invertible_sensitive = alpha / v - 1.0 / (v * d * a3);
  const double base = (1.0 - alpha) / n + 1.0 / (n * d * a3);
  table.invertible_self = base + (n - 1.0) / (n * d * a2);
  table.invertible_other = base - 1.0 / (n * d * a2);
  return table;
}

EstimatorTable ubd_estimator_table(const Mechanism& m, double alpha) {
  if (!m.mixture()) {
    throw DomainError("estimator table requires a uBD mechanism");
  }
  return ubd_estimator_table(Partition(m.w(), m.v()), m.epsilon(), *m.mixture(),
                             alpha);
}

SufficientStats::SufficientStats(int w, int v)
    : w_(w),
      v_(v),
      size_(v, 0),
      member_(static_cast<std::size_t>(v) * v, 0),
      invertible_(w - v, 0) {
  Partition part(w, v);
}

void SufficientStats::add(const OutputSymbol& y) {
  if (y.kind == OutputKind::kProtected) {
    const int k = static_cast<int>(y.subset.size());
    if (k < 1 || k > v_)
      throw DomainError("protected output size out of range");
    for (int x : y.subset) {
      if (x < 0 || x >= v_) {
        throw DomainError("protected output contains a non-sensitive symbol");
      }
    }
    ++size_[k - 1];
    std::int64_t* row = &member_[static_cast<std::size_t>(k - 1) * v_];
    for (int x : y.subset) ++row[x];
  } else {
    if (y.subset.size() != 1 || y.subset[0] < v_ || y.subset[0] >= w_) {
      throw DomainError("invertible output must be a non-sensitive symbol");
    }
    ++invertible_[y.subset[0] - v_];
  }
  ++n_;
}

void SufficientStats::merge(const SufficientStats& other) {
  if (other.w_ != w_ || other.v_ != v_) {
    throw DomainError("cannot merge statistics over different alphabets");
  }
  n_ += other.n_;
  for (std::size_t i = 0; i < size_.size(); ++i) size_[i] += other.size_[i];
  for (std::size_t i = 0; i < member_.size(); ++i) {
    member_[i] += other.member_[i];
  }
  for (std::size_t i = 0; i < invertible_.size(); ++i) {
    invertible_[i] += other.invertible_[i];
  }
}

void SufficientStats::validate() const {
  std::int64_t total = 0;
  for (int k = 1; k <= v_; ++k) {
    if (size_[k - 1] < 0) throw DomainError("negative size count");
    std::int64_t members = 0;
    for (int x = 0; x < v_; ++x) {
      const std::int64_t c = member_count(k, x);
      if (c < 0 || c > size_[k - 1]) {
        throw DomainError("membership count out of range");
      }
      members += c;
    }
    if (members != static_cast<std::int64_t>(k) * size_[k - 1]) {
      throw DomainError("membership counts do not sum to k * c_k at k=" +
                        std::to_string(k));
    }
    total += size_[k - 1];
  }
  for (std::int64_t c : invertible_) {
    if (c < 0) throw DomainError("negative invertible count");
    total += c;
  }
  if (total != n_) throw DomainError("counts do not sum to n");
}

std::string SufficientStats::to_csv() const {
  std::ostringstream out;
  out << "section,k,x,count\n";
  for (int k = 1; k <= v_; ++k)
    out << "size," << k << ",," << size_[k - 1] << "\n";
  for (int k = 1; k <= v_; ++k) {
    for (int x = 0; x < v_; ++x) {
      out << "member," << k << "," << x + 1 << "," << member_count(k, x)
          << "\n";
    }
  }
  for (int x = v_; x < w_; ++x) {
    out << "invertible,," << x + 1 << "," << invertible_count(x) << "\n";
  }
  return out.str();
}

std::vector<double> estimate_from_stats(const EstimatorTable& table,
                                        const SufficientStats& stats) {
  if (stats.w() != table.w || stats.v() != table.v) {
    throw DomainError("statistics and estimator table disagree on (w, v)");
  }
  stats.validate();
  if (stats.n() == 0) throw DomainError("cannot estimate from an empty sample");
  const int w = table.w;
  const int v = table.v;
  std::int64_t invertible_total = 0;
  for (int x = v; x < w; ++x) invertible_total += stats.invertible_count(x);

  std::vector<double> out(w, 0.0);
  double protected_non_sensitive = 0.0;
  for (int k = 1; k <= v; ++k) {
    const double ck = static_cast<double>(stats.size_count(k));
    if (ck == 0.0) continue;
    protected_non_sensitive += ck * table.non_sensitive[k - 1];
    for (int x = 0; x < v; ++x) {
      const double ckx = static_cast<double>(stats.member_count(k, x));
      out[x] +=
          ckx * table.member[k - 1] + (ck - ckx) * table.non_member[k - 1];
    }
  }
  const double inv = static_cast<double>(invertible_total);
  for (int x = 0; x < v; ++x) out[x] += inv * table.invertible_sensitive;
  for (int x = v; x < w; ++x) {
    const double mx = static_cast<double>(stats.invertible_count(x));
    out[x] = protected_non_sensitive + mx * table.invertible_self +
             (inv - mx) * table.invertible_other;
  }
  const double n = static_cast<double>(stats.n());
  for (double& value : out) value /= n;
  return out;
}

}  // namespace uldp
