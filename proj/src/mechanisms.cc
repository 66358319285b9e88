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

#include "uldp/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "uldp/errors.h"

namespace uldp {
namespace {

constexpr double kGammaFeasibilityTolerance = 1e-10;
constexpr double kRowSumTolerance = 1e-12;
constexpr double kRatioSlack = 1e-9;
constexpr double kPositiveThreshold = 1e-15;

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw DomainError("epsilon must be positive and finite");
  }
}

// Index of the sample in a cumulative table, skipping zero-width cells.
int search_cdf(const std::vector<double>& cdf, double u) {
  const double target = u * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  if (it == cdf.end()) --it;
  int index = static_cast<int>(it - cdf.begin());
  while (index > 0 && cdf[index] == cdf[index - 1]) --index;
  return index;
}

// Uniform size-k subset of {0..v-1} \ {skip} (skip = -1 for none), written
// into out[offset..offset+k). Floyd's algorithm over the reduced pool.
void sample_subset(int v, int k, int skip, CounterRng& rng,
                   std::vector<int>& out, size_t offset) {
  const int pool = skip >= 0 ? v - 1 : v;
  for (int j = pool - k; j < pool; ++j) {
    int pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(j) + 1));
    for (size_t i = offset; i < out.size(); ++i) {
      if (out[i] == pick) {
        pick = j;
        break;
      }
    }
    out.push_back(pick);
  }
  if (skip >= 0) {
    for (size_t i = offset; i < out.size(); ++i) {
      if (out[i] >= skip) ++out[i];
    }
  }
}

void check_row_sums(const Eigen::MatrixXd& matrix) {
  for (Eigen::Index x = 0; x < matrix.rows(); ++x) {
    const double sum = matrix.row(x).sum();
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw std::logic_error("constructed mechanism row " + std::to_string(x) +
                             " sums to " + std::to_string(sum));
    }
  }
}

}  // namespace

bool operator<(const OutputSymbol& a, const OutputSymbol& b) {
  if (a.kind != b.kind) return a.kind == OutputKind::kProtected;
  if (a.subset.size() != b.subset.size()) {
    return a.subset.size() < b.subset.size();
  }
  return a.subset < b.subset;
}

std::string to_string(const OutputSymbol& y) {
  std::ostringstream out;
  out << (y.kind == OutputKind::kProtected ? "P" : "I") << "{";
  for (size_t i = 0; i < y.subset.size(); ++i) {
    if (i > 0) out << ",";
    out << y.subset[i] + 1;
  }
  out << "}";
  return out.str();
}

Mechanism Mechanism::from_matrix(int w, int v, double epsilon,
                                 std::vector<OutputSymbol> outputs,
                                 Eigen::MatrixXd matrix) {
  if (v < 1 || v > w) throw DomainError("mechanism requires 1 <= v <= w");
  check_epsilon(epsilon);
  if (matrix.rows() != w ||
      matrix.cols() != static_cast<Eigen::Index>(outputs.size())) {
    throw DomainError("mechanism matrix shape does not match (w, outputs)");
  }
  for (const OutputSymbol& y : outputs) {
    if (y.subset.empty()) throw DomainError("output symbol with empty subset");
    if (y.kind == OutputKind::kProtected) {
      if (y.subset.front() < 0 || y.subset.back() >= v ||
          !std::is_sorted(y.subset.begin(), y.subset.end())) {
        throw DomainError("protected output " + to_string(y) +
                          " is not a sorted subset of the sensitive set");
      }
    } else if (y.subset.size() != 1 || y.subset[0] < v || y.subset[0] >= w) {
      throw DomainError("invertible output " + to_string(y) +
                        " is not a non-sensitive singleton");
    }
  }
  if (!matrix.allFinite() || (matrix.array() < 0.0).any()) {
    throw DomainError("mechanism entries must be finite and nonnegative");
  }
  Mechanism m;
  m.w_ = w;
  m.v_ = v;
  m.epsilon_ = epsilon;
  m.backend_ = Backend::kDense;
  m.outputs_ = std::move(outputs);
  m.matrix_ = std::move(matrix);
  for (int j = 0; j < static_cast<int>(m.outputs_.size()); ++j) {
    m.index_.emplace(m.outputs_[j], j);
  }
  m.build_row_cdfs();
  return m;
}

const std::vector<OutputSymbol>& Mechanism::outputs() const {
  if (backend_ != Backend::kDense) {
    throw UnsupportedBackendError("streaming mechanism has no output list");
  }
  return outputs_;
}

const Eigen::MatrixXd& Mechanism::matrix() const {
  if (backend_ != Backend::kDense) {
    throw UnsupportedBackendError("streaming mechanism has no dense matrix");
  }
  return matrix_;
}

int Mechanism::find_output(const OutputSymbol& y) const {
  auto it = index_.find(y);
  return it == index_.end() ? -1 : it->second;
}

void Mechanism::build_row_cdfs() {
  row_cdf_.assign(w_, std::vector<double>(matrix_.cols()));
  for (int x = 0; x < w_; ++x) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < matrix_.cols(); ++j) {
      acc += matrix_(x, j);
      row_cdf_[x][j] = acc;
    }
  }
}

Mechanism bd_mechanism(const BlockDesign& design, double epsilon) {
  check_epsilon(epsilon);
  const int v = design.v();
  const double e = std::exp(epsilon);
  const double r = static_cast<double>(design.r());
  const double b = static_cast<double>(design.b());
  const double denom = r * e + b - r;
  const auto& edges = design.edges();

  Mechanism m;
  m.w_ = v;
  m.v_ = v;
  m.epsilon_ = epsilon;
  m.matrix_ = Eigen::MatrixXd::Constant(v, edges.size(), 1.0 / denom);
  for (size_t j = 0; j < edges.size(); ++j) {
    m.outputs_.push_back({OutputKind::kProtected, edges[j]});
    for (int x : edges[j]) m.matrix_(x, j) = e / denom;
  }
  check_row_sums(m.matrix_);
  for (int j = 0; j < static_cast<int>(m.outputs_.size()); ++j) {
    m.index_.emplace(m.outputs_[j], j);
  }
  m.build_row_cdfs();
  return m;
}

std::pair<double, int> gamma_feasibility_residual(int v, double epsilon,
                                                  const GammaWeights& gamma) {
  const double boost = std::expm1(epsilon);
  std::vector<double> sums(v, 0.0);
  double total = 0.0;
  for (const GammaEntry& entry : gamma) {
    total += entry.gamma;
    for (int x : entry.subset) sums[x] += boost * entry.gamma;
  }
  double worst = -1.0;
  int worst_x = -1;
  for (int x = 0; x < v; ++x) {
    const double residual = std::abs(total + sums[x] - 1.0);
    if (residual > worst) {
      worst = residual;
      worst_x = x;
    }
  }
  return {worst, worst_x};
}

// Shared builder for extremal mechanisms; `mixture` is recorded for uBD.
Mechanism build_extremal(const Partition& part, double epsilon,
                         GammaWeights gamma,
                         std::optional<std::vector<double>> mixture) {
  check_epsilon(epsilon);
  const int w = part.w();
  const int v = part.v();

  // Canonicalize subsets, merge duplicates, drop zero weights.
  std::map<OutputSymbol, double> merged;
  for (GammaEntry& entry : gamma) {
    std::sort(entry.subset.begin(), entry.subset.end());
    if (entry.subset.empty() || entry.subset.front() < 0 ||
        entry.subset.back() >= v ||
        std::adjacent_find(entry.subset.begin(), entry.subset.end()) !=
            entry.subset.end()) {
      throw DomainError("gamma support must be nonempty subsets of [v]");
    }
    if (!(entry.gamma >= 0.0) || !std::isfinite(entry.gamma)) {
      throw DomainError("gamma weights must be finite and nonnegative");
    }
    if (entry.gamma > 0.0) {
      merged[{OutputKind::kProtected, entry.subset}] += entry.gamma;
    }
  }

  GammaWeights canonical;
  for (const auto& [symbol, weight] : merged) {
    canonical.push_back({symbol.subset, weight});
  }
  const auto [residual, worst_x] =
      gamma_feasibility_residual(v, epsilon, canonical);
  if (residual > kGammaFeasibilityTolerance) {
    throw FeasibilityError("gamma violates the row-sum condition at input " +
                               std::to_string(worst_x + 1) + " (residual " +
                               std::to_string(residual) + ")",
                           worst_x, residual);
  }

  const long long columns = static_cast<long long>(canonical.size()) + (w - v);
  if (columns * w > kMaxDenseEntries) {
    throw DomainError("dense mechanism would exceed " +
                      std::to_string(kMaxDenseEntries) + " entries");
  }

  const double e = std::exp(epsilon);
  double gamma_total = 0.0;
  for (const GammaEntry& entry : canonical) gamma_total += entry.gamma;
  const double invertible = std::max(0.0, 1.0 - gamma_total);

  Mechanism m;
  m.w_ = w;
  m.v_ = v;
  m.epsilon_ = epsilon;
  m.matrix_ = Eigen::MatrixXd::Zero(w, columns);
  std::vector<double> per_output(columns, 0.0);
  for (size_t j = 0; j < canonical.size(); ++j) {
    const GammaEntry& entry = canonical[j];
    m.outputs_.push_back({OutputKind::kProtected, entry.subset});
    per_output[j] = entry.gamma;
    m.matrix_.col(j).setConstant(entry.gamma);
    for (int x : entry.subset) m.matrix_(x, j) = entry.gamma * e;
  }
  for (int x = v; x < w; ++x) {
    const int j = static_cast<int>(canonical.size()) + (x - v);
    m.outputs_.push_back({OutputKind::kInvertible, {x}});
    m.matrix_(x, j) = invertible;
  }
  check_row_sums(m.matrix_);
  for (int j = 0; j < static_cast<int>(m.outputs_.size()); ++j) {
    m.index_.emplace(m.outputs_[j], j);
  }
  m.gamma_ = std::move(per_output);
  m.mixture_ = std::move(mixture);
  m.invertible_mass_ = invertible;
  m.build_row_cdfs();
  return m;
}

Mechanism extremal_from_gamma(const Partition& part, double epsilon,
                              const GammaWeights& gamma) {
  return build_extremal(part, epsilon, gamma, std::nullopt);
}

Mechanism ubd_mechanism(const Partition& part, double epsilon,
                        const std::vector<double>& t,
                        const std::map<int, BlockDesign>* designs,
                        Backend backend) {
  check_epsilon(epsilon);
  const int v = part.v();
  if (static_cast<int>(t.size()) != v) {
    throw DomainError("mixture t must have v entries");
  }
  // Reuse the simplex validation of Distribution.
  const std::vector<double> mix = Distribution(t).vec();
  const double boost = std::expm1(epsilon);

  if (backend == Backend::kStreaming) {
    if (designs != nullptr && !designs->empty()) {
      throw DomainError("streaming backend supports complete designs only");
    }
    Mechanism m;
    m.w_ = part.w();
    m.v_ = v;
    m.epsilon_ = epsilon;
    m.backend_ = Backend::kStreaming;
    m.mixture_ = mix;
    m.sensitive_k_cdf_.resize(v);
    m.nonsensitive_k_cdf_.resize(v);
    double acc_s = 0.0;
    double acc_n = 0.0;
    for (int k = 1; k <= v; ++k) {
      acc_s += mix[k - 1];
      // Protected probability of size-k outputs for a non-sensitive input.
      acc_n += mix[k - 1] * v / (k * boost + v);
      m.sensitive_k_cdf_[k - 1] = acc_s;
      m.nonsensitive_k_cdf_[k - 1] = acc_n;
    }
    m.nonsensitive_protected_prob_ = acc_n;
    m.invertible_mass_ = std::max(0.0, 1.0 - acc_n);
    return m;
  }

  GammaWeights gamma;
  for (int k = 1; k <= v; ++k) {
    const double weight = mix[k - 1];
    if (weight <= 0.0) continue;
    std::optional<BlockDesign> fallback;
    const BlockDesign* design = nullptr;
    if (designs != nullptr) {
      auto it = designs->find(k);
      if (it != designs->end()) design = &it->second;
    }
    if (design == nullptr) {
      fallback.emplace(complete_design(v, k));
      design = &*fallback;
    }
    if (design->v() != v || design->k() != k) {
      throw DomainError("design supplied for k=" + std::to_string(k) +
                        " has mismatched (v, k)");
    }
    const double denom = static_cast<double>(design->r()) * boost +
                         static_cast<double>(design->b());
    for (const Edge& edge : design->edges()) {
      gamma.push_back({edge, weight / denom});
    }
  }
  return build_extremal(part, epsilon, std::move(gamma), mix);
}

UldpReport validate_uldp(const Mechanism& m) {
  const Eigen::MatrixXd& q = m.matrix();
  const auto& outputs = m.outputs();
  const double bound = std::exp(m.epsilon()) * (1.0 + kRatioSlack);
  UldpReport report;

  if (!q.allFinite() || (q.array() < 0.0).any()) {
    report.message = "matrix has negative or non-finite entries";
    return report;
  }

  for (int j = 0; j < static_cast<int>(outputs.size()); ++j) {
    const auto column = q.col(j);
    if (outputs[j].kind == OutputKind::kProtected) {
      Eigen::Index hi, lo;
      const double max_value = column.maxCoeff(&hi);
      const double min_value = column.minCoeff(&lo);
      if (max_value > bound * min_value) {
        report.x = static_cast<int>(hi);
        report.x2 = static_cast<int>(lo);
        report.y = j;
        std::ostringstream msg;
        msg << "protected output " << to_string(outputs[j]) << ": Q(y|"
            << hi + 1 << ")=" << max_value << " exceeds e^eps * Q(y|" << lo + 1
            << ")=" << bound * min_value / (1.0 + kRatioSlack);
        report.message = msg.str();
        return report;
      }
    } else {
      std::vector<int> sources;
      for (int x = 0; x < m.w(); ++x) {
        if (column(x) > kPositiveThreshold) sources.push_back(x);
      }
      const int label = outputs[j].subset[0];
      if (sources.size() != 1 || sources[0] != label) {
        report.y = j;
        for (int x : sources) {
          if (x != label) report.x = x;
        }
        report.message = "invertible output " + to_string(outputs[j]) +
                         (sources.empty() ? std::string(" is never emitted")
                                          : " is reachable from input " +
                                                std::to_string(report.x + 1));
        return report;
      }
    }
  }

  for (int x = 0; x < m.w(); ++x) {
    const double sum = q.row(x).sum();
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      report.x = x;
      report.message =
          "row " + std::to_string(x + 1) + " sums to " + std::to_string(sum);
      return report;
    }
  }
  report.ok = true;
  report.message = "ok";
  return report;
}

void sample_into(const Mechanism& m, int x, CounterRng& rng,
                 OutputSymbol& out) {
  if (x < 0 || x >= m.w()) throw DomainError("input symbol out of range");
  out.subset.clear();
  if (m.backend_ == Backend::kDense) {
    const int j = search_cdf(m.row_cdf_[x], rng.uniform());
    out.kind = m.outputs_[j].kind;
    out.subset = m.outputs_[j].subset;
    return;
  }

  const int v = m.v_;
  const double boost = std::expm1(m.epsilon_);
  if (x < v) {
    const int k = search_cdf(m.sensitive_k_cdf_, rng.uniform()) + 1;
    // Mass of the size-k edges through x: r_k e / (r_k e + b_k - r_k).
    const double through = k * (boost + 1.0) / (k * boost + v);
    out.kind = OutputKind::kProtected;
    if (rng.uniform() < through) {
      out.subset.push_back(x);
      sample_subset(v, k - 1, x, rng, out.subset, 1);
    } else {
      sample_subset(v, k, x, rng, out.subset, 0);
    }
  } else {
    if (rng.uniform() >= m.nonsensitive_protected_prob_) {
      out.kind = OutputKind::kInvertible;
      out.subset.push_back(x);
      return;
    }
    const int k = search_cdf(m.nonsensitive_k_cdf_, rng.uniform()) + 1;
    out.kind = OutputKind::kProtected;
    sample_subset(v, k, -1, rng, out.subset, 0);
  }
  std::sort(out.subset.begin(), out.subset.end());
}

OutputSymbol sample_output(const Mechanism& m, int x, CounterRng& rng) {
  OutputSymbol out;
  sample_into(m, x, rng, out);
  return out;
}

nlohmann::json mechanism_to_json(const Mechanism& m) {
  const auto& outputs = m.outputs();
  const Eigen::MatrixXd& q = m.matrix();
  nlohmann::json symbols = nlohmann::json::array();
  for (const OutputSymbol& y : outputs) {
    nlohmann::json subset = nlohmann::json::array();
    for (int s : y.subset) subset.push_back(s + 1);
    symbols.push_back(
        {{"kind",
          y.kind == OutputKind::kProtected ? "protected" : "invertible"},
         {"subset", std::move(subset)}});
  }
  nlohmann::json rows = nlohmann::json::array();
  for (int x = 0; x < m.w(); ++x) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < q.cols(); ++j) row.push_back(q(x, j));
    rows.push_back(std::move(row));
  }
  return {{"w", m.w()},
          {"v", m.v()},
          {"epsilon", m.epsilon()},
          {"outputs", std::move(symbols)},
          {"rows", std::move(rows)}};
}

Mechanism mechanism_from_json(const nlohmann::json& j) {
  for (const char* key : {"w", "v", "epsilon", "outputs", "rows"}) {
    if (!j.contains(key)) {
      throw DomainError(std::string("mechanism JSON is missing \"") + key +
                        "\"");
    }
  }
  const int w = j.at("w").get<int>();
  const int v = j.at("v").get<int>();
  const double epsilon = j.at("epsilon").get<double>();
  std::vector<OutputSymbol> outputs;
  for (const auto& raw : j.at("outputs")) {
    OutputSymbol y;
    const std::string kind = raw.at("kind").get<std::string>();
    if (kind == "protected") {
      y.kind = OutputKind::kProtected;
    } else if (kind == "invertible") {
      y.kind = OutputKind::kInvertible;
    } else {
      throw DomainError("unknown output kind \"" + kind + "\"");
    }
    for (const auto& s : raw.at("subset")) y.subset.push_back(s.get<int>() - 1);
    std::sort(y.subset.begin(), y.subset.end());
    outputs.push_back(std::move(y));
  }
  const auto& rows = j.at("rows");
  if (!rows.is_array() || static_cast<int>(rows.size()) != w) {
    throw DomainError("mechanism JSON must have w rows");
  }
  Eigen::MatrixXd matrix(w, outputs.size());
  for (int x = 0; x < w; ++x) {
    const auto& row = rows.at(x);
    if (row.size() != outputs.size()) {
      throw DomainError("row " + std::to_string(x + 1) +
                        " length differs from the output count");
    }
    for (size_t c = 0; c < outputs.size(); ++c) {
      matrix(x, c) = row.at(c).get<double>();
    }
  }
  return Mechanism::from_matrix(w, v, epsilon, std::move(outputs),
                                std::move(matrix));
}

}  // namespace uldp
