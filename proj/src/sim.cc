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

#include "uldp/sim.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "uldp/errors.h"
#include "uldp/parallel.h"
#include "uldp/put.h"
#include "uldp/rng.h"

namespace uldp {
namespace {

void check_compatible(const Mechanism& m, const EstimatorTable& table) {
  if (m.w() != table.w || m.v() != table.v || m.epsilon() != table.epsilon) {
    throw DomainError("mechanism and estimator table disagree on (w, v, eps)");
  }
  if (!m.mixture() || m.mixture()->size() != table.t.size()) {
    throw DomainError("estimator table needs a uBD mechanism of equal v");
  }
  for (std::size_t k = 0; k < table.t.size(); ++k) {
    if (std::abs((*m.mixture())[k] - table.t[k]) > 1e-12) {
      throw DomainError("mechanism and estimator table disagree on t");
    }
  }
}

double squared_norm(const std::vector<double>& a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return s;
}

}  // namespace

SimResult run_trials(const Mechanism& m, const EstimatorTable& table,
                     const Distribution& p, const SimConfig& cfg) {
  check_compatible(m, table);
  if (cfg.n < 1 || cfg.trials < 1) {
    throw DomainError("simulation requires n >= 1 and trials >= 1");
  }
  if (p.w() != m.w()) throw DomainError("distribution length must equal w");
  const int w = m.w();
  std::vector<double> cdf(w);
  double acc = 0.0;
  for (int x = 0; x < w; ++x) {
    acc += p[x];
    cdf[x] = acc;
  }
  cdf[w - 1] = 1.0;

  std::vector<double> scaled(cfg.trials);
  std::vector<std::vector<double>> estimates(cfg.trials);
  parallel_for(cfg.trials, cfg.workers, [&](int trial) {
    SufficientStats stats(w, m.v());
    OutputSymbol y;
    for (std::int64_t i = 0; i < cfg.n; ++i) {
      CounterRng rng(cfg.seed, static_cast<std::uint64_t>(trial),
                     static_cast<std::uint64_t>(i));
      const double u = rng.uniform();
      int x = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) -
                               cdf.begin());
      x = std::min(x, w - 1);
      while (p[x] == 0.0) --x;  // u landed on a zero-width bucket edge
      sample_into(m, x, rng, y);
      stats.add(y);
    }
    std::vector<double> est = estimate_from_stats(table, stats);
    double err = 0.0;
    for (int x = 0; x < w; ++x) err += (est[x] - p[x]) * (est[x] - p[x]);
    scaled[trial] = static_cast<double>(cfg.n) * err;
    estimates[trial] = std::move(est);
  });

  SimResult out;
  const double trials = cfg.trials;
  for (double s : scaled) out.mean_scaled_mse += s;
  out.mean_scaled_mse /= trials;
  out.mean_estimate.assign(w, 0.0);
  out.estimate_stderr.assign(w, 0.0);
  for (const auto& est : estimates) {
    for (int x = 0; x < w; ++x) out.mean_estimate[x] += est[x];
  }
  for (double& value : out.mean_estimate) value /= trials;
  if (cfg.trials > 1) {
    double ss = 0.0;
    for (double s : scaled) {
      ss += (s - out.mean_scaled_mse) * (s - out.mean_scaled_mse);
    }
    out.stderr_mse = std::sqrt(ss / (trials - 1.0) / trials);
    for (int x = 0; x < w; ++x) {
      double sx = 0.0;
      for (const auto& est : estimates) {
        const double d = est[x] - out.mean_estimate[x];
        sx += d * d;
      }
      out.estimate_stderr[x] = std::sqrt(sx / (trials - 1.0) / trials);
    }
  }
  out.theory = exact_scaled_mse(table, p);
  return out;
}

double exact_scaled_mse(const EstimatorTable& table, const Distribution& p) {
  const int w = table.w;
  const int v = table.v;
  if (p.w() != w) throw DomainError("distribution length must equal w");
  const double d = std::expm1(table.epsilon);
  const double ps = p.mass(0, v);
  const double pn = p.mass(v, w);
  double second_moment = 0.0;
  double protected_mass = 0.0;
  for (int k = 1; k <= v; ++k) {
    const double tk = table.t[k - 1];
    if (tk == 0.0) continue;
    const double from_non_sensitive = tk * v / (k * d + v);
    protected_mass += from_non_sensitive;
    const double norm =
        k * table.member[k - 1] * table.member[k - 1] +
        (v - k) * table.non_member[k - 1] * table.non_member[k - 1] +
        (w - v) * table.non_sensitive[k - 1] * table.non_sensitive[k - 1];
    second_moment += (ps * tk + pn * from_non_sensitive) * norm;
  }
  const double inv_norm =
      v * table.invertible_sensitive * table.invertible_sensitive +
      table.invertible_self * table.invertible_self +
      (w - v - 1) * table.invertible_other * table.invertible_other;
  second_moment += pn * (1.0 - protected_mass) * inv_norm;
  return second_moment - p.sum_of_squares();
}

double exact_scaled_mse_dense(const Mechanism& m, const EstimatorTable& table,
                              const Distribution& p) {
  if (p.w() != m.w()) throw DomainError("distribution length must equal w");
  const Eigen::MatrixXd& q = m.matrix();
  const auto& outputs = m.outputs();
  double total = 0.0;
  for (std::size_t col = 0; col < outputs.size(); ++col) {
    std::vector<double> e = table.estimate(outputs[col]);
    for (int x = 0; x < m.w(); ++x) e[x] -= p[x];
    const double err = squared_norm(e);
    double mass = 0.0;
    for (int x = 0; x < m.w(); ++x) mass += p[x] * q(x, col);
    total += mass * err;
  }
  return total;
}

std::vector<double> exact_beta_curve(const Mechanism& m,
                                     const EstimatorTable& table,
                                     const std::vector<double>& betas) {
  const Eigen::MatrixXd& q = m.matrix();
  const auto& outputs = m.outputs();
  const int w = m.w();
  const int v = m.v();
  const double n = w - v;
  // Per output: Q_beta(y) = a + b beta, <e_y, P^beta> = s + g beta.
  const std::size_t count = outputs.size();
  std::vector<double> a(count), b(count), s(count), g(count), norm(count);
  for (std::size_t col = 0; col < count; ++col) {
    const std::vector<double> e = table.estimate(outputs[col]);
    double qs = 0.0, qn = 0.0, es = 0.0, en = 0.0;
    for (int x = 0; x < v; ++x) {
      qs += q(x, col);
      es += e[x];
    }
    for (int x = v; x < w; ++x) {
      qn += q(x, col);
      en += e[x];
    }
    a[col] = qn / n;
    b[col] = qs / v - qn / n;
    s[col] = en / n;
    g[col] = es / v - en / n;
    norm[col] = squared_norm(e);
  }
  std::vector<double> out;
  out.reserve(betas.size());
  for (double beta : betas) {
    const double p_norm = beta * beta / v + (1.0 - beta) * (1.0 - beta) / n;
    double r = p_norm;
    for (std::size_t col = 0; col < count; ++col) {
      const double mass = a[col] + b[col] * beta;
      r += mass * (norm[col] - 2.0 * (s[col] + g[col] * beta));
    }
    out.push_back(r);
  }
  return out;
}

std::vector<SweepPoint> worst_case_sweep(const Mechanism& m,
                                         const EstimatorTable& table,
                                         const std::vector<double>& beta_grid,
                                         const SimConfig& cfg) {
  if (beta_grid.empty()) throw DomainError("beta grid must be nonempty");
  const Partition part(m.w(), m.v());
  std::vector<SweepPoint> out;
  for (double beta : beta_grid) {
    SweepPoint point;
    point.beta = beta;
    point.result = run_trials(m, table, p_alpha(part, beta), cfg);
    point.theory = ubd_error_at_beta(m.w(), m.v(), m.epsilon(), table.alpha,
                                     table.t, beta);
    out.push_back(std::move(point));
  }
  return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "beta,empirical,stderr,theory\n";
  char line[128];
  for (const auto& point : points) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g\n", point.beta,
                  point.result.mean_scaled_mse, point.result.stderr_mse,
                  point.theory);
    out << line;
  }
}

double freq_mse_translate(std::int64_t n, const Distribution& p,
                          double freq_mse) {
  if (n < 1) throw DomainError("n must be >= 1");
  return freq_mse + (1.0 - p.sum_of_squares()) / static_cast<double>(n);
}

}  // namespace uldp
