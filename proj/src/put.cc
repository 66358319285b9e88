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

#include "uldp/put.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "uldp/errors.h"
#include "uldp/rng.h"

namespace uldp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMixtureTolerance = 1e-9;
constexpr double kSupportCutoff = 1e-8;

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw DomainError("epsilon must be finite and > 0");
  }
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha must lie in [0, 1]");
  }
}

void check_mixture(int v, std::span<const double> t) {
  if (static_cast<int>(t.size()) != v) {
    throw DomainError("mixture must have length v=" + std::to_string(v));
  }
  double total = 0.0;
  for (double value : t) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw DomainError("mixture entries must be finite and >= 0");
    }
    total += value;
  }
  if (std::abs(total - 1.0) > kMixtureTolerance) {
    throw DomainError("mixture does not sum to 1");
  }
}

// M(alpha, t) = sum_i c[i] / <forms[i], t>.
struct Forms {
  std::array<double, 3> c{};
  std::array<std::vector<double>, 3> forms;
};

Forms make_forms(int w, int v, double epsilon, double alpha) {
  const double d = std::expm1(epsilon);
  Forms f;
  f.c[0] = v == 1 ? 0.0 : double(v - 1) * (v - 1) / (v * d * d);
  f.c[1] = double(w - v - 1) * (1.0 - alpha) / ((w - v) * d);
  f.c[2] = double(w) * (1.0 - alpha) / (double(v) * (w - v) * d);
  for (auto& form : f.forms) form.resize(v);
  for (int k = 1; k <= v; ++k) {
    const double s = alpha * k * d + v;
    const double m = k * d + v;
    f.forms[0][k - 1] = double(k) * (v - k) / (s * m);
    f.forms[1][k - 1] = k / m;
    f.forms[2][k - 1] = k / s;
  }
  return f;
}

std::array<double, 3> linear_values(const Forms& f, std::span<const double> t) {
  std::array<double, 3> a{};
  for (int i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < t.size(); ++k) a[i] += f.forms[i][k] * t[k];
  }
  return a;
}

double term(double c, double a) {
  if (c == 0.0) return 0.0;
  return a > 0.0 ? c / a : kInf;
}

double forms_value(const Forms& f, const std::array<double, 3>& a) {
  return term(f.c[0], a[0]) + term(f.c[1], a[1]) + term(f.c[2], a[2]);
}

double vertex_value(const Forms& f, int k) {
  return term(f.c[0], f.forms[0][k - 1]) + term(f.c[1], f.forms[1][k - 1]) +
         term(f.c[2], f.forms[2][k - 1]);
}

// Exact minimizer of the convex map g -> sum_i c_i / (a_i + g * delta_i) on
// [0, g_max].
double line_search(const Forms& f, const std::array<double, 3>& a,
                   const std::array<double, 3>& delta, double g_max) {
  auto derivative = [&](double g) {
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
      if (f.c[i] == 0.0) continue;
      const double x = a[i] + g * delta[i];
      if (x <= 0.0) return kInf;
      sum -= f.c[i] * delta[i] / (x * x);
    }
    return sum;
  };
  auto second = [&](double g) {
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
      if (f.c[i] == 0.0) continue;
      const double x = a[i] + g * delta[i];
      sum += 2.0 * f.c[i] * delta[i] * delta[i] / (x * x * x);
    }
    return sum;
  };
  if (derivative(g_max) <= 0.0) return g_max;
  double lo = 0.0;
  double hi = g_max;
  double g = 0.5 * g_max;
  for (int iter = 0; iter < 200 && hi - lo > 1e-17 * g_max; ++iter) {
    const double d1 = derivative(g);
    if (d1 == 0.0) return g;
    if (d1 > 0.0) {
      hi = g;
    } else {
      lo = g;
    }
    const double d2 = second(g);
    double next = d2 > 0.0 ? g - d1 / d2 : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    g = next;
  }
  return g;
}

std::vector<double> trim_support(std::vector<double> t) {
  double total = 0.0;
  for (double& value : t) {
    if (value < kSupportCutoff) value = 0.0;
    total += value;
  }
  for (double& value : t) value /= total;
  return t;
}

}  // namespace

bool ObjectiveValue::finite() const { return std::isfinite(total); }

std::vector<double> vertex(int v, int k) {
  if (v < 1 || k < 1 || k > v) {
    throw DomainError("vertex index must satisfy 1 <= k <= v");
  }
  std::vector<double> t(v, 0.0);
  t[k - 1] = 1.0;
  return t;
}

ObjectiveValue objective(int w, int v, double epsilon, double alpha,
                         std::span<const double> t) {
  Partition part(w, v);
  check_epsilon(epsilon);
  check_alpha(alpha);
  check_mixture(v, t);
  const Forms f = make_forms(w, v, epsilon, alpha);
  const auto a = linear_values(f, t);
  ObjectiveValue out;
  out.m1 = term(f.c[0], a[0]);
  out.m2 = term(f.c[1], a[1]);
  out.m3 = term(f.c[2], a[2]);
  out.total = out.m1 + out.m2 + out.m3;
  return out;
}

double objective_dalpha(int w, int v, double epsilon, double alpha,
                        std::span<const double> t) {
  const ObjectiveValue value = objective(w, v, epsilon, alpha, t);
  if (!value.finite()) {
    throw DomainError("dM/dalpha is undefined where M is infinite");
  }
  const double d = std::expm1(epsilon);
  double a1 = 0.0, da1 = 0.0, a2 = 0.0, a3 = 0.0, da3 = 0.0;
  for (int k = 1; k <= v; ++k) {
    const double tk = t[k - 1];
    if (tk == 0.0) continue;
    const double s = alpha * k * d + v;
    const double m = k * d + v;
    a1 += tk * k * (v - k) / (s * m);
    da1 -= tk * double(k) * k * (v - k) * d / (s * s * m);
    a2 += tk * k / m;
    a3 += tk * k / s;
    da3 -= tk * double(k) * k * d / (s * s);
  }
  double result = 0.0;
  if (v > 1) {
    result -= double(v - 1) * (v - 1) / (v * d * d) * da1 / (a1 * a1);
  }
  result -= double(w - v - 1) / ((w - v) * d * a2);
  result += double(w) / (double(v) * (w - v) * d) *
            (-1.0 / a3 - (1.0 - alpha) * da3 / (a3 * a3));
  return result;
}

std::vector<double> objective_dt(int w, int v, double epsilon, double alpha,
                                 std::span<const double> t) {
  Partition part(w, v);
  check_epsilon(epsilon);
  check_alpha(alpha);
  check_mixture(v, t);
  const Forms f = make_forms(w, v, epsilon, alpha);
  const auto a = linear_values(f, t);
  std::vector<double> grad(v, 0.0);
  for (int i = 0; i < 3; ++i) {
    if (f.c[i] == 0.0) continue;
    for (int k = 0; k < v; ++k) {
      grad[k] -= a[i] > 0.0 ? f.c[i] * f.forms[i][k] / (a[i] * a[i]) : kInf;
    }
  }
  return grad;
}

InnerSolution inner_min_t(int w, int v, double epsilon, double alpha,
                          const InnerOptions& options) {
  Partition part(w, v);
  check_epsilon(epsilon);
  check_alpha(alpha);
  const Forms f = make_forms(w, v, epsilon, alpha);

  int best = 1;
  double best_value = kInf;
  for (int k = 1; k <= v; ++k) {
    const double value = vertex_value(f, k);
    if (value < best_value) {
      best_value = value;
      best = k;
    }
  }
  InnerSolution sol;
  sol.t = vertex(v, best);
  sol.value = best_value;
  if (v == 1 || best_value == 0.0) return sol;

  std::vector<double>& t = sol.t;
  std::vector<double> grad(v);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const auto a = linear_values(f, t);
    const double value = forms_value(f, a);
    std::fill(grad.begin(), grad.end(), 0.0);
    for (int i = 0; i < 3; ++i) {
      if (f.c[i] == 0.0) continue;
      const double scale = f.c[i] / (a[i] * a[i]);
      for (int k = 0; k < v; ++k) grad[k] -= scale * f.forms[i][k];
    }
    int toward = 0;
    int away = -1;
    double dot = 0.0;
    for (int k = 0; k < v; ++k) {
      if (grad[k] < grad[toward]) toward = k;
      if (t[k] > 0.0) {
        dot += t[k] * grad[k];
        if (away < 0 || grad[k] > grad[away]) away = k;
      }
    }
    sol.value = value;
    sol.gap = dot - grad[toward];
    sol.iterations = iter;
    if (sol.gap <= options.relative_gap * value || toward == away) break;

    std::array<double, 3> delta{};
    for (int i = 0; i < 3; ++i) {
      delta[i] = f.forms[i][toward] - f.forms[i][away];
    }
    const double g_max = t[away];
    const double g = line_search(f, a, delta, g_max);
    if (g <= 0.0) break;
    t[toward] += g;
    if (g >= g_max) {
      t[away] = 0.0;
    } else {
      t[away] -= g;
    }
  }
  double total = 0.0;
  for (double value : t) total += value;
  for (double& value : t) value /= total;
  sol.value = forms_value(f, linear_values(f, t));
  return sol;
}

std::string to_string(SolveMethod method) {
  return method == SolveMethod::kClosedForm ? "closed_form" : "numerical";
}

double saddle_certificate(int w, int v, double epsilon, double alpha_star,
                          std::span<const double> t_star, std::uint64_t seed) {
  const double value = objective(w, v, epsilon, alpha_star, t_star).total;
  const double scale = std::max(value, std::numeric_limits<double>::min());
  double violation = 0.0;
  for (int j = 0; j <= 20; ++j) {
    const double alpha = j / 20.0;
    const double m = objective(w, v, epsilon, alpha, t_star).total;
    violation = std::max(violation, (m - value) / scale);
  }
  auto check_t = [&](const std::vector<double>& t) {
    const double m = objective(w, v, epsilon, alpha_star, t).total;
    if (std::isfinite(m)) violation = std::max(violation, (value - m) / scale);
  };
  for (int k = 1; k <= v; ++k) check_t(vertex(v, k));
  CounterRng rng(seed, 0, 0);
  std::vector<double> t(v);
  for (int draw = 0; draw < 2 * v; ++draw) {
    double total = 0.0;
    for (double& value_k : t) {
      value_k = -std::log1p(-rng.uniform());
      total += value_k;
    }
    for (double& value_k : t) value_k /= total;
    check_t(t);
  }
  return violation;
}

SaddleSolution saddle_solve(int w, int v, double epsilon,
                            const SaddleOptions& options) {
  Partition part(w, v);
  check_epsilon(epsilon);
  auto slope = [&](double alpha, InnerSolution& inner) {
    inner = inner_min_t(w, v, epsilon, alpha, options.inner);
    return objective_dalpha(w, v, epsilon, alpha, inner.t);
  };

  InnerSolution inner;
  double alpha_star;
  if (slope(0.0, inner) <= 0.0) {
    alpha_star = 0.0;
  } else if (slope(1.0, inner) >= 0.0) {
    alpha_star = 1.0;
  } else {
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > options.alpha_tolerance) {
      const double mid = 0.5 * (lo + hi);
      if (slope(mid, inner) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    alpha_star = 0.5 * (lo + hi);
    inner = inner_min_t(w, v, epsilon, alpha_star, options.inner);
  }

  SaddleSolution sol;
  sol.alpha_star = alpha_star;
  sol.t_star = trim_support(inner.t);
  sol.value = objective(w, v, epsilon, alpha_star, sol.t_star).total;
  sol.method = SolveMethod::kNumerical;
  sol.certificate = saddle_certificate(w, v, epsilon, alpha_star, sol.t_star,
                                       options.grid_seed);
  if (sol.certificate > options.certificate_tolerance) {
    std::ostringstream msg;
    msg << "saddle certificate " << sol.certificate << " exceeds tolerance "
        << options.certificate_tolerance << " at (w=" << w << ", v=" << v
        << ", eps=" << epsilon << ")";
    throw SolverError(msg.str(), sol.certificate);
  }
  return sol;
}

std::optional<RegimeThresholds> thresholds(int w, int v) {
  Partition part(w, v);
  if (v == 1) return std::nullopt;
  RegimeThresholds out;
  if (v == 2) {
    out.eps_low = std::log1p(std::sqrt(2.0 * (w - 2) / (w - 1)));
  } else {
    out.eps_low = e_threshold(v, 1);
  }
  out.eps_high = std::log(w - v + std::sqrt((w - 1.0) * (w - 2.0) / 2.0));
  return out;
}

double e_threshold(int v, int k) {
  if (k < 0 || k > v - 1) {
    throw DomainError("E(v, k) requires 0 <= k <= v-1");
  }
  if (k == 0) return kInf;
  return 0.5 * std::log(double(v - k) * (v - k - 1) / (double(k) * (k + 1)));
}

double r_bd(int v, int k, double epsilon) {
  check_epsilon(epsilon);
  if (v < 2 || k < 1 || k > v - 1) {
    throw DomainError("R^BD requires v >= 2 and 1 <= k <= v-1");
  }
  const double d = std::expm1(epsilon);
  const double m = k * d + v;
  return double(v - 1) * (v - 1) * m * m / (double(v) * k * (v - k) * d * d);
}

LdpOptimum ldp_optimum(int v, double epsilon) {
  check_epsilon(epsilon);
  if (v < 2) throw DomainError("the LDP optimum requires v >= 2");
  LdpOptimum out;
  out.value = kInf;
  for (int k = 1; k <= v - 1; ++k) {
    out.value = std::min(out.value, r_bd(v, k, epsilon));
    if (e_threshold(v, k) <= epsilon && epsilon <= e_threshold(v, k - 1)) {
      out.k_star.push_back(k);
    }
  }
  return out;
}

std::optional<SaddleSolution> closed_form(int w, int v, double epsilon) {
  Partition part(w, v);
  check_epsilon(epsilon);
  const double d = std::expm1(epsilon);
  bool case_a = v == 1;
  if (!case_a) {
    const auto th = thresholds(w, v);
    case_a = epsilon >= th->eps_high || (v == 2 && epsilon <= th->eps_low);
  }
  SaddleSolution sol;
  sol.method = SolveMethod::kClosedForm;
  if (case_a) {
    sol.alpha_star = std::max(0.0, v * (d - (w - v)) / (w * d));
    sol.t_star = vertex(v, 1);
  } else if (v >= 4 && epsilon <= e_threshold(v, 1)) {
    int k_star = -1;
    for (int k : ldp_optimum(v, epsilon).k_star) {
      if (k >= 2 && k <= v - 1) {
        k_star = k;
        break;
      }
    }
    if (k_star < 0) return std::nullopt;
    sol.alpha_star = 1.0;
    sol.t_star = vertex(v, k_star);
  } else {
    return std::nullopt;
  }
  sol.value = objective(w, v, epsilon, sol.alpha_star, sol.t_star).total;
  sol.certificate =
      saddle_certificate(w, v, epsilon, sol.alpha_star, sol.t_star);
  return sol;
}

SaddleSolution solve_put(int w, int v, double epsilon,
                         const SaddleOptions& options) {
  if (auto sol = closed_form(w, v, epsilon)) return *sol;
  return saddle_solve(w, v, epsilon, options);
}

double ubd_error_at_beta(int w, int v, double epsilon, double alpha,
                         std::span<const double> t, double beta) {
  check_alpha(beta);
  const double m = objective(w, v, epsilon, alpha, t).total;
  if (!std::isfinite(m)) {
    throw EstimatorDegenerateError(
        "uBD error is undefined for the all-sensitive mixture delta^(v)");
  }
  const double f = objective_dalpha(w, v, epsilon, alpha, t);
  const double c = double(w) / (double(v) * (w - v));
  const double step = beta - alpha;
  return -c * step * step + step * f + m;
}

double ubd_asymptotic_error(int w, int v, double epsilon, double alpha,
                            std::span<const double> t) {
  const double m = objective(w, v, epsilon, alpha, t).total;
  if (!std::isfinite(m)) {
    throw EstimatorDegenerateError(
        "uBD error is undefined for the all-sensitive mixture delta^(v)");
  }
  const double f = objective_dalpha(w, v, epsilon, alpha, t);
  const double c = double(w) / (double(v) * (w - v));
  const double beta = std::clamp(alpha + f / (2.0 * c), 0.0, 1.0);
  return ubd_error_at_beta(w, v, epsilon, alpha, t, beta);
}

UssCoefficients uss_coefficients(int v, double epsilon, int k) {
  check_epsilon(epsilon);
  if (k < 1 || k > v - 1) {
    throw DomainError("uSS subset size must satisfy 1 <= k <= v-1");
  }
  const double e = std::exp(epsilon);
  const double d = std::expm1(epsilon);
  UssCoefficients out;
  out.l1 = v * (k * e - e + v - k) * (k * e - k + v - 1) /
           (double(k) * (v - k) * d * d);
  out.l2 = (k * (1.0 - k) * d + double(v - 1) * (v - 2 * k)) /
           (double(k) * (v - k) * d);
  out.l3 = v / (k * d);
  return out;
}

double uss_error(int w, int v, double epsilon, int k, const Distribution& p) {
  Partition part(w, v);
  if (p.w() != w) throw DomainError("distribution length must equal w");
  const UssCoefficients l = uss_coefficients(v, epsilon, k);
  const double ps = p.mass(0, v);
  const double pn = p.mass(v, w);
  return l.l1 + ps * l.l2 + pn * l.l3 + 1.0 - p.sum_of_squares();
}

double uss_worst_case_error(int w, int v, double epsilon, int k) {
  Partition part(w, v);
  const UssCoefficients l = uss_coefficients(v, epsilon, k);
  const double n = w - v;
  // For fixed mass beta on [v], 1 - sum P^2 peaks at P^(beta); the remaining
  // one-dimensional problem is a concave quadratic in beta.
  const double beta =
      std::clamp((l.l2 - l.l3 + 2.0 / n) / (2.0 / v + 2.0 / n), 0.0, 1.0);
  return l.l1 + beta * l.l2 + (1.0 - beta) * l.l3 + 1.0 - beta * beta / v -
         (1.0 - beta) * (1.0 - beta) / n;
}

}  // namespace uldp
