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

// Utility-optimized LDP mechanisms over the extremal output alphabet:
// protected outputs are nonempty subsets of the sensitive set [v], and
// invertible outputs are singletons {x} of non-sensitive inputs.
//
// Two backends exist. The dense backend stores the full w x |Y| conditional
// probability matrix and supports exact algebra. The streaming backend
// covers uBD mechanisms over complete designs and samples outputs without
// materializing anything, which is what large sensitive sets (v in the
// hundreds) need.

#ifndef ULDP_MECHANISMS_H_
#define ULDP_MECHANISMS_H_

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "uldp/core.h"
#include "uldp/designs.h"
#include "uldp/rng.h"

namespace uldp {

enum class OutputKind { kProtected, kInvertible };

struct OutputSymbol {
  OutputKind kind = OutputKind::kProtected;
  // Sorted 0-based symbols: a subset of [v] for protected outputs, the
  // single non-sensitive input for invertible outputs.
  std::vector<int> subset;

  // Protected before invertible; protected by (size, lexicographic subset).
  friend bool operator<(const OutputSymbol& a, const OutputSymbol& b);
  friend bool operator==(const OutputSymbol&, const OutputSymbol&) = default;
};

std::string to_string(const OutputSymbol& y);

struct GammaEntry {
  std::vector<int> subset;
  double gamma = 0.0;
};
using GammaWeights = std::vector<GammaEntry>;

enum class Backend { kDense, kStreaming };

// Caps the dense backend at w * |outputs| entries.
inline constexpr long long kMaxDenseEntries = 10'000'000;

class Mechanism {
 public:
  // Dense mechanism from an explicit matrix (w rows, one column per output).
  // Checks shape and that entries are finite and nonnegative; the privacy
  // conditions are left to validate_uldp so imported files can be audited.
  static Mechanism from_matrix(int w, int v, double epsilon,
                               std::vector<OutputSymbol> outputs,
                               Eigen::MatrixXd matrix);

  int w() const { return w_; }
  int v() const { return v_; }
  double epsilon() const { return epsilon_; }
  Backend backend() const { return backend_; }

  // Dense backend only; throws UnsupportedBackendError otherwise.
  const std::vector<OutputSymbol>& outputs() const;
  const Eigen::MatrixXd& matrix() const;
  int num_outputs() const { return static_cast<int>(outputs().size()); }

  // Column index of `y`, or -1.
  int find_output(const OutputSymbol& y) const;

  // Mixture proportions t for uBD mechanisms (index k-1 holds t_k).
  const std::optional<std::vector<double>>& mixture() const { return mixture_; }
  // Per-output gamma (dense extremal mechanisms; zero on invertible outputs).
  const std::optional<std::vector<double>>& gamma() const { return gamma_; }
  bool is_extremal() const { return gamma_.has_value(); }

  // Probability that a non-sensitive input is released as itself.
  double invertible_mass() const { return invertible_mass_; }

 private:
  friend Mechanism build_extremal(const Partition&, double, GammaWeights,
                                  std::optional<std::vector<double>>);
  friend Mechanism ubd_mechanism(const Partition&, double,
                                 const std::vector<double>&,
                                 const std::map<int, BlockDesign>*, Backend);
  friend Mechanism bd_mechanism(const BlockDesign&, double);
  friend void sample_into(const Mechanism&, int, CounterRng&, OutputSymbol&);

  Mechanism() = default;
  void build_row_cdfs();

  int w_ = 0;
  int v_ = 0;
  double epsilon_ = 0.0;
  Backend backend_ = Backend::kDense;
  std::vector<OutputSymbol> outputs_;
  Eigen::MatrixXd matrix_;
  std::map<OutputSymbol, int> index_;
  std::vector<std::vector<double>> row_cdf_;
  std::optional<std::vector<double>> mixture_;
  std::optional<std::vector<double>> gamma_;
  double invertible_mass_ = 0.0;

  // Streaming sampler tables: cumulative distributions over k = 1..v.
  std::vector<double> sensitive_k_cdf_;
  std::vector<double> nonsensitive_k_cdf_;
  double nonsensitive_protected_prob_ = 0.0;
};

// LDP mechanism on [v] whose outputs are the edges of `design`.
Mechanism bd_mechanism(const BlockDesign& design, double epsilon);

// Extremal mechanism induced by gamma. Throws FeasibilityError when the
// sensitive rows do not sum to 1 within 1e-10. Zero-weight protected outputs
// are dropped.
Mechanism extremal_from_gamma(const Partition& part, double epsilon,
                              const GammaWeights& gamma);

// Worst absolute row-sum residual of gamma over sensitive inputs, and the
// input attaining it.
std::pair<double, int> gamma_feasibility_residual(int v, double epsilon,
                                                  const GammaWeights& gamma);

// uBD mechanism mixing block designs with proportions t (t[k-1] = t_k).
// `designs` maps k to the design used for size-k outputs; missing entries
// default to complete designs. The streaming backend supports only complete
// designs.
Mechanism ubd_mechanism(const Partition& part, double epsilon,
                        const std::vector<double>& t,
                        const std::map<int, BlockDesign>* designs = nullptr,
                        Backend backend = Backend::kDense);

struct UldpReport {
  bool ok = false;
  std::string message;
  // Witness (0-based, -1 when not applicable): for a ratio violation, inputs
  // x and x2 with Q(y|x) > e^eps Q(y|x2); for a bad invertible column, the
  // offending input in x.
  int x = -1;
  int x2 = -1;
  int y = -1;
};

// Checks the ULDP conditions with 1e-9 multiplicative slack on the e^eps
// ratio and a 1e-15 positivity threshold for invertible columns, then row
// stochasticity within 1e-12.
UldpReport validate_uldp(const Mechanism& m);

// Draws Y ~ Q(.|x). `out` is overwritten; reusing it avoids allocation.
void sample_into(const Mechanism& m, int x, CounterRng& rng, OutputSymbol& out);
OutputSymbol sample_output(const Mechanism& m, int x, CounterRng& rng);

// {"w","v","epsilon","outputs":[{"kind","subset"}],"rows":[[...]]}, 1-based.
nlohmann::json mechanism_to_json(const Mechanism& m);
Mechanism mechanism_from_json(const nlohmann::json& j);

}  // namespace uldp

#endif  // ULDP_MECHANISMS_H_
