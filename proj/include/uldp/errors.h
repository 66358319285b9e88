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

#ifndef ULDP_ERRORS_H_
#define ULDP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace uldp {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A gamma vector that does not induce a row-stochastic extremal mechanism.
class FeasibilityError : public DomainError {
 public:
  FeasibilityError(const std::string& what, int worst_input, double residual)
      : DomainError(what), worst_input_(worst_input), residual_(residual) {}

  int worst_input() const { return worst_input_; }
  double residual() const { return residual_; }

 private:
  int worst_input_;
  double residual_;
};

// Raised when a supplied edge list is not a block design.
class DesignError : public DomainError {
 public:
  explicit DesignError(const std::string& what) : DomainError(what) {}
};

// The uBD estimator is undefined for the all-sensitive mixture t = delta^(v).
class EstimatorDegenerateError : public DomainError {
 public:
  explicit EstimatorDegenerateError(const std::string& what)
      : DomainError(what) {}
};

// Score vector requested for an output with zero marginal probability.
class UndefinedScoreError : public DomainError {
 public:
  explicit UndefinedScoreError(const std::string& what) : DomainError(what) {}
};

// Operation needs the dense matrix but the mechanism is streaming-only.
class UnsupportedBackendError : public std::logic_error {
 public:
  explicit UnsupportedBackendError(const std::string& what)
      : std::logic_error(what) {}
};

// Saddle-point solver could not certify its answer.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double certificate)
      : std::runtime_error(what), certificate_(certificate) {}

  double certificate() const { return certificate_; }

 private:
  double certificate_;
};

}  // namespace uldp

#endif  // ULDP_ERRORS_H_
