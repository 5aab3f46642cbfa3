// Copyright 2026 The dpobmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPOBMC_PRIVACY_HPP
#define DPOBMC_PRIVACY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpobmc/link.hpp"
#include "dpobmc/observations.hpp"

namespace dpobmc {

enum class Mechanism { Clear, Input, Objective, Gradient, Output };

// Short names used on the command line and in result files.
std::string_view to_string(Mechanism mechanism);
Mechanism parse_mechanism(std::string_view name);

// Budget and mechanism parameters. epsilon may be +inf, meaning zero noise.
struct PrivacySpec {
  Mechanism mechanism = Mechanism::Clear;
  double epsilon = 0;
  std::optional<double> p1;
  std::optional<double> p2;
  std::optional<int> iterations;  // K, gradient perturbation
  std::optional<double> clamp;    // C, gradient perturbation

  // Throws ConfigError on inconsistent settings.
  void validate() const;
};

// Seeded random stream. Identical (seed, stream) pairs replay identical
// draws; parallel work must use distinct streams. Not shareable across
// threads.
class RngHandle {
 public:
  using Engine = std::mt19937_64;

  explicit RngHandle(std::uint64_t seed = 0, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Independent handle for a sub-stream, derived from (seed, stream, sub).
  RngHandle derive(std::uint64_t sub) const;

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  Engine& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  Engine engine_;
};

// Flips +1 -> -1 with probability p1 and -1 -> +1 with probability p2.
ObservationSet rr_perturb(const ObservationSet& obs, double p1, double p2, RngHandle& rng);

double p_from_epsilon(double epsilon);
double epsilon_from_p(double p);
bool rr_privacy_feasible(double p1, double p2, double epsilon);

// Laplace(0, b) by inverse CDF.
double sample_laplace(double scale, RngHandle& rng);
// Gamma(1, b) magnitude times an independent uniform sign.
double sample_laplace_gamma_sign(double scale, RngHandle& rng);

// n i.i.d. Laplace(0, scale) draws; scale == 0 yields exact zeros.
Eigen::VectorXd laplace_vector(Eigen::Index n, double scale, RngHandle& rng);
Eigen::MatrixXd laplace_matrix(Eigen::Index rows, Eigen::Index cols, double scale, RngHandle& rng);

// Bound on the change of the stationarity noise needed when one rating
// flips: 1 for the logistic model, 2 h'(0) / h(-alpha) for the Gaussian.
double objective_sensitivity(const LinkModel& model, double alpha);

// L1 sensitivity of one clamped gradient evaluation: one entry changes,
// each entry lies in [-C, C].
double gradient_l1_sensitivity(double clamp);

struct Composition {
  double epsilon = 0;
  bool empty = false;  // vacuous composition
};

Composition compose_sequential(std::span<const double> epsilons);

// Ledger of budget spent by one pipeline run.
class PrivacyAccountant {
 public:
  void spend(double epsilon);
  const std::vector<double>& spends() const { return spends_; }
  Composition total() const { return compose_sequential(spends_); }

 private:
  std::vector<double> spends_;
};

}  // namespace dpobmc

#endif  // DPOBMC_PRIVACY_HPP
