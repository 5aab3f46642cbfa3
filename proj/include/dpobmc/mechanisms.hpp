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

#ifndef DPOBMC_MECHANISMS_HPP
#define DPOBMC_MECHANISMS_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "dpobmc/constraints.hpp"
#include "dpobmc/link.hpp"
#include "dpobmc/observations.hpp"
#include "dpobmc/privacy.hpp"
#include "dpobmc/spg.hpp"

namespace dpobmc {

struct RunConfig {
  PrivacySpec privacy;
  LinkModel model = LinkModel::logistic();
  ConstraintSet constraints;
  ProjectionMode projection = ProjectionMode::Intersection;
  double projection_tol = 1e-9;
  int projection_rounds = kDefaultProjectionRounds;
  SolverParams solver;
  RngHandle rng;

  // Throws ConfigError; called by every pipeline before touching data.
  void validate() const;
};

// Default K and C for gradient perturbation.
inline constexpr int kDefaultGradientSteps = 50;
inline constexpr double kDefaultGradientClamp = 0.5;

struct MechanismResult {
  SolverResult solver;
  // Released estimate; equals solver.solution except for output perturbation.
  Eigen::MatrixXd estimate;
  std::vector<double> step_budgets;  // one entry per mechanism invocation
  double epsilon_spent = 0;
  double noise_scale = 0;            // Laplace scale of the injected noise
  std::optional<double> p1, p2;      // transition probabilities used (InP)
  std::size_t flips = 0;             // ratings changed by randomized response
};

// Random streams drawn by the pipelines, derived from RunConfig::rng.
enum class NoiseStream : std::uint64_t { Response = 1, Objective = 2, Gradient = 3, Output = 4 };

MechanismResult run_clear(const ObservationSet& obs, const RunConfig& cfg);
MechanismResult run_input_perturbation(const ObservationSet& obs, const RunConfig& cfg);
MechanismResult run_objective_perturbation(const ObservationSet& obs, const RunConfig& cfg);
MechanismResult run_gradient_perturbation(const ObservationSet& obs, const RunConfig& cfg);
MechanismResult run_output_perturbation(const ObservationSet& obs, const RunConfig& cfg);

// Output perturbation of an already computed clean solve of the same data.
MechanismResult perturb_output(const SolverResult& clean, const RunConfig& cfg);

// Dispatch on cfg.privacy.mechanism.
MechanismResult run_mechanism(const ObservationSet& obs, const RunConfig& cfg);

// Symmetric transition probability or the configured pair.
std::pair<double, double> input_transition_probabilities(const PrivacySpec& spec);
double objective_noise_scale(const RunConfig& cfg);
double gradient_noise_scale(const PrivacySpec& spec);
double output_noise_scale(const RunConfig& cfg);

}  // namespace dpobmc

#endif  // DPOBMC_MECHANISMS_HPP
