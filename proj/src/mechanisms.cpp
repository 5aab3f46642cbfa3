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

#include "dpobmc/mechanisms.hpp"

#include <cmath>
#include <string>

#include "dpobmc/errors.hpp"
#include "dpobmc/likelihood.hpp"

namespace dpobmc {

void RunConfig::validate() const {
  privacy.validate();
  model.validate();
  constraints.validate();
  solver.validate();
  if (!(projection_tol > 0)) throw ConfigError("projection tolerance must be > 0");
  if (projection_rounds < 1) throw ConfigError("projection rounds must be >= 1");
  const bool needs_alpha = privacy.mechanism == Mechanism::Objective ||
                           privacy.mechanism == Mechanism::Output;
  if (needs_alpha && std::isinf(constraints.alpha)) {
    throw ConfigError(std::string(to_string(privacy.mechanism)) +
                      " calibrates noise on alpha and needs a finite alpha");
  }
}

namespace {

void expect(const RunConfig& cfg, Mechanism m) {
  if (cfg.privacy.mechanism != m) {
    throw ConfigError("pipeline " + std::string(to_string(m)) + " called with mechanism " +
                      std::string(to_string(cfg.privacy.mechanism)));
  }
  cfg.validate();
}

RngHandle stream(const RunConfig& cfg, NoiseStream s) {
  return cfg.rng.derive(static_cast<std::uint64_t>(s));
}

Eigen::MatrixXd dense_gradient(const ObservationSet& obs, const Eigen::VectorXd& g) {
  return scatter(obs, g);
}

SpgProblem<double> base_problem(const ObservationSet& obs, const RunConfig& cfg) {
  SpgProblem<double> problem;
  const LinkModel model = cfg.model;
  problem.objective = [&obs, model](const Eigen::MatrixXd& x) {
    return neg_log_likelihood(x, obs, model);
  };
  problem.gradient = [&obs, model](const Eigen::MatrixXd& x) {
    return dense_gradient(obs, gradient(x, obs, model));
  };
  problem.projector = make_projector(cfg.constraints, cfg.projection, cfg.projection_tol,
                                     cfg.projection_rounds);
  return problem;
}

Eigen::MatrixXd start(const ObservationSet& obs) {
  return Eigen::MatrixXd::Zero(obs.rows(), obs.cols());
}

MechanismResult wrap(SolverResult solved) {
  MechanismResult out;
  out.estimate = solved.solution;
  out.solver = std::move(solved);
  return out;
}

void finish_budget(MechanismResult& out, std::vector<double> budgets) {
  out.step_budgets = std::move(budgets);
  out.epsilon_spent = compose_sequential(out.step_budgets).epsilon;
}

}  // namespace

std::pair<double, double> input_transition_probabilities(const PrivacySpec& spec) {
  if (spec.p1 && spec.p2) return {*spec.p1, *spec.p2};
  const double p = p_from_epsilon(spec.epsilon);
  return {p, p};
}

double objective_noise_scale(const RunConfig& cfg) {
  return objective_sensitivity(cfg.model, cfg.constraints.alpha) / cfg.privacy.epsilon;
}

double gradient_noise_scale(const PrivacySpec& spec) {
  const int k = spec.iterations.value_or(kDefaultGradientSteps);
  return k * gradient_l1_sensitivity(spec.clamp.value_or(kDefaultGradientClamp)) / spec.epsilon;
}

double output_noise_scale(const RunConfig& cfg) {
  return 2.0 * cfg.constraints.alpha / cfg.privacy.epsilon;
}

MechanismResult run_clear(const ObservationSet& obs, const RunConfig& cfg) {
  expect(cfg, Mechanism::Clear);
  return wrap(spg_solve(base_problem(obs, cfg), start(obs), cfg.solver));
}

MechanismResult run_input_perturbation(const ObservationSet& obs, const RunConfig& cfg) {
  expect(cfg, Mechanism::Input);
  const auto [p1, p2] = input_transition_probabilities(cfg.privacy);
  if (!rr_privacy_feasible(p1, p2, cfg.privacy.epsilon)) {
    throw ConfigError("transition probabilities violate the privacy constraint");
  }
  if (p1 + p2 >= 1.0) throw ConfigError("degenerate perturbed link: p1 + p2 must be < 1");

  RngHandle rng = stream(cfg, NoiseStream::Response);
  ObservationSet noisy = rr_perturb(obs, p1, p2, rng);
  std::size_t flips = 0;
  for (std::size_t k = 0; k < obs.size(); ++k) flips += noisy[k].value != obs[k].value;

  const PerturbedLink link{cfg.model, p1, p2};
  SpgProblem<double> problem = base_problem(noisy, cfg);
  problem.objective = [&noisy, link](const Eigen::MatrixXd& x) {
    return rr_neg_log_likelihood(x, noisy, link);
  };
  problem.gradient = [&noisy, link](const Eigen::MatrixXd& x) {
    return dense_gradient(noisy, rr_gradient(x, noisy, link));
  };
  MechanismResult out = wrap(spg_solve(problem, start(obs), cfg.solver));
  out.p1 = p1;
  out.p2 = p2;
  out.flips = flips;
  finish_budget(out, {cfg.privacy.epsilon});
  return out;
}

MechanismResult run_objective_perturbation(const ObservationSet& obs, const RunConfig& cfg) {
  expect(cfg, Mechanism::Objective);
  const double scale = objective_noise_scale(cfg);
  RngHandle rng = stream(cfg, NoiseStream::Objective);
  // The released objective is NLL(X) + sum H_ij X_ij with H ~ Laplace(Delta/eps).
  // perturbed_objective subtracts half of its noise argument, hence -2H.
  const Eigen::VectorXd noise = -2.0 * laplace_vector(static_cast<Index>(obs.size()), scale, rng);

  SpgProblem<double> problem = base_problem(obs, cfg);
  const LinkModel model = cfg.model;
  problem.objective = [&obs, model, &noise](const Eigen::MatrixXd& x) {
    return perturbed_objective(x, obs, model, noise);
  };
  problem.gradient = [&obs, model, &noise](const Eigen::MatrixXd& x) {
    return dense_gradient(obs, perturbed_gradient(x, obs, model, noise));
  };
  MechanismResult out = wrap(spg_solve(problem, start(obs), cfg.solver));
  out.noise_scale = scale;
  finish_budget(out, {cfg.privacy.epsilon});
  return out;
}

MechanismResult run_gradient_perturbation(const ObservationSet& obs, const RunConfig& cfg) {
  expect(cfg, Mechanism::Gradient);
  const int steps = *cfg.privacy.iterations;
  const double clamp = *cfg.privacy.clamp;
  const double scale = gradient_noise_scale(cfg.privacy);
  const double step_budget = cfg.privacy.epsilon / steps;

  RngHandle rng = stream(cfg, NoiseStream::Gradient);
  PrivacyAccountant accountant;
  SpgProblem<double> problem = base_problem(obs, cfg);
  problem.grad_hook = [&obs, &rng, &accountant, clamp, scale, step_budget](
                          Eigen::MatrixXd g, int) {
    const Eigen::VectorXd clamped = clamp_gradient(gather(obs, g), clamp);
    const Eigen::VectorXd noise = laplace_vector(clamped.size(), scale, rng);
    accountant.spend(step_budget);
    return dense_gradient(obs, clamped + noise);
  };
  SolverParams params = cfg.solver;
  params.max_iters = steps;
  params.line_search = false;
  MechanismResult out = wrap(spg_solve(problem, start(obs), params));
  out.noise_scale = scale;
  finish_budget(out, accountant.spends());
  return out;
}

MechanismResult perturb_output(const SolverResult& clean, const RunConfig& cfg) {
  if (cfg.privacy.mechanism != Mechanism::Output) {
    throw ConfigError("perturb_output needs mechanism OutP");
  }
  cfg.validate();
  const double scale = output_noise_scale(cfg);
  RngHandle rng = stream(cfg, NoiseStream::Output);
  MechanismResult out;
  out.solver = clean;
  out.estimate = clean.solution +
                 laplace_matrix(clean.solution.rows(), clean.solution.cols(), scale, rng);
  out.noise_scale = scale;
  finish_budget(out, {cfg.privacy.epsilon});
  return out;
}

MechanismResult run_output_perturbation(const ObservationSet& obs, const RunConfig& cfg) {
  expect(cfg, Mechanism::Output);
  return perturb_output(spg_solve(base_problem(obs, cfg), start(obs), cfg.solver), cfg);
}

MechanismResult run_mechanism(const ObservationSet& obs, const RunConfig& cfg) {
  switch (cfg.privacy.mechanism) {
    case Mechanism::Clear: return run_clear(obs, cfg);
    case Mechanism::Input: return run_input_perturbation(obs, cfg);
    case Mechanism::Objective: return run_objective_perturbation(obs, cfg);
    case Mechanism::Gradient: return run_gradient_perturbation(obs, cfg);
    case Mechanism::Output: return run_output_perturbation(obs, cfg);
  }
  throw ConfigError("unknown mechanism");
}

}  // namespace dpobmc
