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
#include <limits>

#include <gtest/gtest.h>

#include "dpobmc/data.hpp"
#include "dpobmc/likelihood.hpp"
#include "dpobmc/metrics.hpp"

namespace dpobmc {
namespace {

struct Instance {
  GroundTruth truth;
  ObservationSet obs;
};

Instance make_instance(Index d, double ratio, std::uint64_t seed) {
  RngHandle rng(seed);
  Instance inst;
  inst.truth = gen_synthetic(d, d, 1, 1.0, rng);
  inst.obs = sample_observations(inst.truth.m, ratio, LinkModel::logistic(), rng);
  return inst;
}

RunConfig config(Mechanism m, double epsilon, Index d, std::uint64_t seed = 1) {
  RunConfig cfg;
  cfg.privacy.mechanism = m;
  cfg.privacy.epsilon = epsilon;
  if (m == Mechanism::Gradient) {
    cfg.privacy.iterations = kDefaultGradientSteps;
    cfg.privacy.clamp = kDefaultGradientClamp;
  }
  cfg.constraints = ConstraintSet{std::sqrt(static_cast<double>(d * d)), 1.0};
  cfg.rng = RngHandle(seed);
  return cfg;
}

TEST(ClearTest, EmptyObservationsReturnStart) {
  const ObservationSet obs(5, 4);
  const MechanismResult r = run_clear(obs, config(Mechanism::Clear, 0, 5));
  EXPECT_TRUE(r.solver.converged);
  EXPECT_EQ(r.estimate, Eigen::MatrixXd::Zero(5, 4));
  EXPECT_TRUE(r.step_budgets.empty());
  EXPECT_EQ(r.epsilon_spent, 0.0);
}

TEST(ClearTest, EstimateIsFeasible) {
  const Instance inst = make_instance(30, 0.3, 2);
  const RunConfig cfg = config(Mechanism::Clear, 0, 30);
  const MechanismResult r = run_clear(inst.obs, cfg);
  EXPECT_LE(r.estimate.cwiseAbs().maxCoeff(), cfg.constraints.alpha + 1e-8);
  EXPECT_LE(nuclear_norm(r.estimate), cfg.constraints.tau + 1e-8);
  EXPECT_LT(r.solver.trace.back().objective, r.solver.initial_objective);
}

TEST(ClearTest, Deterministic) {
  const Instance inst = make_instance(20, 0.4, 3);
  const RunConfig cfg = config(Mechanism::Clear, 0, 20);
  EXPECT_EQ(run_clear(inst.obs, cfg).estimate, run_clear(inst.obs, cfg).estimate);
}

TEST(PipelineTest, WrongMechanismRejected) {
  const Instance inst = make_instance(10, 0.5, 4);
  EXPECT_THROW(run_clear(inst.obs, config(Mechanism::Input, 1, 10)), ConfigError);
  EXPECT_THROW(run_output_perturbation(inst.obs, config(Mechanism::Clear, 1, 10)), ConfigError);
}

TEST(PipelineTest, ConfigCheckedBeforeData) {
  const Instance inst = make_instance(10, 0.5, 5);
  RunConfig cfg = config(Mechanism::Input, 1.0, 10);
  cfg.privacy.p1 = 0.4;
  cfg.privacy.p2 = 0.2;
  EXPECT_THROW(run_mechanism(inst.obs, cfg), ConfigError);
  cfg = config(Mechanism::Gradient, 1.0, 10);
  cfg.privacy.iterations = 0;
  EXPECT_THROW(run_mechanism(inst.obs, cfg), ConfigError);
  cfg = config(Mechanism::Output, 1.0, 10);
  cfg.constraints.alpha = std::numeric_limits<double>::infinity();
  EXPECT_THROW(run_mechanism(inst.obs, cfg), ConfigError);
}

TEST(InputPerturbationTest, LargeEpsilonFlipsNothing) {
  const Instance inst = make_instance(100, 1.0, 6);
  ASSERT_EQ(inst.obs.size(), 10000u);
  const MechanismResult r = run_input_perturbation(inst.obs, config(Mechanism::Input, 20, 100));
  EXPECT_EQ(r.flips, 0u);
  EXPECT_NEAR(*r.p1, p_from_epsilon(20), 1e-20);
  EXPECT_EQ(r.epsilon_spent, 20.0);
}

TEST(InputPerturbationTest, FlipCountMatchesCalibration) {
  const Instance inst = make_instance(60, 1.0, 7);
  const MechanismResult r = run_input_perturbation(inst.obs, config(Mechanism::Input, 1, 60));
  const double p = p_from_epsilon(1), n = static_cast<double>(inst.obs.size());
  EXPECT_NEAR(static_cast<double>(r.flips) / n, p, 4 * std::sqrt(p * (1 - p) / n));
  EXPECT_EQ(r.step_budgets, std::vector<double>{1.0});
}

// At eps = 0.01 the released ratings are nearly fair coins: the estimate is
// uncorrelated with the truth, so it cannot beat the zero matrix.
TEST(InputPerturbationTest, DegenerateEpsilonCarriesNoSignal) {
  double correlation = 0, error = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = make_instance(30, 0.3, 100 + seed);
    const MechanismResult r = run_input_perturbation(inst.obs, config(Mechanism::Input, 0.01, 30, seed));
    const Eigen::MatrixXd& m = inst.truth.m;
    correlation += (r.estimate.array() * m.array()).sum() / (r.estimate.norm() * m.norm());
    error += are(r.estimate, m);
  }
  EXPECT_NEAR(correlation / 10, 0.0, 0.1);
  EXPECT_GE(error / 10, 0.95);
}

TEST(ObjectivePerturbationTest, InfiniteEpsilonIsClear) {
  const Instance inst = make_instance(20, 0.5, 8);
  const MechanismResult clear = run_clear(inst.obs, config(Mechanism::Clear, 0, 20));
  const MechanismResult objp = run_objective_perturbation(
      inst.obs, config(Mechanism::Objective, std::numeric_limits<double>::infinity(), 20));
  EXPECT_EQ(objp.noise_scale, 0.0);
  ASSERT_EQ(objp.solver.trace.size(), clear.solver.trace.size());
  for (std::size_t k = 0; k < clear.solver.trace.size(); ++k) {
    EXPECT_EQ(objp.solver.trace[k].objective, clear.solver.trace[k].objective);
  }
  EXPECT_EQ(objp.estimate, clear.estimate);
}

TEST(ObjectivePerturbationTest, NoiseScale) {
  EXPECT_EQ(objective_noise_scale(config(Mechanism::Objective, 4, 10)), 0.25);
  RunConfig probit = config(Mechanism::Objective, 2, 10);
  probit.model = LinkModel::gaussian(1.0);
  EXPECT_NEAR(objective_noise_scale(probit), objective_sensitivity(probit.model, 1.0) / 2, 1e-15);
}

TEST(GradientPerturbationTest, NoiseScaleAndBudget) {
  PrivacySpec spec{Mechanism::Gradient, 5.0, {}, {}, 50, 0.5};
  EXPECT_DOUBLE_EQ(gradient_noise_scale(spec), 10.0);
  const Instance inst = make_instance(15, 0.5, 9);
  RunConfig cfg = config(Mechanism::Gradient, 5.0, 15);
  const MechanismResult r = run_gradient_perturbation(inst.obs, cfg);
  ASSERT_EQ(r.step_budgets.size(), 50u);
  for (double b : r.step_budgets) EXPECT_EQ(b, 0.1);
  EXPECT_NEAR(r.epsilon_spent, 5.0, 1e-12);
  EXPECT_EQ(r.solver.iterations_used, 50);
  EXPECT_EQ(r.noise_scale, 10.0);
}

TEST(GradientPerturbationTest, SingleNoiselessStepIsProjectedGradientStep) {
  const Instance inst = make_instance(12, 0.6, 10);
  RunConfig cfg = config(Mechanism::Gradient, std::numeric_limits<double>::infinity(), 12);
  cfg.privacy.iterations = 1;
  cfg.privacy.clamp = 100.0;
  const MechanismResult r = run_gradient_perturbation(inst.obs, cfg);
  const Eigen::MatrixXd g = scatter(inst.obs, gradient(Eigen::MatrixXd::Zero(12, 12), inst.obs, cfg.model));
  const double gamma = 1.0 / g.cwiseAbs().maxCoeff();
  const Eigen::MatrixXd expected =
      project_feasible(Eigen::MatrixXd(-gamma * g), cfg.constraints, 1e-9, kDefaultProjectionRounds).value;
  EXPECT_LT((r.estimate - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(OutputPerturbationTest, HugeEpsilonMatchesClear) {
  const Instance inst = make_instance(20, 0.5, 11);
  const MechanismResult clear = run_clear(inst.obs, config(Mechanism::Clear, 0, 20));
  const MechanismResult outp = run_output_perturbation(inst.obs, config(Mechanism::Output, 1e9, 20));
  EXPECT_LE((outp.estimate - clear.estimate).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_EQ(outp.solver.solution, clear.estimate);
}

TEST(OutputPerturbationTest, NoiseVariance) {
  const Instance inst = make_instance(100, 0.15, 12);
  const MechanismResult clear = run_clear(inst.obs, config(Mechanism::Clear, 0, 100));
  const RunConfig cfg = config(Mechanism::Output, 4, 100);
  EXPECT_EQ(output_noise_scale(cfg), 0.5);
  const MechanismResult outp = perturb_output(clear.solver, cfg);
  const Eigen::MatrixXd noise = outp.estimate - clear.estimate;
  const double mean = noise.mean();
  const double var = (noise.array() - mean).square().sum() / static_cast<double>(noise.size() - 1);
  EXPECT_NEAR(var, 0.5, 0.05);
}

TEST(OutputPerturbationTest, ReuseEqualsRerun) {
  const Instance inst = make_instance(20, 0.5, 13);
  const RunConfig cfg = config(Mechanism::Output, 2, 20);
  const MechanismResult clear = run_clear(inst.obs, config(Mechanism::Clear, 0, 20));
  EXPECT_EQ(perturb_output(clear.solver, cfg).estimate, run_output_perturbation(inst.obs, cfg).estimate);
}

TEST(InputPerturbationTest, TransitionProbabilities) {
  PrivacySpec spec{Mechanism::Input, std::log(3.0), {}, {}, {}, {}};
  const auto [p1, p2] = input_transition_probabilities(spec);
  EXPECT_NEAR(p1, 0.25, 1e-15);
  EXPECT_EQ(p1, p2);
  spec.p1 = 0.1;
  spec.p2 = 0.3;
  EXPECT_EQ(input_transition_probabilities(spec), std::make_pair(0.1, 0.3));
}

}  // namespace
}  // namespace dpobmc
