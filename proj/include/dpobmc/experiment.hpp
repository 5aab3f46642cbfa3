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

#ifndef DPOBMC_EXPERIMENT_HPP
#define DPOBMC_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dpobmc/constraints.hpp"
#include "dpobmc/data.hpp"
#include "dpobmc/link.hpp"
#include "dpobmc/privacy.hpp"
#include "dpobmc/spg.hpp"

namespace dpobmc {

enum class DatasetKind { Synthetic, MovieLens, Restaurant };

std::string_view to_string(DatasetKind kind);
DatasetKind parse_dataset_kind(std::string_view name);

struct SyntheticParams {
  Index d1 = 100;
  Index d2 = 100;
  int rank = 1;
  double alpha = 1;
  TruthScaling scaling = TruthScaling::SignedMax;
  SamplingRule sampling = SamplingRule::Bernoulli;
};

struct ExperimentConfig {
  DatasetKind dataset = DatasetKind::Synthetic;
  // MovieLens: a directory holding u1.base/u1.test, or a single u.data file.
  // Restaurant: the rating_final.csv file.
  std::filesystem::path dataset_path;
  std::string base_file = "u1.base";
  std::string test_file = "u1.test";

  SyntheticParams synthetic;
  std::vector<Mechanism> mechanisms{Mechanism::Clear, Mechanism::Input, Mechanism::Objective,
                                    Mechanism::Gradient, Mechanism::Output};
  std::vector<double> epsilons{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> ratios{0.15};
  std::vector<std::uint64_t> seeds;

  LinkModel model = LinkModel::logistic();
  // Constraint set. alpha defaults to the synthetic alpha (1 for real data),
  // tau to alpha sqrt(d1 d2 rank).
  std::optional<double> alpha;
  std::optional<double> tau;
  int rank = 1;  // rank used for the default tau on real data
  ProjectionMode projection = ProjectionMode::Intersection;
  SolverParams solver;
  int gradient_steps = 50;
  double gradient_clamp = 0.5;

  int threads = 1;

  // Throws ConfigError.
  void validate() const;
};

struct ResultRow {
  std::string dataset;
  Mechanism mechanism = Mechanism::Clear;
  LinkKind link = LinkKind::Logistic;
  double epsilon = 0;
  double ratio = 0;
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0;
  double wall_ms = 0;
  // Privacy accounting for the budget log.
  int budget_steps = 0;
  double epsilon_spent = 0;
};

inline constexpr const char* kResultHeader = "dataset,mechanism,link,epsilon,ratio,seed,metric,value,wall_ms";
inline constexpr const char* kBudgetHeader = "dataset,mechanism,link,epsilon,ratio,seed,steps,epsilon_spent";

// Runs every (ratio, seed) unit on a pool of cfg.threads workers. Rows come
// back in grid order: ratio, seed, mechanism, epsilon.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// Observation data of one (ratio, seed) unit. Synthetic units carry the
// ground truth; real units carry the held-out test set.
struct ExperimentUnit {
  ObservationSet train;
  ObservationSet test;
  std::optional<Eigen::MatrixXd> truth;
};

ExperimentUnit prepare_unit(const ExperimentConfig& cfg, double ratio, std::uint64_t seed);

// The default tau alpha sqrt(d1 d2 r) and alpha, resolved against cfg.
ConstraintSet resolve_constraints(const ExperimentConfig& cfg, Index d1, Index d2);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_budget_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& in);

struct AggregateRow {
  std::string dataset;
  std::string link;
  std::string metric;
  std::string mechanism;
  double epsilon = 0;
  double ratio = 0;
  double mean = 0;
  double stddev = 0;  // sample standard deviation, 0 for a single seed
  std::size_t n = 0;
};

// Mean and spread over seeds per (dataset, link, metric, mechanism, epsilon, ratio).
std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows);

// One file per (dataset, link, metric) in `dir`; returns the written paths.
// Throws DataError on empty input without writing anything.
std::vector<std::filesystem::path> write_plot_data(const std::vector<ResultRow>& rows,
                                                   const std::filesystem::path& dir);

}  // namespace dpobmc

#endif  // DPOBMC_EXPERIMENT_HPP
