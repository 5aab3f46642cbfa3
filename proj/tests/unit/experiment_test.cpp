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

#include "dpobmc/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

namespace dpobmc {
namespace {

namespace fs = std::filesystem;

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.synthetic.d1 = 12;
  cfg.synthetic.d2 = 10;
  cfg.epsilons = {1, 5};
  cfg.ratios = {0.4};
  cfg.seeds = {1, 2};
  cfg.gradient_steps = 10;
  return cfg;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dpobmc_exp_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(ExperimentConfigTest, Validation) {
  ExperimentConfig cfg = small_config();
  EXPECT_NO_THROW(cfg.validate());
  cfg.seeds = {};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.seeds = {3, 3};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.epsilons = {};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.mechanisms = {};
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(ExperimentConfigTest, DefaultRadius) {
  ExperimentConfig cfg = small_config();
  cfg.synthetic.rank = 2;
  cfg.synthetic.alpha = 1.5;
  const ConstraintSet cs = resolve_constraints(cfg, 12, 10);
  EXPECT_DOUBLE_EQ(cs.alpha, 1.5);
  EXPECT_NEAR(cs.tau, 1.5 * std::sqrt(12.0 * 10.0 * 2.0), 1e-12);
  cfg.tau = 3.0;
  EXPECT_EQ(resolve_constraints(cfg, 12, 10).tau, 3.0);
}

TEST(RunExperimentTest, GridOrderAndRowCount) {
  const ExperimentConfig cfg = small_config();
  const std::vector<ResultRow> rows = run_experiment(cfg);
  ASSERT_EQ(rows.size(), 5u * 2u * 2u);
  std::size_t k = 0;
  for (std::uint64_t seed : cfg.seeds) {
    for (Mechanism m : cfg.mechanisms) {
      for (double eps : cfg.epsilons) {
        EXPECT_EQ(rows[k].seed, seed);
        EXPECT_EQ(rows[k].mechanism, m);
        EXPECT_EQ(rows[k].epsilon, eps);
        EXPECT_EQ(rows[k].metric, "ARE");
        EXPECT_TRUE(std::isfinite(rows[k].value));
        ++k;
      }
    }
  }
}

TEST(RunExperimentTest, BudgetColumns) {
  const std::vector<ResultRow> rows = run_experiment(small_config());
  for (const ResultRow& r : rows) {
    switch (r.mechanism) {
      case Mechanism::Clear:
        EXPECT_EQ(r.budget_steps, 0);
        EXPECT_EQ(r.epsilon_spent, 0.0);
        break;
      case Mechanism::Gradient:
        EXPECT_EQ(r.budget_steps, 10);
        EXPECT_NEAR(r.epsilon_spent, r.epsilon, 1e-12);
        break;
      default:
        EXPECT_EQ(r.budget_steps, 1);
        EXPECT_EQ(r.epsilon_spent, r.epsilon);
    }
  }
}

TEST(RunExperimentTest, ClearIsSharedAcrossEpsilon) {
  const std::vector<ResultRow> rows = run_experiment(small_config());
  EXPECT_EQ(rows[0].mechanism, Mechanism::Clear);
  EXPECT_EQ(rows[0].value, rows[1].value);
}

TEST(RunExperimentTest, ClearOnlyWritesInfiniteEpsilon) {
  ExperimentConfig cfg = small_config();
  cfg.mechanisms = {Mechanism::Clear};
  cfg.seeds = {4};
  const std::vector<ResultRow> rows = run_experiment(cfg);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(std::isinf(rows[0].epsilon));
  EXPECT_TRUE(std::isfinite(rows[0].value));
}

TEST(RunExperimentTest, DeterministicAndThreadInvariant) {
  ExperimentConfig cfg = small_config();
  cfg.seeds = {1, 2, 3};
  const std::vector<ResultRow> a = run_experiment(cfg);
  cfg.threads = 3;
  const std::vector<ResultRow> b = run_experiment(cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].value, b[k].value) << k;
    EXPECT_EQ(a[k].mechanism, b[k].mechanism);
    EXPECT_EQ(a[k].seed, b[k].seed);
  }
}

TEST(RunExperimentTest, DefaultGridRowCount) {
  ExperimentConfig cfg;
  cfg.synthetic.d1 = 6;
  cfg.synthetic.d2 = 6;
  cfg.ratios = {0.5};
  for (std::uint64_t s = 1; s <= 40; ++s) cfg.seeds.push_back(s);
  cfg.gradient_steps = 5;
  EXPECT_EQ(run_experiment(cfg).size(), 5u * 10u * 40u);
}

TEST(RunExperimentTest, RatioSweepChangesUnits) {
  ExperimentConfig cfg = small_config();
  cfg.mechanisms = {Mechanism::Clear, Mechanism::Output};
  cfg.epsilons = {6};
  cfg.ratios = {0.2, 0.8};
  cfg.seeds = {1};
  const std::vector<ResultRow> rows = run_experiment(cfg);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].ratio, 0.2);
  EXPECT_EQ(rows[2].ratio, 0.8);
  EXPECT_EQ(prepare_unit(cfg, 0.2, 1).truth->rows(), 12);
}

TEST(RunExperimentTest, MovieLensDirectory) {
  const fs::path dir = scratch("ml");
  std::mt19937 gen(3);
  std::uniform_int_distribution<int> rating(1, 5);
  std::ofstream base(dir / "u1.base"), test(dir / "u1.test");
  for (int u = 1; u <= 12; ++u) {
    for (int i = 1; i <= 9; ++i) {
      ((u + i) % 4 == 0 ? test : base) << u << '\t' << i << '\t' << rating(gen) << "\t8800000" << u << '\n';
    }
  }
  base.close();
  test.close();
  ExperimentConfig cfg;
  cfg.dataset = DatasetKind::MovieLens;
  cfg.dataset_path = dir;
  cfg.mechanisms = {Mechanism::Clear, Mechanism::Input};
  cfg.epsilons = {4};
  cfg.seeds = {1, 2};
  const std::vector<ResultRow> rows = run_experiment(cfg);
  ASSERT_EQ(rows.size(), 4u);
  for (const ResultRow& r : rows) {
    EXPECT_EQ(r.dataset, "ml100k");
    EXPECT_EQ(r.metric, "Acc");
    EXPECT_GE(r.value, 0.0);
    EXPECT_LE(r.value, 1.0);
    EXPECT_GT(r.ratio, 0.5);
    EXPECT_LT(r.ratio, 1.0);
  }
  fs::remove_all(dir);
}

TEST(RunExperimentTest, MissingDatasetIsDataError) {
  ExperimentConfig cfg;
  cfg.dataset = DatasetKind::MovieLens;
  cfg.dataset_path = "/nonexistent/ml-100k";
  cfg.seeds = {1};
  EXPECT_THROW(run_experiment(cfg), DataError);
}

TEST(ResultsCsvTest, RoundTrip) {
  ExperimentConfig cfg = small_config();
  cfg.mechanisms = {Mechanism::Clear, Mechanism::Gradient};
  const std::vector<ResultRow> rows = run_experiment(cfg);
  std::stringstream buffer;
  write_results_csv(buffer, rows);
  const std::string text = buffer.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "dataset,mechanism,link,epsilon,ratio,seed,metric,value,wall_ms");
  const std::vector<ResultRow> back = read_results_csv(buffer);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(back[k].value, rows[k].value);
    EXPECT_EQ(back[k].epsilon, rows[k].epsilon);
    EXPECT_EQ(back[k].mechanism, rows[k].mechanism);
  }
  std::stringstream budget;
  write_budget_csv(budget, rows);
  std::string header;
  std::getline(budget, header);
  EXPECT_EQ(header, "dataset,mechanism,link,epsilon,ratio,seed,steps,epsilon_spent");
}

TEST(ResultsCsvTest, SchemaMismatchRejected) {
  std::stringstream bad("dataset,mechanism,eps\nsynthetic,Clear,1\n");
  EXPECT_THROW(read_results_csv(bad), DataError);
  std::stringstream malformed(
      "dataset,mechanism,link,epsilon,ratio,seed,metric,value,wall_ms\nsynthetic,Clear,logistic,x,0.15,1,ARE,1,0\n");
  EXPECT_THROW(read_results_csv(malformed), DataError);
}

ResultRow make_row(Mechanism m, double eps, std::uint64_t seed, double value) {
  return ResultRow{"synthetic", m, LinkKind::Logistic, eps, 0.15, seed, "ARE", value, 1.0, 0, 0};
}

TEST(AggregateTest, MeanAndSampleStd) {
  const std::vector<ResultRow> rows{make_row(Mechanism::Input, 1, 1, 1.0), make_row(Mechanism::Input, 1, 2, 2.0),
                                    make_row(Mechanism::Input, 1, 3, 3.0), make_row(Mechanism::Output, 1, 1, 5.0)};
  const std::vector<AggregateRow> agg = aggregate(rows);
  ASSERT_EQ(agg.size(), 2u);
  for (const AggregateRow& a : agg) {
    if (a.mechanism == "InP") {
      EXPECT_DOUBLE_EQ(a.mean, 2.0);
      EXPECT_DOUBLE_EQ(a.stddev, 1.0);
      EXPECT_EQ(a.n, 3u);
    } else {
      EXPECT_EQ(a.mechanism, "OutP");
      EXPECT_EQ(a.stddev, 0.0);
    }
  }
}

TEST(PlotDataTest, WritesOneFilePerSeries) {
  const fs::path dir = scratch("plot");
  const std::vector<ResultRow> rows{make_row(Mechanism::Input, 1, 1, 1.0), make_row(Mechanism::Input, 1, 2, 3.0)};
  const auto written = write_plot_data(rows, dir);
  ASSERT_EQ(written.size(), 1u);
  std::ifstream in(written[0]);
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  EXPECT_EQ(header, "mechanism,epsilon,ratio,mean,std,n");
  EXPECT_EQ(line.substr(0, line.find(",", line.find(",", line.find(",") + 1) + 1)), "InP,1,0.15");
  EXPECT_NE(line.find(",2,"), std::string::npos);
  fs::remove_all(dir);
}

TEST(PlotDataTest, EmptyInputWritesNothing) {
  const fs::path dir = scratch("plot_empty");
  EXPECT_THROW(write_plot_data({}, dir), DataError);
  EXPECT_TRUE(fs::is_empty(dir));
  fs::remove_all(dir);
}

}  // namespace
}  // namespace dpobmc
