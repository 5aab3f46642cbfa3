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

// Experiment runner: synth, real, sweep-ratio, plotdata.

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "dpobmc/errors.hpp"
#include "dpobmc/experiment.hpp"
#include "dpobmc/mechanisms.hpp"

namespace {

using namespace dpobmc;

enum ExitCode { kOk = 0, kConfig = 2, kData = 3, kNumerical = 4 };

struct Options {
  std::vector<std::uint64_t> seeds;
  std::vector<double> eps;
  std::vector<std::string> mechanisms;
  std::vector<double> ratios;
  std::string out;
  std::string dataset;
  std::string link = "logistic";
  double sigma = 1;
  std::string projection = "intersection";
  Index d1 = 100, d2 = 100;
  int rank = 1;
  double synth_alpha = 1;
  std::optional<double> alpha, tau;
  std::string scaling = "signed_max";
  std::string sampling = "bernoulli";
  int iters = 500;
  double tol = 1e-6;
  int gp_iters = kDefaultGradientSteps;
  double clamp = kDefaultGradientClamp;
  int threads = 1;
  std::string dump_truth;
  std::string base_file = "u1.base", test_file = "u1.test";
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--seeds", o.seeds, "Seed list");
  cmd->add_option("--eps", o.eps, "Epsilon grid");
  cmd->add_option("--mechanisms", o.mechanisms, "Subset of Clear, InP, ObjP, GraP, OutP");
  cmd->add_option("--out", o.out, "Result CSV path")->required();
  cmd->add_option("--link", o.link, "logistic or gaussian");
  cmd->add_option("--sigma", o.sigma, "Gaussian noise scale");
  cmd->add_option("--projection", o.projection, "intersection, dykstra or nuclear_only");
  cmd->add_option("--alpha", o.alpha, "Entrywise bound of the constraint set");
  cmd->add_option("--tau", o.tau, "Nuclear-norm radius (default alpha sqrt(d1 d2 r))");
  cmd->add_option("--iters", o.iters, "SPG iteration cap");
  cmd->add_option("--tol", o.tol, "SPG relative objective tolerance");
  cmd->add_option("--gp-iters", o.gp_iters, "Gradient perturbation steps K");
  cmd->add_option("--clamp", o.clamp, "Gradient perturbation clamp C");
  cmd->add_option("--threads", o.threads, "Worker threads");
}

void add_synthetic(CLI::App* cmd, Options& o) {
  cmd->add_option("--d1", o.d1, "Rows");
  cmd->add_option("--d2", o.d2, "Columns");
  cmd->add_option("--rank", o.rank, "Rank of the ground truth");
  cmd->add_option("--truth-alpha", o.synth_alpha, "Largest entry of the ground truth");
  cmd->add_option("--scaling", o.scaling, "signed_max or abs_max");
  cmd->add_option("--sampling", o.sampling, "bernoulli or exact_count");
  cmd->add_option("--dump-truth", o.dump_truth, "Write the first seed's ground truth as CSV");
}

std::vector<double> seq(double first, double last, double step) {
  std::vector<double> v;
  for (int k = 0; first + k * step <= last + step / 2; ++k) {
    v.push_back(std::round((first + k * step) * 1e9) / 1e9);
  }
  return v;
}

ExperimentConfig build(const Options& o, DatasetKind kind, std::vector<std::uint64_t> default_seeds,
                       std::vector<double> default_eps, std::vector<double> default_ratios) {
  ExperimentConfig cfg;
  cfg.dataset = kind;
  cfg.seeds = o.seeds.empty() ? std::move(default_seeds) : o.seeds;
  cfg.epsilons = o.eps.empty() ? std::move(default_eps) : o.eps;
  cfg.ratios = o.ratios.empty() ? std::move(default_ratios) : o.ratios;
  if (!o.mechanisms.empty()) {
    cfg.mechanisms.clear();
    for (const auto& m : o.mechanisms) cfg.mechanisms.push_back(parse_mechanism(m));
  }
  const LinkKind link = parse_link_kind(o.link);
  cfg.model = link == LinkKind::Logistic ? LinkModel::logistic() : LinkModel{LinkKind::Gaussian, o.sigma};
  cfg.projection = parse_projection_mode(o.projection);
  cfg.alpha = o.alpha;
  cfg.tau = o.tau;
  cfg.rank = o.rank;
  cfg.solver.max_iters = o.iters;
  cfg.solver.tol_obj = o.tol;
  cfg.gradient_steps = o.gp_iters;
  cfg.gradient_clamp = o.clamp;
  cfg.threads = o.threads;
  cfg.synthetic.d1 = o.d1;
  cfg.synthetic.d2 = o.d2;
  cfg.synthetic.rank = o.rank;
  cfg.synthetic.alpha = o.synth_alpha;
  if (o.scaling == "signed_max") cfg.synthetic.scaling = TruthScaling::SignedMax;
  else if (o.scaling == "abs_max") cfg.synthetic.scaling = TruthScaling::AbsMax;
  else throw ConfigError("unknown scaling '" + o.scaling + "'");
  if (o.sampling == "bernoulli") cfg.synthetic.sampling = SamplingRule::Bernoulli;
  else if (o.sampling == "exact_count") cfg.synthetic.sampling = SamplingRule::ExactCount;
  else throw ConfigError("unknown sampling rule '" + o.sampling + "'");
  cfg.dataset_path = o.dataset;
  cfg.base_file = o.base_file;
  cfg.test_file = o.test_file;
  cfg.validate();
  return cfg;
}

void run_and_write(const ExperimentConfig& cfg, const Options& o) {
  if (!o.dump_truth.empty()) {
    export_matrix_csv(*prepare_unit(cfg, cfg.ratios.front(), cfg.seeds.front()).truth, o.dump_truth);
  }
  const auto rows = run_experiment(cfg);
  std::ofstream out(o.out);
  if (!out) throw DataError("cannot write " + o.out);
  write_results_csv(out, rows);
  const std::filesystem::path out_path(o.out);
  const auto budget_path = out_path.parent_path() / (out_path.stem().string() + "_budget.csv");
  std::ofstream budget(budget_path);
  if (!budget) throw DataError("cannot write " + budget_path.string());
  write_budget_csv(budget, rows);
  std::cerr << rows.size() << " rows written to " << o.out << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private one-bit matrix completion experiments"};
  app.set_config("--config", "", "INI config; sections name subcommands");
  app.require_subcommand(1);
  Options o;

  auto* synth = app.add_subcommand("synth", "Synthetic epsilon sweep (ARE)");
  add_common(synth, o);
  add_synthetic(synth, o);
  synth->add_option("--ratio", o.ratios, "Observation ratio");

  auto* real = app.add_subcommand("real", "Real-data epsilon sweep (Acc)");
  add_common(real, o);
  std::string real_kind = "ml100k";
  real->add_option("--dataset", o.dataset, "MovieLens directory or u.data file, or RC csv")->required();
  real->add_option("--kind", real_kind, "ml100k or rc");
  real->add_option("--rank", o.rank, "Rank used for the default tau");
  real->add_option("--base", o.base_file, "MovieLens training file name");
  real->add_option("--test", o.test_file, "MovieLens test file name");

  auto* sweep = app.add_subcommand("sweep-ratio", "Synthetic observation-ratio sweep (ARE)");
  add_common(sweep, o);
  add_synthetic(sweep, o);
  sweep->add_option("--ratio", o.ratios, "Observation ratio grid");

  auto* plot = app.add_subcommand("plotdata", "Aggregate a result CSV into plot-ready files");
  std::string input, outdir;
  plot->add_option("input", input, "Result CSV")->required();
  plot->add_option("--out", outdir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    std::vector<std::uint64_t> seeds40(40), seeds10(10);
    std::iota(seeds40.begin(), seeds40.end(), 1);
    std::iota(seeds10.begin(), seeds10.end(), 1);
    const auto eps_grid = seq(1.0, 10.0, 1.0);
    if (*synth) {
      run_and_write(build(o, DatasetKind::Synthetic, seeds40, eps_grid, {0.15}), o);
    } else if (*real) {
      run_and_write(build(o, parse_dataset_kind(real_kind), seeds10, eps_grid, {1.0}), o);
    } else if (*sweep) {
      run_and_write(build(o, DatasetKind::Synthetic, seeds10, {6.0}, seq(0.2, 0.8, 0.1)), o);
    } else if (*plot) {
      std::ifstream in(input);
      if (!in) throw DataError("cannot open " + input);
      for (const auto& p : write_plot_data(read_results_csv(in), outdir)) std::cout << p.string() << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
