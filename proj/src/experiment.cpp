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

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "dpobmc/errors.hpp"
#include "dpobmc/mechanisms.hpp"
#include "dpobmc/metrics.hpp"

namespace dpobmc {

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::Synthetic: return "synthetic";
    case DatasetKind::MovieLens: return "ml100k";
    case DatasetKind::Restaurant: return "rc";
  }
  return "?";
}

DatasetKind parse_dataset_kind(std::string_view name) {
  if (name == "synthetic" || name == "synth") return DatasetKind::Synthetic;
  if (name == "ml100k" || name == "ml-100k" || name == "movielens") return DatasetKind::MovieLens;
  if (name == "rc" || name == "restaurant") return DatasetKind::Restaurant;
  throw ConfigError("unknown dataset '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (mechanisms.empty()) throw ConfigError("mechanism list is empty");
  if (epsilons.empty()) throw ConfigError("epsilon grid is empty");
  if (ratios.empty()) throw ConfigError("ratio grid is empty");
  if (seeds.empty()) throw ConfigError("seed list is empty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("seeds must be distinct");
  }
  if (std::set<Mechanism>(mechanisms.begin(), mechanisms.end()).size() != mechanisms.size()) {
    throw ConfigError("mechanisms must be distinct");
  }
  for (double e : epsilons)
    if (!(e > 0)) throw ConfigError("epsilon values must be > 0");
  for (double r : ratios)
    if (!(r > 0 && r <= 1)) throw ConfigError("observation ratios must lie in (0, 1]");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (rank < 1) throw ConfigError("rank must be >= 1");
  if (alpha && !(*alpha > 0)) throw ConfigError("alpha must be > 0");
  if (tau && !(*tau > 0 && std::isfinite(*tau))) throw ConfigError("tau must be finite and > 0");
  model.validate();
  solver.validate();
  PrivacySpec grap{Mechanism::Gradient, 1.0, {}, {}, gradient_steps, gradient_clamp};
  grap.validate();
  if (dataset == DatasetKind::Synthetic) {
    const auto& s = synthetic;
    if (s.d1 <= 0 || s.d2 <= 0) throw ConfigError("matrix dimensions must be positive");
    if (s.rank < 1 || s.rank > std::min(s.d1, s.d2)) throw ConfigError("rank must lie in [1, min(d1, d2)]");
    if (!(s.alpha > 0 && std::isfinite(s.alpha))) throw ConfigError("synthetic alpha must be finite and > 0");
  } else if (dataset_path.empty()) {
    throw ConfigError("real-data runs need a dataset path");
  }
}

ConstraintSet resolve_constraints(const ExperimentConfig& cfg, Index d1, Index d2) {
  const bool synth = cfg.dataset == DatasetKind::Synthetic;
  const double alpha = cfg.alpha.value_or(synth ? cfg.synthetic.alpha : 1.0);
  const int rank = synth ? cfg.synthetic.rank : cfg.rank;
  const double tau = cfg.tau.value_or(alpha * std::sqrt(static_cast<double>(d1) * static_cast<double>(d2) * rank));
  ConstraintSet cs{tau, alpha};
  cs.validate();
  return cs;
}

namespace {

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

enum Stream : std::uint64_t { kTruth = 1, kSampling = 2, kSplit = 3, kMechanismBase = 10 };

struct Tables {
  std::optional<RatingsTable> train;
  std::optional<RatingsTable> test;
  std::optional<BinarySplit> fixed_split;
};

Tables load_tables(const ExperimentConfig& cfg) {
  Tables t;
  const auto& path = cfg.dataset_path;
  if (!std::filesystem::exists(path)) throw DataError("dataset path not found: " + path.string());
  if (cfg.dataset == DatasetKind::MovieLens) {
    if (std::filesystem::is_directory(path)) {
      t.train = load_movielens(path / cfg.base_file);
      t.test = load_movielens(path / cfg.test_file);
    } else {
      t.train = load_movielens(path);
    }
  } else {
    t.train = load_rc(path);
  }
  return t;
}

ExperimentUnit unit_from_tables(const ExperimentConfig& cfg, const Tables& t, std::uint64_t seed) {
  ExperimentUnit unit;
  if (cfg.dataset == DatasetKind::MovieLens && t.test) {
    BinarySplit split = binarize_mean_threshold(*t.train, *t.test);
    unit.train = std::move(split.train);
    unit.test = std::move(split.test);
    return unit;
  }
  // Single-file MovieLens and RC: random 8:2 record split per seed.
  RngHandle rng = RngHandle(seed).derive(kSplit);
  BinarySplit split;
  if (cfg.dataset == DatasetKind::Restaurant) {
    split = binarize_rc(*t.train, rng);
  } else {
    const ObservationSet all = binarize_mean_threshold(*t.train);
    split.train = ObservationSet(all.rows(), all.cols());
    split.test = ObservationSet(all.rows(), all.cols());
    std::vector<std::size_t> order(all.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    for (std::size_t k = order.size(); k-- > 1;) {
      std::swap(order[k], order[static_cast<std::size_t>(rng.uniform() * static_cast<double>(k + 1))]);
    }
    const auto n_train = static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(order.size())));
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto& e = all[order[k]];
      (k < n_train ? split.train : split.test).add(e.row, e.col, e.value);
    }
  }
  unit.train = std::move(split.train);
  unit.test = std::move(split.test);
  return unit;
}

ExperimentUnit synthetic_unit(const ExperimentConfig& cfg, double ratio, std::uint64_t seed) {
  const auto& s = cfg.synthetic;
  RngHandle truth_rng = RngHandle(seed).derive(kTruth);
  GroundTruth gt = gen_synthetic(s.d1, s.d2, s.rank, s.alpha, truth_rng, s.scaling);
  RngHandle sample_rng = RngHandle(seed).derive(kSampling).derive(bits(ratio));
  ExperimentUnit unit;
  unit.train = sample_observations(gt.m, ratio, cfg.model, sample_rng, s.sampling);
  unit.truth = std::move(gt.m);
  return unit;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

RunConfig run_config(const ExperimentConfig& cfg, const ConstraintSet& cs, Mechanism m, double eps,
                     double ratio, std::uint64_t seed) {
  RunConfig rc;
  rc.privacy.mechanism = m;
  rc.privacy.epsilon = eps;
  if (m == Mechanism::Gradient) {
    rc.privacy.iterations = cfg.gradient_steps;
    rc.privacy.clamp = cfg.gradient_clamp;
  }
  rc.model = cfg.model;
  rc.constraints = cs;
  rc.projection = cfg.projection;
  rc.solver = cfg.solver;
  rc.rng = RngHandle(seed).derive(kMechanismBase + static_cast<std::uint64_t>(m)).derive(bits(eps)).derive(bits(ratio));
  return rc;
}

std::vector<ResultRow> run_unit(const ExperimentConfig& cfg, const ExperimentUnit& unit, double ratio,
                                std::uint64_t seed) {
  const ObservationSet& obs = unit.train;
  const ConstraintSet cs = resolve_constraints(cfg, obs.rows(), obs.cols());
  const bool synth = unit.truth.has_value();
  const double ratio_col = synth ? ratio
                                 : static_cast<double>(obs.size()) /
                                       (static_cast<double>(obs.rows()) * static_cast<double>(obs.cols()));

  auto score = [&](const Eigen::MatrixXd& estimate) {
    return synth ? are(estimate, *unit.truth) : sign_accuracy(estimate, unit.test);
  };
  auto row = [&](Mechanism m, double eps, double value, double ms, int steps, double spent) {
    return ResultRow{std::string(to_string(cfg.dataset)), m, cfg.model.kind, eps, ratio_col, seed,
                     synth ? "ARE" : "Acc", value, ms, steps, spent};
  };

  const auto has = [&](Mechanism m) {
    return std::find(cfg.mechanisms.begin(), cfg.mechanisms.end(), m) != cfg.mechanisms.end();
  };
  std::optional<SolverResult> clean;
  double clean_ms = 0;
  if (has(Mechanism::Clear) || has(Mechanism::Output)) {
    const auto t0 = std::chrono::steady_clock::now();
    clean = run_clear(obs, run_config(cfg, cs, Mechanism::Clear, 0, ratio, seed)).solver;
    clean_ms = elapsed_ms(t0);
  }

  std::vector<ResultRow> rows;
  for (Mechanism m : cfg.mechanisms) {
    if (m == Mechanism::Clear) {
      const double value = score(clean->solution);
      if (cfg.mechanisms.size() == 1) {
        rows.push_back(row(m, std::numeric_limits<double>::infinity(), value, clean_ms, 0, 0));
      } else {
        for (double eps : cfg.epsilons) rows.push_back(row(m, eps, value, clean_ms, 0, 0));
      }
      continue;
    }
    for (double eps : cfg.epsilons) {
      const RunConfig rc = run_config(cfg, cs, m, eps, ratio, seed);
      const auto t0 = std::chrono::steady_clock::now();
      MechanismResult res = m == Mechanism::Output ? perturb_output(*clean, rc) : run_mechanism(obs, rc);
      double ms = elapsed_ms(t0);
      if (m == Mechanism::Output) ms += clean_ms;
      rows.push_back(row(m, eps, score(res.estimate), ms, static_cast<int>(res.step_budgets.size()),
                         res.epsilon_spent));
    }
  }
  return rows;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_ms(double v) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(3);
  s << v;
  return s.str();
}

double parse_number(const std::string& field, long line) {
  if (field == "inf") return std::numeric_limits<double>::infinity();
  if (field == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw DataError("malformed number '" + field + "' in result file", line);
  }
  return v;
}

}  // namespace

ExperimentUnit prepare_unit(const ExperimentConfig& cfg, double ratio, std::uint64_t seed) {
  if (cfg.dataset == DatasetKind::Synthetic) return synthetic_unit(cfg, ratio, seed);
  return unit_from_tables(cfg, load_tables(cfg), seed);
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Tables tables;
  if (cfg.dataset != DatasetKind::Synthetic) tables = load_tables(cfg);
  const std::vector<double> ratios =
      cfg.dataset == DatasetKind::Synthetic ? cfg.ratios : std::vector<double>{cfg.ratios.front()};

  std::vector<std::pair<double, std::uint64_t>> tasks;
  for (double r : ratios)
    for (std::uint64_t s : cfg.seeds) tasks.emplace_back(r, s);

  std::vector<std::vector<ResultRow>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      try {
        const auto [ratio, seed] = tasks[k];
        const ExperimentUnit unit = cfg.dataset == DatasetKind::Synthetic
                                        ? synthetic_unit(cfg, ratio, seed)
                                        : unit_from_tables(cfg, tables, seed);
        results[k] = run_unit(cfg, unit, ratio, seed);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks.size();
      }
    }
  };
  const int n_threads = std::min<int>(cfg.threads, static_cast<int>(tasks.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<ResultRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultHeader << '\n';
  for (const auto& r : rows) {
    out << r.dataset << ',' << to_string(r.mechanism) << ',' << to_string(r.link) << ','
        << format_double(r.epsilon) << ',' << format_double(r.ratio) << ',' << r.seed << ',' << r.metric
        << ',' << format_double(r.value) << ',' << format_ms(r.wall_ms) << '\n';
  }
}

void write_budget_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kBudgetHeader << '\n';
  for (const auto& r : rows) {
    out << r.dataset << ',' << to_string(r.mechanism) << ',' << to_string(r.link) << ','
        << format_double(r.epsilon) << ',' << format_double(r.ratio) << ',' << r.seed << ','
        << r.budget_steps << ',' << format_double(r.epsilon_spent) << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("result file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultHeader) throw DataError("result file header mismatch: '" + line + "'", 1);
  std::vector<ResultRow> rows;
  long number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 9) throw DataError("expected 9 columns in result file", number);
    ResultRow r;
    r.dataset = f[0];
    try {
      r.mechanism = parse_mechanism(f[1]);
      r.link = parse_link_kind(f[2]);
    } catch (const Error& e) {
      throw DataError(e.what(), number);
    }
    r.epsilon = parse_number(f[3], number);
    r.ratio = parse_number(f[4], number);
    const double seed = parse_number(f[5], number);
    if (seed < 0 || seed != std::floor(seed)) throw DataError("seed must be a non-negative integer", number);
    r.seed = static_cast<std::uint64_t>(seed);
    r.metric = f[6];
    r.value = parse_number(f[7], number);
    r.wall_ms = parse_number(f[8], number);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::string, std::string, std::string, int, double, double>;
  std::map<Key, std::vector<double>> groups;
  std::map<Key, std::string> names;
  for (const auto& r : rows) {
    Key key{r.dataset, std::string(to_string(r.link)), r.metric, static_cast<int>(r.mechanism),
            r.epsilon, r.ratio};
    groups[key].push_back(r.value);
    names[key] = std::string(to_string(r.mechanism));
  }
  std::vector<AggregateRow> out;
  for (const auto& [key, values] : groups) {
    AggregateRow a;
    std::tie(a.dataset, a.link, a.metric, std::ignore, a.epsilon, a.ratio) = key;
    a.mechanism = names[key];
    a.n = values.size();
    double sum = 0;
    for (double v : values) sum += v;
    a.mean = sum / static_cast<double>(a.n);
    if (a.n > 1) {
      double ss = 0;
      for (double v : values) ss += (v - a.mean) * (v - a.mean);
      a.stddev = std::sqrt(ss / static_cast<double>(a.n - 1));
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<std::filesystem::path> write_plot_data(const std::vector<ResultRow>& rows,
                                                   const std::filesystem::path& dir) {
  if (rows.empty()) throw DataError("no result rows to aggregate");
  const auto agg = aggregate(rows);
  std::map<std::string, std::vector<const AggregateRow*>> files;
  for (const auto& a : agg) files[a.dataset + "_" + a.link + "_" + a.metric].push_back(&a);
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [stem, entries] : files) {
    const auto path = dir / (stem + ".csv");
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "mechanism,epsilon,ratio,mean,std,n\n";
    for (const auto* a : entries) {
      out << a->mechanism << ',' << format_double(a->epsilon) << ',' << format_double(a->ratio) << ','
          << format_double(a->mean) << ',' << format_double(a->stddev) << ',' << a->n << '\n';
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace dpobmc
