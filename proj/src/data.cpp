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

#include "dpobmc/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "dpobmc/errors.hpp"

namespace dpobmc {

GroundTruth gen_synthetic(Index d1, Index d2, int rank, double alpha, RngHandle& rng,
                          TruthScaling scaling) {
  if (d1 <= 0 || d2 <= 0) throw ConfigError("matrix dimensions must be positive");
  if (rank < 1 || rank > std::min(d1, d2)) throw ConfigError("rank must lie in [1, min(d1, d2)]");
  if (!(alpha > 0) || std::isinf(alpha)) throw ConfigError("alpha must be finite and > 0");

  Eigen::MatrixXd left(d1, rank);
  Eigen::MatrixXd right(d2, rank);
  for (Index i = 0; i < d1; ++i)
    for (Index k = 0; k < rank; ++k) left(i, k) = rng.uniform() - 0.5;
  for (Index j = 0; j < d2; ++j)
    for (Index k = 0; k < rank; ++k) right(j, k) = rng.uniform() - 0.5;

  GroundTruth gt;
  gt.m = left * right.transpose();
  const double peak = scaling == TruthScaling::SignedMax ? gt.m.maxCoeff() : gt.m.cwiseAbs().maxCoeff();
  if (!(peak > 0)) {
    throw NumericalError("synthetic matrix has no positive entry to scale by");
  }
  gt.m *= alpha / peak;
  gt.rank = rank;
  gt.alpha = alpha;
  return gt;
}

ObservationSet sample_observations(const Eigen::MatrixXd& m, double ratio, const LinkModel& model,
                                   RngHandle& rng, SamplingRule rule) {
  if (!(ratio > 0 && ratio <= 1)) throw ConfigError("observation ratio must lie in (0, 1]");
  model.validate();
  ObservationSet obs(m.rows(), m.cols());
  auto draw = [&](Index i, Index j) {
    obs.add(i, j, rng.uniform() < link_value(model, m(i, j)) ? 1 : -1);
  };
  if (rule == SamplingRule::Bernoulli) {
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j)
        if (rng.uniform() < ratio) draw(i, j);
    return obs;
  }
  const Index total = m.rows() * m.cols();
  const auto count = static_cast<Index>(std::llround(ratio * static_cast<double>(total)));
  std::vector<Index> cells(static_cast<std::size_t>(total));
  std::iota(cells.begin(), cells.end(), Index{0});
  for (Index k = 0; k < count; ++k) {
    const auto pick = k + static_cast<Index>(rng.uniform() * static_cast<double>(total - k));
    std::swap(cells[static_cast<std::size_t>(k)], cells[static_cast<std::size_t>(pick)]);
  }
  cells.resize(static_cast<std::size_t>(count));
  std::sort(cells.begin(), cells.end());
  for (Index cell : cells) draw(cell / m.cols(), cell % m.cols());
  return obs;
}

std::size_t RatingsTable::user_count() const {
  std::unordered_set<std::string> ids;
  for (const auto& r : records) ids.insert(r.user);
  return ids.size();
}

std::size_t RatingsTable::item_count() const {
  std::unordered_set<std::string> ids;
  for (const auto& r : records) ids.insert(r.item);
  return ids.size();
}

namespace {

std::optional<long long> parse_int(std::string_view s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\"");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\"");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("file not found: " + path.string());
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::vector<std::string> ids_of(const std::vector<const RatingsTable*>& tables, bool users) {
  std::vector<std::string> ids;
  for (const auto* t : tables)
    for (const auto& r : t->records) ids.push_back(users ? r.user : r.item);
  return ids;
}

void add_rating(ObservationSet& obs, const BinarySplit& split, const RatingRecord& r, int value) {
  try {
    obs.add(split.users.at(r.user), split.items.at(r.item), value);
  } catch (const DomainError&) {
    throw DataError("duplicate rating for user " + r.user + ", item " + r.item);
  }
}

}  // namespace

IdIndex::IdIndex(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const bool numeric = std::all_of(ids.begin(), ids.end(),
                                   [](const std::string& s) { return parse_int(s).has_value(); });
  if (numeric) {
    std::sort(ids.begin(), ids.end(), [](const std::string& a, const std::string& b) {
      return *parse_int(a) < *parse_int(b);
    });
  }
  names_ = std::move(ids);
  for (std::size_t k = 0; k < names_.size(); ++k) lookup_.emplace(names_[k], static_cast<Index>(k));
}

Index IdIndex::at(const std::string& id) const {
  const auto it = lookup_.find(id);
  if (it == lookup_.end()) throw DataError("unknown id '" + id + "'");
  return it->second;
}

RatingsTable load_movielens(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  RatingsTable table;
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    for (auto f : split(line, '\t')) fields.emplace_back(f);
    if (fields.size() == 1) {
      std::istringstream ws(line);
      fields.assign(std::istream_iterator<std::string>(ws), {});
    }
    if (fields.size() != 4) throw DataError("expected 4 fields in " + path.string(), number);
    const auto user = parse_int(fields[0]);
    const auto item = parse_int(fields[1]);
    const auto rating = parse_int(fields[2]);
    const auto stamp = parse_int(fields[3]);
    if (!user || !item || !rating || !stamp) {
      throw DataError("non-integer field in " + path.string(), number);
    }
    table.records.push_back({fields[0], fields[1], static_cast<double>(*rating), *stamp});
  }
  if (table.records.empty()) throw DataError("no ratings in " + path.string());
  return table;
}

BinarySplit binarize_mean_threshold(const RatingsTable& train, const RatingsTable& test) {
  const std::vector<const RatingsTable*> both{&train, &test};
  BinarySplit split;
  split.users = IdIndex(ids_of(both, true));
  split.items = IdIndex(ids_of(both, false));
  const std::size_t n = train.records.size() + test.records.size();
  if (n == 0) throw DataError("no ratings to binarize");
  double sum = 0;
  for (const auto* t : both)
    for (const auto& r : t->records) sum += r.rating;
  split.threshold = sum / static_cast<double>(n);

  split.train = ObservationSet(split.users.size(), split.items.size());
  split.test = ObservationSet(split.users.size(), split.items.size());
  for (const auto& r : train.records) add_rating(split.train, split, r, r.rating < split.threshold ? -1 : 1);
  for (const auto& r : test.records) add_rating(split.test, split, r, r.rating < split.threshold ? -1 : 1);
  return split;
}

ObservationSet binarize_mean_threshold(const RatingsTable& table) {
  return binarize_mean_threshold(table, RatingsTable{}).train;
}

RatingsTable load_rc(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  long number = 0;
  std::size_t user_col = 0, item_col = 1, rating_col = 2, width = 3;
  bool header_seen = false;
  RatingsTable table;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (!header_seen) {
      header_seen = true;
      width = fields.size();
      auto find = [&](std::string_view name, std::size_t fallback) {
        const auto it = std::find(fields.begin(), fields.end(), name);
        return it == fields.end() ? fallback : static_cast<std::size_t>(it - fields.begin());
      };
      user_col = find("userID", 0);
      item_col = find("placeID", 1);
      rating_col = find("rating", 2);
      if (std::max({user_col, item_col, rating_col}) >= width) {
        throw DataError("header of " + path.string() + " has fewer than 3 columns", number);
      }
      continue;
    }
    if (fields.size() < width) throw DataError("missing columns in " + path.string(), number);
    const auto rating = parse_double(fields[rating_col]);
    if (!rating) throw DataError("non-numeric rating in " + path.string(), number);
    if (*rating != 0 && *rating != 1 && *rating != 2) {
      throw DataError("rating outside {0, 1, 2} in " + path.string(), number);
    }
    if (fields[user_col].empty() || fields[item_col].empty()) {
      throw DataError("empty id in " + path.string(), number);
    }
    table.records.push_back(
        {std::string(fields[user_col]), std::string(fields[item_col]), *rating, std::nullopt});
  }
  if (table.records.empty()) throw DataError("no ratings in " + path.string());
  return table;
}

BinarySplit binarize_rc(const RatingsTable& table, RngHandle& rng, double train_fraction) {
  if (!(train_fraction > 0 && train_fraction < 1)) throw ConfigError("train fraction must lie in (0, 1)");
  const std::size_t n = table.records.size();
  if (n == 0) throw DataError("no ratings to binarize");
  BinarySplit split;
  split.users = IdIndex(ids_of({&table}, true));
  split.items = IdIndex(ids_of({&table}, false));
  split.threshold = 2;
  split.train = ObservationSet(split.users.size(), split.items.size());
  split.test = ObservationSet(split.users.size(), split.items.size());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t k = n - 1; k > 0; --k) {
    const auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(k + 1));
    std::swap(order[k], order[pick]);
  }
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  for (std::size_t k = 0; k < n; ++k) {
    const auto& r = table.records[order[k]];
    if (r.rating != 0 && r.rating != 1 && r.rating != 2) {
      throw DataError("rating outside {0, 1, 2} for user " + r.user);
    }
    add_rating(k < n_train ? split.train : split.test, split, r, r.rating == 2 ? 1 : -1);
  }
  return split;
}

void export_matrix_csv(const Eigen::MatrixXd& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
}

Eigen::MatrixXd import_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (auto f : split(line, ',')) {
      const auto v = parse_double(f);
      if (!v) throw DataError("non-numeric matrix entry in " + path.string(), number);
      row.push_back(*v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError("ragged matrix row in " + path.string(), number);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("empty matrix file " + path.string());
  Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

}  // namespace dpobmc
