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

#ifndef DPOBMC_DATA_HPP
#define DPOBMC_DATA_HPP

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dpobmc/link.hpp"
#include "dpobmc/observations.hpp"
#include "dpobmc/privacy.hpp"

namespace dpobmc {

struct GroundTruth {
  Eigen::MatrixXd m;
  int rank = 0;
  double alpha = 0;
};

enum class TruthScaling {
  SignedMax,  // M <- alpha M / max_ij M_ij
  AbsMax,     // M <- alpha M / max_ij |M_ij|
};

// Low-rank M = M1 M2^T with uniform [-1/2, 1/2] factors, rescaled so the
// largest entry (signed or absolute, per `scaling`) equals alpha.
GroundTruth gen_synthetic(Index d1, Index d2, int rank, double alpha, RngHandle& rng,
                          TruthScaling scaling = TruthScaling::SignedMax);

enum class SamplingRule {
  Bernoulli,   // each entry independently with probability `ratio`
  ExactCount,  // round(ratio d1 d2) entries without replacement
};

// One-bit observations Y_ij = +1 w.p. h(M_ij) on a random index set.
ObservationSet sample_observations(const Eigen::MatrixXd& m, double ratio, const LinkModel& model,
                                   RngHandle& rng, SamplingRule rule = SamplingRule::Bernoulli);

struct RatingRecord {
  std::string user;
  std::string item;
  double rating = 0;
  std::optional<long long> timestamp;
};

struct RatingsTable {
  std::vector<RatingRecord> records;

  std::size_t user_count() const;
  std::size_t item_count() const;
};

// Dense re-indexing of string ids. Numeric ids sort numerically, others
// lexicographically.
class IdIndex {
 public:
  IdIndex() = default;
  explicit IdIndex(std::vector<std::string> ids);

  Index size() const { return static_cast<Index>(names_.size()); }
  Index at(const std::string& id) const;
  const std::string& name(Index k) const { return names_.at(static_cast<std::size_t>(k)); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Index> lookup_;
};

struct BinarySplit {
  ObservationSet train;
  ObservationSet test;
  IdIndex users;
  IdIndex items;
  double threshold = 0;  // rating mean for the mean-threshold rule
};

// Tab-separated `user item rating timestamp` (MovieLens u.data layout).
RatingsTable load_movielens(const std::filesystem::path& path);

// Ratings below the global mean map to -1, others (including ties) to +1.
// The mean and the id spaces cover train and test together.
BinarySplit binarize_mean_threshold(const RatingsTable& train, const RatingsTable& test);
ObservationSet binarize_mean_threshold(const RatingsTable& table);

// Comma-separated with a header row; columns userID, placeID, rating
// (falls back to the first three columns).
RatingsTable load_rc(const std::filesystem::path& path);

// 2 -> +1, {0, 1} -> -1; random record split with round(0.8 n) for training.
BinarySplit binarize_rc(const RatingsTable& table, RngHandle& rng, double train_fraction = 0.8);

// Row-per-line CSV with full round-trip precision.
void export_matrix_csv(const Eigen::MatrixXd& m, const std::filesystem::path& path);
Eigen::MatrixXd import_matrix_csv(const std::filesystem::path& path);

}  // namespace dpobmc

#endif  // DPOBMC_DATA_HPP
