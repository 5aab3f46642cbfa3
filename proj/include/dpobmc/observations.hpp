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

#ifndef DPOBMC_OBSERVATIONS_HPP
#define DPOBMC_OBSERVATIONS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dpobmc/errors.hpp"

namespace dpobmc {

using Index = Eigen::Index;

struct Observation {
  Index row = 0;
  Index col = 0;
  int value = 1;  // +1 or -1

  friend bool operator==(const Observation&, const Observation&) = default;
};

// Binary ratings on an index set Omega of a rows x cols matrix. Entries are
// unique and kept in insertion order; values on Omega are addressed by the
// position of the entry in that order.
class ObservationSet {
 public:
  ObservationSet() = default;
  ObservationSet(Index rows, Index cols);
  ObservationSet(Index rows, Index cols, std::vector<Observation> entries);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Observation>& entries() const { return entries_; }
  const Observation& operator[](std::size_t k) const { return entries_[k]; }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  // Throws DimensionError/DomainError on out-of-range, duplicate or non-binary entries.
  void add(Index row, Index col, int value);

  // Same Omega with replaced values.
  ObservationSet with_values(const std::vector<int>& values) const;

  friend bool operator==(const ObservationSet&, const ObservationSet&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Observation> entries_;
  std::vector<std::uint8_t> seen_;
};

// Union of two observation sets with disjoint Omega over the same shape.
ObservationSet disjoint_union(const ObservationSet& a, const ObservationSet& b);

// Values of X on Omega, in entry order.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> gather(
    const ObservationSet& obs, const Eigen::MatrixBase<Derived>& x) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(static_cast<Index>(obs.size()));
  for (std::size_t k = 0; k < obs.size(); ++k) out(static_cast<Index>(k)) = x(obs[k].row, obs[k].col);
  return out;
}

// Dense rows x cols matrix holding `values` on Omega and zero elsewhere.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> scatter(
    const ObservationSet& obs, const Eigen::MatrixBase<Derived>& values) {
  if (values.size() != static_cast<Index>(obs.size())) {
    throw DimensionError("value vector does not match the observation set");
  }
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(obs.rows(), obs.cols());
  for (std::size_t k = 0; k < obs.size(); ++k) out(obs[k].row, obs[k].col) = values(static_cast<Index>(k));
  return out;
}

}  // namespace dpobmc

#endif  // DPOBMC_OBSERVATIONS_HPP
