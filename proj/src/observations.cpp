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

#include "dpobmc/observations.hpp"

#include <string>

namespace dpobmc {

ObservationSet::ObservationSet(Index rows, Index cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw DimensionError("negative observation set shape");
  seen_.assign(static_cast<std::size_t>(rows * cols), 0);
}

ObservationSet::ObservationSet(Index rows, Index cols, std::vector<Observation> entries)
    : ObservationSet(rows, cols) {
  entries_.reserve(entries.size());
  for (const auto& e : entries) add(e.row, e.col, e.value);
}

void ObservationSet::add(Index row, Index col, int value) {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols_) {
    throw DimensionError("observation (" + std::to_string(row) + ", " + std::to_string(col) +
                         ") outside " + std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  if (value != 1 && value != -1) throw DomainError("observation values must be +1 or -1");
  auto& flag = seen_[static_cast<std::size_t>(row * cols_ + col)];
  if (flag) {
    throw DomainError("duplicate observation at (" + std::to_string(row) + ", " +
                      std::to_string(col) + ")");
  }
  flag = 1;
  entries_.push_back({row, col, value});
}

ObservationSet ObservationSet::with_values(const std::vector<int>& values) const {
  if (values.size() != entries_.size()) throw DimensionError("value count does not match Omega");
  ObservationSet out = *this;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] != 1 && values[k] != -1) throw DomainError("observation values must be +1 or -1");
    out.entries_[k].value = values[k];
  }
  return out;
}

ObservationSet disjoint_union(const ObservationSet& a, const ObservationSet& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("observation sets have different shapes");
  }
  ObservationSet out(a.rows(), a.cols());
  for (const auto& e : a) out.add(e.row, e.col, e.value);
  for (const auto& e : b) out.add(e.row, e.col, e.value);
  return out;
}

}  // namespace dpobmc
