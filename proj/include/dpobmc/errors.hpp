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

#ifndef DPOBMC_ERRORS_HPP
#define DPOBMC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dpobmc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Inconsistent or invalid configuration, detected before any data access.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown (SVD failure, non-finite objective).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Malformed or missing input data. `line` is 1-based, 0 when not applicable.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what, long line = 0)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

}  // namespace dpobmc

#endif  // DPOBMC_ERRORS_HPP
