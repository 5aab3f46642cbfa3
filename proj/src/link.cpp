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

#include "dpobmc/link.hpp"

#include <cmath>
#include <numbers>

namespace dpobmc {

std::string_view to_string(LinkKind kind) {
  return kind == LinkKind::Logistic ? "logistic" : "gaussian";
}

LinkKind parse_link_kind(std::string_view name) {
  if (name == "logistic") return LinkKind::Logistic;
  if (name == "gaussian" || name == "probit") return LinkKind::Gaussian;
  throw ConfigError("unknown link model '" + std::string(name) + "'");
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0) || !std::isfinite(alpha)) {
    throw DomainError("alpha must be finite and non-negative");
  }
}

double gaussian_flatness(double sigma, double alpha) {
  return std::numbers::pi * sigma * sigma * std::exp(alpha * alpha / (2 * sigma * sigma));
}

}  // namespace

ModelConstants model_constants(const LinkModel& model, double alpha) {
  check_alpha(alpha);
  model.validate();
  if (model.kind == LinkKind::Logistic) {
    return {1.0, std::exp(alpha), alpha};
  }
  const double s = model.sigma;
  return {8.0 * (alpha / s + 1.0) / s, gaussian_flatness(s, alpha), alpha};
}

ModelConstants perturbed_constants(const LinkModel& model, double p, double alpha) {
  check_alpha(alpha);
  model.validate();
  if (!(p >= 0 && p < 0.5)) {
    throw DomainError("perturbed link constants need 0 <= p < 1/2");
  }
  const double shrink = 1.0 - 2.0 * p;
  const double flip_term = 1.0 / (2.0 * shrink * shrink);
  if (model.kind == LinkKind::Logistic) {
    return {shrink, flip_term + 0.5 * std::exp(alpha), alpha};
  }
  const double s = model.sigma;
  return {8.0 * shrink * (alpha / s + 1.0) / s,
          flip_term + 0.5 * gaussian_flatness(s, alpha), alpha};
}

}  // namespace dpobmc
