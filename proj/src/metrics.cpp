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

#include "dpobmc/metrics.hpp"

#include <cmath>

#include "dpobmc/privacy.hpp"

namespace dpobmc {

std::string_view to_string(Theorem t) {
  switch (t) {
    case Theorem::T1: return "T1";
    case Theorem::T2: return "T2";
    case Theorem::T4: return "T4";
  }
  return "?";
}

double omega_constant(double n, Index d1, Index d2) {
  const double d = static_cast<double>(d1 + d2);
  return std::sqrt(n + static_cast<double>(d1) * static_cast<double>(d2) * std::log(d));
}

BoundTerms theory_bound_terms(Theorem theorem, const BoundInputs& in) {
  if (in.d1 <= 0 || in.d2 <= 0 || in.rank <= 0) throw DomainError("bound dimensions must be positive");
  if (!(in.n > 0) || !(in.alpha > 0) || !(in.epsilon > 0)) {
    throw DomainError("bound parameters n, alpha and epsilon must be positive");
  }
  const double shape = std::sqrt(in.rank * static_cast<double>(in.d1 + in.d2) / in.n) *
                       std::sqrt(omega_constant(in.n, in.d1, in.d2) / in.n);
  BoundTerms out;
  switch (theorem) {
    case Theorem::T1: {
      const double p = in.p.value_or(p_from_epsilon(in.epsilon));
      const ModelConstants c = perturbed_constants(in.model, p, in.alpha);
      out.statistical = in.constants.c2 * in.alpha * c.steepness * c.flatness * shape;
      break;
    }
    case Theorem::T2: {
      const ModelConstants c = model_constants(in.model, in.alpha);
      const double delta = objective_sensitivity(in.model, in.alpha);
      out.statistical = in.constants.c4 * in.alpha * c.steepness * c.flatness * shape;
      out.privacy = 8.0 * std::sqrt(2.0) * delta * c.flatness / (in.epsilon * std::cbrt(in.n));
      break;
    }
    case Theorem::T4: {
      const ModelConstants c = model_constants(in.model, in.alpha);
      const double lg = std::log(static_cast<double>(in.d1 + in.d2));
      out.statistical = in.constants.c6 * in.alpha * c.steepness * c.flatness * shape;
      out.privacy = in.constants.c6 * in.alpha * in.alpha * lg * lg / (in.epsilon * in.epsilon);
      break;
    }
  }
  return out;
}

}  // namespace dpobmc
