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

#ifndef DPOBMC_LINK_HPP
#define DPOBMC_LINK_HPP

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "dpobmc/errors.hpp"

namespace dpobmc {

enum class LinkKind { Logistic, Gaussian };

std::string_view to_string(LinkKind kind);
LinkKind parse_link_kind(std::string_view name);

// Observation model P(Y = +1 | x) = h(x). The Gaussian model is the probit
// link h(x) = Phi(x / sigma); sigma is ignored for the logistic model.
template <typename Scalar>
struct BasicLinkModel {
  LinkKind kind = LinkKind::Logistic;
  Scalar sigma = Scalar(1);

  static BasicLinkModel logistic() { return {LinkKind::Logistic, Scalar(1)}; }
  static BasicLinkModel gaussian(Scalar sigma) {
    BasicLinkModel m{LinkKind::Gaussian, sigma};
    m.validate();
    return m;
  }

  void validate() const {
    if (kind == LinkKind::Gaussian && !(sigma > Scalar(0) && std::isfinite(sigma))) {
      throw DomainError("gaussian link requires a finite sigma > 0");
    }
  }
};

using LinkModel = BasicLinkModel<double>;

// Link after randomized response: c(x) = h(x)(1 - p1) + (1 - h(x)) p2.
template <typename Scalar>
struct BasicPerturbedLink {
  BasicLinkModel<Scalar> base;
  Scalar p1 = Scalar(0);
  Scalar p2 = Scalar(0);

  void validate() const {
    base.validate();
    if (!(p1 >= 0 && p1 <= 1 && p2 >= 0 && p2 <= 1)) {
      throw DomainError("transition probabilities must lie in [0, 1]");
    }
  }
};

using PerturbedLink = BasicPerturbedLink<double>;

// Steepness L and flatness beta of a link over |x| <= alpha.
struct ModelConstants {
  double steepness = 0;
  double flatness = 0;
  double alpha = 0;
};

namespace link_internal {

// Probabilities are kept at least this far from {0, 1} so that
// log-likelihoods stay finite; only |x| beyond about 34 (logistic) or
// 7.9 sigma (Gaussian) is affected.
inline constexpr double kProbFloor = 1e-15;

template <typename Scalar>
void check_finite(Scalar x) {
  if (!std::isfinite(x)) throw DomainError("link argument must be finite");
}

template <typename Scalar>
Scalar logistic_raw(Scalar x) {
  if (x >= 0) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

template <typename Scalar>
Scalar clamp_prob(Scalar p) {
  const Scalar lo = Scalar(kProbFloor);
  const Scalar hi = Scalar(1) - Scalar(kProbFloor);
  return p < lo ? lo : (p > hi ? hi : p);
}

// P(Y = +1 | x) when upper, P(Y = -1 | x) otherwise.
template <typename Scalar>
Scalar tail(const BasicLinkModel<Scalar>& m, Scalar x, bool upper) {
  check_finite(x);
  const Scalar s = upper ? x : -x;
  if (m.kind == LinkKind::Logistic) {
    return clamp_prob(logistic_raw(s));
  }
  const Scalar z = s / m.sigma;
  return clamp_prob(Scalar(0.5) * std::erfc(-z / std::numbers::sqrt2_v<Scalar>));
}

}  // namespace link_internal

template <typename Scalar>
Scalar link_value(const BasicLinkModel<Scalar>& m, Scalar x) {
  return link_internal::tail(m, x, true);
}

// 1 - h(x), evaluated without cancellation.
template <typename Scalar>
Scalar link_complement(const BasicLinkModel<Scalar>& m, Scalar x) {
  return link_internal::tail(m, x, false);
}

template <typename Scalar>
Scalar link_derivative(const BasicLinkModel<Scalar>& m, Scalar x) {
  link_internal::check_finite(x);
  if (m.kind == LinkKind::Logistic) {
    return link_internal::logistic_raw(x) * link_internal::logistic_raw(-x);
  }
  const Scalar z = x / m.sigma;
  const Scalar inv_sqrt_2pi = std::numbers::inv_sqrtpi_v<Scalar> / std::numbers::sqrt2_v<Scalar>;
  return inv_sqrt_2pi * std::exp(Scalar(-0.5) * z * z) / m.sigma;
}

template <typename Scalar>
Scalar perturbed_link_value(const BasicPerturbedLink<Scalar>& pl, Scalar x) {
  const Scalar h = link_value(pl.base, x);
  const Scalar hc = link_complement(pl.base, x);
  return h * (Scalar(1) - pl.p1) + hc * pl.p2;
}

template <typename Scalar>
Scalar perturbed_link_complement(const BasicPerturbedLink<Scalar>& pl, Scalar x) {
  const Scalar h = link_value(pl.base, x);
  const Scalar hc = link_complement(pl.base, x);
  return h * pl.p1 + hc * (Scalar(1) - pl.p2);
}

template <typename Scalar>
Scalar perturbed_link_derivative(const BasicPerturbedLink<Scalar>& pl, Scalar x) {
  return (Scalar(1) - pl.p1 - pl.p2) * link_derivative(pl.base, x);
}

// Closed-form steepness/flatness. Exact for the logistic model; upper bounds
// for the Gaussian model. alpha = 0 is accepted (the sup is over {0}).
ModelConstants model_constants(const LinkModel& model, double alpha);

// Constants of the symmetric perturbed link (p1 = p2 = p), 0 <= p < 1/2.
ModelConstants perturbed_constants(const LinkModel& model, double p, double alpha);

}  // namespace dpobmc

#endif  // DPOBMC_LINK_HPP
