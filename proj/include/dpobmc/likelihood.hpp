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

#ifndef DPOBMC_LIKELIHOOD_HPP
#define DPOBMC_LIKELIHOOD_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "dpobmc/errors.hpp"
#include "dpobmc/link.hpp"
#include "dpobmc/observations.hpp"

namespace dpobmc {

// Values on Omega, aligned with ObservationSet entry order. Gradients and
// noise matrices share this representation; support equals Omega by
// construction and is checked by size.
template <typename Scalar>
using OmegaVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

namespace likelihood_internal {

template <typename Scalar>
Scalar upper(const BasicLinkModel<Scalar>& m, Scalar x) { return link_value(m, x); }
template <typename Scalar>
Scalar lower(const BasicLinkModel<Scalar>& m, Scalar x) { return link_complement(m, x); }
template <typename Scalar>
Scalar slope(const BasicLinkModel<Scalar>& m, Scalar x) { return link_derivative(m, x); }

template <typename Scalar>
Scalar upper(const BasicPerturbedLink<Scalar>& m, Scalar x) { return perturbed_link_value(m, x); }
template <typename Scalar>
Scalar lower(const BasicPerturbedLink<Scalar>& m, Scalar x) { return perturbed_link_complement(m, x); }
template <typename Scalar>
Scalar slope(const BasicPerturbedLink<Scalar>& m, Scalar x) { return perturbed_link_derivative(m, x); }

template <typename Derived>
void check_shape(const Eigen::MatrixBase<Derived>& x, const ObservationSet& obs) {
  if (x.rows() != obs.rows() || x.cols() != obs.cols()) {
    throw DimensionError("iterate shape " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + " does not match observations " +
                         std::to_string(obs.rows()) + "x" + std::to_string(obs.cols()));
  }
}

template <typename Scalar>
void check_perturbed(const BasicPerturbedLink<Scalar>& pl) {
  pl.validate();
  if (pl.p1 + pl.p2 >= Scalar(1)) {
    throw ConfigError("degenerate perturbed link: p1 + p2 must be < 1");
  }
}

// -log P(Y = y | x) for a single entry.
template <typename Link, typename Scalar>
Scalar entry_loss(const Link& link, Scalar x, int y) {
  return y > 0 ? -std::log(upper(link, x)) : -std::log(lower(link, x));
}

// d/dx of entry_loss.
template <typename Link, typename Scalar>
Scalar entry_grad(const Link& link, Scalar x, int y) {
  const Scalar d = slope(link, x);
  return y > 0 ? -d / upper(link, x) : d / lower(link, x);
}

template <typename Link, typename Derived>
typename Derived::Scalar nll(const Eigen::MatrixBase<Derived>& x, const ObservationSet& obs,
                             const Link& link) {
  check_shape(x, obs);
  typename Derived::Scalar total(0);
  for (const auto& e : obs) total += entry_loss(link, x(e.row, e.col), e.value);
  return total;
}

template <typename Link, typename Derived>
OmegaVector<typename Derived::Scalar> grad(const Eigen::MatrixBase<Derived>& x,
                                           const ObservationSet& obs, const Link& link) {
  check_shape(x, obs);
  OmegaVector<typename Derived::Scalar> g(static_cast<Index>(obs.size()));
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const auto& e = obs[k];
    g(static_cast<Index>(k)) = entry_grad(link, x(e.row, e.col), e.value);
  }
  return g;
}

template <typename Scalar>
void check_noise(const OmegaVector<Scalar>& noise, const ObservationSet& obs) {
  if (noise.size() != static_cast<Index>(obs.size())) {
    throw ConfigError("noise matrix support does not match the observation set");
  }
}

}  // namespace likelihood_internal

// -1/2 sum_{Omega} [(1 + Y) log h(X) + (1 - Y) log(1 - h(X))], summed in
// entry order.
template <typename Derived>
typename Derived::Scalar neg_log_likelihood(
    const Eigen::MatrixBase<Derived>& x, const ObservationSet& obs,
    const BasicLinkModel<typename Derived::Scalar>& model) {
  model.validate();
  return likelihood_internal::nll(x, obs, model);
}

// Gradient of neg_log_likelihood on Omega; zero off Omega.
template <typename Derived>
OmegaVector<typename Derived::Scalar> gradient(
    const Eigen::MatrixBase<Derived>& x, const ObservationSet& obs,
    const BasicLinkModel<typename Derived::Scalar>& model) {
  model.validate();
  return likelihood_internal::grad(x, obs, model);
}

// Likelihood of randomized-response ratings under the perturbed link c.
template <typename Derived>
typename Derived::Scalar rr_neg_log_likelihood(
    const Eigen::MatrixBase<Derived>& x, const ObservationSet& obs,
    const BasicPerturbedLink<typename Derived::Scalar>& pl) {
  likelihood_internal::check_perturbed(pl);
  return likelihood_internal::nll(x, obs, pl);
}

template <typename Derived>
OmegaVector<typename Derived::Scalar> rr_gradient(
    const Eigen::MatrixBase<Derived>& x, const ObservationSet& obs,
    const BasicPerturbedLink<typename Derived::Scalar>& pl) {
  likelihood_internal::check_perturbed(pl);
  return likelihood_internal::grad(x, obs, pl);
}

// neg_log_likelihood(X) - 1/2 sum_{Omega} H_ij X_ij: the noise term sits
// inside the -1/2 bracket of the likelihood.
template <typename Derived>
typename Derived::Scalar perturbed_objective(
    const Eigen::MatrixBase<Derived>& x, const ObservationSet& obs,
    const BasicLinkModel<typename Derived::Scalar>& model,
    const OmegaVector<typename Derived::Scalar>& noise) {
  likelihood_internal::check_noise(noise, obs);
  using Scalar = typename Derived::Scalar;
  Scalar linear(0);
  for (std::size_t k = 0; k < obs.size(); ++k) {
    linear += noise(static_cast<Index>(k)) * x(obs[k].row, obs[k].col);
  }
  return neg_log_likelihood(x, obs, model) - Scalar(0.5) * linear;
}

template <typename Derived>
OmegaVector<typename Derived::Scalar> perturbed_gradient(
    const Eigen::MatrixBase<Derived>& x, const ObservationSet& obs,
    const BasicLinkModel<typename Derived::Scalar>& model,
    const OmegaVector<typename Derived::Scalar>& noise) {
  likelihood_internal::check_noise(noise, obs);
  using Scalar = typename Derived::Scalar;
  return gradient(x, obs, model) - Scalar(0.5) * noise;
}

}  // namespace dpobmc

#endif  // DPOBMC_LIKELIHOOD_HPP
