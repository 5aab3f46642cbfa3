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

#ifndef DPOBMC_METRICS_HPP
#define DPOBMC_METRICS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "dpobmc/errors.hpp"
#include "dpobmc/link.hpp"
#include "dpobmc/observations.hpp"

namespace dpobmc {

namespace metrics_internal {

template <typename A, typename B>
void check_same_shape(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("metric arguments differ in shape");
  }
}

}  // namespace metrics_internal

// Average relative error ||M_hat - M||_F^2 / ||M||_F^2.
template <typename A, typename B>
typename A::Scalar are(const Eigen::MatrixBase<A>& m_hat, const Eigen::MatrixBase<B>& m_true) {
  metrics_internal::check_same_shape(m_hat, m_true);
  const auto denom = m_true.squaredNorm();
  if (!(denom > 0)) throw DomainError("ARE needs a nonzero ground truth");
  return (m_hat - m_true).squaredNorm() / denom;
}

// Fraction of test ratings whose sign M_hat predicts; sgn(0) = +1.
template <typename Derived>
double sign_accuracy(const Eigen::MatrixBase<Derived>& m_hat, const ObservationSet& test) {
  if (test.empty()) throw DomainError("sign accuracy needs a non-empty test set");
  if (m_hat.rows() != test.rows() || m_hat.cols() != test.cols()) {
    throw DimensionError("estimate and test set differ in shape");
  }
  std::size_t hits = 0;
  for (const auto& e : test) {
    const int predicted = m_hat(e.row, e.col) < 0 ? -1 : 1;
    hits += predicted == e.value;
  }
  return static_cast<double>(hits) / static_cast<double>(test.size());
}

// Entrywise mean of the squared Hellinger distance between Bernoulli(P_ij)
// and Bernoulli(Q_ij).
template <typename A, typename B>
typename A::Scalar avg_hellinger(const Eigen::MatrixBase<A>& p, const Eigen::MatrixBase<B>& q) {
  using Scalar = typename A::Scalar;
  metrics_internal::check_same_shape(p, q);
  if (p.size() == 0) throw DomainError("Hellinger distance of empty matrices");
  auto in_unit = [](const auto& m) { return (m.array() >= 0).all() && (m.array() <= 1).all(); };
  if (!in_unit(p.derived()) || !in_unit(q.derived())) {
    throw DomainError("probability matrices must have entries in [0, 1]");
  }
  const auto pos = (p.array().sqrt() - q.array().sqrt()).square();
  const auto neg = ((Scalar(1) - p.array()).sqrt() - (Scalar(1) - q.array()).sqrt()).square();
  return (pos + neg).sum() / static_cast<Scalar>(p.size());
}

// h applied entrywise.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> link_matrix(
    const Eigen::MatrixBase<Derived>& x, const BasicLinkModel<typename Derived::Scalar>& model) {
  return x.unaryExpr([&model](typename Derived::Scalar v) { return link_value(model, v); });
}

enum class Theorem { T1, T2, T4 };

std::string_view to_string(Theorem t);

// Unspecified universal constants of the bounds.
struct BoundConstants {
  double c2 = 1;  // input perturbation
  double c4 = 1;  // objective perturbation
  double c6 = 1;  // output perturbation (also scales its statistical term)
};

struct BoundInputs {
  Index d1 = 0;
  Index d2 = 0;
  int rank = 1;
  double n = 0;  // |Omega|
  LinkModel model = LinkModel::logistic();
  double alpha = 1;
  double epsilon = 1;
  std::optional<double> p;  // T1 transition probability; 1/(1+e^eps) when absent
  BoundConstants constants;
};

struct BoundTerms {
  double statistical = 0;
  double privacy = 0;  // zero for T1, whose privacy enters through p
  double total() const { return statistical + privacy; }
};

// sqrt(n + d1 d2 log(d1 + d2)).
double omega_constant(double n, Index d1, Index d2);

BoundTerms theory_bound_terms(Theorem theorem, const BoundInputs& in);
inline double theory_bound(Theorem theorem, const BoundInputs& in) {
  return theory_bound_terms(theorem, in).total();
}

struct MetricReport {
  std::optional<double> are;
  std::optional<double> acc;
  std::optional<double> hellinger;
  std::map<std::string, double> bound_values;

  bool empty() const { return !are && !acc && !hellinger && bound_values.empty(); }
};

}  // namespace dpobmc

#endif  // DPOBMC_METRICS_HPP
