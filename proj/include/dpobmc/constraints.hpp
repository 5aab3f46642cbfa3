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

#ifndef DPOBMC_CONSTRAINTS_HPP
#define DPOBMC_CONSTRAINTS_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpobmc/errors.hpp"

namespace dpobmc {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// C = {X : ||X||_* <= tau, ||X||_inf <= alpha}. alpha may be +inf.
template <typename Scalar>
struct BasicConstraintSet {
  Scalar tau = Scalar(1);
  Scalar alpha = Scalar(1);

  void validate() const {
    if (!(tau > 0) || !std::isfinite(tau)) throw ConfigError("tau must be finite and > 0");
    if (!(alpha > 0)) throw ConfigError("alpha must be > 0");
  }
};

using ConstraintSet = BasicConstraintSet<double>;

enum class ProjectionMode {
  Intersection,  // accelerated dual Dykstra onto nuclear ball and infinity ball
  Dykstra,       // the same without momentum
  NuclearOnly,
};

inline constexpr int kDefaultProjectionRounds = 500;

std::string_view to_string(ProjectionMode mode);
ProjectionMode parse_projection_mode(std::string_view name);

template <typename Scalar>
struct ProjectionResult {
  DenseMatrix<Scalar> value;
  bool converged = true;
  int rounds = 0;
};

// Euclidean projection of a non-negative vector onto {v >= 0 : sum(v) <= radius}
// by sort and threshold.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> project_l1_ball_nonneg(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& s, Scalar radius) {
  if (s.sum() <= radius) return s;
  std::vector<Scalar> sorted(s.data(), s.data() + s.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<Scalar>());
  Scalar cumulative(0);
  Scalar theta(0);
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cumulative += sorted[j];
    const Scalar candidate = (cumulative - radius) / Scalar(j + 1);
    if (sorted[j] - candidate > Scalar(0)) theta = candidate;
  }
  return (s.array() - theta).cwiseMax(Scalar(0)).matrix();
}

namespace constraints_internal {

template <typename Derived>
void check_finite(const Eigen::MatrixBase<Derived>& x) {
  if (!x.allFinite()) throw DomainError("projection input must be finite");
}

template <typename Derived>
Eigen::BDCSVD<DenseMatrix<typename Derived::Scalar>> svd_of(const Eigen::MatrixBase<Derived>& x) {
  Eigen::BDCSVD<DenseMatrix<typename Derived::Scalar>> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success || !svd.singularValues().allFinite()) {
    throw NumericalError("SVD failed on a " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + " matrix (max |x| = " +
                         std::to_string(static_cast<double>(x.cwiseAbs().maxCoeff())) + ")");
  }
  return svd;
}

}  // namespace constraints_internal

template <typename Derived>
typename Derived::Scalar nuclear_norm(const Eigen::MatrixBase<Derived>& x) {
  if (x.size() == 0) return typename Derived::Scalar(0);
  return constraints_internal::svd_of(x).singularValues().sum();
}

namespace constraints_internal {

// Nuclear projection through the eigendecomposition of the smaller Gram
// matrix: P(A) = A f(A^T A) with f(mu) = (sqrt(mu) - theta)_+ / sqrt(mu).
// Empty optional when the singular values are not resolved well enough for
// the threshold, in which case the caller falls back to a direct SVD.
template <typename Scalar>
std::optional<DenseMatrix<Scalar>> project_nuclear_gram(const DenseMatrix<Scalar>& a, Scalar tau) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const DenseMatrix<Scalar> gram = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> eig(gram);
  if (eig.info() != Eigen::Success || !eig.eigenvalues().allFinite()) return std::nullopt;
  const Vector mu = eig.eigenvalues().cwiseMax(Scalar(0));
  const Vector s = mu.cwiseSqrt();
  const Scalar top = s.maxCoeff();
  if (top == Scalar(0)) return a;
  // Absolute eigenvalue error ~ n eps ||G||; propagate to the singular values.
  const Scalar mu_err = Scalar(gram.rows()) * std::numeric_limits<Scalar>::epsilon() * top * top;
  const Scalar s_err = (mu_err / (s.array() + std::sqrt(mu_err))).sum();
  if (s_err > Scalar(1e-11) * std::max(tau, s.sum() - tau)) return std::nullopt;
  if (s.sum() <= tau) return a;
  const Vector shrunk = project_l1_ball_nonneg<Scalar>(s, tau);
  // Eigenvalues ascend, so the retained components are the trailing block.
  Eigen::Index kept = 0;
  while (kept < s.size() && shrunk(s.size() - 1 - kept) > Scalar(0)) ++kept;
  const auto v = eig.eigenvectors().rightCols(kept);
  const Vector scale = shrunk.tail(kept).cwiseQuotient(s.tail(kept));
  const DenseMatrix<Scalar> av = a * v;
  return DenseMatrix<Scalar>(av * scale.asDiagonal() * v.transpose());
}

}  // namespace constraints_internal

// argmin_{||Z||_* <= tau} ||Z - X||_F. Returns X itself when already inside.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> project_nuclear_ball(const Eigen::MatrixBase<Derived>& x,
                                                           typename Derived::Scalar tau) {
  using Scalar = typename Derived::Scalar;
  constraints_internal::check_finite(x);
  if (!(tau > 0)) throw DomainError("nuclear radius must be > 0");
  if (x.size() == 0) return x;
  const bool wide = x.cols() > x.rows();
  const DenseMatrix<Scalar> a = wide ? DenseMatrix<Scalar>(x.transpose()) : DenseMatrix<Scalar>(x);
  if (auto projected = constraints_internal::project_nuclear_gram<Scalar>(a, tau)) {
    if (wide) return projected->transpose();
    return std::move(*projected);
  }
  const auto svd = constraints_internal::svd_of(x);
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> s = svd.singularValues();
  if (s.sum() <= tau) return x;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> shrunk = project_l1_ball_nonneg<Scalar>(s, tau);
  return svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();
}

template <typename Derived>
DenseMatrix<typename Derived::Scalar> clamp_infinity(const Eigen::MatrixBase<Derived>& x,
                                                     typename Derived::Scalar alpha) {
  return x.cwiseMax(-alpha).cwiseMin(alpha);
}

// Projection onto C through the dual of the entrywise bound:
//   maximize_L  1/2 dist_N(Y - L)^2 + <L, Y> - 1/2 ||L||^2 - alpha ||L||_1,
// whose gradient is P_N(Y - L) for the nuclear ball N. Proximal ascent with
// unit step is Dykstra's algorithm; `accelerate` adds Nesterov momentum with
// gradient restarts. Returns X = P_N(Y - L), which meets the nuclear bound
// exactly, once X moves by <= tol and exceeds the entrywise bound by <= tol
// (Frobenius). `dual`, if given, seeds L and receives the final multiplier.
template <typename Derived>
ProjectionResult<typename Derived::Scalar> project_feasible(
    const Eigen::MatrixBase<Derived>& x, const BasicConstraintSet<typename Derived::Scalar>& cs,
    typename Derived::Scalar tol, int max_rounds, DenseMatrix<typename Derived::Scalar>* dual = nullptr,
    bool accelerate = true) {
  using Scalar = typename Derived::Scalar;
  using Matrix = DenseMatrix<Scalar>;
  cs.validate();
  if (!(tol > 0)) throw ConfigError("projection tolerance must be > 0");
  if (max_rounds < 1) throw ConfigError("projection needs max_rounds >= 1");
  constraints_internal::check_finite(x);

  if (std::isinf(cs.alpha)) return {project_nuclear_ball(x, cs.tau), true, 1};

  const Matrix y = x;
  const bool warm = dual && dual->rows() == y.rows() && dual->cols() == y.cols() && dual->allFinite();
  Matrix lambda = warm ? *dual : Matrix::Zero(y.rows(), y.cols());
  Matrix lookahead = lambda;
  Matrix current, previous;
  Scalar t(1);
  auto soft = [&cs](const Matrix& v) -> Matrix {
    return ((v.array().abs() - cs.alpha).cwiseMax(Scalar(0)) * v.array().sign()).matrix();
  };
  for (int round = 1; round <= max_rounds; ++round) {
    current = project_nuclear_ball((y - lookahead).eval(), cs.tau);
    const Scalar excess = (current - clamp_infinity(current, cs.alpha)).norm();
    const bool settled = round > 1 && (current - previous).norm() <= tol;
    if (excess <= tol && (settled || (lookahead.array() == Scalar(0)).all())) {
      if (dual) *dual = lookahead;
      return {std::move(current), true, round};
    }
    Matrix next = soft(lookahead + current);
    if (accelerate) {
      Scalar t_next = (Scalar(1) + std::sqrt(Scalar(1) + Scalar(4) * t * t)) / Scalar(2);
      if (((lookahead - next).array() * (next - lambda).array()).sum() > Scalar(0)) {
        t_next = Scalar(1);
        lookahead = next;
      } else {
        lookahead = next + ((t - Scalar(1)) / t_next) * (next - lambda);
      }
      t = t_next;
    } else {
      lookahead = next;
    }
    lambda = std::move(next);
    previous = current;
  }
  if (dual) *dual = lambda;
  return {std::move(current), false, max_rounds};
}

template <typename Scalar>
using Projector = std::function<ProjectionResult<Scalar>(const DenseMatrix<Scalar>&)>;

// Projector onto C. Intersection projectors carry the dual multiplier from
// one call to the next as a warm start.
template <typename Scalar>
Projector<Scalar> make_projector(const BasicConstraintSet<Scalar>& cs, ProjectionMode mode,
                                 Scalar tol = Scalar(1e-9), int max_rounds = kDefaultProjectionRounds) {
  cs.validate();
  if (mode == ProjectionMode::NuclearOnly) {
    return [cs](const DenseMatrix<Scalar>& x) {
      return ProjectionResult<Scalar>{project_nuclear_ball(x, cs.tau), true, 1};
    };
  }
  auto dual = std::make_shared<DenseMatrix<Scalar>>();
  const bool accelerate = mode == ProjectionMode::Intersection;
  return [cs, tol, max_rounds, dual, accelerate](const DenseMatrix<Scalar>& x) {
    return project_feasible(x, cs, tol, max_rounds, dual.get(), accelerate);
  };
}

}  // namespace dpobmc

#endif  // DPOBMC_CONSTRAINTS_HPP
