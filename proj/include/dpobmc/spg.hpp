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

#ifndef DPOBMC_SPG_HPP
#define DPOBMC_SPG_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dpobmc/constraints.hpp"
#include "dpobmc/errors.hpp"

namespace dpobmc {

// Spectral projected gradient settings. step_scale is the constant factor
// multiplying the spectral step (distinct from the entrywise bound alpha).
template <typename Scalar>
struct BasicSolverParams {
  int max_iters = 500;
  Scalar bb_step_min = Scalar(1e-8);
  Scalar bb_step_max = Scalar(1e8);
  int nonmonotone_memory = 10;
  Scalar armijo_const = Scalar(1e-4);
  Scalar backtrack_factor = Scalar(0.5);
  int max_backtracks = 60;
  Scalar step_scale = Scalar(1);
  Scalar tol_obj = Scalar(1e-6);
  bool line_search = true;

  void validate() const {
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (!(bb_step_min > 0 && bb_step_min <= bb_step_max)) {
      throw ConfigError("need 0 < bb_step_min <= bb_step_max");
    }
    if (nonmonotone_memory < 1) throw ConfigError("nonmonotone memory must be >= 1");
    if (!(armijo_const > 0 && armijo_const < 1)) throw ConfigError("armijo constant must be in (0, 1)");
    if (!(backtrack_factor > 0 && backtrack_factor < 1)) throw ConfigError("backtrack factor must be in (0, 1)");
    if (!(step_scale > 0)) throw ConfigError("step scale must be > 0");
    if (!(tol_obj > 0)) throw ConfigError("objective tolerance must be > 0");
  }
};

using SolverParams = BasicSolverParams<double>;

template <typename Scalar>
struct BasicTraceEntry {
  Scalar objective = 0;
  Scalar step_length = 0;  // spectral step gamma_k used by the iteration
  Scalar line_search_factor = 1;
  bool projection_converged = true;
};

template <typename Scalar>
struct BasicSolverResult {
  DenseMatrix<Scalar> solution;
  Scalar initial_objective = 0;
  std::vector<BasicTraceEntry<Scalar>> trace;
  int iterations_used = 0;
  bool converged = false;
};

using TraceEntry = BasicTraceEntry<double>;
using SolverResult = BasicSolverResult<double>;

// Raised when the objective turns non-finite; carries the trace so far.
template <typename Scalar>
class BasicSolverAbort : public NumericalError {
 public:
  BasicSolverAbort(const std::string& what, std::vector<BasicTraceEntry<Scalar>> trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const std::vector<BasicTraceEntry<Scalar>>& trace() const { return trace_; }

 private:
  std::vector<BasicTraceEntry<Scalar>> trace_;
};

using SolverAbort = BasicSolverAbort<double>;

template <typename Scalar>
struct SpgProblem {
  std::function<Scalar(const DenseMatrix<Scalar>&)> objective;
  std::function<DenseMatrix<Scalar>(const DenseMatrix<Scalar>&)> gradient;
  Projector<Scalar> projector;
  // Optional transform of the k-th gradient (k = 0..K-1). Its presence
  // switches the solver to exactly max_iters fixed steps without line search.
  std::function<DenseMatrix<Scalar>(DenseMatrix<Scalar>, int)> grad_hook;
};

// Barzilai-Borwein (BB1) step <s,s>/<s,u>, clipped; bb_step_max when <s,u> <= 0.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar bb_step_length(const Eigen::MatrixBase<DerivedA>& s,
                                         const Eigen::MatrixBase<DerivedB>& u,
                                         typename DerivedA::Scalar step_min,
                                         typename DerivedA::Scalar step_max) {
  using Scalar = typename DerivedA::Scalar;
  const Scalar su = (s.array() * u.array()).sum();
  if (!(su > Scalar(0))) return step_max;
  const Scalar gamma = s.squaredNorm() / su;
  return std::clamp(gamma, step_min, step_max);
}

template <typename Derived>
typename Derived::Scalar bb_step_length(const Eigen::MatrixBase<Derived>& x_prev,
                                        const Eigen::MatrixBase<Derived>& x_curr,
                                        const Eigen::MatrixBase<Derived>& g_prev,
                                        const Eigen::MatrixBase<Derived>& g_curr,
                                        const BasicSolverParams<typename Derived::Scalar>& params) {
  return bb_step_length(x_curr - x_prev, g_curr - g_prev, params.bb_step_min, params.bb_step_max);
}

// Entrywise clamp of a gradient to [-c, c].
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime>
clamp_gradient(const Eigen::MatrixBase<Derived>& g, typename Derived::Scalar c) {
  if (!(c > 0)) throw DomainError("gradient clamp must be > 0");
  return g.cwiseMax(-c).cwiseMin(c);
}

// x_{k+1} = P(x_k - step_scale * gamma_k * g_k) with a nonmonotone Armijo
// backtracking along the projected direction.
template <typename Scalar>
BasicSolverResult<Scalar> spg_solve(const SpgProblem<Scalar>& problem, const DenseMatrix<Scalar>& x0,
                                    const BasicSolverParams<Scalar>& params) {
  using Matrix = DenseMatrix<Scalar>;
  params.validate();
  if (!problem.objective || !problem.gradient || !problem.projector) {
    throw ConfigError("spg problem needs objective, gradient and projector");
  }
  const bool fixed_steps = static_cast<bool>(problem.grad_hook);
  const bool backtrack = params.line_search && !fixed_steps;

  BasicSolverResult<Scalar> result;
  auto abort = [&](int k, Scalar value) {
    std::ostringstream msg;
    msg << "non-finite objective (" << value << ") at iteration " << k;
    if (!result.trace.empty()) msg << ", last finite objective " << result.trace.back().objective;
    throw BasicSolverAbort<Scalar>(msg.str(), result.trace);
  };

  Matrix x = problem.projector(x0).value;
  Scalar f = problem.objective(x);
  if (!std::isfinite(f)) abort(0, f);
  result.initial_objective = f;

  std::deque<Scalar> window{f};
  Matrix x_prev;
  Matrix g_prev;
  for (int k = 0; k < params.max_iters; ++k) {
    Matrix g = problem.gradient(x);
    if (g.rows() != x.rows() || g.cols() != x.cols()) throw DimensionError("gradient shape mismatch");
    if (fixed_steps) g = problem.grad_hook(std::move(g), k);

    Scalar gamma;
    if (k == 0) {
      const Scalar gmax = g.cwiseAbs().maxCoeff();
      if (gmax == Scalar(0) && !fixed_steps) {
        result.converged = true;
        break;
      }
      gamma = gmax > 0 ? std::clamp(Scalar(1) / gmax, params.bb_step_min, params.bb_step_max)
                       : params.bb_step_max;
    } else {
      gamma = bb_step_length(x - x_prev, g - g_prev, params.bb_step_min, params.bb_step_max);
    }

    auto trial = problem.projector(x - params.step_scale * gamma * g);
    Matrix direction = trial.value - x;
    if (!fixed_steps && direction.cwiseAbs().maxCoeff() == Scalar(0)) {
      result.converged = true;
      break;
    }

    Scalar lambda(1);
    Matrix x_next;
    Scalar f_next;
    if (backtrack) {
      const Scalar reference = *std::max_element(window.begin(), window.end());
      const Scalar slope = (g.array() * direction.array()).sum();
      for (int b = 0;; ++b) {
        x_next = x + lambda * direction;
        f_next = problem.objective(x_next);
        if (f_next <= reference + params.armijo_const * lambda * slope) break;
        if (b + 1 >= params.max_backtracks) break;
        lambda *= params.backtrack_factor;
      }
    } else {
      x_next = std::move(trial.value);
      f_next = problem.objective(x_next);
    }
    if (!std::isfinite(f_next)) abort(k + 1, f_next);

    result.trace.push_back({f_next, gamma, lambda, trial.converged});
    result.iterations_used = k + 1;

    window.push_back(f_next);
    if (static_cast<int>(window.size()) > params.nonmonotone_memory) window.pop_front();

    const Scalar change = std::abs(f_next - f);
    x_prev = std::move(x);
    g_prev = std::move(g);
    x = std::move(x_next);
    f = f_next;
    if (!fixed_steps && change <= params.tol_obj * std::max(Scalar(1), std::abs(f))) {
      result.converged = true;
      break;
    }
  }
  if (fixed_steps) result.converged = result.iterations_used == params.max_iters;
  result.solution = std::move(x);
  return result;
}

}  // namespace dpobmc

#endif  // DPOBMC_SPG_HPP
