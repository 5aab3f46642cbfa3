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

#ifndef DPOBMC_TESTS_ORACLES_HPP
#define DPOBMC_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace dpobmc::testing_oracles {

// Nearest point to (a, b) in {|x| + |y| <= tau, |x| <= alpha, |y| <= alpha}
// by active-set enumeration: the point itself, its projection onto every
// constraint line, and every pairwise intersection; the nearest feasible
// candidate wins. alpha may be +inf.
inline std::pair<double, double> project_diag_qp(double a, double b, double tau, double alpha) {
  struct Line {
    double nx, ny, c;  // nx x + ny y <= c
  };
  std::vector<Line> lines;
  for (double sx : {-1.0, 1.0})
    for (double sy : {-1.0, 1.0}) lines.push_back({sx, sy, tau});
  if (std::isfinite(alpha)) {
    for (double s : {-1.0, 1.0}) {
      lines.push_back({s, 0, alpha});
      lines.push_back({0, s, alpha});
    }
  }
  auto feasible = [&](double x, double y) {
    const double slack = 1e-12 * std::max(1.0, tau);
    for (const Line& l : lines)
      if (l.nx * x + l.ny * y > l.c + slack) return false;
    return true;
  };
  std::vector<std::pair<double, double>> candidates{{a, b}};
  for (const Line& l : lines) {
    const double t = (l.nx * a + l.ny * b - l.c) / (l.nx * l.nx + l.ny * l.ny);
    candidates.push_back({a - t * l.nx, b - t * l.ny});
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const Line& p = lines[i];
      const Line& q = lines[j];
      const double det = p.nx * q.ny - p.ny * q.nx;
      if (det == 0) continue;
      candidates.push_back({(p.c * q.ny - p.ny * q.c) / det, (p.nx * q.c - p.c * q.nx) / det});
    }
  }
  std::pair<double, double> best{0, 0};
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& [x, y] : candidates) {
    if (!feasible(x, y)) continue;
    const double d = (x - a) * (x - a) + (y - b) * (y - b);
    if (d < best_d) best_d = d, best = {x, y};
  }
  return best;
}

// Kolmogorov-Smirnov two-sample statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

inline double nuclear_norm_2x2(const Eigen::Matrix2d& m) {
  return std::sqrt(m.squaredNorm() + 2 * std::abs(m.determinant()));
}

// Minimum of a convex loss over {2x2 X : ||X||_* <= tau, |X_ij| <= alpha}:
// exhaustive grid with spacing alpha / half_steps, then repeated local grids
// of shrinking spacing around the incumbent.
template <typename Loss>
double feasible_grid_min(const Loss& loss, double tau, double alpha, int half_steps = 20) {
  auto eval = [&](const Eigen::Matrix2d& m) {
    if (m.cwiseAbs().maxCoeff() > alpha || nuclear_norm_2x2(m) > tau) {
      return std::numeric_limits<double>::infinity();
    }
    return loss(m);
  };
  double h = alpha / half_steps;
  Eigen::Matrix2d best = Eigen::Matrix2d::Zero();
  double best_value = eval(best);
  for (int a = -half_steps; a <= half_steps; ++a)
    for (int b = -half_steps; b <= half_steps; ++b)
      for (int c = -half_steps; c <= half_steps; ++c)
        for (int d = -half_steps; d <= half_steps; ++d) {
          Eigen::Matrix2d m;
          m << a * h, b * h, c * h, d * h;
          const double v = eval(m);
          if (v < best_value) best_value = v, best = m;
        }
  while (h > 1e-7) {
    h /= 4;
    const Eigen::Matrix2d center = best;
    for (int a = -4; a <= 4; ++a)
      for (int b = -4; b <= 4; ++b)
        for (int c = -4; c <= 4; ++c)
          for (int d = -4; d <= 4; ++d) {
            Eigen::Matrix2d m = center;
            m(0, 0) += a * h, m(0, 1) += b * h, m(1, 0) += c * h, m(1, 1) += d * h;
            const double v = eval(m);
            if (v < best_value) best_value = v, best = m;
          }
  }
  return best_value;
}

}  // namespace dpobmc::testing_oracles

#endif  // DPOBMC_TESTS_ORACLES_HPP
