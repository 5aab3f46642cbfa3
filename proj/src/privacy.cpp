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

#include "dpobmc/privacy.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "dpobmc/errors.hpp"

namespace dpobmc {

std::string_view to_string(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::Clear: return "Clear";
    case Mechanism::Input: return "InP";
    case Mechanism::Objective: return "ObjP";
    case Mechanism::Gradient: return "GraP";
    case Mechanism::Output: return "OutP";
  }
  return "?";
}

Mechanism parse_mechanism(std::string_view name) {
  for (auto m : {Mechanism::Clear, Mechanism::Input, Mechanism::Objective, Mechanism::Gradient,
                 Mechanism::Output}) {
    if (name == to_string(m)) return m;
  }
  if (name == "clear") return Mechanism::Clear;
  if (name == "input" || name == "inp") return Mechanism::Input;
  if (name == "objective" || name == "objp") return Mechanism::Objective;
  if (name == "gradient" || name == "grap") return Mechanism::Gradient;
  if (name == "output" || name == "outp") return Mechanism::Output;
  throw ConfigError("unknown mechanism '" + std::string(name) + "'");
}

void PrivacySpec::validate() const {
  if (mechanism == Mechanism::Clear) return;
  if (!(epsilon > 0)) throw ConfigError("epsilon must be > 0 for private mechanisms");
  auto check_prob = [](const std::optional<double>& p, const char* name) {
    if (p && !(*p >= 0 && *p <= 1)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
  };
  check_prob(p1, "p1");
  check_prob(p2, "p2");
  if (mechanism == Mechanism::Input && p1.has_value() != p2.has_value()) {
    throw ConfigError("input perturbation needs both p1 and p2, or neither");
  }
  if (mechanism == Mechanism::Input && p1 && !rr_privacy_feasible(*p1, *p2, epsilon)) {
    throw ConfigError("transition probabilities (" + std::to_string(*p1) + ", " +
                      std::to_string(*p2) + ") do not give " + std::to_string(epsilon) +
                      "-differential privacy");
  }
  if (mechanism == Mechanism::Gradient) {
    if (!iterations || *iterations <= 0) throw ConfigError("gradient perturbation needs K > 0");
    if (!clamp || !(*clamp > 0)) throw ConfigError("gradient perturbation needs clamp C > 0");
  }
}

RngHandle::RngHandle(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

RngHandle RngHandle::derive(std::uint64_t sub) const {
  // splitmix64 finalizer over (stream, sub) keeps derived streams distinct.
  std::uint64_t z = stream_ + 0x9e3779b97f4a7c15ULL * (sub + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return RngHandle(seed_, z);
}

double RngHandle::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

ObservationSet rr_perturb(const ObservationSet& obs, double p1, double p2, RngHandle& rng) {
  if (!(p1 >= 0 && p1 <= 1 && p2 >= 0 && p2 <= 1)) {
    throw DomainError("transition probabilities must lie in [0, 1]");
  }
  std::vector<int> values;
  values.reserve(obs.size());
  for (const auto& e : obs) {
    const double flip = e.value > 0 ? p1 : p2;
    values.push_back(rng.uniform() < flip ? -e.value : e.value);
  }
  return obs.with_values(values);
}

double p_from_epsilon(double epsilon) {
  if (!(epsilon >= 0)) throw DomainError("epsilon must be >= 0");
  return 1.0 / (1.0 + std::exp(epsilon));
}

double epsilon_from_p(double p) {
  if (!(p > 0 && p < 0.5)) throw DomainError("p must lie in (0, 1/2)");
  return std::log1p(-p) - std::log(p);
}

bool rr_privacy_feasible(double p1, double p2, double epsilon) {
  if (!(epsilon >= 0)) return false;
  if (std::isinf(epsilon)) return true;
  const double e = std::exp(epsilon);
  // Relative slack absorbs rounding at the calibrated boundary p = 1/(1+e^eps).
  constexpr double kSlack = 1e-12;
  const double lower = 1.0 - p2 * e;
  const double upper = (1.0 - p2) * e;
  return p1 >= lower - kSlack * std::max(1.0, std::abs(lower)) &&
         p1 <= upper + kSlack * std::max(1.0, std::abs(upper));
}

double sample_laplace(double scale, RngHandle& rng) {
  if (!(scale > 0)) throw DomainError("laplace scale must be > 0");
  double u;
  do {
    u = rng.uniform();
  } while (u == 0.0);
  u -= 0.5;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0 ? -magnitude : magnitude;
}

double sample_laplace_gamma_sign(double scale, RngHandle& rng) {
  if (!(scale > 0)) throw DomainError("laplace scale must be > 0");
  std::gamma_distribution<double> magnitude(1.0, scale);
  const double l = magnitude(rng.engine());
  return rng.uniform() < 0.5 ? -l : l;
}

Eigen::VectorXd laplace_vector(Eigen::Index n, double scale, RngHandle& rng) {
  if (!(scale >= 0) || std::isinf(scale)) throw DomainError("laplace scale must be finite and >= 0");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  if (scale == 0) return out;
  for (Eigen::Index k = 0; k < n; ++k) out(k) = sample_laplace(scale, rng);
  return out;
}

Eigen::MatrixXd laplace_matrix(Eigen::Index rows, Eigen::Index cols, double scale, RngHandle& rng) {
  Eigen::VectorXd flat = laplace_vector(rows * cols, scale, rng);
  return Eigen::Map<Eigen::MatrixXd>(flat.data(), rows, cols);
}

double objective_sensitivity(const LinkModel& model, double alpha) {
  model.validate();
  if (!(alpha >= 0) || std::isinf(alpha)) throw DomainError("alpha must be finite and >= 0");
  if (model.kind == LinkKind::Logistic) return 1.0;
  return 2.0 * link_derivative(model, 0.0) / link_value(model, -alpha);
}

double gradient_l1_sensitivity(double clamp) {
  if (!(clamp > 0)) throw DomainError("clamp must be > 0");
  return 2.0 * clamp;
}

Composition compose_sequential(std::span<const double> epsilons) {
  for (double e : epsilons) {
    if (!(e > 0)) throw DomainError("composed budgets must be > 0");
  }
  return {std::accumulate(epsilons.begin(), epsilons.end(), 0.0), epsilons.empty()};
}

void PrivacyAccountant::spend(double epsilon) {
  if (!(epsilon > 0)) throw DomainError("spent budget must be > 0");
  spends_.push_back(epsilon);
}

}  // namespace dpobmc
