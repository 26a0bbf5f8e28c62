// Copyright 2026 The dqsrw developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dqsr/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dqsr::models {

namespace {

void require_colored(const noise::NoiseKind& kind, const char* model) {
  if (kind.process == noise::NoiseProcess::White) {
    throw std::invalid_argument(std::string(model) +
                                ": white noise has no xi process; use the "
                                "CSL model for the white-noise limit");
  }
}

}  // namespace

void validate(const ModelKind& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CslModel>) {
          if (!(m.gamma >= 0.0))
            throw std::invalid_argument("CSL: gamma must be >= 0");
        } else if constexpr (std::is_same_v<T, SuvModel>) {
          if (!(m.coupling_j > 0.0))
            throw std::invalid_argument("SUV: J must be > 0 (use the linear "
                                        "model for J = 0)");
          if (!(m.coupling_g >= 0.0))
            throw std::invalid_argument("SUV: G must be >= 0");
          require_colored(m.noise, "SUV");
        } else if constexpr (std::is_same_v<T, LinearModel>) {
          if (!(m.coupling_g >= 0.0))
            throw std::invalid_argument("linear model: G must be >= 0");
          require_colored(m.noise, "linear model");
        } else {
          if (!(m.gamma >= 0.0))
            throw std::invalid_argument("toy model: gamma must be >= 0");
        }
      },
      model);
}

std::string to_string(const ModelKind& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CslModel>) {
          return "csl(gamma=" + std::to_string(m.gamma) + ")";
        } else if constexpr (std::is_same_v<T, SuvModel>) {
          return "suv(J=" + std::to_string(m.coupling_j) +
                 ",G=" + std::to_string(m.coupling_g) + "," +
                 noise::to_string(m.noise) + ")";
        } else if constexpr (std::is_same_v<T, LinearModel>) {
          return "linear(G=" + std::to_string(m.coupling_g) + "," +
                 noise::to_string(m.noise) + ")";
        } else {
          return "toy(gamma=" + std::to_string(m.gamma) + ")";
        }
      },
      model);
}

double default_dt(const ModelKind& model) {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CslModel>) {
          return 1e-3 / std::max(m.gamma, 1e-12);
        } else if constexpr (std::is_same_v<T, SuvModel>) {
          double dt = 1.0 / (100.0 * std::max({m.coupling_j, m.coupling_g,
                                               1e-12}));
          if (!m.noise.is_static()) dt = std::min(dt, m.noise.tau / 100.0);
          return dt;
        } else if constexpr (std::is_same_v<T, LinearModel>) {
          double dt = 1.0 / (100.0 * std::max(m.coupling_g, 1e-12));
          if (!m.noise.is_static()) dt = std::min(dt, m.noise.tau / 100.0);
          return dt;
        } else {
          return 1e-3 / std::max(m.gamma, 1e-12);
        }
      },
      model);
}

void validate(const TrajectoryConfig& config) {
  if (!(config.dt > 0.0) || !(config.dt <= config.horizon))
    throw std::invalid_argument("trajectory config: need 0 < dt <= horizon");
  double prev = -1.0;
  for (double t : config.record_grid) {
    if (t < 0.0 || t > config.horizon * (1.0 + 1e-12))
      throw std::invalid_argument(
          "trajectory config: record grid outside [0, horizon]");
    if (t <= prev)
      throw std::invalid_argument(
          "trajectory config: record grid must be strictly increasing");
    prev = t;
  }
  if (!(config.initial.norm_sq() > 0.0))
    throw std::invalid_argument("trajectory config: zero initial state");
}

TwoStateWavefunction csl_step(const TwoStateWavefunction& psi, double gamma,
                              double dt, double dW) {
  const double s = expectation_sigma(psi);
  const double f0 = 1.0 - s;   // (sigma - <sigma>) on branch 0
  const double f1 = -1.0 - s;  // and on branch 1
  const double u = -0.5 * gamma * f0 * f0 * dt + std::sqrt(gamma) * f0 * dW;
  const double v = -0.5 * gamma * f1 * f1 * dt + std::sqrt(gamma) * f1 * dW;
  TwoStateWavefunction next{psi.a0 * (1.0 + u), psi.a1 * (1.0 + v)};
  if (!(next.norm_sq() >= 1e-12)) {
    throw std::runtime_error("step too large");
  }
  return normalize(next);
}

BranchDerivative suv_derivative(const TwoStateWavefunction& psi, double xi,
                                double coupling_j, double coupling_g) {
  const double s = expectation_sigma(psi);
  const double a = coupling_j * s + coupling_g * xi;
  return {a * (1.0 - s) * psi.a0, -a * (1.0 + s) * psi.a1};
}

namespace {

// RK4 stage derivative for a state-dependent branch generator
// A(s) (sigma - s); `coef` is A as a function of the stage state's s.
template <class CoefFn>
inline BranchDerivative branch_derivative(const TwoStateWavefunction& psi,
                                          CoefFn&& coef) {
  const double s = expectation_sigma(psi);
  const double a = coef(s);
  return {a * (1.0 - s) * psi.a0, -a * (1.0 + s) * psi.a1};
}

template <class CoefFn>
TwoStateWavefunction rk4_branch_step(const TwoStateWavefunction& psi,
                                     double dt, CoefFn&& coef) {
  const BranchDerivative k1 = branch_derivative(psi, coef);
  const TwoStateWavefunction p2{psi.a0 + 0.5 * dt * k1.d_a0,
                                psi.a1 + 0.5 * dt * k1.d_a1};
  const BranchDerivative k2 = branch_derivative(p2, coef);
  const TwoStateWavefunction p3{psi.a0 + 0.5 * dt * k2.d_a0,
                                psi.a1 + 0.5 * dt * k2.d_a1};
  const BranchDerivative k3 = branch_derivative(p3, coef);
  const TwoStateWavefunction p4{psi.a0 + dt * k3.d_a0,
                                psi.a1 + dt * k3.d_a1};
  const BranchDerivative k4 = branch_derivative(p4, coef);
  return {psi.a0 + dt / 6.0 *
                       (k1.d_a0 + 2.0 * k2.d_a0 + 2.0 * k3.d_a0 + k4.d_a0),
          psi.a1 + dt / 6.0 *
                       (k1.d_a1 + 2.0 * k2.d_a1 + 2.0 * k3.d_a1 + k4.d_a1)};
}

}  // namespace

SuvStepResult suv_step(const TwoStateWavefunction& psi,
                       const noise::NoiseState& xi, double coupling_j,
                       double coupling_g, double dt, noise::RngStream& rng,
                       double max_rate_per_substep) {
  const noise::NoiseState next_xi = noise::step_noise(xi, dt, rng);
  const double xv = next_xi.value;
  const double rate = std::abs(coupling_j) + std::abs(coupling_g * xv);
  const int substeps = std::max(
      1, static_cast<int>(std::ceil(dt * rate / max_rate_per_substep)));
  const double h = dt / substeps;
  TwoStateWavefunction state = psi;
  const auto coef = [=](double s) { return coupling_j * s + coupling_g * xv; };
  for (int m = 0; m < substeps; ++m) {
    state = rk4_branch_step(state, h, coef);
  }
  return {normalize(state), next_xi};
}

TwoStateWavefunction toy_step(const TwoStateWavefunction& psi, double gamma,
                              double dt) {
  return normalize(rk4_branch_step(psi, dt, [=](double) { return gamma; }));
}

double toy_analytic(double s0, double t, double gamma) {
  if (std::abs(s0) >= 1.0) return s0 > 0.0 ? 1.0 : -1.0;
  return std::tanh(2.0 * gamma * t + std::atanh(s0));
}

}  // namespace dqsr::models
