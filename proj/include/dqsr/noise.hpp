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

#pragma once

#include <string>

#include "dqsr/rng.hpp"

namespace dqsr::noise {

enum class NoiseProcess {
  White,           // delta-correlated Wiener increments (no xi state)
  Ou,              // Ornstein-Uhlenbeck, g = sqrt(2/tau), stationary N(0,1)
  Sbm,             // spherical Brownian motion, g = sqrt((1-xi^2)/tau)
  StaticOu,        // infinite correlation time, xi ~ N(0,1) held fixed
  StaticSbm,       // infinite correlation time, xi ~ U[-1,1] held fixed
};

struct NoiseKind {
  NoiseProcess process = NoiseProcess::White;
  double tau = 0.0;  // correlation time; > 0 for Ou/Sbm

  static NoiseKind white() { return {NoiseProcess::White, 0.0}; }
  static NoiseKind ou(double tau);
  static NoiseKind sbm(double tau);
  static NoiseKind static_ou() { return {NoiseProcess::StaticOu, 0.0}; }
  static NoiseKind static_sbm() { return {NoiseProcess::StaticSbm, 0.0}; }

  bool is_static() const {
    return process == NoiseProcess::StaticOu ||
           process == NoiseProcess::StaticSbm;
  }
  bool is_bounded() const {
    return process == NoiseProcess::Sbm || process == NoiseProcess::StaticSbm;
  }
};

std::string to_string(const NoiseKind& kind);

/// Instantaneous value of the stochastic parameter xi_t together with the
/// process it follows. For SBM kinds the value stays in [-1, 1].
struct NoiseState {
  double value = 0.0;
  NoiseKind kind;
};

/// Pure update rules (noise injected explicitly), used by the steppers and
/// directly testable.
double ou_update(double xi, double dt, double tau, double eta);
double sbm_update(double xi, double dt, double tau, double eta);

/// Exact OU transition over dt: xi' = xi e^{-dt/tau} + sqrt(1-e^{-2dt/tau}) eta.
NoiseState ou_step(const NoiseState& xi, double dt, RngStream& rng);

/// Euler-Maruyama SBM step, clamped to [-1, 1].
NoiseState sbm_step(const NoiseState& xi, double dt, RngStream& rng);

/// Draw from the stationary law of the static kinds: N(0,1) for StaticOu,
/// U[-1,1] for StaticSbm. The value is then held for the whole trajectory.
NoiseState sample_static(const NoiseKind& kind, RngStream& rng);

/// Stationary initial value for any kind (dynamic kinds start equilibrated).
NoiseState initial_state(const NoiseKind& kind, RngStream& rng);

/// Advance one step; static kinds return the state unchanged.
NoiseState step_noise(const NoiseState& xi, double dt, RngStream& rng);

}  // namespace dqsr::noise
