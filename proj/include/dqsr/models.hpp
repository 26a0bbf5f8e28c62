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

#include <variant>
#include <vector>

#include "dqsr/core.hpp"
#include "dqsr/noise.hpp"

namespace dqsr::models {

/// White-noise collapse model with Ito generator
/// -gamma/2 (sigma - <sigma>)^2 dt + sqrt(gamma) (sigma - <sigma>) dW.
struct CslModel {
  double gamma = 1.0;
};

/// Colored-noise model: d|psi> = (J <sigma> + G xi_t)(sigma - <sigma>)|psi> dt,
/// with xi_t following its own OU/SBM (or static) dynamics.
struct SuvModel {
  double coupling_j = 1.0;
  double coupling_g = 1.0;
  noise::NoiseKind noise;
};

/// SuvModel with the nonlinearity switched off (J = 0).
struct LinearModel {
  double coupling_g = 1.0;
  noise::NoiseKind noise;
};

/// Deterministic reduction d|psi>/dt = gamma (sigma - <sigma>)|psi>.
struct ToyModel {
  double gamma = 1.0;
};

using ModelKind = std::variant<CslModel, SuvModel, LinearModel, ToyModel>;

void validate(const ModelKind& model);
std::string to_string(const ModelKind& model);

/// Scheme step-size rule: min(tau/100, 1/(100 max(J, G, gamma))), except CSL
/// which uses gamma*dt = 1e-3 (the Euler-Maruyama bound for that model).
double default_dt(const ModelKind& model);

struct TrajectoryConfig {
  double dt = 1e-3;
  double horizon = 1.0;
  std::vector<double> record_grid;  // sorted, within [0, horizon]
  TwoStateWavefunction initial{{1.0, 0.0}, {0.0, 0.0}};
};

void validate(const TrajectoryConfig& config);

/// One Euler-Maruyama step of the CSL generator applied branchwise
/// (sigma eigenvalue +1 on branch 0, -1 on branch 1), then renormalized.
/// Throws std::runtime_error("step too large") if the pre-normalization
/// norm collapses below 1e-12.
TwoStateWavefunction csl_step(const TwoStateWavefunction& psi, double gamma,
                              double dt, double dW);

struct BranchDerivative {
  Amplitude d_a0;
  Amplitude d_a1;
};

/// d a0/dt = A (1 - s) a0,  d a1/dt = -A (1 + s) a1, with s = <sigma> and
/// A = J s + G xi. Conserves the norm exactly on the unit sphere.
BranchDerivative suv_derivative(const TwoStateWavefunction& psi, double xi,
                                double coupling_j, double coupling_g);

struct SuvStepResult {
  TwoStateWavefunction psi;
  noise::NoiseState xi;
};

/// Advances xi by its own process, then the state by an RK4 step of
/// suv_derivative with xi frozen (random-ODE reading: the state equation has
/// no dW term of its own), then renormalizes. If dt * (|J| + |G xi|) exceeds
/// max_rate_per_substep the RK4 step is split into equal substeps so the
/// integration stays accurate for large static |xi|.
SuvStepResult suv_step(const TwoStateWavefunction& psi,
                       const noise::NoiseState& xi, double coupling_j,
                       double coupling_g, double dt, noise::RngStream& rng,
                       double max_rate_per_substep = 0.05);

/// RK4 step of the deterministic reduction generator (A = gamma fixed).
TwoStateWavefunction toy_step(const TwoStateWavefunction& psi, double gamma,
                              double dt);

/// Exact solution s(t) = tanh(2 gamma t + artanh(s0)); returns s0 at the
/// fixed points |s0| = 1.
double toy_analytic(double s0, double t, double gamma);

}  // namespace dqsr::models
