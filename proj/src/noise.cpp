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

#include "dqsr/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dqsr::noise {

NoiseKind NoiseKind::ou(double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("OU noise requires tau > 0");
  return {NoiseProcess::Ou, tau};
}

NoiseKind NoiseKind::sbm(double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("SBM noise requires tau > 0");
  return {NoiseProcess::Sbm, tau};
}

std::string to_string(const NoiseKind& kind) {
  switch (kind.process) {
    case NoiseProcess::White: return "white";
    case NoiseProcess::Ou: return "ou(tau=" + std::to_string(kind.tau) + ")";
    case NoiseProcess::Sbm: return "sbm(tau=" + std::to_string(kind.tau) + ")";
    case NoiseProcess::StaticOu: return "static-ou";
    case NoiseProcess::StaticSbm: return "static-sbm";
  }
  return "?";
}

double ou_update(double xi, double dt, double tau, double eta) {
  const double decay = std::exp(-dt / tau);
  return xi * decay + std::sqrt(1.0 - decay * decay) * eta;
}

double sbm_update(double xi, double dt, double tau, double eta) {
  const double diff_sq = std::max(0.0, (1.0 - xi * xi) / tau);
  const double next = xi - xi * dt / tau + std::sqrt(diff_sq * dt) * eta;
  return std::clamp(next, -1.0, 1.0);
}

NoiseState ou_step(const NoiseState& xi, double dt, RngStream& rng) {
  if (xi.kind.process != NoiseProcess::Ou)
    throw std::invalid_argument("ou_step: state is not OU noise");
  if (!(dt > 0.0)) throw std::invalid_argument("ou_step: dt <= 0");
  return {ou_update(xi.value, dt, xi.kind.tau, rng.normal()), xi.kind};
}

NoiseState sbm_step(const NoiseState& xi, double dt, RngStream& rng) {
  if (xi.kind.process != NoiseProcess::Sbm)
    throw std::invalid_argument("sbm_step: state is not SBM noise");
  if (!(dt > 0.0)) throw std::invalid_argument("sbm_step: dt <= 0");
  return {sbm_update(xi.value, dt, xi.kind.tau, rng.normal()), xi.kind};
}

NoiseState sample_static(const NoiseKind& kind, RngStream& rng) {
  switch (kind.process) {
    case NoiseProcess::StaticOu:
      return {rng.normal(), kind};
    case NoiseProcess::StaticSbm:
      return {2.0 * rng.uniform01() - 1.0, kind};
    default:
      throw std::invalid_argument("sample_static: kind is not static");
  }
}

NoiseState initial_state(const NoiseKind& kind, RngStream& rng) {
  switch (kind.process) {
    case NoiseProcess::White:
      return {0.0, kind};
    case NoiseProcess::Ou:
      return {rng.normal(), kind};
    case NoiseProcess::Sbm:
      return {2.0 * rng.uniform01() - 1.0, kind};
    case NoiseProcess::StaticOu:
    case NoiseProcess::StaticSbm:
      return sample_static(kind, rng);
  }
  throw std::logic_error("initial_state: unknown noise kind");
}

NoiseState step_noise(const NoiseState& xi, double dt, RngStream& rng) {
  switch (xi.kind.process) {
    case NoiseProcess::Ou:
      return ou_step(xi, dt, rng);
    case NoiseProcess::Sbm:
      return sbm_step(xi, dt, rng);
    default:
      return xi;  // white carries no state; static kinds are frozen
  }
}

}  // namespace dqsr::noise
