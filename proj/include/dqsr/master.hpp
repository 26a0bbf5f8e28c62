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

#include <functional>
#include <span>
#include <vector>

#include "dqsr/core.hpp"

namespace dqsr::master {

/// One dissipator term Gamma_j (L rho L^dag - 1/2 {L^dag L, rho}); the rate
/// may depend on time.
struct JumpTerm {
  std::function<double(double)> rate;
  OperatorMatrix op;

  static JumpTerm constant(double gamma, OperatorMatrix op_in) {
    return {[gamma](double) { return gamma; }, std::move(op_in)};
  }
};

/// Right-hand side of the GKSL equation:
/// -i[H, rho] + sum_j Gamma_j(t) (L_j rho L_j^dag - 1/2 {L_j^dag L_j, rho}).
/// The output is Hermitian and traceless. Throws on a non-Hermitian H.
Eigen::MatrixXcd gksl_generator(const Eigen::MatrixXcd& rho,
                                const OperatorMatrix& hamiltonian,
                                std::span<const JumpTerm> jumps, double t);

/// Fixed-step RK4 integration of the GKSL equation from t = t0, recording
/// every step (horizon/dt + 1 matrices including the initial state).
/// Positivity is monitored, not enforced: an eigenvalue below -1e-8 raises
/// std::runtime_error("positivity lost, reduce dt").
std::vector<DensityMatrix> evolve_gksl(const DensityMatrix& rho0,
                                       const OperatorMatrix& hamiltonian,
                                       std::span<const JumpTerm> jumps,
                                       double horizon, double dt,
                                       double t0 = 0.0);

/// Tr_A of the generator for a pure state rho = |psi><psi| with
/// psi = sum_ij psi(i,j) |i>_A |j>_B and a single jump L_A (x) L_B:
///
///   sum_{i,i',j,j'} <i'|L_A^dag L_A|i> psi(i,j) conj(psi(i',j'))
///       x ( L_B |j><j'| L_B^dag - 1/2 {L_B^dag L_B, |j><j'|} )
///
/// The result is checked elementwise (1e-12) against the brute-force
/// Tr_A[gksl_generator(|psi><psi|)] on every call; disagreement throws.
Eigen::MatrixXcd reduced_generator_A(const Eigen::MatrixXcd& psi_coeffs,
                                     const OperatorMatrix& op_a,
                                     const OperatorMatrix& op_b);

enum class JumpLocality { LocalToA, ProductNonlocal, Entangled };

const char* to_string(JumpLocality locality);

/// Operator-Schmidt classification of L across the dA:dB split. Rank one
/// with the B factor proportional to the identity is LocalToA; rank one
/// otherwise ProductNonlocal; higher rank Entangled. Singular values below
/// 1e-10 of the largest are treated as zero.
JumpLocality locality_audit(const OperatorMatrix& op, int dim_a, int dim_b);

struct ToyGkslWeights {
  double gamma1;  // gamma * tanh(2 gamma t)
  double gamma2;  // gamma * (tanh^2(2 gamma t) - 1) / tanh(2 gamma t), < 0
};

/// Time-dependent weights of the toy model's master equation with jump
/// operators tau^3 and tau^1. Diverges at t = 0; throws for t <= 0.
ToyGkslWeights toy_gksl_weights(double t, double gamma);

/// Exact toy-model state on the two-branch logical space:
/// rho(t) = (tau^0 + tau^1 / cosh(2 gamma t) + tau^3 tanh(2 gamma t)) / 2,
/// starting from the equal superposition.
Eigen::MatrixXcd toy_exact_density(double t, double gamma);

/// Time derivative of toy_exact_density.
Eigen::MatrixXcd toy_exact_density_dot(double t, double gamma);

struct KrausCheckReport {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  // || sum_i K_i^dag K_i - I ||_max with the weights entering as the formal
  // squares of their square-root symbols (gamma2 < 0 makes K_3's scalar
  // imaginary; the formal algebra keeps its square negative)
  double identity_defect = 0.0;
  // || sum_i K_i rho K_i^dag - (rho + dt * generator(rho)) ||_max at the
  // exact state rho(t)
  double map_defect = 0.0;
  bool k3_weight_real = false;  // sqrt(dt * Gamma_2) real? false for t > 0
};

/// Small-increment Kraus decomposition of the toy map at time t:
/// K1 = (1 - dt (G1+G2)/2) I, K2 = sqrt(dt G1) tau^3, K3 = sqrt(dt G2) tau^1.
/// Reports the identity and map defects (both O(dt^2)) and whether the K3
/// weight is real.
KrausCheckReport toy_kraus_check(double t, double dt, double gamma);

/// Memory kernel D(t, s) over channel indices; returns an n_L x n_L matrix.
using MemoryKernel = std::function<Eigen::MatrixXd(double, double)>;

/// Time-local integro-differential evolution
///   d rho/dt = -gamma sum_{mu,nu} [ integral_0^t D_{mu,nu}(t,s) ds ]
///              [L_mu, [L_nu, rho(t)]]
/// with the kernel integral done by composite trapezoid on the dt grid.
/// Records every step. L operators must be Hermitian.
std::vector<DensityMatrix> evolve_nonmarkovian(
    const DensityMatrix& rho0, std::span<const OperatorMatrix> ops,
    const MemoryKernel& kernel, double gamma, double horizon, double dt);

}  // namespace dqsr::master
