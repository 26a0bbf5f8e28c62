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

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dqsr {

using Amplitude = std::complex<double>;

/// Validation tolerances for quantum-state types. The defaults are sized for
/// double-precision accumulation over <= 1e5 integration steps.
struct Tolerances {
  double hermitian = 1e-12;
  double trace = 1e-10;
  double psd_floor = 1e-10;
  double unit_norm = 1e-12;
};

/// Two-branch entangled state in the Schmidt basis: a0 multiplies the
/// |0>_A|0>_B branch, a1 the |1>_A|1>_B branch. Measurement-device states
/// are absorbed into the two branch labels.
struct TwoStateWavefunction {
  Amplitude a0{1.0, 0.0};
  Amplitude a1{0.0, 0.0};

  double norm_sq() const { return std::norm(a0) + std::norm(a1); }
  double p0() const { return std::norm(a0); }
  double p1() const { return std::norm(a1); }
};

/// Rescales to unit norm. The branch ratio a0/a1 is preserved.
/// Throws std::domain_error("degenerate state") on (near-)zero input.
TwoStateWavefunction normalize(const TwoStateWavefunction& psi);

/// <sigma_z> of a normalized two-branch state: |a0|^2 - |a1|^2 in [-1, 1].
double expectation_sigma(const TwoStateWavefunction& psi);

using OperatorMatrix = Eigen::MatrixXcd;

bool is_hermitian(const OperatorMatrix& m, double tol = 1e-12);
bool is_finite(const OperatorMatrix& m);

/// Hermitian, unit-trace, positive-semidefinite matrix. Construction
/// validates all three invariants (PSD up to a numerical floor).
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd m, const Tolerances& tol = {});

  Eigen::Index dim() const { return m_.rows(); }
  const Eigen::MatrixXcd& matrix() const { return m_; }

  double purity() const;  // Tr[rho^2]

 private:
  Eigen::MatrixXcd m_;
};

enum class Subsystem { A, B };

/// Partial trace of a dA*dB x dA*dB matrix over the discarded subsystem.
/// Composite index convention: row (i, j) -> i * dB + j with i on A, j on B.
/// Works on arbitrary (not necessarily positive) matrices.
Eigen::MatrixXcd partial_trace_matrix(const Eigen::MatrixXcd& m, int dim_a,
                                      int dim_b, Subsystem keep);

DensityMatrix partial_trace(const DensityMatrix& rho, int dim_a, int dim_b,
                            Subsystem keep);

/// Rank-1 projector |psi><psi| from state-vector coefficients.
/// Throws on a zero vector; non-unit input is normalized first.
DensityMatrix pure_density(std::span<const Amplitude> coeffs);

/// |psi><psi| for the two-branch state embedded in the 2x2 composite space
/// (branch 0 -> |00>, branch 1 -> |11>).
DensityMatrix pure_density(const TwoStateWavefunction& psi);

}  // namespace dqsr
