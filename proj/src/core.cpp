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

#include "dqsr/core.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace dqsr {

TwoStateWavefunction normalize(const TwoStateWavefunction& psi) {
  const double n2 = psi.norm_sq();
  if (!(n2 > 1e-300)) {
    throw std::domain_error("degenerate state");
  }
  const double inv = 1.0 / std::sqrt(n2);
  return {psi.a0 * inv, psi.a1 * inv};
}

double expectation_sigma(const TwoStateWavefunction& psi) {
  return std::norm(psi.a0) - std::norm(psi.a1);
}

bool is_hermitian(const OperatorMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_finite(const OperatorMatrix& m) {
  return m.allFinite();
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd m, const Tolerances& tol)
    : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) {
    throw std::invalid_argument("density matrix must be square");
  }
  if (!m_.allFinite()) {
    throw std::invalid_argument("density matrix has non-finite entries");
  }
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > tol.hermitian) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  if (std::abs(m_.trace().real() - 1.0) > tol.trace ||
      std::abs(m_.trace().imag()) > tol.trace) {
    throw std::invalid_argument("density matrix trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_,
                                                     Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol.psd_floor) {
    throw std::invalid_argument("density matrix is not positive semidefinite");
  }
}

double DensityMatrix::purity() const {
  return (m_ * m_).trace().real();
}

Eigen::MatrixXcd partial_trace_matrix(const Eigen::MatrixXcd& m, int dim_a,
                                      int dim_b, Subsystem keep) {
  if (dim_a < 1 || dim_b < 1 ||
      m.rows() != static_cast<Eigen::Index>(dim_a) * dim_b ||
      m.rows() != m.cols()) {
    throw std::invalid_argument(
        "partial trace: matrix dimension does not match dim_a * dim_b");
  }
  if (keep == Subsystem::B) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_b, dim_b);
    for (int j = 0; j < dim_b; ++j)
      for (int jp = 0; jp < dim_b; ++jp)
        for (int i = 0; i < dim_a; ++i)
          out(j, jp) += m(i * dim_b + j, i * dim_b + jp);
    return out;
  }
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_a, dim_a);
  for (int i = 0; i < dim_a; ++i)
    for (int ip = 0; ip < dim_a; ++ip)
      for (int j = 0; j < dim_b; ++j)
        out(i, ip) += m(i * dim_b + j, ip * dim_b + j);
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, int dim_a, int dim_b,
                            Subsystem keep) {
  return DensityMatrix(
      partial_trace_matrix(rho.matrix(), dim_a, dim_b, keep));
}

DensityMatrix pure_density(std::span<const Amplitude> coeffs) {
  if (coeffs.empty()) {
    throw std::invalid_argument("pure_density: empty coefficient vector");
  }
  Eigen::VectorXcd v(coeffs.size());
  for (size_t i = 0; i < coeffs.size(); ++i) v(i) = coeffs[i];
  const double n = v.norm();
  if (!(n > 1e-150)) {
    throw std::domain_error("pure_density: zero state vector");
  }
  v /= n;
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix pure_density(const TwoStateWavefunction& psi) {
  const TwoStateWavefunction n = normalize(psi);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v(0) = n.a0;
  v(3) = n.a1;
  return DensityMatrix(v * v.adjoint());
}

}  // namespace dqsr
