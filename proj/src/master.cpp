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

#include "dqsr/master.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace dqsr::master {

namespace {

const std::complex<double> kI{0.0, 1.0};

Eigen::Matrix2cd pauli(int which) {
  Eigen::Matrix2cd m;
  switch (which) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw std::logic_error("unsupported Pauli index");
  }
  return m;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

void check_positivity(const Eigen::MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho,
                                                     Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8) {
    throw std::runtime_error("positivity lost, reduce dt");
  }
}

}  // namespace

Eigen::MatrixXcd gksl_generator(const Eigen::MatrixXcd& rho,
                                const OperatorMatrix& hamiltonian,
                                std::span<const JumpTerm> jumps, double t) {
  const Eigen::Index d = rho.rows();
  if (rho.cols() != d) throw std::invalid_argument("gksl: rho not square");
  if (hamiltonian.size() > 0) {
    if (hamiltonian.rows() != d || hamiltonian.cols() != d)
      throw std::invalid_argument("gksl: Hamiltonian dimension mismatch");
    if (!is_hermitian(hamiltonian, 1e-12 * std::max(
            1.0, hamiltonian.cwiseAbs().maxCoeff())))
      throw std::invalid_argument("gksl: Hamiltonian is not Hermitian");
  }

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  if (hamiltonian.size() > 0) {
    out -= kI * (hamiltonian * rho - rho * hamiltonian);
  }
  for (const auto& jump : jumps) {
    if (jump.op.rows() != d || jump.op.cols() != d)
      throw std::invalid_argument("gksl: jump operator dimension mismatch");
    const double gamma = jump.rate(t);
    const Eigen::MatrixXcd ldag_l = jump.op.adjoint() * jump.op;
    out += gamma * (jump.op * rho * jump.op.adjoint() -
                    0.5 * (ldag_l * rho + rho * ldag_l));
  }
  return out;
}

std::vector<DensityMatrix> evolve_gksl(const DensityMatrix& rho0,
                                       const OperatorMatrix& hamiltonian,
                                       std::span<const JumpTerm> jumps,
                                       double horizon, double dt, double t0) {
  if (!(dt > 0.0) || !(horizon > 0.0))
    throw std::invalid_argument("evolve_gksl: need positive dt and horizon");
  const auto n_steps = static_cast<std::int64_t>(std::llround(horizon / dt));

  std::vector<DensityMatrix> out;
  out.reserve(static_cast<std::size_t>(n_steps) + 1);
  Eigen::MatrixXcd rho = rho0.matrix();
  const Tolerances record_tol{1e-9, 1e-9, 1e-8, 1e-12};
  out.emplace_back(rho, record_tol);

  for (std::int64_t k = 0; k < n_steps; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    const Eigen::MatrixXcd k1 = gksl_generator(rho, hamiltonian, jumps, t);
    const Eigen::MatrixXcd k2 = gksl_generator(rho + 0.5 * dt * k1,
                                               hamiltonian, jumps,
                                               t + 0.5 * dt);
    const Eigen::MatrixXcd k3 = gksl_generator(rho + 0.5 * dt * k2,
                                               hamiltonian, jumps,
                                               t + 0.5 * dt);
    const Eigen::MatrixXcd k4 =
        gksl_generator(rho + dt * k3, hamiltonian, jumps, t + dt);
    rho += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = 0.5 * (rho + rho.adjoint().eval());  // scrub roundoff skew
    check_positivity(rho);
    out.emplace_back(rho, record_tol);
  }
  return out;
}

Eigen::MatrixXcd reduced_generator_A(const Eigen::MatrixXcd& psi_coeffs,
                                     const OperatorMatrix& op_a,
                                     const OperatorMatrix& op_b) {
  const Eigen::Index da = psi_coeffs.rows();
  const Eigen::Index db = psi_coeffs.cols();
  if (op_a.rows() != da || op_a.cols() != da || op_b.rows() != db ||
      op_b.cols() != db) {
    throw std::invalid_argument(
        "reduced_generator_A: operator dimensions do not match psi");
  }

  const Eigen::MatrixXcd m_a = op_a.adjoint() * op_a;  // <i'|L_A^dag L_A|i>
  const Eigen::MatrixXcd m_b = op_b.adjoint() * op_b;

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(db, db);
  for (Eigen::Index j = 0; j < db; ++j) {
    for (Eigen::Index jp = 0; jp < db; ++jp) {
      // B-space bracket for the unit matrix |j><j'|
      Eigen::MatrixXcd bracket = op_b.col(j) * op_b.col(jp).adjoint();
      bracket.col(jp) -= 0.5 * m_b.col(j);
      bracket.row(j) -= 0.5 * m_b.row(jp);
      std::complex<double> weight{0.0, 0.0};
      for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index ip = 0; ip < da; ++ip)
          weight += m_a(ip, i) * psi_coeffs(i, j) *
                    std::conj(psi_coeffs(ip, jp));
      out += weight * bracket;
    }
  }

  // brute-force cross-check: partial trace of the full generator
  Eigen::VectorXcd vec(da * db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < db; ++j) vec(i * db + j) = psi_coeffs(i, j);
  const Eigen::MatrixXcd rho = vec * vec.adjoint();
  const JumpTerm jump = JumpTerm::constant(1.0, kron(op_a, op_b));
  const Eigen::MatrixXcd full =
      gksl_generator(rho, Eigen::MatrixXcd(), std::span(&jump, 1), 0.0);
  const Eigen::MatrixXcd reference = partial_trace_matrix(
      full, static_cast<int>(da), static_cast<int>(db), Subsystem::B);
  const double scale =
      std::max({1.0, out.cwiseAbs().maxCoeff(), reference.cwiseAbs().maxCoeff()});
  if ((out - reference).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::logic_error(
        "reduced_generator_A: explicit formula disagrees with brute force");
  }
  return out;
}

const char* to_string(JumpLocality locality) {
  switch (locality) {
    case JumpLocality::LocalToA: return "local_to_A";
    case JumpLocality::ProductNonlocal: return "product_nonlocal";
    case JumpLocality::Entangled: return "entangled";
  }
  return "?";
}

JumpLocality locality_audit(const OperatorMatrix& op, int dim_a, int dim_b) {
  if (op.rows() != static_cast<Eigen::Index>(dim_a) * dim_b ||
      op.rows() != op.cols()) {
    throw std::invalid_argument("locality_audit: dimension mismatch");
  }
  // reshuffle: R[(i,i'), (j,j')] = L[(i,j), (i',j')]
  Eigen::MatrixXcd r(dim_a * dim_a, dim_b * dim_b);
  for (int i = 0; i < dim_a; ++i)
    for (int ip = 0; ip < dim_a; ++ip)
      for (int j = 0; j < dim_b; ++j)
        for (int jp = 0; jp < dim_b; ++jp)
          r(i * dim_a + ip, j * dim_b + jp) =
              op(i * dim_b + j, ip * dim_b + jp);

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      r, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0) return JumpLocality::LocalToA;  // zero operator
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > 1e-10 * sv(0)) ++rank;
  if (rank > 1) return JumpLocality::Entangled;

  // rank one: L = A (x) B with vec_r(B) proportional to conj(V.col(0))
  Eigen::MatrixXcd b(dim_b, dim_b);
  for (int j = 0; j < dim_b; ++j)
    for (int jp = 0; jp < dim_b; ++jp)
      b(j, jp) = std::conj(svd.matrixV()(j * dim_b + jp, 0));
  const std::complex<double> mean_diag =
      b.trace() / static_cast<double>(dim_b);
  const double off = (b - mean_diag * Eigen::MatrixXcd::Identity(dim_b, dim_b))
                         .cwiseAbs()
                         .maxCoeff();
  return off <= 1e-10 * b.cwiseAbs().maxCoeff() ? JumpLocality::LocalToA
                                                : JumpLocality::ProductNonlocal;
}

ToyGkslWeights toy_gksl_weights(double t, double gamma) {
  if (!(t > 0.0)) throw std::invalid_argument("weights singular at t=0");
  const double th = std::tanh(2.0 * gamma * t);
  return {gamma * th, gamma * (th * th - 1.0) / th};
}

Eigen::MatrixXcd toy_exact_density(double t, double gamma) {
  const double z = std::tanh(2.0 * gamma * t);
  const double x = 1.0 / std::cosh(2.0 * gamma * t);
  return 0.5 * (pauli(0) + x * pauli(1) + z * pauli(3));
}

Eigen::MatrixXcd toy_exact_density_dot(double t, double gamma) {
  const double sech = 1.0 / std::cosh(2.0 * gamma * t);
  const double th = std::tanh(2.0 * gamma * t);
  const double zdot = 2.0 * gamma * sech * sech;
  const double xdot = -2.0 * gamma * sech * th;
  return 0.5 * (xdot * pauli(1) + zdot * pauli(3));
}

KrausCheckReport toy_kraus_check(double t, double dt, double gamma) {
  if (!(t > 0.0) || !(dt > 0.0))
    throw std::invalid_argument("toy_kraus_check: need t > 0 and dt > 0");
  const ToyGkslWeights w = toy_gksl_weights(t, gamma);

  KrausCheckReport report;
  report.gamma1 = w.gamma1;
  report.gamma2 = w.gamma2;
  report.k3_weight_real = dt * w.gamma2 >= 0.0;

  // weights enter as the formal squares of the sqrt symbols, so a negative
  // Gamma_2 keeps its sign instead of turning into |Gamma_2|
  const double k1_scalar = 1.0 - 0.5 * dt * (w.gamma1 + w.gamma2);
  const double w2 = dt * w.gamma1;
  const double w3 = dt * w.gamma2;

  report.identity_defect = std::abs(k1_scalar * k1_scalar + w2 + w3 - 1.0);

  const Eigen::MatrixXcd rho = toy_exact_density(t, gamma);
  const Eigen::MatrixXcd mapped = k1_scalar * k1_scalar * rho +
                                  w2 * pauli(3) * rho * pauli(3) +
                                  w3 * pauli(1) * rho * pauli(1);
  const std::array<JumpTerm, 2> jumps = {
      JumpTerm::constant(w.gamma1, pauli(3)),
      JumpTerm::constant(w.gamma2, pauli(1))};
  const Eigen::MatrixXcd generator =
      gksl_generator(rho, Eigen::MatrixXcd(), jumps, t);
  report.map_defect =
      (mapped - rho - dt * generator).cwiseAbs().maxCoeff();
  return report;
}

std::vector<DensityMatrix> evolve_nonmarkovian(
    const DensityMatrix& rho0, std::span<const OperatorMatrix> ops,
    const MemoryKernel& kernel, double gamma, double horizon, double dt) {
  if (!(dt > 0.0) || !(horizon > 0.0))
    throw std::invalid_argument("evolve_nonmarkovian: bad dt or horizon");
  const Eigen::Index d = rho0.dim();
  const int n_ops = static_cast<int>(ops.size());
  for (const auto& op : ops) {
    if (op.rows() != d || op.cols() != d)
      throw std::invalid_argument("evolve_nonmarkovian: operator dimension");
    if (!is_hermitian(op, 1e-12 * std::max(1.0, op.cwiseAbs().maxCoeff())))
      throw std::invalid_argument(
          "evolve_nonmarkovian: double-commutator form needs Hermitian ops");
  }

  // integral_0^t D(t, s) ds by composite trapezoid on the dt grid
  const auto rate_matrix = [&](double t) {
    Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(n_ops, n_ops);
    if (t <= 0.0) return rates;
    const int n = std::max(1, static_cast<int>(std::ceil(t / dt)));
    const double h = t / n;
    for (int k = 0; k <= n; ++k) {
      const double weight = (k == 0 || k == n) ? 0.5 : 1.0;
      rates += weight * kernel(t, static_cast<double>(k) * h);
    }
    rates *= h;
    return rates;
  };

  const auto generator = [&](const Eigen::MatrixXcd& rho, double t) {
    const Eigen::MatrixXd rates = rate_matrix(t);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (int mu = 0; mu < n_ops; ++mu) {
      for (int nu = 0; nu < n_ops; ++nu) {
        const double r = rates(mu, nu);
        if (r == 0.0) continue;
        const Eigen::MatrixXcd inner = ops[nu] * rho - rho * ops[nu];
        out -= gamma * r * (ops[mu] * inner - inner * ops[mu]);
      }
    }
    return out;
  };

  const auto n_steps = static_cast<std::int64_t>(std::llround(horizon / dt));
  std::vector<DensityMatrix> out;
  out.reserve(static_cast<std::size_t>(n_steps) + 1);
  Eigen::MatrixXcd rho = rho0.matrix();
  const Tolerances record_tol{1e-9, 1e-9, 1e-8, 1e-12};
  out.emplace_back(rho, record_tol);
  for (std::int64_t k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Eigen::MatrixXcd k1 = generator(rho, t);
    const Eigen::MatrixXcd k2 = generator(rho + 0.5 * dt * k1, t + 0.5 * dt);
    const Eigen::MatrixXcd k3 = generator(rho + 0.5 * dt * k2, t + 0.5 * dt);
    const Eigen::MatrixXcd k4 = generator(rho + dt * k3, t + dt);
    rho += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = 0.5 * (rho + rho.adjoint().eval());
    out.emplace_back(rho, record_tol);
  }
  return out;
}

}  // namespace dqsr::master
