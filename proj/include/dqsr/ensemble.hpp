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

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dqsr/core.hpp"
#include "dqsr/models.hpp"

namespace dqsr::ensemble {

/// Ensemble mean of |a0|^2 on the record grid; mean_p0[k] - initial_p0 is
/// the empirical signalling witness.
struct WitnessSeries {
  std::vector<double> times;
  std::vector<double> mean_p0;
  std::vector<double> stderr_p0;  // sample std / sqrt(n_traj)
  std::int64_t n_traj = 0;
  double initial_p0 = 0.0;
};

/// Ensemble mean of Re(a0 * conj(a1)), the off-diagonal branch correlator.
struct OffDiagonalSeries {
  std::vector<double> times;
  std::vector<double> mean_cross;
};

enum class SlsOutcome { ConsistentWithNoSls, SlsDetected };

struct SlsVerdict {
  double max_abs_z = 0.0;  // +inf marks zero stderr with nonzero deviation
  double t_max = 0.0;      // grid time of the largest |z|
  SlsOutcome verdict = SlsOutcome::ConsistentWithNoSls;
  double threshold_z = 5.0;
};

struct RunOptions {
  int workers = 0;             // 0: DQSR_WORKERS env var, else hardware
  bool record_density = false; // also accumulate the 4x4 ensemble-mean rho
  double max_rate_per_substep = 0.05;
};

struct EnsembleResult {
  WitnessSeries witness;
  OffDiagonalSeries cross;
  // present only when RunOptions::record_density was set
  std::vector<DensityMatrix> mean_density;
};

/// Runs n_traj independent trajectories with stream ids 0..n_traj-1 and
/// accumulates witness statistics on the record grid. The result is
/// bit-identical for any worker count: trajectories are summed in fixed
/// chunks that are reduced in chunk order.
EnsembleResult run_ensemble(const models::ModelKind& model,
                            const models::TrajectoryConfig& config,
                            std::int64_t n_traj, std::uint64_t master_seed,
                            const RunOptions& options = {});

/// z[k] = (mean_p0[k] - initial_p0) / stderr[k]; SLS is flagged when the
/// largest |z| exceeds threshold_z. Zero stderr with a nonzero deviation
/// (deterministic models) maps to an infinite z.
SlsVerdict compute_verdict(const WitnessSeries& series,
                           double threshold_z = 5.0);

/// Bob's reduced density matrices from the recorded ensemble-mean full
/// density matrices. Throws if the input series is empty (recording was
/// not enabled on the run).
std::vector<DensityMatrix> bob_reduced_density(
    const std::vector<DensityMatrix>& mean_density);

enum class CollapseTimeMethod { FirstCrossing, ExponentialFit };

struct TimescaleReport {
  double t_max = 0.0;   // grid time of max |mean_p0 - initial_p0|
  double t_coll = 0.0;  // 1/e decay time of the off-diagonal correlator
};

/// Throws std::runtime_error("horizon too short") when the off-diagonal
/// correlator never decays below 1/e of its initial value (or, for the fit
/// method, does not decay at all).
TimescaleReport timescales(const WitnessSeries& witness,
                           const OffDiagonalSeries& cross,
                           CollapseTimeMethod method =
                               CollapseTimeMethod::FirstCrossing);

struct CalibrationStage {
  double half_span;   // searched interval is best +- half_span (log10)
  double step;        // grid step in log10(G/J)
  double n_fraction;  // fraction of n_traj used per evaluation
};

struct CalibrationOptions {
  double log10_lo = -2.0;
  double log10_hi = 2.0;
  double coarse_step = 0.25;
  double coarse_n_fraction = 1.0;
  std::vector<CalibrationStage> refine_stages = {
      {0.25, 0.05, 1.0}, {0.05, 0.01, 1.0}, {0.0125, 0.0025, 1.0}};
  double tolerance = 0.01;  // objective above this -> not Born-compatible
  double max_rate_per_substep = 0.05;
  int workers = 0;
};

struct CalibrationResult {
  double ratio = 1.0;       // G/J at the optimum
  double objective = 0.0;   // max |mean_p0(horizon) - p0(0)| over initial set,
                            // re-evaluated at the optimum with a fresh seed
  bool born_compatible = false;
  int evaluations = 0;
  std::vector<std::pair<double, double>> trace;  // (log10 ratio, objective)
};

/// Grid search with refinement over log10(G/J) for the ratio that restores
/// Born statistics at the horizon, simultaneously for every initial |a0|^2
/// in initial_p0s. All evaluations share master_seed (common random numbers);
/// the reported objective comes from an independent confirmation run.
CalibrationResult calibrate_born(const noise::NoiseKind& kind,
                                 double coupling_j,
                                 const std::vector<double>& initial_p0s,
                                 double horizon, std::int64_t n_traj,
                                 std::uint64_t master_seed,
                                 const CalibrationOptions& options = {});

/// Default initial set for Born calibration: cos^2(pi/6) and cos^2(pi/8).
std::vector<double> default_calibration_set();

/// Extended set (adds p0 = 0.95) used for the static-noise dichotomy, where
/// two states are not enough to separate OU from SBM.
std::vector<double> dichotomy_calibration_set();

}  // namespace dqsr::ensemble
