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
#include <filesystem>
#include <iosfwd>
#include <string>

#include "dqsr/ensemble.hpp"

namespace dqsr::cli {

/// Raised by config validation; `field` names the offending entry.
struct ConfigError : std::invalid_argument {
  ConfigError(std::string field_in, const std::string& message)
      : std::invalid_argument("config field '" + field_in + "': " + message),
        field(std::move(field_in)) {}
  std::string field;
};

struct ExperimentConfig {
  std::string model = "csl";   // csl | suv | linear | toy
  std::string noise;           // ou | sbm | static-ou | static-sbm ("" = n/a)
  double gamma = 1.0;
  double coupling_j = 1.0;
  double coupling_g = 1.0;
  double tau = 0.0;            // required for ou/sbm noise
  double initial_p0 = 0.75;
  double dt = 0.0;             // 0 -> model default
  double horizon = 0.0;        // 0 -> model default
  std::int64_t n_traj = 100000;
  std::uint64_t master_seed = 12345;
  int record_points = 151;
  std::string output = "witness.csv";
  double threshold_z = 5.0;
  int workers = 0;
  bool tcoll_fit = false;      // exponential-fit collapse-time estimator
};

void validate(const ExperimentConfig& config);

models::ModelKind build_model(const ExperimentConfig& config);
double resolved_dt(const ExperimentConfig& config);
double resolved_horizon(const ExperimentConfig& config);

/// Exit codes shared by the commands: 0 = no SLS detected,
/// 2 = SLS detected, 1 = operational error.
inline constexpr int kExitNoSls = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitSlsDetected = 2;

struct WitnessCommandResult {
  ensemble::SlsVerdict verdict;
  int exit_code = kExitNoSls;
  std::filesystem::path csv_path;
  std::filesystem::path sidecar_path;
};

/// Runs the configured experiment, writes `<output>` (CSV, header
/// t,mean_p0,stderr,n_traj, 17 significant digits, LF endings) and a JSON
/// sidecar `<output>.json` with the config echo, verdict, timescales and
/// wall time.
WitnessCommandResult cmd_witness(const ExperimentConfig& config);

/// Emits the static-noise comparison dataset: CSL baseline, calibrated
/// static-SBM, a static-OU ratio sweep, the linear (J = 0) model, and the
/// same static models restarted from p0 = cos^2(pi/8), plus manifest.json.
/// Throws if the SBM Born calibration fails.
void cmd_fig1(std::uint64_t seed, std::int64_t n_traj,
              const std::filesystem::path& outdir, int workers = 0);

/// Emits the correlated-SBM dataset: witness and off-diagonal series for
/// J*tau in {0.05, 0.2, 1} at per-tau Born-calibrated ratios, plus
/// summary.csv (jtau,t_max,t_coll) and manifest.json.
void cmd_fig2(std::uint64_t seed, std::int64_t n_traj,
              const std::filesystem::path& outdir, int workers = 0);

struct AuditOutcome {
  bool signalling_possible = false;
  int exit_code = kExitNoSls;
};

/// Reads an operator file (JSON: dims=[dA,dB], H = nested [re,im] pairs,
/// jumps = [{rate, matrix}]), prints a locality report per jump and a
/// reduced-generator probe over random entangled states, and returns the
/// signalling verdict. Malformed files raise ConfigError-style exceptions
/// carrying a line number.
AuditOutcome cmd_gksl_audit(const std::filesystem::path& operators_file,
                            std::ostream& out);

struct ToyVerifyReport {
  double state_vs_analytic = 0.0;   // max |s_rk4 - s_exact|, gamma t in [0,3]
  double general_s0_error = 0.0;    // same from s0 = 0.5
  double gksl_consistency = 0.0;    // max ||gen(rho(t)) - rho_dot(t)||
  double kraus_identity_ratio = 0.0;  // defect(dt) / defect(dt/2)
  double kraus_map_ratio = 0.0;
  double final_p0 = 0.0;            // from p0(0) = 0.75 at gamma t = 10
  bool passed = false;
};

ToyVerifyReport cmd_toy_verify(double gamma, double dt, std::ostream& out);

/// "%.17g" formatting used for all CSV floats.
std::string format_g17(double value);

}  // namespace dqsr::cli
