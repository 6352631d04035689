// Copyright 2026 The mmg Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Receding-horizon closed-loop simulator for the two-vehicle merge: both
// agents run planning loops at configured rates, plans reach the tracker
// after a configurable latency, disturbances are injected on the non-ego
// controls, and every episode is classified as success, collision, freeze,
// or timeout.
//
// Three logical loops share one deterministic single-threaded scheduler:
//   - equilibrium refresh (slowest), driven by the planner's resolve period,
//   - belief update + strategy evaluation, once per control step,
//   - tracking (fastest), which applies the time-indexed affine law of the
//     newest plan old enough to have cleared the latency pipeline.
// The sequential scheduler collapses tracking onto the control step; the
// multi-rate scheduler sub-steps the physics between control steps.  With
// equal belief and tracking rates and zero latency the two schedulers
// perform the same arithmetic and their logs agree bit for bit.

#ifndef MMG_SIM_SIM_H_
#define MMG_SIM_SIM_H_

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmg/merge/merge.h"
#include "mmg/planner/planner.h"

namespace mmg::sim {

// Disturbance on the non-ego acceleration channel, sampled once per control
// step and held over the step.
enum class PerturbationKind { kNone, kSinusoid, kRandom };

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::kNone;
  double amplitude = 0.0;  // sinusoid peak, m/s^2
  double period = 1.5;     // sinusoid period, s
  double sigma = 0.0;      // white-noise standard deviation, m/s^2
};

// Sinusoid at half the platform acceleration limit with a 1.5 s period.
PerturbationSpec DefaultSinusoid(const merge::MergeConfig& config);

// Parses "none", "sin:<amplitude>,<period>", or "rand:<sigma>"; "sin" alone
// takes the defaults for `config`.
PerturbationSpec PerturbationFromSpec(const std::string& text,
                                      const merge::MergeConfig& config);
std::string PerturbationToSpec(const PerturbationSpec& spec);

// Rates of the three loops.  The belief rate must equal 1/dt (it is the
// control-step rate), the tracking rate an integer multiple of it, and the
// belief rate an integer multiple of the equilibrium-refresh rate.
struct LoopRates {
  double ne_hz = 2.0;
  double belief_hz = 20.0;
  double tracking_hz = 100.0;
};

enum class SchedulerMode { kSequential, kMultiRate };

struct EpisodeConfig {
  Strategy ego = Strategy::kQmdp;     // agent 0
  Strategy other = Strategy::kYield;  // agent 1
  unsigned long long seed = 0;
  double dt = 0.05;   // control step, s
  int horizon = 61;   // states per plan, so horizon - 1 control stages
  int steps = 120;    // episode length in control steps
  int latency_steps = 0;  // control steps a new plan spends in the pipeline
  PerturbationSpec perturbation;
  LoopRates rates;
  SchedulerMode scheduler = SchedulerMode::kSequential;
  // Standard deviation of the white control disturbance applied to every
  // control channel of both agents, once per control step.
  double process_noise_sigma = 0.0;
  double beta = 5.0;  // rationality of both agents' planners
  // Snapshot each agent's per-mode predicted trajectories into every row.
  bool record_predictions = false;
};

enum class Outcome { kSuccess, kCollision, kFreeze, kTimeout };

std::string OutcomeName(Outcome outcome);

// One control step: the state the decisions were made at, the controls
// applied over the step, and both agents' planner snapshots.
struct EpisodeRow {
  int step = 0;
  double time = 0.0;
  VecXd state;    // joint state at the start of the step
  VecXd control;  // joint control applied at the step state
  std::array<VecXd, 2> beliefs;        // per-agent mode posteriors
  std::array<VecXd, 2> naive_beliefs;  // per-agent baseline filters
  std::array<VecXd, 2> mode_costs;     // per-agent predicted cost per mode
  std::array<double, 2> ne_us = {0.0, 0.0};    // bank refresh, per agent
  std::array<double, 2> plan_us = {0.0, 0.0};  // belief + strategy, per agent
  double track_us = 0.0;  // control evaluation + integration
  std::array<bool, 2> resolve_failed = {false, false};
  // Per agent, per mode: the bank's nominal prediction at this step.  Empty
  // unless EpisodeConfig::record_predictions is set.
  std::array<std::vector<Trajectory>, 2> predictions;
};

struct EpisodeLog {
  EpisodeConfig config;
  std::vector<EpisodeRow> rows;  // one per executed control step
  Outcome outcome = Outcome::kTimeout;
  int end_step = 0;          // control step at which the episode ended
  VecXd final_state;         // joint state after the last executed step
  double min_gap = 0.0;      // smallest inter-agent distance seen
  std::array<double, 2> merge_time = {-1.0, -1.0};  // first time past merge
  std::string error;         // solver failure message when one ended the run
};

// Scenario plus the control seeds every planner in an episode starts from.
// Reusable across episodes that share geometry, discretization, and beta.
struct EpisodeSetup {
  merge::MergeScenario scenario;
  std::array<std::vector<VecXd>, 2> mode_seeds;
};

// Builds the scenario at the episode's dt and horizon and, when
// refine_seeds is set, refines the heuristic mode seeds into converged
// equilibrium controls so every planner's first solve starts at the answer.
EpisodeSetup PrepareEpisodeSetup(const EpisodeConfig& cfg,
                                 const merge::MergeConfig& base,
                                 bool refine_seeds = true);

// Runs one closed-loop episode.  Solver failures inside the loop end the
// episode with Outcome::kTimeout and the message in EpisodeLog::error.
EpisodeLog RunEpisode(const EpisodeConfig& cfg, const EpisodeSetup& setup);
EpisodeLog RunEpisode(const EpisodeConfig& cfg,
                      const merge::MergeConfig& base);

// Sum of |u[t+1] - u[t]| over the logged rows on one control channel
// (merge channels: 0 steering rate, 1 acceleration) of one agent.
double ControlTotalVariation(const EpisodeLog& log, int agent, int channel);

// Strategy-pair interaction study: every unordered strategy pair, the ego
// strategy drawn from the row and the non-ego from the column, `seeds`
// episodes each with seeds base.seed, base.seed + 1, ...
struct MatrixCell {
  Strategy ego;
  Strategy other;
  int successes = 0;
  int collisions = 0;
  int freezes = 0;
  int timeouts = 0;
  double SuccessRate(int seeds) const {
    return seeds > 0 ? static_cast<double>(successes) / seeds : 0.0;
  }
};

// Per-episode record kept for determinism checks and reporting.
struct MatrixEpisode {
  int cell = 0;
  unsigned long long seed = 0;
  Outcome outcome = Outcome::kTimeout;
  int end_step = 0;
  double min_gap = 0.0;
  VecXd final_state;
};

struct MatrixResult {
  std::vector<MatrixCell> cells;  // lower triangle of the strategy table
  std::vector<MatrixEpisode> episodes;  // cells x seeds, cell-major
  int seeds = 0;
  double wall_seconds = 0.0;
};

// Runs the ten-pair lower-triangular matrix, `seeds` episodes per pair.
// Episodes are independent, so the OpenMP path and the serial path produce
// bit-identical results.
MatrixResult RunMatrix(const EpisodeConfig& base,
                       const merge::MergeConfig& scenario_config, int seeds);

// Episode CSV: one row per control step, stable documented column order:
//   step, time,
//   per agent 0 then 1: p_x, p_y, v, theta, zeta, s, n, xi,
//   per agent 0 then 1: steer_rate, accel (applied),
//   per agent 0 then 1: belief per mode, naive belief per mode,
//   per agent 0 then 1: predicted cost per mode,
//   ne_us_0, plan_us_0, ne_us_1, plan_us_1, track_us,
//   resolve_failed_0, resolve_failed_1
void WriteEpisodeCsv(const EpisodeLog& log, std::ostream& out);
void SaveEpisodeCsv(const EpisodeLog& log, const std::string& path);

// Structured-text episode summary (config echo, outcome, metrics).
void WriteEpisodeSummary(const EpisodeLog& log, std::ostream& out);
void SaveEpisodeSummary(const EpisodeLog& log, const std::string& path);

// Structured-text matrix summary plus a success-rate table in comments.
void WriteMatrixSummary(const MatrixResult& result, std::ostream& out);
void SaveMatrixSummary(const MatrixResult& result, const std::string& path);

}  // namespace mmg::sim

#endif  // MMG_SIM_SIM_H_
