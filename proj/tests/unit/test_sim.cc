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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mmg/core/check.h"
#include "mmg/planner/planner.h"
#include "mmg/sim/sim.h"
#include "mmg/support/miniconf.h"
#include "mmg/support/parallel.h"

namespace mmg::sim {
namespace {

// Scenario and refined mode seeds shared by every episode test at the
// default discretization; built once.
const EpisodeSetup& SharedSetup() {
  static const EpisodeSetup setup =
      PrepareEpisodeSetup(EpisodeConfig{}, merge::DefaultMergeConfig());
  return setup;
}

bool SameVec(const VecXd& a, const VecXd& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

bool SameRows(const EpisodeLog& a, const EpisodeLog& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    const EpisodeRow& ra = a.rows[k];
    const EpisodeRow& rb = b.rows[k];
    if (ra.step != rb.step || ra.time != rb.time) return false;
    if (!SameVec(ra.state, rb.state) || !SameVec(ra.control, rb.control))
      return false;
    for (int agent = 0; agent < 2; ++agent) {
      if (!SameVec(ra.beliefs[agent], rb.beliefs[agent])) return false;
      if (!SameVec(ra.naive_beliefs[agent], rb.naive_beliefs[agent]))
        return false;
      if (!SameVec(ra.mode_costs[agent], rb.mode_costs[agent])) return false;
      if (ra.resolve_failed[agent] != rb.resolve_failed[agent]) return false;
    }
  }
  return true;
}

TEST_CASE("perturbation specs parse and round trip") {
  const merge::MergeConfig config = merge::DefaultMergeConfig();

  const PerturbationSpec none = PerturbationFromSpec("none", config);
  CHECK(none.kind == PerturbationKind::kNone);
  CHECK(PerturbationToSpec(none) == "none");

  const PerturbationSpec sin_default = PerturbationFromSpec("sin", config);
  CHECK(sin_default.kind == PerturbationKind::kSinusoid);
  CHECK(sin_default.amplitude == doctest::Approx(0.5 * config.accel_max));
  CHECK(sin_default.period == doctest::Approx(1.5));

  const PerturbationSpec sin = PerturbationFromSpec("sin:0.3,2.5", config);
  CHECK(sin.amplitude == doctest::Approx(0.3));
  CHECK(sin.period == doctest::Approx(2.5));
  const PerturbationSpec sin2 =
      PerturbationFromSpec(PerturbationToSpec(sin), config);
  CHECK(sin2.amplitude == doctest::Approx(sin.amplitude));
  CHECK(sin2.period == doctest::Approx(sin.period));

  const PerturbationSpec rand = PerturbationFromSpec("rand:0.125", config);
  CHECK(rand.kind == PerturbationKind::kRandom);
  CHECK(rand.sigma == doctest::Approx(0.125));

  CHECK_THROWS_AS((void)PerturbationFromSpec("square:1", config),
                  ContractViolation);
  CHECK_THROWS_AS((void)PerturbationFromSpec("sin:nope,1", config),
                  ContractViolation);
  CHECK_THROWS_AS((void)PerturbationFromSpec("sin:0.5", config),
                  ContractViolation);
  CHECK_THROWS_AS((void)PerturbationFromSpec("rand:", config),
                  ContractViolation);
  CHECK_THROWS_AS((void)PerturbationFromSpec("sin:-1,2", config),
                  ContractViolation);
}

TEST_CASE("control total variation sums channel jumps") {
  EpisodeLog log;
  for (int k = 0; k < 10; ++k) {
    EpisodeRow row;
    row.control = VecXd::Zero(4);
    row.control[1] = 0.5;                    // agent 0 accel constant
    row.control[3] = (k % 2 == 0) ? 1 : -1;  // agent 1 accel alternating
    log.rows.push_back(row);
  }
  CHECK(ControlTotalVariation(log, 0, merge::kAccel) == doctest::Approx(0.0));
  CHECK(ControlTotalVariation(log, 1, merge::kAccel) ==
        doctest::Approx(18.0));
  CHECK(ControlTotalVariation(log, 0, merge::kSteerRate) ==
        doctest::Approx(0.0));

  EpisodeLog empty;
  CHECK_THROWS_AS((void)ControlTotalVariation(empty, 0, 0),
                  ContractViolation);
}

TEST_CASE("episode config invariants are enforced") {
  const merge::MergeConfig mc = merge::DefaultMergeConfig();

  EpisodeConfig bad = EpisodeConfig{};
  bad.latency_steps = -1;
  CHECK_THROWS_AS((void)PrepareEpisodeSetup(bad, mc), ContractViolation);

  bad = EpisodeConfig{};
  bad.steps = 0;
  CHECK_THROWS_AS((void)PrepareEpisodeSetup(bad, mc), ContractViolation);

  // The belief loop is the control loop, so its rate is pinned to 1/dt.
  bad = EpisodeConfig{};
  bad.rates.belief_hz = 10.0;
  CHECK_THROWS_AS((void)PrepareEpisodeSetup(bad, mc), ContractViolation);

  // Loop rates must divide evenly.
  bad = EpisodeConfig{};
  bad.rates.tracking_hz = 50.0;
  CHECK_THROWS_AS((void)PrepareEpisodeSetup(bad, mc), ContractViolation);
  bad = EpisodeConfig{};
  bad.rates.ne_hz = 3.0;
  CHECK_THROWS_AS((void)PrepareEpisodeSetup(bad, mc), ContractViolation);

  bad = EpisodeConfig{};
  bad.process_noise_sigma = -0.1;
  CHECK_THROWS_AS((void)PrepareEpisodeSetup(bad, mc), ContractViolation);

  // A setup prepared at one discretization cannot run another.
  EpisodeConfig other = EpisodeConfig{};
  other.horizon = 31;
  CHECK_THROWS_AS((void)RunEpisode(other, SharedSetup()), ContractViolation);
}

TEST_CASE("episodes replay bit for bit under a fixed seed") {
  EpisodeConfig cfg;
  cfg.ego = Strategy::kQmdp;
  cfg.other = Strategy::kNoYield;
  cfg.seed = 7;
  cfg.steps = 24;
  cfg.process_noise_sigma = 1e-3;
  cfg.perturbation = PerturbationFromSpec("rand:0.05",
                                          merge::DefaultMergeConfig());

  const EpisodeLog a = RunEpisode(cfg, SharedSetup());
  const EpisodeLog b = RunEpisode(cfg, SharedSetup());
  REQUIRE(a.rows.size() == cfg.steps);
  CHECK(SameRows(a, b));
  CHECK(a.outcome == b.outcome);
  CHECK(SameVec(a.final_state, b.final_state));
  CHECK(a.min_gap == b.min_gap);

  // A different seed draws different disturbances.
  cfg.seed = 8;
  const EpisodeLog c = RunEpisode(cfg, SharedSetup());
  CHECK_FALSE(SameRows(a, c));

  // Beliefs live on the simplex in every logged row.
  for (const EpisodeRow& row : a.rows)
    for (int agent = 0; agent < 2; ++agent) {
      CHECK(row.beliefs[agent].sum() == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(row.beliefs[agent].minCoeff() >= 0.0);
      CHECK(row.naive_beliefs[agent].sum() ==
            doctest::Approx(1.0).epsilon(1e-9));
      CHECK(row.naive_beliefs[agent].minCoeff() >= 0.0);
    }
}

TEST_CASE("multi-rate scheduling with equal rates matches sequential") {
  EpisodeConfig cfg;
  cfg.ego = Strategy::kQmdp;
  cfg.other = Strategy::kYield;
  cfg.seed = 3;
  cfg.steps = 24;
  cfg.process_noise_sigma = 1e-3;
  cfg.perturbation = PerturbationFromSpec("sin:0.8,1.5",
                                          merge::DefaultMergeConfig());
  cfg.rates.tracking_hz = cfg.rates.belief_hz;  // one sub-step per control
  cfg.latency_steps = 0;

  cfg.scheduler = SchedulerMode::kSequential;
  const EpisodeLog seq = RunEpisode(cfg, SharedSetup());
  cfg.scheduler = SchedulerMode::kMultiRate;
  const EpisodeLog multi = RunEpisode(cfg, SharedSetup());

  REQUIRE(seq.rows.size() == multi.rows.size());
  for (std::size_t k = 0; k < seq.rows.size(); ++k) {
    CHECK((seq.rows[k].state - multi.rows[k].state).cwiseAbs().maxCoeff() <=
          1e-9);
    CHECK((seq.rows[k].control - multi.rows[k].control)
              .cwiseAbs()
              .maxCoeff() <= 1e-9);
  }
  CHECK((seq.final_state - multi.final_state).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(seq.outcome == multi.outcome);

  // The sub-stepping tracker runs and logs at control-step granularity.
  cfg.rates.tracking_hz = 100.0;
  const EpisodeLog fast = RunEpisode(cfg, SharedSetup());
  CHECK(fast.rows.size() == cfg.steps);
  CHECK(fast.rows.back().track_us > 0.0);
}

TEST_CASE("latency holds the tracker on the last cleared plan") {
  // With latency beyond the episode length every step tracks the step-0
  // plan, which an independent rollout of that plan reproduces exactly.
  EpisodeConfig cfg;
  cfg.ego = Strategy::kQmdp;
  cfg.other = Strategy::kYield;
  cfg.steps = 12;
  cfg.latency_steps = 100;

  const EpisodeSetup& setup = SharedSetup();
  const EpisodeLog log = RunEpisode(cfg, setup);
  REQUIRE(log.rows.size() == cfg.steps);

  const std::vector<std::vector<VecXd>> seeds{setup.mode_seeds[0],
                                              setup.mode_seeds[1]};
  std::vector<EgoPlan> plans;
  for (int agent = 0; agent < 2; ++agent) {
    PlannerOptions opts;
    opts.strategy = agent == 0 ? cfg.ego : cfg.other;
    opts.fixed_mode = 0;  // agent 1 yield: agent 0 first
    opts.beta = cfg.beta;
    opts.ilq = merge::MergeIlqOptions(cfg.beta);
    EgoPlanner planner(setup.scenario.game, agent, seeds, opts);
    planner.Initialize(setup.scenario.x0, 0);
    plans.push_back(planner.PlanStep(std::nullopt, setup.scenario.x0, 0).plan);
  }

  VecXd x = setup.scenario.x0;
  const DynamicsModel& dyn = setup.scenario.game.Dynamics();
  for (int k = 0; k < cfg.steps; ++k) {
    CHECK(SameVec(log.rows[k].state, x));
    VecXd u(dyn.TotalControlDim());
    u.segment(0, 2) = plans[0].Control(k, x);
    u.segment(2, 2) = plans[1].Control(k, x);
    CHECK(SameVec(log.rows[k].control, u));
    x = dyn.Step(x, u, cfg.dt);
  }
  CHECK(SameVec(log.final_state, x));
}

TEST_CASE("planning against a yielding agent crosses the merge") {
  EpisodeConfig cfg;
  cfg.ego = Strategy::kQmdp;
  cfg.other = Strategy::kYield;
  cfg.seed = 1;

  const EpisodeLog log = RunEpisode(cfg, SharedSetup());
  CHECK(log.outcome == Outcome::kSuccess);
  CHECK(log.merge_time[0] > 0.0);
  CHECK(log.merge_time[1] > 0.0);
  // Agent 1 yields, so agent 0 crosses first.
  CHECK(log.merge_time[0] < log.merge_time[1]);
  CHECK(log.min_gap > SharedSetup().scenario.config.radius[0] +
                          SharedSetup().scenario.config.radius[1]);
  // The ego inferred the mode its opponent was playing.
  CHECK(log.rows.back().beliefs[0][0] > 0.5);
}

TEST_CASE("mutual yields stall and mutual no-yields collide") {
  EpisodeConfig cfg;
  cfg.ego = Strategy::kYield;
  cfg.other = Strategy::kYield;
  const EpisodeLog yy = RunEpisode(cfg, SharedSetup());
  CHECK(yy.outcome != Outcome::kSuccess);
  CHECK(yy.outcome != Outcome::kCollision);

  cfg.ego = Strategy::kNoYield;
  cfg.other = Strategy::kNoYield;
  const EpisodeLog nn = RunEpisode(cfg, SharedSetup());
  CHECK(nn.outcome == Outcome::kCollision);
  CHECK(nn.min_gap < SharedSetup().scenario.config.radius[0] +
                         SharedSetup().scenario.config.radius[1]);
}

TEST_CASE("strategy matrix is identical under serial and parallel runs") {
  EpisodeConfig base;
  base.steps = 30;
  base.process_noise_sigma = 1e-3;
  const merge::MergeConfig mc = merge::DefaultMergeConfig();

  const bool was_enabled = ParallelEnabled();
  SetParallelEnabled(false);
  const MatrixResult serial = RunMatrix(base, mc, 2);
  SetParallelEnabled(true);
  const MatrixResult parallel = RunMatrix(base, mc, 2);
  SetParallelEnabled(was_enabled);

  REQUIRE(serial.cells.size() == 10);
  REQUIRE(serial.episodes.size() == 20);
  CHECK(serial.cells.front().ego == Strategy::kYield);
  CHECK(serial.cells.front().other == Strategy::kYield);
  CHECK(serial.cells.back().ego == Strategy::kQmdp);
  CHECK(serial.cells.back().other == Strategy::kQmdp);

  REQUIRE(parallel.episodes.size() == serial.episodes.size());
  for (std::size_t i = 0; i < serial.episodes.size(); ++i) {
    const MatrixEpisode& s = serial.episodes[i];
    const MatrixEpisode& p = parallel.episodes[i];
    CHECK(s.cell == p.cell);
    CHECK(s.seed == p.seed);
    CHECK(s.outcome == p.outcome);
    CHECK(s.end_step == p.end_step);
    CHECK(s.min_gap == p.min_gap);
    CHECK(SameVec(s.final_state, p.final_state));
  }
  for (std::size_t c = 0; c < serial.cells.size(); ++c) {
    CHECK(serial.cells[c].successes == parallel.cells[c].successes);
    CHECK(serial.cells[c].collisions == parallel.cells[c].collisions);
    CHECK(serial.cells[c].freezes == parallel.cells[c].freezes);
    CHECK(serial.cells[c].timeouts == parallel.cells[c].timeouts);
  }
}

TEST_CASE("episode csv and summaries serialize the log") {
  EpisodeConfig cfg;
  cfg.ego = Strategy::kMl;
  cfg.other = Strategy::kNoYield;
  cfg.steps = 16;
  cfg.seed = 5;
  cfg.record_predictions = true;

  const EpisodeLog log = RunEpisode(cfg, SharedSetup());
  REQUIRE(!log.rows.empty());
  // Per-mode predictions snapshot both agents' banks.
  CHECK(log.rows.front().predictions[0].size() == 2);
  CHECK(log.rows.front().predictions[1].size() == 2);
  CHECK(log.rows.front().predictions[0][0].Horizon() == cfg.horizon);

  std::ostringstream csv;
  WriteEpisodeCsv(log, csv);
  const std::string text = csv.str();
  std::istringstream lines(text);
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "step,time,"
        "p_x_0,p_y_0,v_0,theta_0,zeta_0,s_0,n_0,xi_0,"
        "p_x_1,p_y_1,v_1,theta_1,zeta_1,s_1,n_1,xi_1,"
        "steer_rate_0,accel_0,steer_rate_1,accel_1,"
        "belief_0_mode0,belief_0_mode1,belief_1_mode0,belief_1_mode1,"
        "naive_0_mode0,naive_0_mode1,naive_1_mode0,naive_1_mode1,"
        "cost_0_mode0,cost_0_mode1,cost_1_mode0,cost_1_mode1,"
        "ne_us_0,plan_us_0,ne_us_1,plan_us_1,track_us,"
        "resolve_failed_0,resolve_failed_1");
  int data_lines = 0;
  std::string line;
  while (std::getline(lines, line))
    if (!line.empty()) ++data_lines;
  CHECK(data_lines == static_cast<int>(log.rows.size()));
  // Every row carries the full column set.
  const auto commas = std::count(header.begin(), header.end(), ',');
  std::istringstream again(text);
  std::getline(again, line);
  std::getline(again, line);
  CHECK(std::count(line.begin(), line.end(), ',') == commas);

  std::ostringstream summary;
  WriteEpisodeSummary(log, summary);
  const ConfigMap parsed = ConfigMap::Parse(summary.str());
  CHECK(parsed.GetString("episode.ego", "") == "ml");
  CHECK(parsed.GetString("episode.other", "") == "noyield");
  CHECK(parsed.GetInt("episode.seed", -1) == 5);
  CHECK(parsed.GetString("outcome.label", "") == OutcomeName(log.outcome));
  CHECK(parsed.GetInt("outcome.end_step", -1) == log.end_step);
  CHECK(parsed.GetDouble("metrics.accel_tv_0", -1.0) ==
        doctest::Approx(ControlTotalVariation(log, 0, merge::kAccel)));

  MatrixResult matrix;
  matrix.seeds = 2;
  for (int row = 0; row < 4; ++row)
    for (int col = 0; col <= row; ++col) {
      MatrixCell cell;
      cell.ego = static_cast<Strategy>(row);
      cell.other = static_cast<Strategy>(col);
      cell.successes = 1;
      cell.collisions = 1;
      matrix.cells.push_back(cell);
    }
  std::ostringstream mat;
  WriteMatrixSummary(matrix, mat);
  const ConfigMap mat_parsed = ConfigMap::Parse(mat.str());
  CHECK(mat_parsed.GetInt("matrix.cells", -1) == 10);
  CHECK(mat_parsed.GetInt("pair_qmdp_ml.successes", -1) == 1);
  CHECK(mat_parsed.GetDouble("pair_yield_yield.success_rate", -1.0) ==
        doctest::Approx(0.5));
}

}  // namespace
}  // namespace mmg::sim
