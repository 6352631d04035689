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

#include "mmg/sim/sim.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <utility>

#include "mmg/core/check.h"
#include "mmg/support/miniconf.h"
#include "mmg/support/parallel.h"

namespace mmg::sim {
namespace {

using merge::kAccel;
using merge::kS;
using merge::kV;
using merge::kVehicleControlDim;
using merge::kVehicleStateDim;

using Clock = std::chrono::steady_clock;

double MicrosSince(const Clock::time_point& start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start)
      .count();
}

// Freeze: both agents below this fraction of their reference speed for more
// than this long while neither has passed the merge point.
constexpr double kFreezeSeconds = 2.0;
constexpr double kFreezeSpeedFraction = 0.1;

// Rates must divide evenly so the loops stay phase locked.
int RoundRatio(double fast_hz, double slow_hz, const char* what) {
  const double ratio = fast_hz / slow_hz;
  const int r = static_cast<int>(std::lround(ratio));
  MMG_CHECK_MSG(r >= 1 && std::abs(ratio - r) < 1e-9 * std::max(ratio, 1.0),
                what << " must be a whole multiple (got " << ratio << ")");
  return r;
}

void ValidatePerturbation(const PerturbationSpec& p) {
  MMG_CHECK_MSG(p.amplitude >= 0.0 && std::isfinite(p.amplitude),
                "perturbation amplitude must be nonnegative");
  MMG_CHECK_MSG(p.sigma >= 0.0 && std::isfinite(p.sigma),
                "perturbation sigma must be nonnegative");
  if (p.kind == PerturbationKind::kSinusoid)
    MMG_CHECK_MSG(p.period > 0.0 && std::isfinite(p.period),
                  "sinusoid period must be positive");
}

void ValidateConfig(const EpisodeConfig& cfg) {
  MMG_CHECK_MSG(cfg.dt > 0.0 && std::isfinite(cfg.dt),
                "control step must be positive");
  MMG_CHECK_MSG(cfg.horizon >= 2, "plan horizon needs at least two states");
  MMG_CHECK_MSG(cfg.steps >= 1, "episode needs at least one control step");
  MMG_CHECK_MSG(cfg.latency_steps >= 0, "latency cannot be negative");
  MMG_CHECK_MSG(cfg.rates.ne_hz > 0.0 && cfg.rates.belief_hz > 0.0 &&
                    cfg.rates.tracking_hz > 0.0,
                "loop rates must be positive");
  MMG_CHECK_MSG(std::abs(cfg.rates.belief_hz * cfg.dt - 1.0) < 1e-6,
                "the belief loop is the control loop: belief rate must be "
                "1/dt");
  RoundRatio(cfg.rates.tracking_hz, cfg.rates.belief_hz,
             "tracking rate over belief rate");
  RoundRatio(cfg.rates.belief_hz, cfg.rates.ne_hz,
             "belief rate over equilibrium rate");
  MMG_CHECK_MSG(
      cfg.process_noise_sigma >= 0.0 && std::isfinite(cfg.process_noise_sigma),
      "process noise sigma must be nonnegative");
  ValidatePerturbation(cfg.perturbation);
}

// Mode z is the equilibrium in which agent z crosses the merge point first,
// so a fixed-mode agent maps its role through its own index.
PlannerOptions PlannerFor(Strategy strategy, int agent,
                          const EpisodeConfig& cfg) {
  PlannerOptions opts;
  opts.strategy = strategy;
  if (strategy == Strategy::kYield)
    opts.fixed_mode = 1 - agent;
  else if (strategy == Strategy::kNoYield)
    opts.fixed_mode = agent;
  opts.beta = cfg.beta;
  opts.resolve_period = RoundRatio(cfg.rates.belief_hz, cfg.rates.ne_hz,
                                   "belief rate over equilibrium rate");
  opts.ilq = merge::MergeIlqOptions(cfg.beta);
  const int other = 1 - agent;
  opts.nonego_position = [other](const VecXd& x) {
    return VecXd(x.segment(kVehicleStateDim * other + merge::kPx, 2));
  };
  return opts;
}

double Gap(const VecXd& x) {
  return (x.segment(0, 2) - x.segment(kVehicleStateDim, 2)).norm();
}

// Everything the scheduling variants share: planners, the plan pipeline,
// disturbance sampling, logging, and the outcome predicates.
class EpisodeRun {
 public:
  EpisodeRun(const EpisodeConfig& cfg, const EpisodeSetup& setup)
      : cfg_(cfg),
        scenario_(setup.scenario),
        dyn_(scenario_.game.Dynamics()),
        rng_(cfg.seed),
        x_(scenario_.x0) {
    log_.config = cfg;
    log_.min_gap = Gap(x_);
    const std::vector<std::vector<VecXd>> seeds{setup.mode_seeds[0],
                                                setup.mode_seeds[1]};
    const std::array<Strategy, 2> strategies{cfg.ego, cfg.other};
    for (int agent = 0; agent < 2; ++agent)
      planners_[agent] = std::make_unique<EgoPlanner>(
          scenario_.game, agent, seeds, PlannerFor(strategies[agent], agent,
                                                   cfg));
  }

  EpisodeLog Run(bool multirate) {
    try {
      const auto init_start = Clock::now();
      for (auto& planner : planners_) planner->Initialize(x_, 0);
      init_us_ = MicrosSince(init_start) / 2.0;
      if (multirate)
        RunMultiRate();
      else
        RunSequential();
    } catch (const std::exception& e) {
      // A solver or dynamics failure ends the run; the episode keeps the
      // rows executed so far and is classified as a timeout.
      log_.outcome = Outcome::kTimeout;
      log_.error = e.what();
    }
    log_.end_step = static_cast<int>(log_.rows.size());
    log_.final_state = x_;
    return std::move(log_);
  }

 private:
  // Reference flat scheduler: one plan tick and one dt-long physics step per
  // control step.
  void RunSequential() {
    for (int k = 0; k < cfg_.steps; ++k) {
      EpisodeRow row = PlanTick(k);
      const VecXd dist = Disturbance(k);

      const auto track_start = Clock::now();
      const VecXd u = AppliedControl(k, x_) + dist;
      const VecXd x_next = dyn_.Step(x_, u, cfg_.dt);
      row.track_us = MicrosSince(track_start);

      row.control = u;
      log_.rows.push_back(std::move(row));
      x_prev_ = x_;
      x_ = x_next;
      log_.min_gap = std::min(log_.min_gap, Gap(x_));
      if (Classify(k)) return;
    }
    log_.outcome = Outcome::kTimeout;
  }

  // Multi-rate executive: the tracking loop sub-steps the physics between
  // control steps, re-evaluating the active affine law at every sub-step;
  // the plan loop fires on control-step boundaries.  With one sub-step per
  // control step this performs exactly the sequential arithmetic.
  void RunMultiRate() {
    const int substeps =
        RoundRatio(cfg_.rates.tracking_hz, cfg_.rates.belief_hz,
                   "tracking rate over belief rate");
    const double sub_dt = cfg_.dt / substeps;
    for (int k = 0; k < cfg_.steps; ++k) {
      EpisodeRow row = PlanTick(k);
      const VecXd dist = Disturbance(k);

      const auto track_start = Clock::now();
      const VecXd tick_state = x_;
      bool contact = false;
      for (int sub = 0; sub < substeps && !contact; ++sub) {
        const VecXd u = AppliedControl(k, x_) + dist;
        if (sub == 0) row.control = u;
        x_ = dyn_.Step(x_, u, sub_dt);
        log_.min_gap = std::min(log_.min_gap, Gap(x_));
        contact = Gap(x_) < scenario_.config.radius[0] +
                                scenario_.config.radius[1];
      }
      row.track_us = MicrosSince(track_start);

      log_.rows.push_back(std::move(row));
      x_prev_ = tick_state;
      if (Classify(k)) return;
    }
    log_.outcome = Outcome::kTimeout;
  }

  // Belief + strategy loop body: one PlanStep per agent, plans enter the
  // latency pipeline, and the row snapshot is started.
  EpisodeRow PlanTick(int k) {
    EpisodeRow row;
    row.step = k;
    row.time = k * cfg_.dt;
    row.state = x_;
    for (int agent = 0; agent < 2; ++agent) {
      EgoDecision d = planners_[agent]->PlanStep(x_prev_, x_, k);
      row.beliefs[agent] = d.belief.Probabilities();
      row.naive_beliefs[agent] =
          planners_[agent]->naive_belief().Probabilities();
      row.mode_costs[agent] = std::move(d.mode_costs);
      row.ne_us[agent] = d.ne_solve_us;
      row.plan_us[agent] = d.plan_us;
      row.resolve_failed[agent] = d.resolve_failed;
      if (cfg_.record_predictions) {
        const ModeBank& bank = planners_[agent]->bank();
        row.predictions[agent].reserve(bank.NumModes());
        for (const auto& mode : bank.modes)
          row.predictions[agent].push_back(mode.nominal);
      }
      plans_[agent].push_back(std::move(d.plan));
    }
    // The initial bank solve is the first equilibrium work of the episode;
    // charge it to the first row so its cost is visible in the log.
    if (k == 0) row.ne_us = {init_us_, init_us_};
    return row;
  }

  // Joint control from each agent's newest plan that has cleared the
  // latency pipeline, evaluated at the queried state with the law's own
  // time index.
  VecXd AppliedControl(int step, const VecXd& x) const {
    VecXd u(dyn_.TotalControlDim());
    for (int agent = 0; agent < 2; ++agent) {
      const int active =
          std::max(0, static_cast<int>(plans_[agent].size()) - 1 -
                          cfg_.latency_steps);
      u.segment(dyn_.ControlOffset(agent), dyn_.ControlDim(agent)) =
          plans_[agent][active].Control(step, x);
    }
    return u;
  }

  // Control disturbance for the step: white process noise on every channel
  // of both agents, plus the configured perturbation on the non-ego
  // acceleration.  Drawn once per control step in a fixed order so the
  // stream is identical under both schedulers.
  VecXd Disturbance(int k) {
    VecXd d = VecXd::Zero(dyn_.TotalControlDim());
    if (cfg_.process_noise_sigma > 0.0)
      for (int c = 0; c < d.size(); ++c)
        d[c] = cfg_.process_noise_sigma * normal_(rng_);
    const int nonego_accel = dyn_.ControlOffset(1) + kAccel;
    switch (cfg_.perturbation.kind) {
      case PerturbationKind::kNone:
        break;
      case PerturbationKind::kSinusoid:
        d[nonego_accel] +=
            cfg_.perturbation.amplitude *
            std::sin(2.0 * std::numbers::pi * (k * cfg_.dt) /
                     cfg_.perturbation.period);
        break;
      case PerturbationKind::kRandom:
        d[nonego_accel] += cfg_.perturbation.sigma * normal_(rng_);
        break;
    }
    return d;
  }

  // End-of-interval classification at control-step granularity.  Returns
  // true when the episode is over; the collision distance is the physical
  // contact distance, not the larger cost support.
  bool Classify(int k) {
    const double contact =
        scenario_.config.radius[0] + scenario_.config.radius[1];
    if (log_.min_gap < contact) {
      log_.outcome = Outcome::kCollision;
      return true;
    }
    for (int agent = 0; agent < 2; ++agent) {
      if (!passed_[agent] &&
          x_[kVehicleStateDim * agent + kS] > scenario_.merge_s[agent]) {
        passed_[agent] = true;
        log_.merge_time[agent] = (k + 1) * cfg_.dt;
      }
    }
    if (passed_[0] && passed_[1]) {
      log_.outcome = Outcome::kSuccess;
      return true;
    }
    bool frozen = !passed_[0] && !passed_[1];
    for (int agent = 0; agent < 2; ++agent)
      frozen = frozen && std::abs(x_[kVehicleStateDim * agent + kV]) <
                             kFreezeSpeedFraction *
                                 scenario_.config.v_ref[agent];
    freeze_run_ = frozen ? freeze_run_ + 1 : 0;
    if (freeze_run_ * cfg_.dt > kFreezeSeconds) {
      log_.outcome = Outcome::kFreeze;
      return true;
    }
    return false;
  }

  const EpisodeConfig cfg_;
  const merge::MergeScenario& scenario_;
  const DynamicsModel& dyn_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  std::array<std::unique_ptr<EgoPlanner>, 2> planners_;
  std::array<std::vector<EgoPlan>, 2> plans_;  // plan pipeline, one per tick
  VecXd x_;
  std::optional<VecXd> x_prev_;  // state at the previous control tick
  std::array<bool, 2> passed_ = {false, false};
  int freeze_run_ = 0;
  double init_us_ = 0.0;
  EpisodeLog log_;
};

double Median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const auto mid = values.begin() + values.size() / 2;
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

}  // namespace

PerturbationSpec DefaultSinusoid(const merge::MergeConfig& config) {
  PerturbationSpec spec;
  spec.kind = PerturbationKind::kSinusoid;
  spec.amplitude = 0.5 * config.accel_max;
  spec.period = 1.5;
  return spec;
}

PerturbationSpec PerturbationFromSpec(const std::string& text,
                                      const merge::MergeConfig& config) {
  if (text.empty() || text == "none") return PerturbationSpec{};
  if (text == "sin") return DefaultSinusoid(config);
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string args =
      colon == std::string::npos ? std::string() : text.substr(colon + 1);
  PerturbationSpec spec;
  try {
    if (head == "sin") {
      const auto comma = args.find(',');
      MMG_CHECK_MSG(comma != std::string::npos,
                    "expected sin:<amplitude>,<period>");
      spec.kind = PerturbationKind::kSinusoid;
      spec.amplitude = std::stod(args.substr(0, comma));
      spec.period = std::stod(args.substr(comma + 1));
    } else if (head == "rand") {
      MMG_CHECK_MSG(!args.empty(), "expected rand:<sigma>");
      spec.kind = PerturbationKind::kRandom;
      spec.sigma = std::stod(args);
    } else {
      throw ContractViolation("unknown perturbation kind: " + head);
    }
  } catch (const std::invalid_argument&) {
    throw ContractViolation("malformed perturbation spec: " + text);
  }
  ValidatePerturbation(spec);
  return spec;
}

std::string PerturbationToSpec(const PerturbationSpec& spec) {
  std::ostringstream oss;
  oss.precision(12);
  switch (spec.kind) {
    case PerturbationKind::kNone:
      return "none";
    case PerturbationKind::kSinusoid:
      oss << "sin:" << spec.amplitude << "," << spec.period;
      return oss.str();
    case PerturbationKind::kRandom:
      oss << "rand:" << spec.sigma;
      return oss.str();
  }
  throw ContractViolation("unknown perturbation kind tag");
}

std::string OutcomeName(Outcome outcome) {
  switch (outcome) {
    case Outcome::kSuccess:
      return "success";
    case Outcome::kCollision:
      return "collision";
    case Outcome::kFreeze:
      return "freeze";
    case Outcome::kTimeout:
      return "timeout";
  }
  throw ContractViolation("unknown outcome tag");
}

EpisodeSetup PrepareEpisodeSetup(const EpisodeConfig& cfg,
                                 const merge::MergeConfig& base,
                                 bool refine_seeds) {
  ValidateConfig(cfg);
  merge::MergeConfig config = base;
  config.dt = cfg.dt;
  config.horizon = cfg.horizon;
  EpisodeSetup setup{merge::BuildMergeScenario(config),
                     merge::SeedModes(config)};
  if (!refine_seeds) return setup;
  const IlqOptions opts = merge::MergeIlqOptions(cfg.beta);
  for (auto& seed : setup.mode_seeds) {
    try {
      seed = IterativeLqSolve(setup.scenario.game, setup.scenario.x0, seed,
                              opts)
                 .nominal.controls;
    } catch (const std::exception&) {
      // Keep the heuristic seed; each planner's own solve will surface the
      // failure if it persists.
    }
  }
  return setup;
}

EpisodeLog RunEpisode(const EpisodeConfig& cfg, const EpisodeSetup& setup) {
  ValidateConfig(cfg);
  MMG_CHECK_MSG(setup.scenario.game.Horizon() == cfg.horizon &&
                    std::abs(setup.scenario.game.Dt() - cfg.dt) < 1e-12,
                "episode setup was prepared for a different discretization");
  EpisodeRun run(cfg, setup);
  return run.Run(cfg.scheduler == SchedulerMode::kMultiRate);
}

EpisodeLog RunEpisode(const EpisodeConfig& cfg,
                      const merge::MergeConfig& base) {
  return RunEpisode(cfg, PrepareEpisodeSetup(cfg, base));
}

double ControlTotalVariation(const EpisodeLog& log, int agent, int channel) {
  MMG_CHECK_MSG(log.rows.size() >= 2,
                "total variation needs at least two control steps");
  MMG_CHECK(agent >= 0 && agent < 2);
  MMG_CHECK(channel >= 0 && channel < kVehicleControlDim);
  const int idx = kVehicleControlDim * agent + channel;
  double tv = 0.0;
  for (std::size_t t = 0; t + 1 < log.rows.size(); ++t)
    tv += std::abs(log.rows[t + 1].control[idx] - log.rows[t].control[idx]);
  return tv;
}

MatrixResult RunMatrix(const EpisodeConfig& base,
                       const merge::MergeConfig& scenario_config, int seeds) {
  MMG_CHECK_MSG(seeds >= 1, "matrix needs at least one seed");
  const auto start = Clock::now();
  const EpisodeSetup setup = PrepareEpisodeSetup(base, scenario_config);

  MatrixResult result;
  result.seeds = seeds;
  constexpr std::array<Strategy, 4> kOrder{Strategy::kYield,
                                           Strategy::kNoYield, Strategy::kMl,
                                           Strategy::kQmdp};
  for (int row = 0; row < 4; ++row)
    for (int col = 0; col <= row; ++col) {
      MatrixCell cell;
      cell.ego = kOrder[row];
      cell.other = kOrder[col];
      result.cells.push_back(cell);
    }

  const int num_cells = static_cast<int>(result.cells.size());
  const int total = num_cells * seeds;
  result.episodes.resize(total);
  std::exception_ptr failure = nullptr;
  const bool par = ParallelEnabled() && !InParallelRegion();
#pragma omp parallel for schedule(dynamic) if (par)
  for (int idx = 0; idx < total; ++idx) {
    try {
      const int cell = idx / seeds;
      EpisodeConfig cfg = base;
      cfg.ego = result.cells[cell].ego;
      cfg.other = result.cells[cell].other;
      cfg.seed = base.seed + static_cast<unsigned long long>(idx % seeds);
      cfg.record_predictions = false;
      const EpisodeLog log = RunEpisode(cfg, setup);
      MatrixEpisode& ep = result.episodes[idx];
      ep.cell = cell;
      ep.seed = cfg.seed;
      ep.outcome = log.outcome;
      ep.end_step = log.end_step;
      ep.min_gap = log.min_gap;
      ep.final_state = log.final_state;
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (const MatrixEpisode& ep : result.episodes) {
    MatrixCell& cell = result.cells[ep.cell];
    switch (ep.outcome) {
      case Outcome::kSuccess:
        ++cell.successes;
        break;
      case Outcome::kCollision:
        ++cell.collisions;
        break;
      case Outcome::kFreeze:
        ++cell.freezes;
        break;
      case Outcome::kTimeout:
        ++cell.timeouts;
        break;
    }
  }
  result.wall_seconds = MicrosSince(start) * 1e-6;
  return result;
}

void WriteEpisodeCsv(const EpisodeLog& log, std::ostream& out) {
  out << "step,time,"
         "p_x_0,p_y_0,v_0,theta_0,zeta_0,s_0,n_0,xi_0,"
         "p_x_1,p_y_1,v_1,theta_1,zeta_1,s_1,n_1,xi_1,"
         "steer_rate_0,accel_0,steer_rate_1,accel_1,"
         "belief_0_mode0,belief_0_mode1,belief_1_mode0,belief_1_mode1,"
         "naive_0_mode0,naive_0_mode1,naive_1_mode0,naive_1_mode1,"
         "cost_0_mode0,cost_0_mode1,cost_1_mode0,cost_1_mode1,"
         "ne_us_0,plan_us_0,ne_us_1,plan_us_1,track_us,"
         "resolve_failed_0,resolve_failed_1\n";
  out.precision(17);
  for (const EpisodeRow& r : log.rows) {
    out << r.step << ',' << r.time;
    for (int i = 0; i < r.state.size(); ++i) out << ',' << r.state[i];
    for (int i = 0; i < r.control.size(); ++i) out << ',' << r.control[i];
    for (const auto& field : {&EpisodeRow::beliefs, &EpisodeRow::naive_beliefs,
                              &EpisodeRow::mode_costs})
      for (const VecXd& v : r.*field)
        for (int i = 0; i < v.size(); ++i) out << ',' << v[i];
    out << ',' << r.ne_us[0] << ',' << r.plan_us[0] << ',' << r.ne_us[1]
        << ',' << r.plan_us[1] << ',' << r.track_us;
    out << ',' << (r.resolve_failed[0] ? 1 : 0) << ','
        << (r.resolve_failed[1] ? 1 : 0) << '\n';
  }
}

void SaveEpisodeCsv(const EpisodeLog& log, const std::string& path) {
  std::ofstream out(path);
  MMG_CHECK_MSG(out.good(), "cannot open " << path);
  WriteEpisodeCsv(log, out);
  MMG_CHECK_MSG(out.good(), "write failed for " << path);
}

namespace {

ConfigMap EpisodeSummaryMap(const EpisodeLog& log) {
  const EpisodeConfig& cfg = log.config;
  ConfigMap map;
  map.SetString("episode.ego", StrategyName(cfg.ego));
  map.SetString("episode.other", StrategyName(cfg.other));
  map.SetInt("episode.seed", static_cast<long long>(cfg.seed));
  map.SetDouble("episode.dt", cfg.dt);
  map.SetInt("episode.horizon", cfg.horizon);
  map.SetInt("episode.steps", cfg.steps);
  map.SetInt("episode.latency_steps", cfg.latency_steps);
  map.SetString("episode.perturbation",
                PerturbationToSpec(cfg.perturbation));
  map.SetDouble("episode.rate_ne_hz", cfg.rates.ne_hz);
  map.SetDouble("episode.rate_belief_hz", cfg.rates.belief_hz);
  map.SetDouble("episode.rate_tracking_hz", cfg.rates.tracking_hz);
  map.SetString("episode.scheduler",
                cfg.scheduler == SchedulerMode::kMultiRate ? "multirate"
                                                           : "sequential");
  map.SetDouble("episode.process_noise_sigma", cfg.process_noise_sigma);
  map.SetDouble("episode.beta", cfg.beta);

  map.SetString("outcome.label", OutcomeName(log.outcome));
  map.SetInt("outcome.end_step", log.end_step);
  map.SetDouble("outcome.end_time", log.end_step * cfg.dt);
  map.SetDouble("outcome.min_gap", log.min_gap);
  map.SetDouble("outcome.merge_time_0", log.merge_time[0]);
  map.SetDouble("outcome.merge_time_1", log.merge_time[1]);
  if (!log.error.empty()) map.SetString("outcome.error", log.error);

  if (log.rows.size() >= 2) {
    for (int agent = 0; agent < 2; ++agent) {
      const std::string tag = std::to_string(agent);
      map.SetDouble("metrics.accel_tv_" + tag,
                    ControlTotalVariation(log, agent, kAccel));
      map.SetDouble("metrics.steer_rate_tv_" + tag,
                    ControlTotalVariation(log, agent, merge::kSteerRate));
    }
  }
  if (!log.rows.empty()) {
    const EpisodeRow& last = log.rows.back();
    for (int agent = 0; agent < 2; ++agent) {
      const std::string tag = std::to_string(agent);
      for (int z = 0; z < last.beliefs[agent].size(); ++z) {
        const std::string mode = "_mode" + std::to_string(z);
        map.SetDouble("metrics.final_belief_" + tag + mode,
                      last.beliefs[agent][z]);
        map.SetDouble("metrics.final_naive_" + tag + mode,
                      last.naive_beliefs[agent][z]);
      }
    }
    std::vector<double> ne, plan, track;
    for (const EpisodeRow& r : log.rows) {
      for (int agent = 0; agent < 2; ++agent) {
        if (r.ne_us[agent] > 0.0) ne.push_back(r.ne_us[agent]);
        plan.push_back(r.plan_us[agent]);
      }
      track.push_back(r.track_us);
    }
    map.SetDouble("timings.ne_us_median", Median(std::move(ne)));
    map.SetDouble("timings.plan_us_median", Median(std::move(plan)));
    map.SetDouble("timings.track_us_median", Median(std::move(track)));
  }
  return map;
}

std::string PairKey(const MatrixCell& cell) {
  return StrategyName(cell.ego) + "_" + StrategyName(cell.other);
}

}  // namespace

void WriteEpisodeSummary(const EpisodeLog& log, std::ostream& out) {
  out << EpisodeSummaryMap(log).Serialize();
}

void SaveEpisodeSummary(const EpisodeLog& log, const std::string& path) {
  std::ofstream out(path);
  MMG_CHECK_MSG(out.good(), "cannot open " << path);
  WriteEpisodeSummary(log, out);
  MMG_CHECK_MSG(out.good(), "write failed for " << path);
}

void WriteMatrixSummary(const MatrixResult& result, std::ostream& out) {
  constexpr std::array<Strategy, 4> kOrder{Strategy::kYield,
                                           Strategy::kNoYield, Strategy::kMl,
                                           Strategy::kQmdp};
  // Human-oriented table; the parseable record follows.
  const auto pad = [](const std::string& s, std::size_t width) {
    return s + std::string(s.size() < width ? width - s.size() : 1, ' ');
  };
  out << "# success rate, ego strategy by row, non-ego by column\n#\n";
  out << "# " << pad("", 10);
  for (const Strategy col : kOrder) out << pad(StrategyName(col), 10);
  out << '\n';
  int index = 0;
  for (int row = 0; row < 4; ++row) {
    out << "# " << pad(StrategyName(kOrder[row]), 10);
    for (int col = 0; col <= row; ++col) {
      std::ostringstream cell;
      cell.precision(2);
      cell << std::fixed << result.cells[index++].SuccessRate(result.seeds);
      out << pad(cell.str(), 10);
    }
    out << '\n';
  }
  out << '\n';

  ConfigMap map;
  map.SetInt("matrix.seeds", result.seeds);
  map.SetInt("matrix.cells", static_cast<long long>(result.cells.size()));
  map.SetDouble("matrix.wall_seconds", result.wall_seconds);
  for (const MatrixCell& cell : result.cells) {
    const std::string key = "pair_" + PairKey(cell);
    map.SetInt(key + ".successes", cell.successes);
    map.SetInt(key + ".collisions", cell.collisions);
    map.SetInt(key + ".freezes", cell.freezes);
    map.SetInt(key + ".timeouts", cell.timeouts);
    map.SetDouble(key + ".success_rate", cell.SuccessRate(result.seeds));
  }
  out << map.Serialize();
}

void SaveMatrixSummary(const MatrixResult& result, const std::string& path) {
  std::ofstream out(path);
  MMG_CHECK_MSG(out.good(), "cannot open " << path);
  WriteMatrixSummary(result, out);
  MMG_CHECK_MSG(out.good(), "write failed for " << path);
}

}  // namespace mmg::sim
