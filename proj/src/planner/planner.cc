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

#include "mmg/planner/planner.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <utility>

#include "mmg/core/check.h"
#include "mmg/support/parallel.h"

namespace mmg {
namespace {

using Clock = std::chrono::steady_clock;

double MicrosSince(const Clock::time_point& start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start)
      .count();
}

// Mode-z predicted ego cost of playing u at (stage, x): the mode's value
// plus the quadratic penalty for deviating from its policy mean.
VecXd ModeCosts(const ModeBank& bank, int ego, int stage, const VecXd& x,
                const VecXd& u) {
  VecXd costs(bank.NumModes());
  for (int z = 0; z < bank.NumModes(); ++z) {
    const AffineGaussianPolicy& pi = bank.modes[z].policies[ego];
    const VecXd dev = u - pi.Mean(stage, x);
    costs(z) = bank.modes[z].values[ego].Value(stage, x) +
               0.5 * dev.dot(pi.H[stage] * dev);
  }
  return costs;
}

// Exact single-mode decision: control and plan copied from the mode policy.
EgoDecision DecisionFromMode(const ModeBank& bank, int ego, int z,
                             const VecXd& x_t, int step, Strategy strategy,
                             Belief belief_snapshot) {
  const AffineGaussianPolicy& pi = bank.modes[z].policies[ego];
  const int stages = pi.NumStages();
  const int t = bank.PolicyStage(step);

  EgoDecision d;
  d.strategy = strategy;
  d.belief = std::move(belief_snapshot);
  d.control = pi.Mean(t, x_t);
  d.plan.base_step = bank.solve_step + t;
  d.plan.c.reserve(stages - t);
  for (int tau = t; tau < stages; ++tau) {
    d.plan.c.push_back(pi.u_nom[tau] + pi.K[tau] * pi.x_nom[tau] -
                       pi.k[tau]);
    d.plan.K.push_back(pi.K[tau]);
    d.plan.x_ref.push_back(pi.x_nom[tau]);
  }
  d.mode_costs = ModeCosts(bank, ego, t, x_t, d.control);
  return d;
}

// General belief blend: at each stage the blended law minimizes the
// belief-weighted sum of the per-mode quadratic stage values, giving the
// curvature-weighted barycenter of the mode policies.
EgoDecision DecisionFromBlend(const Belief& b, const ModeBank& bank, int ego,
                              const VecXd& x_t, int step, Strategy strategy) {
  const int num_modes = bank.NumModes();
  const int stages = bank.modes.front().policies[ego].NumStages();
  const int t = bank.PolicyStage(step);

  EgoDecision d;
  d.strategy = strategy;
  d.belief = b;
  d.plan.base_step = bank.solve_step + t;
  const int m = static_cast<int>(
      bank.modes.front().policies[ego].u_nom.front().size());

  for (int tau = t; tau < stages; ++tau) {
    MatXd w_sum = MatXd::Zero(m, m);
    VecXd c_sum = VecXd::Zero(m);
    MatXd k_sum = MatXd::Zero(
        m, static_cast<int>(bank.modes.front().policies[ego].K[tau].cols()));
    VecXd x_ref = VecXd::Zero(bank.modes.front().nominal.states[tau].size());
    for (int z = 0; z < num_modes; ++z) {
      const AffineGaussianPolicy& pi = bank.modes[z].policies[ego];
      const MatXd wh = b(z) * pi.H[tau];
      w_sum += wh;
      c_sum += wh * (pi.u_nom[tau] + pi.K[tau] * pi.x_nom[tau] - pi.k[tau]);
      k_sum += wh * pi.K[tau];
      x_ref += b(z) * bank.modes[z].nominal.states[tau];
    }
    Eigen::LLT<MatXd> llt(w_sum);
    if (llt.info() != Eigen::Success) {
      // Mixed curvature lost definiteness to rounding; nudge and retry.
      MakePositiveDefinite(&w_sum, 1e-9);
      llt.compute(w_sum);
      d.hessian_regularized = true;
    }
    d.plan.c.push_back(llt.solve(c_sum));
    d.plan.K.push_back(llt.solve(k_sum));
    d.plan.x_ref.push_back(std::move(x_ref));
  }

  d.control = d.plan.Control(step, x_t);
  d.mode_costs = ModeCosts(bank, ego, t, x_t, d.control);
  return d;
}

}  // namespace

std::string StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kYield:
      return "yield";
    case Strategy::kNoYield:
      return "noyield";
    case Strategy::kMl:
      return "ml";
    case Strategy::kQmdp:
      return "qmdp";
  }
  throw ContractViolation("unknown strategy tag");
}

Strategy StrategyFromName(const std::string& name) {
  if (name == "yield") return Strategy::kYield;
  if (name == "noyield") return Strategy::kNoYield;
  if (name == "ml") return Strategy::kMl;
  if (name == "qmdp") return Strategy::kQmdp;
  throw ContractViolation("unknown strategy name: " + name);
}

VecXd EgoPlan::Control(int step, const VecXd& x) const {
  MMG_CHECK_MSG(!c.empty(), "empty plan");
  const int t = std::clamp(step - base_step, 0, NumStages() - 1);
  return c[t] - K[t] * x;
}

EgoDecision QmdpPolicy(const Belief& b, const ModeBank& bank, int ego,
                       const VecXd& x_t, int step) {
  bank.CheckConsistent();
  MMG_CHECK(b.NumModes() == bank.NumModes());
  MMG_CHECK(ego >= 0 && ego < bank.NumAgents());
  // A degenerate belief collapses to the mode policy exactly, bit for bit.
  for (int z = 0; z < b.NumModes(); ++z) {
    if (b(z) == 1.0)
      return DecisionFromMode(bank, ego, z, x_t, step, Strategy::kQmdp, b);
  }
  return DecisionFromBlend(b, bank, ego, x_t, step, Strategy::kQmdp);
}

EgoDecision MlPolicy(const Belief& b, const ModeBank& bank, int ego,
                     const VecXd& x_t, int step) {
  bank.CheckConsistent();
  MMG_CHECK(b.NumModes() == bank.NumModes());
  return DecisionFromMode(bank, ego, b.Argmax(), x_t, step, Strategy::kMl, b);
}

EgoDecision NoinfPolicy(int fixed_mode, const ModeBank& bank, int ego,
                        const VecXd& x_t, int step) {
  bank.CheckConsistent();
  MMG_CHECK(fixed_mode >= 0 && fixed_mode < bank.NumModes());
  return DecisionFromMode(bank, ego, fixed_mode, x_t, step, Strategy::kYield,
                          Belief::Degenerate(bank.NumModes(), fixed_mode));
}

EgoPlanner::EgoPlanner(DynamicGame game, int ego_index,
                       std::vector<std::vector<VecXd>> mode_seeds,
                       PlannerOptions opts)
    : game_(std::move(game)),
      ego_(ego_index),
      seeds_(std::move(mode_seeds)),
      opts_(std::move(opts)),
      belief_(Belief::Uniform(std::max<size_t>(seeds_.size(), 1))),
      naive_belief_(belief_) {
  MMG_CHECK_MSG(!seeds_.empty(), "planner needs at least one mode seed");
  MMG_CHECK(ego_ >= 0 && ego_ < game_.NumAgents());
  MMG_CHECK(opts_.resolve_period >= 1);
  MMG_CHECK_MSG(std::isfinite(opts_.beta) && opts_.beta > 0.0,
                "planner rationality must be finite and positive");
  // One rationality everywhere: the bank solves, the prior, and the filter.
  opts_.ilq.beta = opts_.beta;
  for (const auto& seed : seeds_)
    MMG_CHECK_MSG(static_cast<int>(seed.size()) == game_.Horizon() - 1,
                  "mode seed must cover the horizon");
}

void EgoPlanner::Initialize(const VecXd& x0, int step) {
  const int num_modes = static_cast<int>(seeds_.size());
  std::vector<LocalNashSolution> modes(num_modes);
  std::exception_ptr failure = nullptr;
  const bool par = ParallelEnabled() && !InParallelRegion();
#pragma omp parallel for schedule(static) if (par)
  for (int z = 0; z < num_modes; ++z) {
    try {
      modes[z] = IterativeLqSolve(game_, x0, seeds_[z], opts_.ilq);
      modes[z].mode = z;
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  bank_.modes = std::move(modes);
  bank_.x_solve = x0;
  bank_.solve_step = step;
  bank_.CheckConsistent();
  belief_ = PriorBelief(bank_, x0, opts_.beta);
  naive_belief_ = belief_;
  initialized_ = true;
}

bool EgoPlanner::ResolveBank(const VecXd& x0, int step) {
  const int elapsed = std::max(step - bank_.solve_step, 0);
  const int num_modes = bank_.NumModes();
  const int num_stage_controls = game_.Horizon() - 1;

  std::vector<LocalNashSolution> fresh(num_modes);
  std::vector<char> ok(num_modes, 0);
  const bool par = ParallelEnabled() && !InParallelRegion();
#pragma omp parallel for schedule(static) if (par)
  for (int z = 0; z < num_modes; ++z) {
    // Warm start: shift the previous nominal by the elapsed steps and hold
    // the last control, so the refreshed solve stays in the same basin.
    const std::vector<VecXd>& prev = bank_.modes[z].nominal.controls;
    std::vector<VecXd> seed;
    seed.reserve(num_stage_controls);
    for (int t = 0; t < num_stage_controls; ++t) {
      const int src = std::min(t + elapsed,
                               static_cast<int>(prev.size()) - 1);
      seed.push_back(prev[src]);
    }
    try {
      fresh[z] = IterativeLqSolve(game_, x0, seed, opts_.ilq);
      fresh[z].mode = bank_.modes[z].mode;
      ok[z] = 1;
    } catch (...) {
      ok[z] = 0;
    }
  }
  if (!std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; }))
    return false;  // keep the stale bank as one consistent snapshot

  bank_.modes = std::move(fresh);
  bank_.x_solve = x0;
  bank_.solve_step = step;
  return true;
}

EgoDecision EgoPlanner::PlanStep(const std::optional<VecXd>& x_prev,
                                 const VecXd& x_t, int step) {
  MMG_CHECK_MSG(initialized_, "planner used before Initialize");
  const auto plan_start = Clock::now();

  if (x_prev.has_value()) {
    const ControlEstimate est =
        EstimateControls(game_.Dynamics(), *x_prev, x_t, game_.Dt());
    const DynamicsModel& dyn = game_.Dynamics();
    VecXd u_nonego(dyn.TotalControlDim() - dyn.ControlDim(ego_));
    int offset = 0;
    for (int i = 0; i < game_.NumAgents(); ++i) {
      if (i == ego_) continue;
      u_nonego.segment(offset, dyn.ControlDim(i)) =
          est.u.segment(dyn.ControlOffset(i), dyn.ControlDim(i));
      offset += dyn.ControlDim(i);
    }
    // The recovered control was applied at x_prev one step ago.
    belief_ = BeliefUpdate(belief_, bank_, ego_, *x_prev, u_nonego,
                           step - 1 - bank_.solve_step)
                  .belief;
    if (opts_.nonego_position) {
      naive_belief_ =
          NaiveBeliefUpdate(naive_belief_, bank_, opts_.nonego_position(x_t),
                            opts_.naive_sigma, step - bank_.solve_step,
                            opts_.nonego_position)
              .belief;
    }
  }
  const double belief_us = MicrosSince(plan_start);

  double ne_us = 0.0;
  bool resolve_failed = false;
  if (step - bank_.solve_step >= opts_.resolve_period) {
    const auto ne_start = Clock::now();
    resolve_failed = !ResolveBank(x_t, step);
    ne_us = MicrosSince(ne_start);
  }

  const auto strat_start = Clock::now();
  EgoDecision d;
  switch (opts_.strategy) {
    case Strategy::kYield:
    case Strategy::kNoYield:
      d = NoinfPolicy(opts_.fixed_mode, bank_, ego_, x_t, step);
      d.strategy = opts_.strategy;
      break;
    case Strategy::kMl:
      d = MlPolicy(belief_, bank_, ego_, x_t, step);
      break;
    case Strategy::kQmdp:
      d = QmdpPolicy(belief_, bank_, ego_, x_t, step);
      break;
  }
  d.ne_solve_us = ne_us;
  d.plan_us = belief_us + MicrosSince(strat_start);
  d.resolve_failed = resolve_failed;
  return d;
}

}  // namespace mmg
