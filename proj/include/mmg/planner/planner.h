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
// Ego strategy layer on top of a bank of local equilibria: belief-weighted
// control blending (the POMDP step with full observability assumed from the
// next stage on), maximum-likelihood mode following, fixed-mode baselines,
// and the receding-horizon planning step that ties inference and strategy
// together.

#ifndef MMG_PLANNER_PLANNER_H_
#define MMG_PLANNER_PLANNER_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mmg/inference/inference.h"

namespace mmg {

enum class Strategy { kYield, kNoYield, kMl, kQmdp };

std::string StrategyName(Strategy s);
Strategy StrategyFromName(const std::string& name);

// Time-indexed affine ego control law published by one planning step and
// consumed by a faster tracking loop: u(step, x) = c[t] - K[t] x with
// t = step - base_step clamped to the stored stages.
struct EgoPlan {
  int base_step = 0;
  std::vector<VecXd> c;
  std::vector<MatXd> K;
  std::vector<VecXd> x_ref;  // blended reference joint states, for logging

  int NumStages() const { return static_cast<int>(c.size()); }
  VecXd Control(int step, const VecXd& x) const;
};

struct EgoDecision {
  VecXd control;      // ego control for the current step
  EgoPlan plan;       // full-horizon law behind it
  Strategy strategy = Strategy::kQmdp;
  // Snapshot the decision used; placeholder single-mode belief until set.
  Belief belief = Belief::Uniform(1);
  VecXd mode_costs;   // per-mode predicted ego cost of the chosen control
  double ne_solve_us = 0.0;  // bank refresh time charged to this step
  double plan_us = 0.0;      // belief update + strategy evaluation time
  bool hessian_regularized = false;
  bool resolve_failed = false;
};

// Belief-weighted blend: minimizes sum_z b(z) of the mode-z stage value
// model in the ego control, which is quadratic with curvature H_z about the
// mode-z policy mean.  Closed form: the H-weighted barycenter of the mode
// means.  Degenerate beliefs collapse exactly to the selected mode's policy.
EgoDecision QmdpPolicy(const Belief& b, const ModeBank& bank, int ego,
                       const VecXd& x_t, int step);

// Follows the most likely mode, ties toward the lowest index.
EgoDecision MlPolicy(const Belief& b, const ModeBank& bank, int ego,
                     const VecXd& x_t, int step);

// Fixed-mode baseline; the reported belief is degenerate on that mode.
EgoDecision NoinfPolicy(int fixed_mode, const ModeBank& bank, int ego,
                        const VecXd& x_t, int step);

struct PlannerOptions {
  Strategy strategy = Strategy::kQmdp;
  // Mode executed by the fixed-mode strategies.
  int fixed_mode = 0;
  // Rationality of the equilibrium solves, the value-based prior, and the
  // control filter.  Overrides ilq.beta.
  double beta = 5.0;
  // Control steps between bank refreshes.
  int resolve_period = 10;
  IlqOptions ilq;  // iteration/backtracking limits for the bank solves
  // Shadow baseline filter (logged, never drives decisions).  Disabled when
  // no position extractor is supplied.
  double naive_sigma = 0.1;
  std::function<VecXd(const VecXd&)> nonego_position;
};

// One agent's receding-horizon planner: owns its bank of local equilibria,
// its belief, and the shadow baseline filter.  Each agent in a simulation
// runs its own instance over the same game with its own ego index.
class EgoPlanner {
 public:
  // mode_seeds[z] seeds equilibrium z at the first solve; later refreshes
  // warm-start from the previous solution so mode identity is preserved.
  EgoPlanner(DynamicGame game, int ego_index,
             std::vector<std::vector<VecXd>> mode_seeds, PlannerOptions opts);

  // Solves the initial bank from x0 and resets beliefs to the value prior.
  void Initialize(const VecXd& x0, int step);

  // One fast-loop step at sim step `step`: recover the last joint control
  // from x_prev -> x_t, update both filters, refresh the bank if stale, and
  // emit the decision.  Pass std::nullopt for x_prev on the first step.
  EgoDecision PlanStep(const std::optional<VecXd>& x_prev, const VecXd& x_t,
                       int step);

  const Belief& belief() const { return belief_; }
  const Belief& naive_belief() const { return naive_belief_; }
  const ModeBank& bank() const { return bank_; }
  const DynamicGame& game() const { return game_; }
  int ego_index() const { return ego_; }

 private:
  // Warm-started refresh; on solver failure the stale bank is kept.
  bool ResolveBank(const VecXd& x0, int step);

  DynamicGame game_;
  int ego_;
  std::vector<std::vector<VecXd>> seeds_;
  PlannerOptions opts_;
  ModeBank bank_;
  Belief belief_;
  Belief naive_belief_;
  bool initialized_ = false;
};

}  // namespace mmg

#endif  // MMG_PLANNER_PLANNER_H_
