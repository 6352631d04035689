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

#ifndef MMG_CORE_GAME_H_
#define MMG_CORE_GAME_H_

#include <memory>
#include <vector>

#include "mmg/core/cost.h"
#include "mmg/core/dynamics.h"

namespace mmg {

// State/control sequence over a horizon: T states, T-1 joint controls.
struct Trajectory {
  std::vector<VecXd> states;
  std::vector<VecXd> controls;

  int Horizon() const { return static_cast<int>(states.size()); }
};

// Finite-horizon general-sum game: shared dynamics, one objective per agent,
// T states spaced dt apart.  Each agent's total cost is the sum of its
// running costs over the T-1 stages plus its terminal cost at the last state.
class DynamicGame {
 public:
  DynamicGame(std::shared_ptr<const DynamicsModel> dynamics,
              std::vector<std::shared_ptr<const AgentObjective>> objectives,
              int horizon, double dt);

  const DynamicsModel& Dynamics() const { return *dynamics_; }
  std::shared_ptr<const DynamicsModel> DynamicsPtr() const {
    return dynamics_;
  }
  const AgentObjective& Objective(int agent) const {
    return *objectives_[agent];
  }
  int NumAgents() const { return dynamics_->NumAgents(); }
  int Horizon() const { return horizon_; }
  double Dt() const { return dt_; }

  // Returns a game identical to this one except for the horizon.
  DynamicGame WithHorizon(int horizon) const;

 private:
  std::shared_ptr<const DynamicsModel> dynamics_;
  std::vector<std::shared_ptr<const AgentObjective>> objectives_;
  int horizon_;
  double dt_;
};

// Integrates the joint controls forward from x0.  controls.size() determines
// the rollout length and must be at most game.Horizon() - 1.
Trajectory Rollout(const DynamicGame& game, const VecXd& x0,
                   const std::vector<VecXd>& controls);

// Total cost of one agent along a trajectory (running stages + terminal).
double EvaluateCost(const DynamicGame& game, int agent,
                    const Trajectory& traj);

}  // namespace mmg

#endif  // MMG_CORE_GAME_H_
