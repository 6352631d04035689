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

#include "mmg/core/game.h"

#include <cmath>
#include <utility>

#include "mmg/core/check.h"

namespace mmg {

DynamicGame::DynamicGame(
    std::shared_ptr<const DynamicsModel> dynamics,
    std::vector<std::shared_ptr<const AgentObjective>> objectives, int horizon,
    double dt)
    : dynamics_(std::move(dynamics)),
      objectives_(std::move(objectives)),
      horizon_(horizon),
      dt_(dt) {
  MMG_CHECK(dynamics_ != nullptr);
  MMG_CHECK_MSG(static_cast<int>(objectives_.size()) == dynamics_->NumAgents(),
                "one objective per agent required");
  for (const auto& obj : objectives_) MMG_CHECK(obj != nullptr);
  MMG_CHECK_MSG(horizon_ >= 2, "horizon must cover at least one stage");
  MMG_CHECK(dt_ > 0.0);
}

DynamicGame DynamicGame::WithHorizon(int horizon) const {
  return DynamicGame(dynamics_, objectives_, horizon, dt_);
}

Trajectory Rollout(const DynamicGame& game, const VecXd& x0,
                   const std::vector<VecXd>& controls) {
  MMG_CHECK(x0.size() == game.Dynamics().StateDim());
  MMG_CHECK_MSG(static_cast<int>(controls.size()) <= game.Horizon() - 1,
                "more controls than stages");
  Trajectory traj;
  traj.states.reserve(controls.size() + 1);
  traj.controls = controls;
  traj.states.push_back(x0);
  for (size_t t = 0; t < controls.size(); ++t) {
    const VecXd next =
        game.Dynamics().Step(traj.states.back(), controls[t], game.Dt());
    if (!next.allFinite())
      throw NumericalError("rollout produced a non-finite state",
                           static_cast<int>(t));
    traj.states.push_back(next);
  }
  return traj;
}

double EvaluateCost(const DynamicGame& game, int agent,
                    const Trajectory& traj) {
  MMG_CHECK(agent >= 0 && agent < game.NumAgents());
  MMG_CHECK(traj.Horizon() >= 1);
  MMG_CHECK(traj.controls.size() + 1 == traj.states.size());
  const AgentObjective& obj = game.Objective(agent);
  double total = 0.0;
  for (size_t t = 0; t < traj.controls.size(); ++t)
    total += obj.RunningCost(traj.states[t], traj.controls[t]);
  total += obj.TerminalCost(traj.states.back());
  return total;
}

}  // namespace mmg
