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

#ifndef MMG_CORE_LQ_APPROX_H_
#define MMG_CORE_LQ_APPROX_H_

#include <limits>
#include <vector>

#include "mmg/core/game.h"

namespace mmg {

// One agent's quadratic stage model in deviation variables about the nominal:
//   l_i(t) ~= value + q'dx + 0.5 dx'Q dx + sum_j [r_j'du_j + 0.5 du_j'R_j du_j]
struct LqStageCost {
  double value = 0.0;
  VecXd q;
  MatXd Q;
  std::vector<VecXd> r;  // per agent control block
  std::vector<MatXd> R;
};

struct LqTerminalCost {
  double value = 0.0;
  VecXd q;
  MatXd Q;
};

// Time-varying LQ model of a game about a nominal trajectory:
//   dx_{t+1} = A_t dx_t + sum_j B_t[j] du_{j,t}.
// Own-control Hessians R[i][i] are shifted to a minimum eigenvalue of at
// least kOwnControlEigenFloor; control_reg records the largest shift applied.
struct LqApproximation {
  std::vector<MatXd> A;                      // T-1
  std::vector<std::vector<MatXd>> B;         // [t][agent]
  std::vector<std::vector<LqStageCost>> cost;  // [t][agent]
  std::vector<LqTerminalCost> terminal;      // [agent]
  Trajectory nominal;
  double dt = 0.0;
  double control_reg = 0.0;
  double state_reg = 0.0;

  int Horizon() const { return nominal.Horizon(); }
  int NumAgents() const { return static_cast<int>(terminal.size()); }
};

inline constexpr double kOwnControlEigenFloor = 1e-6;

// Keeps the exact state-cost Hessians in the LQ model.
inline constexpr double kNoStateHessianFloor =
    -std::numeric_limits<double>::infinity();

// Builds the LQ model about a nominal trajectory.  The per-stage work is
// independent across timesteps and runs under the parallel-kernel switch.
// Cost expansions with cross-agent control coupling are rejected.
//
// A finite state_hessian_floor clamps the eigenvalues of every agent's state
// Hessian (running and terminal) from below, Gauss-Newton style.  Gradients
// are untouched, so the model's stationary points are those of the true
// game; a floor of zero keeps the coupled value recursion stable under
// strongly concave interaction costs.  state_reg records the largest raise.
LqApproximation LqApproximate(const DynamicGame& game,
                              const Trajectory& nominal,
                              double state_hessian_floor = kNoStateHessianFloor);

}  // namespace mmg

#endif  // MMG_CORE_LQ_APPROX_H_
