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

#include "mmg/core/lq_approx.h"

#include <algorithm>
#include <cmath>

#include "mmg/core/check.h"
#include "mmg/support/parallel.h"

namespace mmg {
namespace {

constexpr double kCrossCouplingTol = 1e-9;

}  // namespace

LqApproximation LqApproximate(const DynamicGame& game,
                              const Trajectory& nominal,
                              double state_hessian_floor) {
  const bool clamp_state = std::isfinite(state_hessian_floor);
  const int horizon = nominal.Horizon();
  MMG_CHECK_MSG(horizon >= 2, "nominal must span at least one stage");
  MMG_CHECK(nominal.controls.size() + 1 == nominal.states.size());
  const DynamicsModel& dyn = game.Dynamics();
  const int num_agents = game.NumAgents();
  const int num_stages = horizon - 1;

  LqApproximation lq;
  lq.A.resize(num_stages);
  lq.B.resize(num_stages);
  lq.cost.resize(num_stages);
  lq.terminal.resize(num_agents);
  lq.nominal = nominal;
  lq.dt = game.Dt();

  std::vector<double> stage_reg(num_stages, 0.0);
  std::vector<double> stage_state_reg(num_stages, 0.0);

  // Stages touch disjoint slots, so this loop is a parallel kernel with a
  // bit-identical serial path.  Exceptions cannot cross the region, so the
  // first one is captured and rethrown after the join.
  const bool par = ParallelEnabled();
  std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(static) if (par)
  for (int t = 0; t < num_stages; ++t) {
    try {
    const VecXd& x = nominal.states[t];
    const VecXd& u = nominal.controls[t];

    MatXd a, b;
    dyn.StepJacobians(x, u, game.Dt(), &a, &b);
    MMG_CHECK_MSG(a.allFinite() && b.allFinite(),
                  "non-finite dynamics Jacobians at step " << t);
    lq.A[t] = std::move(a);
    lq.B[t].resize(num_agents);
    for (int i = 0; i < num_agents; ++i)
      lq.B[t][i] = b.middleCols(dyn.ControlOffset(i), dyn.ControlDim(i));

    lq.cost[t].resize(num_agents);
    StageQuadraticExpansion expansion;
    for (int i = 0; i < num_agents; ++i) {
      game.Objective(i).QuadraticizeRunning(x, u, &expansion);
      MMG_CHECK_MSG(expansion.dx.allFinite() && expansion.dxx.allFinite() &&
                        expansion.du.allFinite() && expansion.duu.allFinite(),
                    "non-finite cost expansion at step " << t);
      LqStageCost& c = lq.cost[t][i];
      c.value = expansion.value;
      c.q = expansion.dx;
      c.Q = Symmetrize(expansion.dxx);
      if (clamp_state)
        stage_state_reg[t] =
            std::max(stage_state_reg[t],
                     ClampEigenvalues(&c.Q, state_hessian_floor));
      c.r.resize(num_agents);
      c.R.resize(num_agents);
      for (int j = 0; j < num_agents; ++j) {
        const int oj = dyn.ControlOffset(j);
        const int mj = dyn.ControlDim(j);
        c.r[j] = expansion.du.segment(oj, mj);
        c.R[j] = Symmetrize(expansion.duu.block(oj, oj, mj, mj));
        for (int k = 0; k < num_agents; ++k) {
          if (k == j) continue;
          const double coupling =
              expansion.duu.block(oj, dyn.ControlOffset(k), mj,
                                  dyn.ControlDim(k))
                  .cwiseAbs()
                  .maxCoeff();
          MMG_CHECK_MSG(coupling <= kCrossCouplingTol,
                        "cross-agent control coupling unsupported (step "
                            << t << ", agent " << i << ")");
        }
      }
      // Own-control curvature must be positive definite for the stage
      // solves and the policy covariances.
      stage_reg[t] =
          std::max(stage_reg[t],
                   MakePositiveDefinite(&c.R[i], kOwnControlEigenFloor));
    }
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (int i = 0; i < num_agents; ++i) {
    TerminalQuadraticExpansion term;
    game.Objective(i).QuadraticizeTerminal(nominal.states.back(), &term);
    MMG_CHECK_MSG(term.dx.allFinite() && term.dxx.allFinite(),
                  "non-finite terminal expansion");
    lq.terminal[i].value = term.value;
    lq.terminal[i].q = term.dx;
    lq.terminal[i].Q = Symmetrize(term.dxx);
    if (clamp_state)
      lq.state_reg = std::max(
          lq.state_reg, ClampEigenvalues(&lq.terminal[i].Q, state_hessian_floor));
  }

  lq.control_reg = *std::max_element(stage_reg.begin(), stage_reg.end());
  lq.state_reg =
      std::max(lq.state_reg, *std::max_element(stage_state_reg.begin(),
                                               stage_state_reg.end()));
  return lq;
}

}  // namespace mmg
