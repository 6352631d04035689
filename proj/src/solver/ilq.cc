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

#include "mmg/solver/ilq.h"

#include <cmath>
#include <utility>

#include "mmg/core/check.h"
#include "mmg/core/lq_approx.h"

namespace mmg {
namespace {

// Violation of the LQ model's stage-wise first-order conditions along a
// candidate trajectory expressed in deviations from the model's nominal.
// Zero for the exact LQ equilibrium rollout; nonlinearity in the true
// dynamics makes it positive and the line search drives it down.
double StationarityResidual(const LqApproximation& lq, const LqNeSolution& ne,
                            const Trajectory& candidate) {
  const int num_stages = lq.Horizon() - 1;
  const int num_agents = lq.NumAgents();
  double total = 0.0;
  for (int t = 0; t < num_stages; ++t) {
    const VecXd dx = candidate.states[t] - lq.nominal.states[t];
    const VecXd du = candidate.controls[t] - lq.nominal.controls[t];
    const VecXd dx_next = lq.A[t] * dx + [&] {
      VecXd acc = VecXd::Zero(lq.A[t].rows());
      int off = 0;
      for (int j = 0; j < num_agents; ++j) {
        const int mj = static_cast<int>(lq.B[t][j].cols());
        acc += lq.B[t][j] * du.segment(off, mj);
        off += mj;
      }
      return acc;
    }();
    int off = 0;
    for (int i = 0; i < num_agents; ++i) {
      const int mi = static_cast<int>(lq.B[t][i].cols());
      const VecXd grad =
          lq.cost[t][i].r[i] + lq.cost[t][i].R[i] * du.segment(off, mi) +
          lq.B[t][i].transpose() *
              (ne.values[i].p[t + 1] + ne.values[i].P[t + 1] * dx_next);
      total += grad.squaredNorm();
      off += mi;
    }
  }
  return std::sqrt(total);
}

std::vector<VecXd> PolicyRollControls(const LqApproximation& lq,
                                      const LqNeSolution& ne,
                                      const DynamicGame& game, const VecXd& x0,
                                      double step, Trajectory* out) {
  const int num_stages = lq.Horizon() - 1;
  const int num_agents = lq.NumAgents();
  std::vector<VecXd> controls(num_stages);
  out->states.clear();
  out->states.push_back(x0);
  for (int t = 0; t < num_stages; ++t) {
    const VecXd& x = out->states.back();
    VecXd u(game.Dynamics().TotalControlDim());
    for (int i = 0; i < num_agents; ++i) {
      const auto& pol = ne.policies[i];
      u.segment(game.Dynamics().ControlOffset(i),
                game.Dynamics().ControlDim(i)) =
          pol.u_nom[t] - pol.K[t] * (x - pol.x_nom[t]) - step * pol.k[t];
    }
    controls[t] = u;
    const VecXd next = game.Dynamics().Step(x, u, game.Dt());
    if (!next.allFinite())
      throw NumericalError("non-finite rollout state", t);
    out->states.push_back(next);
  }
  out->controls = controls;
  return controls;
}

double MaxControlChange(const std::vector<VecXd>& a,
                        const std::vector<VecXd>& b) {
  double change = 0.0;
  for (size_t t = 0; t < a.size(); ++t)
    change = std::max(change, (a[t] - b[t]).cwiseAbs().maxCoeff());
  return change;
}

// Strongly concave state couplings can push the coupled value recursion past
// a conjugate point on harsh intermediate trajectories.  Retrying with
// progressively damped state curvature keeps such iterates usable; the
// damping term's gradient vanishes at the nominal, so it never moves the
// stationarity target, and the ladder starts at zero so healthy models stay
// exact.
constexpr double kStateDampingLadder[] = {0.0, 1e-2, 1.0, 1e2, 1e4};
constexpr int kNumDampingLevels =
    static_cast<int>(sizeof(kStateDampingLadder) / sizeof(double));

LqNeSolution SolveBackward(const LqApproximation& lq, bool stochastic,
                           double beta, double* damping_used) {
  for (int level = 0; level < kNumDampingLevels; ++level) {
    const double lambda = kStateDampingLadder[level];
    const LqApproximation* model = &lq;
    LqApproximation damped;
    if (lambda > 0.0) {
      damped = lq;
      for (auto& stage : damped.cost)
        for (auto& c : stage)
          c.Q += lambda * MatXd::Identity(c.Q.rows(), c.Q.cols());
      for (auto& c : damped.terminal)
        c.Q += lambda * MatXd::Identity(c.Q.rows(), c.Q.cols());
      model = &damped;
    }
    try {
      LqNeSolution ne = stochastic ? SolveMaxEntNeLq(*model, beta)
                                   : SolveFeedbackNeLq(*model);
      *damping_used = lambda;
      return ne;
    } catch (const NumericalError&) {
      if (level + 1 == kNumDampingLevels) throw;
    }
  }
  throw NumericalError("value recursion diverged at every damping level");
}

}  // namespace

LocalNashSolution IterativeLqSolve(const DynamicGame& game, const VecXd& x0,
                                   const std::vector<VecXd>& seed_controls,
                                   const IlqOptions& options) {
  MMG_CHECK_MSG(static_cast<int>(seed_controls.size()) == game.Horizon() - 1,
                "seed must provide one joint control per stage");
  MMG_CHECK(options.max_iterations >= 1);
  const bool stochastic = std::isfinite(options.beta);
  if (stochastic) MMG_CHECK(options.beta > 0.0);

  LocalNashSolution sol;
  sol.beta = options.beta;
  sol.nominal = Rollout(game, x0, seed_controls);

  LqApproximation lq;
  LqNeSolution ne;
  double damping = 0.0;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    lq = LqApproximate(game, sol.nominal, options.state_hessian_floor);
    damping = 0.0;
    ne = SolveBackward(lq, stochastic, options.beta, &damping);
    sol.diag.state_reg =
        std::max(sol.diag.state_reg, std::max(lq.state_reg, damping));
    sol.diag.curvature_reg =
        std::max(sol.diag.curvature_reg,
                 std::max(ne.curvature_reg, lq.control_reg));
    sol.diag.iterations = iter + 1;

    const double base_residual = StationarityResidual(lq, ne, sol.nominal);

    Trajectory candidate;
    bool accepted = false;
    double step = 1.0;
    for (int bt = 0; bt <= options.max_backtracks; ++bt, step *= 0.5) {
      Trajectory attempt;
      try {
        PolicyRollControls(lq, ne, game, x0, step, &attempt);
      } catch (const NumericalError&) {
        continue;  // divergent rollout; halve the step
      }
      if (StationarityResidual(lq, ne, attempt) < base_residual) {
        candidate = std::move(attempt);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No step improves the first-order conditions; the nominal is as
      // stationary as this model can make it.  A damped model cannot certify
      // stationarity of the true game.
      sol.diag.converged = damping == 0.0 && base_residual < 1e-6;
      sol.diag.final_step_size = 0.0;
      sol.diag.final_residual = base_residual;
      break;
    }

    const double change =
        MaxControlChange(candidate.controls, sol.nominal.controls);
    sol.diag.final_control_change = change;
    sol.diag.final_step_size = step;
    sol.nominal = std::move(candidate);
    sol.diag.final_residual = StationarityResidual(lq, ne, sol.nominal);

    for (int i = 0; i < game.NumAgents(); ++i) {
      const double cost = EvaluateCost(game, i, sol.nominal);
      if (!std::isfinite(cost))
        throw NumericalError("cost diverged during equilibrium refinement");
    }

    if (change < options.control_tolerance && damping == 0.0) {
      sol.diag.converged = true;
      break;
    }
  }

  // Policies and values describe the final nominal.
  lq = LqApproximate(game, sol.nominal, options.state_hessian_floor);
  damping = 0.0;
  ne = SolveBackward(lq, stochastic, options.beta, &damping);
  sol.diag.state_reg =
      std::max(sol.diag.state_reg, std::max(lq.state_reg, damping));
  sol.policies = std::move(ne.policies);
  sol.values = std::move(ne.values);
  return sol;
}

}  // namespace mmg
