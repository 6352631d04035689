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
// Feedback Nash equilibria of time-varying LQ games via coupled backward
// recursion.  At every stage the agents' first-order conditions form one
// stacked linear system in all feedback gains and feedforwards; its solution
// drives each agent's quadratic value model backward in time.
//
// The entropy-regularized variant keeps the same policy means and adds
// per-stage Gaussian covariances Sigma_i = (beta H_i)^-1, where H_i is agent
// i's own-control curvature R_ii + B_i' Z_i B_i.  Its value constants carry
// two corrections: the expectation of each quadratic over the other agents'
// policy noise (trace terms) and the Gaussian log-partition of the agent's
// own soft minimization, with values defined as -(1/beta) log Z.

#ifndef MMG_SOLVER_LQ_NE_H_
#define MMG_SOLVER_LQ_NE_H_

#include <vector>

#include "mmg/core/lq_approx.h"
#include "mmg/core/policy.h"

namespace mmg {

struct LqNeSolution {
  std::vector<AffineGaussianPolicy> policies;  // per agent
  std::vector<QuadraticValue> values;          // per agent, all T steps
  double beta = 0.0;                           // +infinity when deterministic
  double curvature_reg = 0.0;  // largest shift applied to any H_i
};

// Deterministic feedback Nash equilibrium of the LQ model.
LqNeSolution SolveFeedbackNeLq(const LqApproximation& lq);

// Entropy-regularized feedback Nash equilibrium at rationality beta > 0
// (beta = +infinity reproduces the deterministic solve).  Policy means are
// computed by the identical code path as SolveFeedbackNeLq.
LqNeSolution SolveMaxEntNeLq(const LqApproximation& lq, double beta);

}  // namespace mmg

#endif  // MMG_SOLVER_LQ_NE_H_
