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
// Local solver for nonlinear games: quadraticize about the nominal, solve the
// LQ equilibrium, roll the policy means forward through the true dynamics
// with a backtracking line search, repeat until the controls settle.  Each
// converged solution is one local equilibrium; different seeds reach
// different equilibria.

#ifndef MMG_SOLVER_ILQ_H_
#define MMG_SOLVER_ILQ_H_

#include <limits>
#include <vector>

#include "mmg/core/game.h"
#include "mmg/solver/lq_ne.h"

namespace mmg {

struct IlqOptions {
  // Rationality of the entropy-regularized equilibrium; +infinity solves the
  // deterministic game.
  double beta = std::numeric_limits<double>::infinity();
  int max_iterations = 100;
  // Converged when the max-norm control change between iterates drops below
  // this.
  double control_tolerance = 1e-5;
  // Backtracking halvings of the feedforward step per iteration.
  int max_backtracks = 20;
  // Eigenvalue floor for the state-cost Hessians in each LQ model; -infinity
  // keeps them exact, zero clamps them positive semidefinite Gauss-Newton
  // style.  Gradients stay exact either way, so both settings share the same
  // stationary points; a floor stabilizes the coupled value recursion when
  // interaction costs are strongly concave.
  double state_hessian_floor = -std::numeric_limits<double>::infinity();
};

struct IlqDiagnostics {
  int iterations = 0;
  bool converged = false;
  double final_control_change = std::numeric_limits<double>::infinity();
  double final_step_size = 0.0;
  double final_residual = 0.0;
  double curvature_reg = 0.0;
  // Largest state-curvature damping a backward pass needed; zero when every
  // value recursion succeeded undamped.
  double state_reg = 0.0;
};

// One local equilibrium of the nonlinear game, identified by the seed that
// produced it.
struct LocalNashSolution {
  int mode = 0;
  Trajectory nominal;
  std::vector<AffineGaussianPolicy> policies;
  std::vector<QuadraticValue> values;
  double beta = 0.0;
  IlqDiagnostics diag;
};

// Refines the seed controls to a local equilibrium from initial state x0.
// seed_controls must hold game.Horizon()-1 joint control vectors.  Throws
// NumericalError if the iteration produces non-finite costs.
LocalNashSolution IterativeLqSolve(const DynamicGame& game, const VecXd& x0,
                                   const std::vector<VecXd>& seed_controls,
                                   const IlqOptions& options = {});

}  // namespace mmg

#endif  // MMG_SOLVER_ILQ_H_
