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
// One-step scalar two-agent game with an analytically tractable bimodal
// structure, plus quadrature oracles that pin the library's solvers:
//   agent 0:  J0 = 0.5 u0^2 + 1.5 (x0 - x1)^2
//   agent 1:  J1 = 0.5 u1^2 + softmin(1.5 (x1-1)^2, 1.5 (x1+1)^2 + eps)
// from x = (0, 0) with x_i' = x_i + u_i.  The softmin makes agent 1's
// objective bimodal: two local equilibria near u1 = +/-0.73, the positive one
// globally preferred by eps.

#ifndef MMG_TOY_TOY_H_
#define MMG_TOY_TOY_H_

#include <functional>

#include "mmg/core/game.h"

namespace mmg::toy {

// softmin(a, b) = -log(exp(-a) + exp(-b)), overflow-safe.
double SoftMin(double a, double b);

// Agent 1's terminal cost and its first two derivatives in x1.
double BimodalTerm(double x1, double eps);
double BimodalTermD1(double x1, double eps);
double BimodalTermD2(double x1, double eps);

// The game above as a DynamicGame (horizon 2, dt 1, joint state (x0, x1)).
DynamicGame BuildToyGame(double eps);

// Constant-control seeds that land in the two equilibrium basins:
// mode 0 pushes agent 1 toward +1, mode 1 toward -1.
std::vector<VecXd> ToySeed(int mode);

struct ToyEquilibrium {
  double u0 = 0.0;
  double u1 = 0.0;
  double cost0 = 0.0;
  double cost1 = 0.0;
};

// Pure local Nash equilibria by Newton iteration on agent 1's stationarity,
// with agent 0's exact best response u0 = 0.75 u1.  Mode 0 is the positive
// branch; mode 1 the negative one.
ToyEquilibrium ExactNeBranch(double eps, int mode);

// The globally preferred pure equilibrium (lower cost1 of the two branches).
ToyEquilibrium ExactNe(double eps);

struct QuadratureOptions {
  double lo = -6.0;
  double hi = 6.0;
  int min_points = 4001;          // refinement doubles intervals from here
  int max_points = (1 << 21) + 1;
  double drift_tolerance = 1e-8;  // converged when mass drift is below this
};

struct ToyMaxEnt {
  std::vector<double> grid;
  std::vector<double> pi0;  // agent 0 Boltzmann density over u0
  std::vector<double> pi1;  // agent 1 Boltzmann density over u1
  double mean0 = 0.0, var0 = 0.0;
  double mean1 = 0.0, var1 = 0.0;
  double value0 = 0.0;  // -(1/beta) log Z with the full Gaussian expectation
  double value1 = 0.0;
  double mass0 = 0.0;   // normalization of the returned densities
  double mass1 = 0.0;
};

// Exact entropy-regularized equilibrium of the game by adaptive trapezoid
// quadrature.  Agent 1's density is the Boltzmann distribution of its own
// cost; agent 0 responds to the exact expectation over agent 1's density.
// Throws PrecisionError if refinement exhausts max_points.
ToyMaxEnt ExactMaxEntNe(double eps, double beta,
                        const QuadratureOptions& options = {});

// -(1/beta) log integral exp(-beta f(u)) du over [options.lo, options.hi],
// refined like ExactMaxEntNe.  Oracle for value-constant conventions.
double OneStepMaxEntValue(const std::function<double(double)>& f, double beta,
                          const QuadratureOptions& options = {});

struct GaussianFit {
  double mean = 0.0;
  double variance = 0.0;
};

// Gaussian fitted at the conditional peak of agent 1's Boltzmann density
// restricted to one sign of u1 (curvature fit at the restricted maximum).
GaussianFit FitLobeGaussian(double eps, double beta, bool positive_lobe);

}  // namespace mmg::toy

#endif  // MMG_TOY_TOY_H_
