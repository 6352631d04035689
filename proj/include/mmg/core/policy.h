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

#ifndef MMG_CORE_POLICY_H_
#define MMG_CORE_POLICY_H_

#include <vector>

#include "mmg/support/numerics.h"

namespace mmg {

// Time-indexed Gaussian feedback policy for one agent:
//   u_t(x) ~ N(u_nom[t] - K[t](x - x_nom[t]) - k[t],  Sigma[t]).
// H[t] is the own-control curvature of the agent's stage value model; for an
// entropy-regularized solve Sigma[t] = (beta H[t])^-1, and a deterministic
// solve stores Sigma = 0 with beta = +infinity.
struct AffineGaussianPolicy {
  std::vector<MatXd> K;
  std::vector<VecXd> k;
  std::vector<VecXd> u_nom;
  std::vector<VecXd> x_nom;
  std::vector<MatXd> H;
  std::vector<MatXd> Sigma;
  double beta = 0.0;

  int NumStages() const { return static_cast<int>(K.size()); }

  // Policy mean at stage t for state x.
  VecXd Mean(int t, const VecXd& x) const;

  // Log density of control u under the stage-t Gaussian at state x.
  // Requires a stochastic policy (finite beta).
  double LogDensity(int t, const VecXd& x, const VecXd& u) const;
};

// Quadratic value model for one agent along a nominal trajectory:
//   V_t(x) = c[t] + p[t]'(x - x_nom[t]) + 0.5 (x - x_nom[t])'P[t](x - x_nom[t])
// defined for every t in [0, T-1]; at the final time it equals the terminal
// cost model, so c[T-1] is the terminal cost at the nominal state.
struct QuadraticValue {
  std::vector<MatXd> P;
  std::vector<VecXd> p;
  std::vector<double> c;
  std::vector<VecXd> x_nom;

  int NumSteps() const { return static_cast<int>(c.size()); }

  double Value(int t, const VecXd& x) const;
};

}  // namespace mmg

#endif  // MMG_CORE_POLICY_H_
