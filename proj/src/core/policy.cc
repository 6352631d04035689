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

#include "mmg/core/policy.h"

#include <cmath>

#include "mmg/core/check.h"

namespace mmg {

VecXd AffineGaussianPolicy::Mean(int t, const VecXd& x) const {
  MMG_CHECK_MSG(t >= 0 && t < NumStages(), "policy stage out of range");
  MMG_CHECK(x.size() == x_nom[t].size());
  return u_nom[t] - K[t] * (x - x_nom[t]) - k[t];
}

double AffineGaussianPolicy::LogDensity(int t, const VecXd& x,
                                        const VecXd& u) const {
  MMG_CHECK_MSG(t >= 0 && t < NumStages(), "policy stage out of range");
  MMG_CHECK_MSG(std::isfinite(beta),
                "deterministic policy has no density");
  return GaussianLogDensity(u, Mean(t, x), Sigma[t]);
}

double QuadraticValue::Value(int t, const VecXd& x) const {
  MMG_CHECK_MSG(t >= 0 && t < NumSteps(), "value step out of range");
  MMG_CHECK(x.size() == x_nom[t].size());
  const VecXd d = x - x_nom[t];
  return c[t] + p[t].dot(d) + 0.5 * d.dot(P[t] * d);
}

}  // namespace mmg
