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

#ifndef MMG_CORE_COST_H_
#define MMG_CORE_COST_H_

#include <vector>

#include "mmg/support/numerics.h"

namespace mmg {

// Second-order expansion of a stage cost at a nominal (x, u).  Derivatives
// are taken in the absolute variables; the solver re-centers them on the
// deviation variables itself.  du/duu cover the joint control vector and must
// be block-diagonal across agents (no cross-agent control coupling).
struct StageQuadraticExpansion {
  double value = 0.0;
  VecXd dx;
  MatXd dxx;
  VecXd du;
  MatXd duu;

  void SetZero(int state_dim, int control_dim);
};

struct TerminalQuadraticExpansion {
  double value = 0.0;
  VecXd dx;
  MatXd dxx;

  void SetZero(int state_dim);
};

// One agent's cost in the game: sum over stages of RunningCost plus
// TerminalCost at the final state.  Derivatives are analytic; tests
// cross-check every implementation against central finite differences.
class AgentObjective {
 public:
  virtual ~AgentObjective() = default;

  virtual double RunningCost(const VecXd& x, const VecXd& u) const = 0;
  virtual double TerminalCost(const VecXd& x) const = 0;

  virtual void QuadraticizeRunning(const VecXd& x, const VecXd& u,
                                   StageQuadraticExpansion* out) const = 0;
  virtual void QuadraticizeTerminal(const VecXd& x,
                                    TerminalQuadraticExpansion* out) const = 0;
};

// Pure quadratic objective
//   running(x, u)  = 0.5 x'Q x + qx'x + sum_j [0.5 u_j'R_j u_j + r_j'u_j]
//   terminal(x)    = 0.5 x'Qf x + qf'x
// with R_j indexed by agent control block.  Exact under quadraticization.
class QuadraticObjective : public AgentObjective {
 public:
  QuadraticObjective(MatXd q, VecXd qx, std::vector<MatXd> r,
                     std::vector<VecXd> ru, MatXd qf, VecXd qxf,
                     std::vector<int> control_dims);

  double RunningCost(const VecXd& x, const VecXd& u) const override;
  double TerminalCost(const VecXd& x) const override;
  void QuadraticizeRunning(const VecXd& x, const VecXd& u,
                           StageQuadraticExpansion* out) const override;
  void QuadraticizeTerminal(const VecXd& x,
                            TerminalQuadraticExpansion* out) const override;

 private:
  MatXd q_;
  VecXd qx_;
  std::vector<MatXd> r_;
  std::vector<VecXd> ru_;
  MatXd qf_;
  VecXd qxf_;
  std::vector<int> control_dims_;
  std::vector<int> control_offsets_;
  int total_control_dim_;
};

}  // namespace mmg

#endif  // MMG_CORE_COST_H_
