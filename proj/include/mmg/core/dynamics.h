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

#ifndef MMG_CORE_DYNAMICS_H_
#define MMG_CORE_DYNAMICS_H_

#include <memory>
#include <vector>

#include "mmg/support/numerics.h"

namespace mmg {

// Joint dynamics of all agents.  The control vector stacks the per-agent
// controls in agent order; per-agent blocks are addressed through
// ControlOffset/ControlDim.
//
// Subclasses either implement the continuous-time Flow/FlowJacobians (the
// default Step integrates them with one RK4 step under zero-order-hold
// controls, and StepJacobians propagates the analytic Jacobians through the
// same RK4 stages) or override Step/StepJacobians directly for natively
// discrete models.
class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;

  int StateDim() const { return state_dim_; }
  int NumAgents() const { return static_cast<int>(control_dims_.size()); }
  int ControlDim(int agent) const { return control_dims_[agent]; }
  int TotalControlDim() const { return total_control_dim_; }
  int ControlOffset(int agent) const { return control_offsets_[agent]; }

  virtual VecXd Step(const VecXd& x, const VecXd& u, double dt) const;
  virtual void StepJacobians(const VecXd& x, const VecXd& u, double dt,
                             MatXd* a, MatXd* b) const;

  // Continuous-time flow dx/dt = f(x, u) and its Jacobians.  Models that
  // override Step/StepJacobians may leave these unimplemented.
  virtual VecXd Flow(const VecXd& x, const VecXd& u) const;
  virtual void FlowJacobians(const VecXd& x, const VecXd& u, MatXd* fx,
                             MatXd* fu) const;

 protected:
  DynamicsModel(int state_dim, std::vector<int> control_dims);

  void CheckStepArgs(const VecXd& x, const VecXd& u, double dt) const;

 private:
  int state_dim_;
  std::vector<int> control_dims_;
  std::vector<int> control_offsets_;
  int total_control_dim_;
};

// dx/dt = u with one state block per agent.
class SingleIntegratorDynamics : public DynamicsModel {
 public:
  explicit SingleIntegratorDynamics(std::vector<int> agent_dims);

  VecXd Flow(const VecXd& x, const VecXd& u) const override;
  void FlowJacobians(const VecXd& x, const VecXd& u, MatXd* fx,
                     MatXd* fu) const override;
};

// Natively discrete x' = A x + sum_i B_i u_i; exact under quadraticization.
class DiscreteLinearDynamics : public DynamicsModel {
 public:
  DiscreteLinearDynamics(MatXd a, std::vector<MatXd> b_blocks);

  VecXd Step(const VecXd& x, const VecXd& u, double dt) const override;
  void StepJacobians(const VecXd& x, const VecXd& u, double dt, MatXd* a,
                     MatXd* b) const override;

 private:
  MatXd a_;
  MatXd b_;  // horizontally stacked per-agent blocks
};

// Stacks independent per-agent continuous-time models (each with a single
// control block) into one joint model.
class StackedDynamics : public DynamicsModel {
 public:
  explicit StackedDynamics(
      std::vector<std::shared_ptr<const DynamicsModel>> parts);

  VecXd Flow(const VecXd& x, const VecXd& u) const override;
  void FlowJacobians(const VecXd& x, const VecXd& u, MatXd* fx,
                     MatXd* fu) const override;

  const DynamicsModel& Part(int agent) const { return *parts_[agent]; }
  int StateOffset(int agent) const { return state_offsets_[agent]; }

 private:
  std::vector<std::shared_ptr<const DynamicsModel>> parts_;
  std::vector<int> state_offsets_;
};

}  // namespace mmg

#endif  // MMG_CORE_DYNAMICS_H_
