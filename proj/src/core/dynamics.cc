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

#include "mmg/core/dynamics.h"

#include <numeric>
#include <utility>

#include "mmg/core/check.h"

namespace mmg {

DynamicsModel::DynamicsModel(int state_dim, std::vector<int> control_dims)
    : state_dim_(state_dim), control_dims_(std::move(control_dims)) {
  MMG_CHECK(state_dim_ > 0);
  MMG_CHECK(!control_dims_.empty());
  control_offsets_.resize(control_dims_.size());
  int off = 0;
  for (size_t i = 0; i < control_dims_.size(); ++i) {
    MMG_CHECK(control_dims_[i] > 0);
    control_offsets_[i] = off;
    off += control_dims_[i];
  }
  total_control_dim_ = off;
}

void DynamicsModel::CheckStepArgs(const VecXd& x, const VecXd& u,
                                  double dt) const {
  MMG_CHECK_MSG(x.size() == state_dim_, "state dim " << x.size()
                                                     << " != " << state_dim_);
  MMG_CHECK_MSG(u.size() == total_control_dim_,
                "control dim " << u.size() << " != " << total_control_dim_);
  MMG_CHECK_MSG(dt > 0.0, "dt must be positive");
}

VecXd DynamicsModel::Step(const VecXd& x, const VecXd& u, double dt) const {
  CheckStepArgs(x, u, dt);
  const VecXd k1 = Flow(x, u);
  const VecXd k2 = Flow(x + 0.5 * dt * k1, u);
  const VecXd k3 = Flow(x + 0.5 * dt * k2, u);
  const VecXd k4 = Flow(x + dt * k3, u);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void DynamicsModel::StepJacobians(const VecXd& x, const VecXd& u, double dt,
                                  MatXd* a, MatXd* b) const {
  CheckStepArgs(x, u, dt);
  const int n = StateDim();
  const int m = TotalControlDim();

  // RK4 stage values and the chain rule through each stage point.
  MatXd fx(n, n), fu(n, m);
  const VecXd k1 = Flow(x, u);
  FlowJacobians(x, u, &fx, &fu);
  MatXd dk1_dx = fx, dk1_du = fu;

  const VecXd x2 = x + 0.5 * dt * k1;
  const VecXd k2 = Flow(x2, u);
  FlowJacobians(x2, u, &fx, &fu);
  MatXd dk2_dx = fx * (MatXd::Identity(n, n) + 0.5 * dt * dk1_dx);
  MatXd dk2_du = fx * (0.5 * dt * dk1_du) + fu;

  const VecXd x3 = x + 0.5 * dt * k2;
  const VecXd k3 = Flow(x3, u);
  FlowJacobians(x3, u, &fx, &fu);
  MatXd dk3_dx = fx * (MatXd::Identity(n, n) + 0.5 * dt * dk2_dx);
  MatXd dk3_du = fx * (0.5 * dt * dk2_du) + fu;

  const VecXd x4 = x + dt * k3;
  FlowJacobians(x4, u, &fx, &fu);
  MatXd dk4_dx = fx * (MatXd::Identity(n, n) + dt * dk3_dx);
  MatXd dk4_du = fx * (dt * dk3_du) + fu;

  *a = MatXd::Identity(n, n) +
       (dt / 6.0) * (dk1_dx + 2.0 * dk2_dx + 2.0 * dk3_dx + dk4_dx);
  *b = (dt / 6.0) * (dk1_du + 2.0 * dk2_du + 2.0 * dk3_du + dk4_du);
}

VecXd DynamicsModel::Flow(const VecXd&, const VecXd&) const {
  throw ContractViolation("continuous-time flow not implemented");
}

void DynamicsModel::FlowJacobians(const VecXd&, const VecXd&, MatXd*,
                                  MatXd*) const {
  throw ContractViolation("continuous-time flow Jacobians not implemented");
}

namespace {

int SumDims(const std::vector<int>& dims) {
  return std::accumulate(dims.begin(), dims.end(), 0);
}

}  // namespace

SingleIntegratorDynamics::SingleIntegratorDynamics(std::vector<int> agent_dims)
    : DynamicsModel(SumDims(agent_dims), agent_dims) {}

VecXd SingleIntegratorDynamics::Flow(const VecXd& x, const VecXd& u) const {
  MMG_CHECK(x.size() == u.size());
  return u;
}

void SingleIntegratorDynamics::FlowJacobians(const VecXd& x, const VecXd&,
                                             MatXd* fx, MatXd* fu) const {
  const int n = StateDim();
  *fx = MatXd::Zero(n, n);
  *fu = MatXd::Identity(n, n);
  (void)x;
}

namespace {

std::vector<int> BlockColumns(const std::vector<MatXd>& blocks) {
  std::vector<int> dims;
  dims.reserve(blocks.size());
  for (const MatXd& b : blocks) dims.push_back(static_cast<int>(b.cols()));
  return dims;
}

}  // namespace

DiscreteLinearDynamics::DiscreteLinearDynamics(MatXd a,
                                               std::vector<MatXd> b_blocks)
    : DynamicsModel(static_cast<int>(a.rows()), BlockColumns(b_blocks)),
      a_(std::move(a)) {
  MMG_CHECK(a_.rows() == a_.cols());
  b_.resize(StateDim(), TotalControlDim());
  int col = 0;
  for (const MatXd& blk : b_blocks) {
    MMG_CHECK(blk.rows() == StateDim());
    b_.middleCols(col, blk.cols()) = blk;
    col += static_cast<int>(blk.cols());
  }
}

VecXd DiscreteLinearDynamics::Step(const VecXd& x, const VecXd& u,
                                   double dt) const {
  CheckStepArgs(x, u, dt);
  return a_ * x + b_ * u;
}

void DiscreteLinearDynamics::StepJacobians(const VecXd& x, const VecXd& u,
                                           double dt, MatXd* a,
                                           MatXd* b) const {
  CheckStepArgs(x, u, dt);
  *a = a_;
  *b = b_;
}

namespace {

std::vector<int> PartControlDims(
    const std::vector<std::shared_ptr<const DynamicsModel>>& parts) {
  std::vector<int> dims;
  for (const auto& p : parts) {
    MMG_CHECK_MSG(p->NumAgents() == 1,
                  "stacked parts must be single-agent models");
    dims.push_back(p->TotalControlDim());
  }
  return dims;
}

int PartStateSum(
    const std::vector<std::shared_ptr<const DynamicsModel>>& parts) {
  int n = 0;
  for (const auto& p : parts) n += p->StateDim();
  return n;
}

}  // namespace

StackedDynamics::StackedDynamics(
    std::vector<std::shared_ptr<const DynamicsModel>> parts)
    : DynamicsModel(PartStateSum(parts), PartControlDims(parts)),
      parts_(std::move(parts)) {
  state_offsets_.resize(parts_.size());
  int off = 0;
  for (size_t i = 0; i < parts_.size(); ++i) {
    state_offsets_[i] = off;
    off += parts_[i]->StateDim();
  }
}

VecXd StackedDynamics::Flow(const VecXd& x, const VecXd& u) const {
  VecXd out(StateDim());
  for (size_t i = 0; i < parts_.size(); ++i) {
    const auto& p = *parts_[i];
    out.segment(state_offsets_[i], p.StateDim()) =
        p.Flow(x.segment(state_offsets_[i], p.StateDim()),
               u.segment(ControlOffset(static_cast<int>(i)),
                         p.TotalControlDim()));
  }
  return out;
}

void StackedDynamics::FlowJacobians(const VecXd& x, const VecXd& u, MatXd* fx,
                                    MatXd* fu) const {
  *fx = MatXd::Zero(StateDim(), StateDim());
  *fu = MatXd::Zero(StateDim(), TotalControlDim());
  for (size_t i = 0; i < parts_.size(); ++i) {
    const auto& p = *parts_[i];
    const int ns = p.StateDim();
    const int ms = p.TotalControlDim();
    MatXd sub_fx(ns, ns), sub_fu(ns, ms);
    p.FlowJacobians(x.segment(state_offsets_[i], ns),
                    u.segment(ControlOffset(static_cast<int>(i)), ms), &sub_fx,
                    &sub_fu);
    fx->block(state_offsets_[i], state_offsets_[i], ns, ns) = sub_fx;
    fu->block(state_offsets_[i], ControlOffset(static_cast<int>(i)), ns, ms) =
        sub_fu;
  }
}

}  // namespace mmg
