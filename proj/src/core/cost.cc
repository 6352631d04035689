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

#include "mmg/core/cost.h"

#include <utility>

#include "mmg/core/check.h"

namespace mmg {

void StageQuadraticExpansion::SetZero(int state_dim, int control_dim) {
  value = 0.0;
  dx = VecXd::Zero(state_dim);
  dxx = MatXd::Zero(state_dim, state_dim);
  du = VecXd::Zero(control_dim);
  duu = MatXd::Zero(control_dim, control_dim);
}

void TerminalQuadraticExpansion::SetZero(int state_dim) {
  value = 0.0;
  dx = VecXd::Zero(state_dim);
  dxx = MatXd::Zero(state_dim, state_dim);
}

QuadraticObjective::QuadraticObjective(MatXd q, VecXd qx, std::vector<MatXd> r,
                                       std::vector<VecXd> ru, MatXd qf,
                                       VecXd qxf, std::vector<int> control_dims)
    : q_(std::move(q)),
      qx_(std::move(qx)),
      r_(std::move(r)),
      ru_(std::move(ru)),
      qf_(std::move(qf)),
      qxf_(std::move(qxf)),
      control_dims_(std::move(control_dims)) {
  MMG_CHECK(q_.rows() == q_.cols() && q_.rows() == qx_.size());
  MMG_CHECK(qf_.rows() == q_.rows() && qxf_.size() == qx_.size());
  MMG_CHECK(r_.size() == control_dims_.size() && ru_.size() == r_.size());
  control_offsets_.resize(control_dims_.size());
  total_control_dim_ = 0;
  for (size_t j = 0; j < control_dims_.size(); ++j) {
    MMG_CHECK(r_[j].rows() == control_dims_[j] &&
              r_[j].cols() == control_dims_[j]);
    MMG_CHECK(ru_[j].size() == control_dims_[j]);
    control_offsets_[j] = total_control_dim_;
    total_control_dim_ += control_dims_[j];
  }
}

double QuadraticObjective::RunningCost(const VecXd& x, const VecXd& u) const {
  MMG_CHECK(x.size() == q_.rows() && u.size() == total_control_dim_);
  double c = 0.5 * x.dot(q_ * x) + qx_.dot(x);
  for (size_t j = 0; j < control_dims_.size(); ++j) {
    const VecXd uj = u.segment(control_offsets_[j], control_dims_[j]);
    c += 0.5 * uj.dot(r_[j] * uj) + ru_[j].dot(uj);
  }
  return c;
}

double QuadraticObjective::TerminalCost(const VecXd& x) const {
  MMG_CHECK(x.size() == qf_.rows());
  return 0.5 * x.dot(qf_ * x) + qxf_.dot(x);
}

void QuadraticObjective::QuadraticizeRunning(
    const VecXd& x, const VecXd& u, StageQuadraticExpansion* out) const {
  out->SetZero(static_cast<int>(x.size()), total_control_dim_);
  out->value = RunningCost(x, u);
  out->dx = q_ * x + qx_;
  out->dxx = q_;
  for (size_t j = 0; j < control_dims_.size(); ++j) {
    const VecXd uj = u.segment(control_offsets_[j], control_dims_[j]);
    out->du.segment(control_offsets_[j], control_dims_[j]) =
        r_[j] * uj + ru_[j];
    out->duu.block(control_offsets_[j], control_offsets_[j], control_dims_[j],
                   control_dims_[j]) = r_[j];
  }
}

void QuadraticObjective::QuadraticizeTerminal(
    const VecXd& x, TerminalQuadraticExpansion* out) const {
  out->SetZero(static_cast<int>(x.size()));
  out->value = TerminalCost(x);
  out->dx = qf_ * x + qxf_;
  out->dxx = qf_;
}

}  // namespace mmg
