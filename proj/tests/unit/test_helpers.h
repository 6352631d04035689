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

#ifndef MMG_TESTS_UNIT_TEST_HELPERS_H_
#define MMG_TESTS_UNIT_TEST_HELPERS_H_

#include <random>

#include "mmg/core/cost.h"
#include "mmg/core/dynamics.h"
#include "mmg/inference/inference.h"

namespace mmg::testing {

inline constexpr double kFdStep = 1e-5;

// Central finite differences of the discrete step map.
inline MatXd FdStepJacobianX(const DynamicsModel& dyn, const VecXd& x,
                             const VecXd& u, double dt) {
  const int n = dyn.StateDim();
  MatXd j(n, n);
  for (int c = 0; c < n; ++c) {
    VecXd xp = x, xm = x;
    xp(c) += kFdStep;
    xm(c) -= kFdStep;
    j.col(c) = (dyn.Step(xp, u, dt) - dyn.Step(xm, u, dt)) / (2.0 * kFdStep);
  }
  return j;
}

inline MatXd FdStepJacobianU(const DynamicsModel& dyn, const VecXd& x,
                             const VecXd& u, double dt) {
  const int n = dyn.StateDim();
  const int m = dyn.TotalControlDim();
  MatXd j(n, m);
  for (int c = 0; c < m; ++c) {
    VecXd up = u, um = u;
    up(c) += kFdStep;
    um(c) -= kFdStep;
    j.col(c) = (dyn.Step(x, up, dt) - dyn.Step(x, um, dt)) / (2.0 * kFdStep);
  }
  return j;
}

// Central finite differences of a stage cost in x and u.
inline VecXd FdRunningGradX(const AgentObjective& obj, const VecXd& x,
                            const VecXd& u) {
  VecXd g(x.size());
  for (int c = 0; c < x.size(); ++c) {
    VecXd xp = x, xm = x;
    xp(c) += kFdStep;
    xm(c) -= kFdStep;
    g(c) = (obj.RunningCost(xp, u) - obj.RunningCost(xm, u)) / (2.0 * kFdStep);
  }
  return g;
}

inline VecXd FdRunningGradU(const AgentObjective& obj, const VecXd& x,
                            const VecXd& u) {
  VecXd g(u.size());
  for (int c = 0; c < u.size(); ++c) {
    VecXd up = u, um = u;
    up(c) += kFdStep;
    um(c) -= kFdStep;
    g(c) = (obj.RunningCost(x, up) - obj.RunningCost(x, um)) / (2.0 * kFdStep);
  }
  return g;
}

inline MatXd FdRunningHessX(const AgentObjective& obj, const VecXd& x,
                            const VecXd& u) {
  MatXd h(x.size(), x.size());
  for (int c = 0; c < x.size(); ++c) {
    VecXd xp = x, xm = x;
    xp(c) += kFdStep;
    xm(c) -= kFdStep;
    h.col(c) = (FdRunningGradX(obj, xp, u) - FdRunningGradX(obj, xm, u)) /
               (2.0 * kFdStep);
  }
  return h;
}

inline MatXd FdRunningHessU(const AgentObjective& obj, const VecXd& x,
                            const VecXd& u) {
  MatXd h(u.size(), u.size());
  for (int c = 0; c < u.size(); ++c) {
    VecXd up = u, um = u;
    up(c) += kFdStep;
    um(c) -= kFdStep;
    h.col(c) = (FdRunningGradU(obj, x, up) - FdRunningGradU(obj, x, um)) /
               (2.0 * kFdStep);
  }
  return h;
}

inline VecXd FdTerminalGrad(const AgentObjective& obj, const VecXd& x) {
  VecXd g(x.size());
  for (int c = 0; c < x.size(); ++c) {
    VecXd xp = x, xm = x;
    xp(c) += kFdStep;
    xm(c) -= kFdStep;
    g(c) = (obj.TerminalCost(xp) - obj.TerminalCost(xm)) / (2.0 * kFdStep);
  }
  return g;
}

inline MatXd FdTerminalHess(const AgentObjective& obj, const VecXd& x) {
  MatXd h(x.size(), x.size());
  for (int c = 0; c < x.size(); ++c) {
    VecXd xp = x, xm = x;
    xp(c) += kFdStep;
    xm(c) -= kFdStep;
    h.col(c) =
        (FdTerminalGrad(obj, xp) - FdTerminalGrad(obj, xm)) / (2.0 * kFdStep);
  }
  return h;
}

inline double RelError(const MatXd& analytic, const MatXd& fd) {
  const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
  return (analytic - fd).cwiseAbs().maxCoeff() / scale;
}

inline double RelError(const VecXd& analytic, const VecXd& fd) {
  const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
  return (analytic - fd).cwiseAbs().maxCoeff() / scale;
}

inline VecXd RandomVec(std::mt19937_64* rng, int n, double scale) {
  std::normal_distribution<double> dist(0.0, scale);
  VecXd v(n);
  for (int k = 0; k < n; ++k) v(k) = dist(*rng);
  return v;
}

// Hand-built single-stage equilibrium for filter tests: scalar state at 0,
// two agents with constant scalar policies N(mean_i, sigma_i^2) and value
// constants value_i.
inline LocalNashSolution SyntheticMode(const std::vector<double>& means,
                                       const std::vector<double>& sigmas,
                                       const std::vector<double>& values,
                                       double beta) {
  const int num_agents = static_cast<int>(means.size());
  LocalNashSolution mode;
  mode.beta = beta;
  mode.nominal.states = {VecXd::Zero(1), VecXd::Zero(1)};
  VecXd joint(num_agents);
  for (int i = 0; i < num_agents; ++i) joint(i) = means[i];
  mode.nominal.controls = {joint};
  for (int i = 0; i < num_agents; ++i) {
    AffineGaussianPolicy pi;
    pi.K = {MatXd::Zero(1, 1)};
    pi.k = {VecXd::Zero(1)};
    pi.u_nom = {VecXd::Constant(1, means[i])};
    pi.x_nom = {VecXd::Zero(1)};
    pi.Sigma = {MatXd::Constant(1, 1, sigmas[i] * sigmas[i])};
    pi.H = {MatXd::Constant(1, 1, 1.0 / (beta * sigmas[i] * sigmas[i]))};
    pi.beta = beta;
    mode.policies.push_back(std::move(pi));

    QuadraticValue v;
    v.P = {MatXd::Zero(1, 1), MatXd::Zero(1, 1)};
    v.p = {VecXd::Zero(1), VecXd::Zero(1)};
    v.c = {values[i], values[i]};
    v.x_nom = {VecXd::Zero(1), VecXd::Zero(1)};
    mode.values.push_back(std::move(v));
  }
  return mode;
}

inline ModeBank SyntheticBank(std::vector<LocalNashSolution> modes) {
  ModeBank bank;
  for (size_t z = 0; z < modes.size(); ++z) modes[z].mode = static_cast<int>(z);
  bank.modes = std::move(modes);
  bank.x_solve = VecXd::Zero(1);
  bank.solve_step = 0;
  return bank;
}

}  // namespace mmg::testing

#endif  // MMG_TESTS_UNIT_TEST_HELPERS_H_
