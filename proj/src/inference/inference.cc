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

#include "mmg/inference/inference.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmg/core/check.h"
#include "mmg/support/numerics.h"

namespace mmg {
namespace {

constexpr double kSimplexTol = 1e-12;

// Posterior from prior and clamped per-mode log likelihoods; returns the
// prior unchanged when the likelihoods are indistinguishable.
BeliefUpdateResult PosteriorFromLogLikelihoods(const Belief& b,
                                               VecXd log_lik) {
  for (int z = 0; z < log_lik.size(); ++z)
    log_lik(z) = std::max(log_lik(z), kLogLikelihoodFloor);
  const double spread = log_lik.maxCoeff() - log_lik.minCoeff();
  if (!(spread > 0.0)) return {b, false};

  VecXd log_post(b.NumModes());
  for (int z = 0; z < b.NumModes(); ++z) {
    const double lp = b(z) > 0.0 ? std::log(b(z))
                                 : -std::numeric_limits<double>::infinity();
    log_post(z) = lp + log_lik(z);
  }
  return {Belief::FromLogWeights(log_post), true};
}

}  // namespace

Belief::Belief(VecXd probabilities) : p_(std::move(probabilities)) {
  MMG_CHECK_MSG(p_.size() >= 1, "belief needs at least one mode");
  MMG_CHECK_MSG(p_.minCoeff() >= 0.0, "belief entries must be nonnegative");
  MMG_CHECK_MSG(std::abs(p_.sum() - 1.0) <= kSimplexTol,
                "belief must sum to one, got " << p_.sum());
}

Belief Belief::Uniform(int num_modes) {
  MMG_CHECK(num_modes >= 1);
  return Belief(VecXd::Constant(num_modes, 1.0 / num_modes));
}

Belief Belief::Degenerate(int num_modes, int mode) {
  MMG_CHECK(mode >= 0 && mode < num_modes);
  VecXd p = VecXd::Zero(num_modes);
  p(mode) = 1.0;
  return Belief(std::move(p));
}

Belief Belief::FromLogWeights(const VecXd& log_weights) {
  MMG_CHECK(log_weights.size() >= 1);
  std::vector<double> lw(log_weights.data(),
                         log_weights.data() + log_weights.size());
  const double log_z = LogSumExp(lw);
  MMG_CHECK_MSG(std::isfinite(log_z), "belief log weights all degenerate");
  VecXd p(log_weights.size());
  for (int z = 0; z < log_weights.size(); ++z)
    p(z) = std::exp(log_weights(z) - log_z);
  p /= p.sum();  // clean residual rounding so the simplex invariant is exact
  return Belief(std::move(p));
}

int Belief::Argmax() const {
  int best = 0;
  for (int z = 1; z < NumModes(); ++z)
    if (p_(z) > p_(best)) best = z;
  return best;
}

int ModeBank::Horizon() const {
  MMG_CHECK(!modes.empty());
  return modes.front().nominal.Horizon();
}

int ModeBank::NumAgents() const {
  MMG_CHECK(!modes.empty());
  return static_cast<int>(modes.front().policies.size());
}

int ModeBank::PolicyStage(int step) const {
  const int last_stage = Horizon() - 2;
  return std::clamp(step - solve_step, 0, last_stage);
}

int ModeBank::StateStage(int step) const {
  return std::clamp(step - solve_step, 0, Horizon() - 1);
}

void ModeBank::CheckConsistent() const {
  MMG_CHECK_MSG(!modes.empty(), "mode bank is empty");
  const int horizon = modes.front().nominal.Horizon();
  const size_t agents = modes.front().policies.size();
  const double beta = modes.front().beta;
  for (const LocalNashSolution& m : modes) {
    MMG_CHECK_MSG(m.nominal.Horizon() == horizon,
                  "modes disagree on horizon");
    MMG_CHECK_MSG(m.policies.size() == agents,
                  "modes disagree on agent count");
    MMG_CHECK_MSG(m.beta == beta, "modes disagree on rationality");
  }
}

Belief PriorBelief(const ModeBank& bank, const VecXd& x0, double beta,
                   bool* underflow) {
  bank.CheckConsistent();
  MMG_CHECK_MSG(beta >= 0.0, "rationality must be nonnegative");
  if (underflow) *underflow = false;

  VecXd log_w(bank.NumModes());
  for (int z = 0; z < bank.NumModes(); ++z) {
    double total = 0.0;
    for (const QuadraticValue& v : bank.modes[z].values)
      total += v.Value(0, x0);
    log_w(z) = -beta * total;
  }
  if (!log_w.allFinite()) {
    if (underflow) *underflow = true;
    return Belief::Uniform(bank.NumModes());
  }
  return Belief::FromLogWeights(log_w);
}

BeliefUpdateResult BeliefUpdate(const Belief& b, const ModeBank& bank,
                                int ego, const VecXd& x_t,
                                const VecXd& u_nonego, int stage) {
  bank.CheckConsistent();
  const int num_agents = bank.NumAgents();
  MMG_CHECK(ego >= 0 && ego < num_agents);
  MMG_CHECK(b.NumModes() == bank.NumModes());
  const int t = std::clamp(stage, 0, bank.Horizon() - 2);

  VecXd log_lik(bank.NumModes());
  for (int z = 0; z < bank.NumModes(); ++z) {
    double ll = 0.0;
    int offset = 0;
    for (int i = 0; i < num_agents; ++i) {
      const AffineGaussianPolicy& pi = bank.modes[z].policies[i];
      const int dim = static_cast<int>(pi.u_nom[t].size());
      if (i == ego) continue;
      MMG_CHECK_MSG(offset + dim <= u_nonego.size(),
                    "observed control has wrong non-ego dimension");
      ll += pi.LogDensity(t, x_t, u_nonego.segment(offset, dim));
      offset += dim;
    }
    MMG_CHECK_MSG(offset == u_nonego.size(),
                  "observed control has wrong non-ego dimension");
    log_lik(z) = ll;
  }
  return PosteriorFromLogLikelihoods(b, std::move(log_lik));
}

BeliefUpdateResult NaiveBeliefUpdate(
    const Belief& b, const ModeBank& bank, const VecXd& observed_position,
    double sigma, int stage,
    const std::function<VecXd(const VecXd&)>& nonego_position) {
  bank.CheckConsistent();
  MMG_CHECK_MSG(sigma > 0.0, "measurement std must be positive");
  MMG_CHECK(b.NumModes() == bank.NumModes());
  MMG_CHECK_MSG(nonego_position != nullptr, "position extractor required");
  const int t = std::clamp(stage, 0, bank.Horizon() - 1);

  VecXd log_lik(bank.NumModes());
  for (int z = 0; z < bank.NumModes(); ++z) {
    const VecXd predicted = nonego_position(bank.modes[z].nominal.states[t]);
    MMG_CHECK_MSG(predicted.size() == observed_position.size(),
                  "observed position has wrong dimension");
    const int dim = static_cast<int>(predicted.size());
    const double sq = (observed_position - predicted).squaredNorm();
    log_lik(z) = -0.5 * sq / (sigma * sigma) -
                 0.5 * dim * std::log(2.0 * M_PI * sigma * sigma);
  }
  return PosteriorFromLogLikelihoods(b, std::move(log_lik));
}

ControlEstimate EstimateControls(const DynamicsModel& dyn, const VecXd& x_t,
                                 const VecXd& x_next, double dt) {
  MMG_CHECK(x_t.size() == dyn.StateDim());
  MMG_CHECK(x_next.size() == dyn.StateDim());

  constexpr int kMaxIterations = 20;
  constexpr double kStepTol = 1e-12;

  VecXd u = VecXd::Zero(dyn.TotalControlDim());
  VecXd residual = dyn.Step(x_t, u, dt) - x_next;
  for (int it = 0; it < kMaxIterations; ++it) {
    MatXd fx, fu;
    dyn.StepJacobians(x_t, u, dt, &fx, &fu);
    // Normal equations with a tiny ridge in case fu loses column rank.
    MatXd gram = fu.transpose() * fu;
    gram.diagonal().array() += 1e-12;
    const VecXd delta = gram.llt().solve(fu.transpose() * residual);
    u -= delta;
    residual = dyn.Step(x_t, u, dt) - x_next;
    if (delta.cwiseAbs().maxCoeff() < kStepTol) break;
  }

  ControlEstimate out;
  out.u = std::move(u);
  out.residual = residual.norm();
  out.low_confidence = out.residual > 1e-2 * x_next.norm();
  return out;
}

}  // namespace mmg
