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
// Belief tracking over which local equilibrium the other agents are playing:
// a value-based prior, Bayesian updates from observed controls (log-domain),
// least-squares control recovery from consecutive states, and a naive
// position-Gaussian baseline filter for comparison.

#ifndef MMG_INFERENCE_INFERENCE_H_
#define MMG_INFERENCE_INFERENCE_H_

#include <functional>
#include <vector>

#include "mmg/core/dynamics.h"
#include "mmg/solver/ilq.h"

namespace mmg {

// Discrete distribution over equilibrium modes.  Entries are nonnegative and
// sum to one within 1e-12 at construction.
class Belief {
 public:
  explicit Belief(VecXd probabilities);

  static Belief Uniform(int num_modes);
  static Belief Degenerate(int num_modes, int mode);
  // Normalizes exp(log_weights) stably; all-(-inf) weights are rejected.
  static Belief FromLogWeights(const VecXd& log_weights);

  int NumModes() const { return static_cast<int>(p_.size()); }
  double operator()(int z) const { return p_(z); }
  const VecXd& Probabilities() const { return p_; }
  // Most likely mode, ties broken toward the lowest index.
  int Argmax() const;

 private:
  VecXd p_;
};

// A set of local equilibria solved from a common state, published as an
// immutable snapshot: planners and filters copy the bank they were handed
// and never observe a partially refreshed one.
struct ModeBank {
  std::vector<LocalNashSolution> modes;
  VecXd x_solve;
  int solve_step = 0;  // sim step at which the bank was solved

  int NumModes() const { return static_cast<int>(modes.size()); }
  int Horizon() const;
  int NumAgents() const;

  // Stage index into stage policies for a query at sim step `step`, clamped
  // to the solved horizon.
  int PolicyStage(int step) const;
  // Stage index into nominal states for a query at sim step `step`.
  int StateStage(int step) const;

  // All modes must share horizon, rationality, and agent structure.
  void CheckConsistent() const;
};

// Per-mode log likelihoods below this floor are clamped so no mode becomes
// an absorbing state of the filter.
inline constexpr double kLogLikelihoodFloor = -50.0;

// Belief over modes from the per-agent value constants at the solve state:
// b0(z) proportional to exp(-beta sum_i V^{i,z}(x0)).  beta = 0 is uniform.
// If every weight underflows, the belief falls back to uniform and
// *underflow (when given) is set.
Belief PriorBelief(const ModeBank& bank, const VecXd& x0, double beta,
                   bool* underflow = nullptr);

struct BeliefUpdateResult {
  Belief belief;
  // False when the observation carried no information (all mode likelihoods
  // equal, e.g. everything clamped at the floor); the prior is returned
  // unchanged in that case.
  bool informative = false;
};

// One Bayes step from an observed joint non-ego control applied at state
// x_t.  The likelihood of mode z is the joint Gaussian of the non-ego block
// of that mode's stage policies, in feedback form at the observed state.
// `stage` is the policy stage of the observed control (callers pass
// step - solve_step; it is clamped internally).  Log-domain throughout.
BeliefUpdateResult BeliefUpdate(const Belief& b, const ModeBank& bank,
                                int ego, const VecXd& x_t,
                                const VecXd& u_nonego, int stage);

// Baseline filter: isotropic Gaussian likelihood of the observed non-ego
// position about each mode's predicted nominal position at `stage`.
// `nonego_position` extracts the compared position block from a joint state.
BeliefUpdateResult NaiveBeliefUpdate(
    const Belief& b, const ModeBank& bank, const VecXd& observed_position,
    double sigma, int stage,
    const std::function<VecXd(const VecXd&)>& nonego_position);

struct ControlEstimate {
  VecXd u;
  double residual = 0.0;
  // Set when the residual stays above threshold (default 1e-2 ||x_next||):
  // the transition is not explained by any control, e.g. heavy noise.
  bool low_confidence = false;
};

// Recovers the joint control from consecutive states by Gauss-Newton on
// ||x_next - f(x_t, u)||^2 from u = 0, at most 20 iterations.
ControlEstimate EstimateControls(const DynamicsModel& dyn, const VecXd& x_t,
                                 const VecXd& x_next, double dt);

}  // namespace mmg

#endif  // MMG_INFERENCE_INFERENCE_H_
