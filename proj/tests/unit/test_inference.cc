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

#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "mmg/core/check.h"
#include "mmg/inference/inference.h"
#include "mmg/solver/ilq.h"
#include "mmg/toy/toy.h"
#include "test_helpers.h"

namespace mmg {
namespace {

ModeBank ToyBank(double eps, double beta) {
  const DynamicGame game = toy::BuildToyGame(eps);
  IlqOptions opts;
  opts.beta = beta;
  ModeBank bank;
  for (int mode = 0; mode < 2; ++mode) {
    LocalNashSolution sol =
        IterativeLqSolve(game, VecXd::Zero(2), toy::ToySeed(mode), opts);
    sol.mode = mode;
    bank.modes.push_back(std::move(sol));
  }
  bank.x_solve = VecXd::Zero(2);
  bank.solve_step = 0;
  return bank;
}

TEST_SUITE("inference") {

TEST_CASE("belief construction enforces the simplex") {
  VecXd good(2);
  good << 0.3, 0.7;
  CHECK(Belief(good).NumModes() == 2);

  VecXd negative(2);
  negative << -0.1, 1.1;
  CHECK_THROWS_AS(Belief{negative}, ContractViolation);

  VecXd off(2);
  off << 0.3, 0.8;
  CHECK_THROWS_AS(Belief{off}, ContractViolation);

  CHECK(Belief::Uniform(4)(2) == 0.25);
  CHECK(Belief::Degenerate(3, 1)(1) == 1.0);
  CHECK(Belief::Degenerate(3, 1)(0) == 0.0);
}

TEST_CASE("log-weight normalization is shift invariant and tie-breaks low") {
  VecXd lw(3);
  lw << -1000.0, -1000.5, -1001.0;
  const Belief a = Belief::FromLogWeights(lw);
  const Belief b = Belief::FromLogWeights(VecXd(lw.array() + 5000.0));
  for (int z = 0; z < 3; ++z)
    CHECK(a(z) == doctest::Approx(b(z)).epsilon(1e-14));
  CHECK(a.Argmax() == 0);

  VecXd tied(3);
  tied << 0.4, 0.4, 0.2;
  CHECK(Belief(tied).Argmax() == 0);
}

TEST_CASE("identical modes yield a uniform prior") {
  const LocalNashSolution m =
      testing::SyntheticMode({0.3, -0.2}, {0.5, 0.6}, {1.0, 2.0}, 2.0);
  const ModeBank bank = testing::SyntheticBank({m, m, m});
  const Belief prior = PriorBelief(bank, VecXd::Zero(1), 2.0);
  for (int z = 0; z < 3; ++z) CHECK(prior(z) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("zero rationality gives a uniform prior regardless of values") {
  const ModeBank bank = testing::SyntheticBank(
      {testing::SyntheticMode({0.0, 0.0}, {1.0, 1.0}, {-100.0, -3.0}, 1.0),
       testing::SyntheticMode({0.0, 0.0}, {1.0, 1.0}, {55.0, 7.0}, 1.0)});
  const Belief prior = PriorBelief(bank, VecXd::Zero(1), 0.0);
  CHECK(prior(0) == 0.5);
  CHECK(prior(1) == 0.5);
}

TEST_CASE("toy prior prefers the cheaper mode by the frozen margin") {
  const ModeBank bank = ToyBank(0.1, 0.5);
  const Belief b0 = PriorBelief(bank, VecXd::Zero(2), 0.5);
  CHECK(b0(0) == doctest::Approx(0.51138179).epsilon(1e-6));
  CHECK(b0(1) == doctest::Approx(0.48861821).epsilon(1e-6));
}

TEST_CASE("uninformative observations leave the belief untouched") {
  const LocalNashSolution m =
      testing::SyntheticMode({0.1, 0.4}, {0.7, 0.7}, {0.0, 0.0}, 1.0);
  const ModeBank bank = testing::SyntheticBank({m, m});
  VecXd p(2);
  p << 0.37, 0.63;
  const Belief b(p);
  VecXd u(1);
  u << 0.9;
  const BeliefUpdateResult r =
      BeliefUpdate(b, bank, /*ego=*/0, VecXd::Zero(1), u, 0);
  CHECK_FALSE(r.informative);
  CHECK(r.belief(0) == b(0));
  CHECK(r.belief(1) == b(1));
}

TEST_CASE("a 2:1 likelihood ratio maps a flat belief to [2/3, 1/3]") {
  // Same unit variance in both modes; observing u = 0 makes the ratio
  // exp(d^2 / 2) = 2 when the second mode's mean is sqrt(2 ln 2) away.
  const double d = std::sqrt(2.0 * std::log(2.0));
  const ModeBank bank = testing::SyntheticBank(
      {testing::SyntheticMode({0.0, 0.0}, {1.0, 1.0}, {0.0, 0.0}, 1.0),
       testing::SyntheticMode({0.0, d}, {1.0, 1.0}, {0.0, 0.0}, 1.0)});
  const BeliefUpdateResult r = BeliefUpdate(
      Belief::Uniform(2), bank, /*ego=*/0, VecXd::Zero(1), VecXd::Zero(1), 0);
  CHECK(r.informative);
  CHECK(r.belief(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.belief(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("extreme likelihood ratios stay finite through the floor") {
  const ModeBank bank = testing::SyntheticBank(
      {testing::SyntheticMode({0.0, 0.0}, {0.1, 0.1}, {0.0, 0.0}, 1.0),
       testing::SyntheticMode({0.0, 30.0}, {0.1, 0.1}, {0.0, 0.0}, 1.0)});
  // Observation sits on mode 1's mean; mode 2's log likelihood would be
  // about -45000 and is clamped at the floor.
  BeliefUpdateResult r = BeliefUpdate(Belief::Uniform(2), bank, 0,
                                      VecXd::Zero(1), VecXd::Zero(1), 0);
  CHECK(r.belief.Probabilities().allFinite());
  CHECK(r.belief(0) > 1.0 - 1e-12);
  CHECK(r.belief(1) > 0.0);  // floored, not absorbed to exactly zero

  // Far from both modes, everything floors: no information.
  VecXd far = VecXd::Constant(1, 1000.0);
  r = BeliefUpdate(Belief::Uniform(2), bank, 0, VecXd::Zero(1), far, 0);
  CHECK_FALSE(r.informative);
  CHECK(r.belief(0) == 0.5);
}

TEST_CASE("two equal updates match one update at half the variance") {
  const double s = 0.8, s_half = s / std::sqrt(2.0);
  const auto bank_with = [&](double sigma) {
    return testing::SyntheticBank(
        {testing::SyntheticMode({0.0, 0.2}, {1.0, sigma}, {0.0, 0.0}, 1.0),
         testing::SyntheticMode({0.0, -0.5}, {1.0, sigma}, {0.0, 0.0}, 1.0)});
  };
  VecXd u(1);
  u << 0.15;
  const Belief start = Belief::Uniform(2);
  const Belief once = BeliefUpdate(start, bank_with(s), 0, VecXd::Zero(1), u, 0).belief;
  const Belief twice =
      BeliefUpdate(once, bank_with(s), 0, VecXd::Zero(1), u, 0).belief;
  const Belief squared =
      BeliefUpdate(start, bank_with(s_half), 0, VecXd::Zero(1), u, 0).belief;
  CHECK(twice(0) == doctest::Approx(squared(0)).epsilon(1e-12));
  CHECK(twice(1) == doctest::Approx(squared(1)).epsilon(1e-12));
}

TEST_CASE("relabeling modes permutes prior and posterior identically") {
  ModeBank bank = ToyBank(0.1, 0.5);
  ModeBank swapped = bank;
  std::swap(swapped.modes[0], swapped.modes[1]);

  const Belief p = PriorBelief(bank, VecXd::Zero(2), 0.5);
  const Belief ps = PriorBelief(swapped, VecXd::Zero(2), 0.5);
  CHECK(p(0) == doctest::Approx(ps(1)).epsilon(1e-14));
  CHECK(p(1) == doctest::Approx(ps(0)).epsilon(1e-14));

  VecXd u(1);
  u << 0.6;
  const Belief q = BeliefUpdate(p, bank, 0, VecXd::Zero(2), u, 0).belief;
  const Belief qs = BeliefUpdate(ps, swapped, 0, VecXd::Zero(2), u, 0).belief;
  CHECK(q(0) == doctest::Approx(qs(1)).epsilon(1e-14));
  CHECK(q(1) == doctest::Approx(qs(0)).epsilon(1e-14));
}

TEST_CASE("the belief stays on the simplex through random update storms") {
  const ModeBank bank = ToyBank(0.1, 0.5);
  std::mt19937_64 rng(7);
  Belief b = PriorBelief(bank, VecXd::Zero(2), 0.5);
  for (int k = 0; k < 200; ++k) {
    const VecXd x = testing::RandomVec(&rng, 2, 1.0);
    const VecXd u = testing::RandomVec(&rng, 1, 2.0);
    b = BeliefUpdate(b, bank, 0, x, u, k % 3).belief;
    CHECK(b.Probabilities().minCoeff() >= 0.0);
    CHECK(std::abs(b.Probabilities().sum() - 1.0) <= 1e-9);
  }
}

TEST_CASE("observing a sustained mode-consistent control locks the belief") {
  const ModeBank bank = ToyBank(0.1, 0.5);
  Belief b = PriorBelief(bank, VecXd::Zero(2), 0.5);
  // Agent 1 keeps playing the negative-lobe policy mean.
  const VecXd u1 = bank.modes[1].policies[1].u_nom[0];
  for (int k = 0; k < 20; ++k)
    b = BeliefUpdate(b, bank, 0, VecXd::Zero(2), u1, 0).belief;
  CHECK(b(1) >= 0.9);
}

TEST_CASE("naive filter matches positions and honors equidistance") {
  LocalNashSolution a =
      testing::SyntheticMode({0.0, 0.0}, {1.0, 1.0}, {0.0, 0.0}, 1.0);
  LocalNashSolution c = a;
  a.nominal.states[1] = VecXd::Constant(1, 1.0);
  c.nominal.states[1] = VecXd::Constant(1, -1.0);
  const ModeBank bank = testing::SyntheticBank({a, c});
  const auto position = [](const VecXd& x) { return x; };

  // Equidistant observation: unchanged.
  BeliefUpdateResult r = NaiveBeliefUpdate(Belief::Uniform(2), bank,
                                           VecXd::Zero(1), 0.1, 1, position);
  CHECK_FALSE(r.informative);
  CHECK(r.belief(0) == 0.5);

  // On mode 1's prediction with a tight sigma: near-degenerate posterior.
  r = NaiveBeliefUpdate(Belief::Uniform(2), bank, VecXd::Constant(1, 1.0),
                        0.05, 1, position);
  CHECK(r.belief(0) > 1.0 - 1e-12);
}

TEST_CASE("stage indices clamp to the solved horizon") {
  const ModeBank bank = ToyBank(0.1, 0.5);
  CHECK(bank.PolicyStage(-3) == 0);
  CHECK(bank.PolicyStage(0) == 0);
  CHECK(bank.PolicyStage(500) == bank.Horizon() - 2);
  CHECK(bank.StateStage(500) == bank.Horizon() - 1);
}

TEST_CASE("inconsistent banks are rejected") {
  LocalNashSolution a =
      testing::SyntheticMode({0.0, 0.0}, {1.0, 1.0}, {0.0, 0.0}, 1.0);
  LocalNashSolution b = a;
  b.beta = 2.0;
  const ModeBank bank = testing::SyntheticBank({a, b});
  CHECK_THROWS_AS(bank.CheckConsistent(), ContractViolation);
}

TEST_CASE("control recovery inverts a single integrator exactly") {
  SingleIntegratorDynamics dyn(std::vector<int>{1, 1});
  VecXd x0(2), u(2);
  x0 << 0.4, -0.2;
  u << 0.3, -1.1;
  const VecXd x1 = dyn.Step(x0, u, 0.05);
  const ControlEstimate est = EstimateControls(dyn, x0, x1, 0.05);
  CHECK((est.u - u).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_FALSE(est.low_confidence);
  CHECK(est.residual < 1e-12);
}

TEST_CASE("unreachable transitions are flagged low confidence") {
  // One control, two states: the second state cannot move in one step.
  MatXd a = MatXd::Identity(2, 2);
  MatXd b(2, 1);
  b << 1.0, 0.0;
  DiscreteLinearDynamics dyn(a, {b});
  VecXd x0 = VecXd::Zero(2);
  VecXd x1(2);
  x1 << 0.1, 0.5;
  const ControlEstimate est = EstimateControls(dyn, x0, x1, 1.0);
  CHECK(est.low_confidence);
  CHECK(est.residual == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(est.u(0) == doctest::Approx(0.1).epsilon(1e-9));
}

}  // TEST_SUITE

}  // namespace
}  // namespace mmg
