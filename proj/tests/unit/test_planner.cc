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
#include <vector>

#include "mmg/core/check.h"
#include "mmg/planner/planner.h"
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

Belief MixedBelief(double b0) {
  VecXd p(2);
  p << b0, 1.0 - b0;
  return Belief(p);
}

TEST_SUITE("planner") {

TEST_CASE("strategy names round-trip") {
  for (Strategy s : {Strategy::kYield, Strategy::kNoYield, Strategy::kMl,
                     Strategy::kQmdp})
    CHECK(StrategyFromName(StrategyName(s)) == s);
  CHECK_THROWS_AS(StrategyFromName("bogus"), ContractViolation);
}

TEST_CASE("a degenerate belief collapses the blend to the mode policy") {
  const ModeBank bank = ToyBank(0.1, 0.5);
  VecXd x(2);
  x << 0.13, -0.4;
  for (int z = 0; z < 2; ++z) {
    const EgoDecision d =
        QmdpPolicy(Belief::Degenerate(2, z), bank, /*ego=*/0, x, 0);
    const VecXd mean = bank.modes[z].policies[0].Mean(0, x);
    CHECK(d.control(0) == mean(0));  // bitwise
  }
}

TEST_CASE("toy blend at the value prior sits near zero by the frozen margin") {
  const ModeBank bank = ToyBank(0.1, 0.5);
  const Belief b0 = PriorBelief(bank, VecXd::Zero(2), 0.5);
  const EgoDecision d = QmdpPolicy(b0, bank, 0, VecXd::Zero(2), 0);
  CHECK(d.control(0) == doctest::Approx(0.014021100352514915).epsilon(1e-6));
  CHECK(std::abs(d.control(0)) < 0.03);
}

TEST_CASE("identical modes make every strategy agree") {
  const ModeBank toy_bank = ToyBank(0.1, 0.5);
  ModeBank bank;
  bank.modes = {toy_bank.modes[0], toy_bank.modes[0]};
  bank.modes[1].mode = 1;
  bank.x_solve = toy_bank.x_solve;
  VecXd x(2);
  x << -0.3, 0.25;
  const Belief b = MixedBelief(0.41);
  const VecXd u_qmdp = QmdpPolicy(b, bank, 0, x, 0).control;
  const VecXd u_ml = MlPolicy(b, bank, 0, x, 0).control;
  const VecXd u_fixed0 = NoinfPolicy(0, bank, 0, x, 0).control;
  const VecXd u_fixed1 = NoinfPolicy(1, bank, 0, x, 0).control;
  CHECK(std::abs(u_qmdp(0) - u_ml(0)) < 1e-12);
  CHECK(u_ml(0) == u_fixed0(0));
  CHECK(u_fixed0(0) == u_fixed1(0));
}

TEST_CASE("maximum-likelihood follows the argmax and breaks ties low") {
  const ModeBank bank = ToyBank(0.1, 0.5);
  const VecXd x = VecXd::Zero(2);
  const VecXd mode0 = bank.modes[0].policies[0].Mean(0, x);
  const VecXd mode1 = bank.modes[1].policies[0].Mean(0, x);

  CHECK(MlPolicy(MixedBelief(0.5 + 1e-9), bank, 0, x, 0).control(0) ==
        mode0(0));
  CHECK(MlPolicy(MixedBelief(0.5), bank, 0, x, 0).control(0) == mode0(0));
  CHECK(MlPolicy(MixedBelief(0.0), bank, 0, x, 0).control(0) == mode1(0));
  CHECK(MlPolicy(MixedBelief(1.0), bank, 0, x, 0).control(0) == mode0(0));
}

TEST_CASE("blend is continuous in the belief, argmax following is not") {
  const ModeBank bank = ToyBank(0.1, 0.5);
  const VecXd x = VecXd::Zero(2);
  const int n = 400;
  std::vector<double> qmdp(n + 1), ml(n + 1);
  for (int k = 0; k <= n; ++k) {
    const Belief b = MixedBelief(static_cast<double>(k) / n);
    qmdp[k] = QmdpPolicy(b, bank, 0, x, 0).control(0);
    ml[k] = MlPolicy(b, bank, 0, x, 0).control(0);
  }
  // No blended step exceeds 10x its neighbors (no hidden jump).
  for (int k = 1; k + 1 < n; ++k) {
    const double d0 = std::abs(qmdp[k] - qmdp[k - 1]);
    const double d1 = std::abs(qmdp[k + 1] - qmdp[k]);
    const double d2 = std::abs(qmdp[k + 2] - qmdp[k + 1]);
    CHECK(d1 <= 10.0 * std::max(d0, d2) + 1e-12);
  }
  // The argmax policy jumps across the decision boundary by the full gap
  // between the mode means.
  double max_jump = 0.0;
  for (int k = 0; k < n; ++k)
    max_jump = std::max(max_jump, std::abs(ml[k + 1] - ml[k]));
  CHECK(max_jump > 1.0);
}

TEST_CASE("the blended control minimizes the belief-weighted mode cost") {
  const ModeBank bank = ToyBank(0.1, 0.5);
  VecXd x(2);
  x << 0.2, -0.1;
  const Belief b = MixedBelief(0.37);
  const EgoDecision d = QmdpPolicy(b, bank, 0, x, 0);

  const auto weighted_cost = [&](const VecXd& u) {
    double total = 0.0;
    for (int z = 0; z < 2; ++z) {
      const AffineGaussianPolicy& pi = bank.modes[z].policies[0];
      const VecXd dev = u - pi.Mean(0, x);
      total += b(z) * 0.5 * dev.dot(pi.H[0] * dev);
    }
    return total;
  };
  const double at_star = weighted_cost(d.control);
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    const VecXd u = d.control + testing::RandomVec(&rng, 1, 0.5);
    CHECK(weighted_cost(u) >= at_star - 1e-12);
  }
}

TEST_CASE("per-mode cost report is consistent with the value models") {
  const ModeBank bank = ToyBank(0.1, 0.5);
  const VecXd x = VecXd::Zero(2);
  const EgoDecision d = QmdpPolicy(MixedBelief(0.7), bank, 0, x, 0);
  REQUIRE(d.mode_costs.size() == 2);
  for (int z = 0; z < 2; ++z) {
    const AffineGaussianPolicy& pi = bank.modes[z].policies[0];
    const VecXd dev = d.control - pi.Mean(0, x);
    const double expected = bank.modes[z].values[0].Value(0, x) +
                            0.5 * dev.dot(pi.H[0] * dev);
    CHECK(d.mode_costs(z) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("the published plan reproduces the decision control at its base") {
  const ModeBank bank = ToyBank(0.1, 0.5);
  VecXd x(2);
  x << 0.05, 0.3;
  const EgoDecision dq = QmdpPolicy(MixedBelief(0.6), bank, 0, x, 0);
  CHECK(dq.plan.Control(0, x)(0) == dq.control(0));
  const EgoDecision dm = MlPolicy(MixedBelief(0.6), bank, 0, x, 0);
  CHECK(dm.plan.Control(0, x)(0) ==
        doctest::Approx(dm.control(0)).epsilon(1e-12));
  // Steps beyond the stored stages clamp to the final stage law.
  CHECK(dq.plan.Control(500, x)(0) ==
        dq.plan.Control(dq.plan.NumStages() - 1, x)(0));
}

TEST_CASE("planner steps keep the belief on the simplex and refresh banks") {
  // A linear-quadratic game has a single equilibrium, so both seeds land on
  // the same mode; this exercises the plumbing end to end.
  MatXd a(2, 2);
  a << 1.0, 0.1, 0.0, 1.0;
  MatXd b0(2, 1), b1(2, 1);
  b0 << 0.2, 0.0;
  b1 << 0.0, 0.2;
  auto dyn = std::make_shared<DiscreteLinearDynamics>(
      a, std::vector<MatXd>{b0, b1});
  std::vector<MatXd> r = {MatXd::Identity(1, 1), MatXd::Identity(1, 1)};
  std::vector<VecXd> ru = {VecXd::Zero(1), VecXd::Zero(1)};
  auto obj = std::make_shared<QuadraticObjective>(
      MatXd::Identity(2, 2), VecXd::Zero(2), r, ru, MatXd::Identity(2, 2),
      VecXd::Zero(2), std::vector<int>{1, 1});
  DynamicGame game(dyn, {obj, obj}, 10, 1.0);

  PlannerOptions opts;
  opts.strategy = Strategy::kQmdp;
  opts.beta = 2.0;
  opts.resolve_period = 3;
  std::vector<VecXd> seed(9, VecXd::Zero(2));
  EgoPlanner planner(game, /*ego=*/0, {seed, seed}, opts);

  VecXd x(2);
  x << 1.0, -0.5;
  planner.Initialize(x, 0);
  CHECK(planner.belief()(0) == doctest::Approx(0.5));

  std::optional<VecXd> prev;
  std::mt19937_64 rng(3);
  int last_solve = planner.bank().solve_step;
  for (int step = 0; step < 8; ++step) {
    const EgoDecision d = planner.PlanStep(prev, x, step);
    CHECK(d.control.allFinite());
    CHECK(std::abs(d.belief.Probabilities().sum() - 1.0) < 1e-9);
    CHECK(d.plan_us >= 0.0);
    VecXd u(2);
    u << d.control(0), 0.5 * d.control(0) + 0.01;
    prev = x;
    x = dyn->Step(x, u, 1.0) + testing::RandomVec(&rng, 2, 1e-4);
    if (step >= 3) CHECK(planner.bank().solve_step > last_solve);
  }
  CHECK(planner.bank().solve_step >= 6);
}

TEST_CASE("fixed-mode strategies ignore the belief entirely") {
  const DynamicGame game = toy::BuildToyGame(0.1);
  PlannerOptions opts;
  opts.strategy = Strategy::kNoYield;
  opts.fixed_mode = 1;
  opts.beta = 0.5;
  opts.ilq.beta = 0.5;
  EgoPlanner planner(game, 1, {toy::ToySeed(0), toy::ToySeed(1)}, opts);
  planner.Initialize(VecXd::Zero(2), 0);
  const EgoDecision d = planner.PlanStep(std::nullopt, VecXd::Zero(2), 0);
  CHECK(d.strategy == Strategy::kNoYield);
  CHECK(d.belief(1) == 1.0);
  CHECK(d.control(0) ==
        planner.bank().modes[1].policies[1].Mean(0, VecXd::Zero(2))(0));
}

}  // TEST_SUITE

}  // namespace
}  // namespace mmg
