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

#include "mmg/toy/toy.h"

#include <algorithm>
#include <cmath>
#include <memory>

#include "mmg/core/check.h"
#include "mmg/support/numerics.h"

namespace mmg::toy {
namespace {

// Softmin component weights w_a, w_b in log-safe form.
void SoftMinWeights(double a, double b, double* wa, double* wb) {
  const double m = std::min(a, b);
  const double ea = std::exp(-(a - m));
  const double eb = std::exp(-(b - m));
  *wa = ea / (ea + eb);
  *wb = eb / (ea + eb);
}

double ModeA(double x1) { return 1.5 * (x1 - 1.0) * (x1 - 1.0); }
double ModeB(double x1, double eps) {
  return 1.5 * (x1 + 1.0) * (x1 + 1.0) + eps;
}

// Agent 1's full one-step cost as a function of its control (x1 = u1 from 0).
double Agent1Cost(double u1, double eps) {
  return 0.5 * u1 * u1 + BimodalTerm(u1, eps);
}
double Agent1CostD1(double u1, double eps) {
  return u1 + BimodalTermD1(u1, eps);
}
double Agent1CostD2(double u1, double eps) {
  return 1.0 + BimodalTermD2(u1, eps);
}

// Newton refinement of a stationary point of agent 1's cost from u_init.
double NewtonStationary(double u_init, double eps) {
  double u = u_init;
  for (int k = 0; k < 100; ++k) {
    const double g = Agent1CostD1(u, eps);
    const double h = Agent1CostD2(u, eps);
    MMG_CHECK_MSG(h > 0.0, "non-convex Newton step in toy equilibrium");
    const double step = g / h;
    u -= step;
    if (std::abs(step) < 1e-14) break;
  }
  return u;
}

class BimodalObjective : public AgentObjective {
 public:
  explicit BimodalObjective(double eps) : eps_(eps) {}

  double RunningCost(const VecXd&, const VecXd& u) const override {
    return 0.5 * u(1) * u(1);
  }
  double TerminalCost(const VecXd& x) const override {
    return BimodalTerm(x(1), eps_);
  }
  void QuadraticizeRunning(const VecXd& x, const VecXd& u,
                           StageQuadraticExpansion* out) const override {
    out->SetZero(static_cast<int>(x.size()), static_cast<int>(u.size()));
    out->value = RunningCost(x, u);
    out->du(1) = u(1);
    out->duu(1, 1) = 1.0;
  }
  void QuadraticizeTerminal(const VecXd& x,
                            TerminalQuadraticExpansion* out) const override {
    out->SetZero(static_cast<int>(x.size()));
    out->value = TerminalCost(x);
    out->dx(1) = BimodalTermD1(x(1), eps_);
    out->dxx(1, 1) = BimodalTermD2(x(1), eps_);
  }

 private:
  double eps_;
};

}  // namespace

double SoftMin(double a, double b) { return -LogAdd(-a, -b); }

double BimodalTerm(double x1, double eps) {
  return SoftMin(ModeA(x1), ModeB(x1, eps));
}

double BimodalTermD1(double x1, double eps) {
  double wa, wb;
  SoftMinWeights(ModeA(x1), ModeB(x1, eps), &wa, &wb);
  return wa * 3.0 * (x1 - 1.0) + wb * 3.0 * (x1 + 1.0);
}

double BimodalTermD2(double x1, double eps) {
  double wa, wb;
  SoftMinWeights(ModeA(x1), ModeB(x1, eps), &wa, &wb);
  const double da = 3.0 * (x1 - 1.0);
  const double db = 3.0 * (x1 + 1.0);
  return 3.0 - wa * wb * (da - db) * (da - db);
}

DynamicGame BuildToyGame(double eps) {
  auto dynamics = std::make_shared<SingleIntegratorDynamics>(
      std::vector<int>{1, 1});
  // Agent 0: quadratic tracking of agent 1's position.
  MatXd qf(2, 2);
  qf << 3.0, -3.0, -3.0, 3.0;
  std::vector<MatXd> r = {MatXd::Identity(1, 1), MatXd::Zero(1, 1)};
  std::vector<VecXd> ru = {VecXd::Zero(1), VecXd::Zero(1)};
  auto ego = std::make_shared<QuadraticObjective>(
      MatXd::Zero(2, 2), VecXd::Zero(2), r, ru, qf, VecXd::Zero(2),
      std::vector<int>{1, 1});
  auto other = std::make_shared<BimodalObjective>(eps);
  return DynamicGame(dynamics, {ego, other}, /*horizon=*/2, /*dt=*/1.0);
}

std::vector<VecXd> ToySeed(int mode) {
  MMG_CHECK(mode == 0 || mode == 1);
  VecXd u(2);
  u << 0.0, (mode == 0 ? 1.0 : -1.0);
  return {u};
}

ToyEquilibrium ExactNeBranch(double eps, int mode) {
  MMG_CHECK(mode == 0 || mode == 1);
  ToyEquilibrium ne;
  ne.u1 = NewtonStationary(mode == 0 ? 1.0 : -1.0, eps);
  // Agent 0's best response: d/du0 [0.5 u0^2 + 1.5 (u0 - u1)^2] = 0.
  ne.u0 = 0.75 * ne.u1;
  ne.cost0 = 0.5 * ne.u0 * ne.u0 + 1.5 * (ne.u0 - ne.u1) * (ne.u0 - ne.u1);
  ne.cost1 = Agent1Cost(ne.u1, eps);
  return ne;
}

ToyEquilibrium ExactNe(double eps) {
  const ToyEquilibrium pos = ExactNeBranch(eps, 0);
  const ToyEquilibrium neg = ExactNeBranch(eps, 1);
  return pos.cost1 <= neg.cost1 ? pos : neg;
}

namespace {

struct GridDensity {
  std::vector<double> grid;
  std::vector<double> density;  // normalized
  double log_z = 0.0;
  double mass = 0.0;
  double mean = 0.0;
  double var = 0.0;
};

// Normalized Boltzmann density of neg_log_weight(u) = beta * cost(u) on a
// uniform grid, with trapezoid normalization.
GridDensity DensityOnGrid(const std::function<double(double)>& cost,
                          double beta, double lo, double hi, int n) {
  GridDensity out;
  out.grid.resize(n);
  std::vector<double> logw(n);
  const double dx = (hi - lo) / (n - 1);
  for (int k = 0; k < n; ++k) {
    out.grid[k] = lo + k * dx;
    logw[k] = -beta * cost(out.grid[k]);
  }
  const double peak = *std::max_element(logw.begin(), logw.end());
  std::vector<double> w(n);
  for (int k = 0; k < n; ++k) w[k] = std::exp(logw[k] - peak);
  const double raw = Trapezoid(w, dx);
  out.log_z = peak + std::log(raw);
  // Normalize by the same trapezoid rule that measures the mass.
  out.density.resize(n);
  for (int k = 0; k < n; ++k) out.density[k] = w[k] / raw;
  out.mass = Trapezoid(out.density, dx);
  std::vector<double> moment(n);
  for (int k = 0; k < n; ++k) moment[k] = out.grid[k] * out.density[k];
  out.mean = Trapezoid(moment, dx);
  for (int k = 0; k < n; ++k)
    moment[k] = (out.grid[k] - out.mean) * (out.grid[k] - out.mean) *
                out.density[k];
  out.var = Trapezoid(moment, dx);
  return out;
}

// Doubles grid resolution until log Z settles below the drift tolerance.
GridDensity RefinedDensity(const std::function<double(double)>& cost,
                           double beta, const QuadratureOptions& options) {
  MMG_CHECK(options.min_points >= 3 && options.hi > options.lo);
  int n = options.min_points;
  GridDensity cur = DensityOnGrid(cost, beta, options.lo, options.hi, n);
  while (true) {
    const int next_n = 2 * (n - 1) + 1;
    if (next_n > options.max_points)
      throw PrecisionError(
          "quadrature refinement exhausted its point budget before the "
          "drift tolerance");
    GridDensity next =
        DensityOnGrid(cost, beta, options.lo, options.hi, next_n);
    const double drift = std::abs(next.log_z - cur.log_z);
    cur = std::move(next);
    n = next_n;
    if (drift < options.drift_tolerance) return cur;
  }
}

}  // namespace

ToyMaxEnt ExactMaxEntNe(double eps, double beta,
                        const QuadratureOptions& options) {
  MMG_CHECK_MSG(beta > 0.0 && std::isfinite(beta), "beta must be positive");
  ToyMaxEnt out;

  const GridDensity other = RefinedDensity(
      [eps](double u) { return Agent1Cost(u, eps); }, beta, options);
  out.grid = other.grid;
  out.pi1 = other.density;
  out.mean1 = other.mean;
  out.var1 = other.var;
  out.value1 = -other.log_z / beta;
  out.mass1 = other.mass;

  // Agent 0's soft best response to the exact density of agent 1:
  // E[0.5 u^2 + 1.5 (u - u1)^2] expands in the first two moments of u1.
  // Evaluated on the grid agent 1's refinement settled on, so both densities
  // share nodes; the response is Gaussian, so that resolution dominates it.
  const double second_moment = other.var + other.mean * other.mean;
  const double m1 = other.mean;
  const GridDensity ego = DensityOnGrid(
      [m1, second_moment](double u) {
        return 2.0 * u * u - 3.0 * m1 * u + 1.5 * second_moment;
      },
      beta, options.lo, options.hi, static_cast<int>(other.grid.size()));
  out.pi0 = ego.density;
  out.mean0 = ego.mean;
  out.var0 = ego.var;
  out.value0 = -ego.log_z / beta;
  out.mass0 = ego.mass;
  return out;
}

double OneStepMaxEntValue(const std::function<double(double)>& f, double beta,
                          const QuadratureOptions& options) {
  MMG_CHECK_MSG(beta > 0.0 && std::isfinite(beta), "beta must be positive");
  return -RefinedDensity(f, beta, options).log_z / beta;
}

GaussianFit FitLobeGaussian(double eps, double beta, bool positive_lobe) {
  MMG_CHECK(beta > 0.0);
  // The restricted density peaks at the lobe's stationary point; a curvature
  // fit there is the Gaussian that matches the density's local shape.
  const double peak = NewtonStationary(positive_lobe ? 1.0 : -1.0, eps);
  MMG_CHECK_MSG(positive_lobe ? peak > 0.0 : peak < 0.0,
                "lobe peak crossed the restriction boundary");
  GaussianFit fit;
  fit.mean = peak;
  fit.variance = 1.0 / (beta * Agent1CostD2(peak, eps));
  return fit;
}

}  // namespace mmg::toy
