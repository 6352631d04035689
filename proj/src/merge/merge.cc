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

#include "mmg/merge/merge.h"

#include <cmath>
#include <numbers>
#include <utility>

#include "mmg/core/check.h"

namespace mmg::merge {
namespace {

// Model envelope: tan(zeta) folds past pi/2, so fail loudly well before.
constexpr double kSteerEnvelope = 1.45;
// Curvilinear frame precondition 1 - n kappa(s) > margin.
constexpr double kFrameMargin = 0.1;

constexpr int kJointStateDim = 2 * kVehicleStateDim;
constexpr int kJointControlDim = 2 * kVehicleControlDim;

double Softplus(double z) { return z > 30.0 ? z : std::log1p(std::exp(z)); }

double Logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::array<double, 2> ToPair(const std::vector<double>& v, const char* key) {
  MMG_CHECK_MSG(v.size() == 2, key << " must list one value per agent");
  return {v[0], v[1]};
}

}  // namespace

BicycleDynamics::BicycleDynamics(
    std::shared_ptr<const CenterlineSpline> centerline, double wheelbase)
    : DynamicsModel(kVehicleStateDim, {kVehicleControlDim}),
      centerline_(std::move(centerline)),
      wheelbase_(wheelbase) {
  MMG_CHECK(centerline_ != nullptr);
  MMG_CHECK(wheelbase_ > 0.0 && std::isfinite(wheelbase_));
}

VecXd BicycleDynamics::Flow(const VecXd& x, const VecXd& u) const {
  MMG_CHECK(x.size() == kVehicleStateDim);
  MMG_CHECK(u.size() == kVehicleControlDim);
  const double v = x[kV];
  const double theta = x[kTheta];
  const double zeta = x[kZeta];
  const double s = x[kS];
  const double n = x[kN];
  const double xi = x[kXi];

  if (!(std::abs(zeta) < kSteerEnvelope))
    throw NumericalError("steering angle left the bicycle model envelope");
  const double kappa = centerline_->Curvature(s);
  const double denom = 1.0 - n * kappa;
  if (!(denom > kFrameMargin))
    throw NumericalError("curvilinear frame hit the centerline singularity");

  const double theta_dot = v * std::tan(zeta) / wheelbase_;
  const double s_dot = v * std::cos(xi) / denom;

  VecXd f(kVehicleStateDim);
  f[kPx] = v * std::cos(theta);
  f[kPy] = v * std::sin(theta);
  f[kV] = u[kAccel];
  f[kTheta] = theta_dot;
  f[kZeta] = u[kSteerRate];
  f[kS] = s_dot;
  f[kN] = v * std::sin(xi);
  f[kXi] = theta_dot - kappa * s_dot;
  return f;
}

void BicycleDynamics::FlowJacobians(const VecXd& x, const VecXd& u, MatXd* fx,
                                    MatXd* fu) const {
  MMG_CHECK(x.size() == kVehicleStateDim);
  MMG_CHECK(u.size() == kVehicleControlDim);
  MMG_CHECK(fx != nullptr && fu != nullptr);
  const double v = x[kV];
  const double theta = x[kTheta];
  const double zeta = x[kZeta];
  const double s = x[kS];
  const double n = x[kN];
  const double xi = x[kXi];

  if (!(std::abs(zeta) < kSteerEnvelope))
    throw NumericalError("steering angle left the bicycle model envelope");
  const double kappa = centerline_->Curvature(s);
  const double kappa_prime = centerline_->CurvatureDerivative(s);
  const double denom = 1.0 - n * kappa;
  if (!(denom > kFrameMargin))
    throw NumericalError("curvilinear frame hit the centerline singularity");

  const double cos_theta = std::cos(theta);
  const double sin_theta = std::sin(theta);
  const double cos_xi = std::cos(xi);
  const double sin_xi = std::sin(xi);
  const double tan_zeta = std::tan(zeta);
  const double sec2_zeta = 1.0 + tan_zeta * tan_zeta;
  const double s_dot = v * cos_xi / denom;

  const double dthetadot_dv = tan_zeta / wheelbase_;
  const double dthetadot_dzeta = v * sec2_zeta / wheelbase_;
  // d(denom)/ds = -n kappa'; d(denom)/dn = -kappa.
  const double dsdot_dv = cos_xi / denom;
  const double dsdot_dxi = -v * sin_xi / denom;
  const double dsdot_ds = v * cos_xi * n * kappa_prime / (denom * denom);
  const double dsdot_dn = v * cos_xi * kappa / (denom * denom);

  *fx = MatXd::Zero(kVehicleStateDim, kVehicleStateDim);
  *fu = MatXd::Zero(kVehicleStateDim, kVehicleControlDim);
  (*fx)(kPx, kV) = cos_theta;
  (*fx)(kPx, kTheta) = -v * sin_theta;
  (*fx)(kPy, kV) = sin_theta;
  (*fx)(kPy, kTheta) = v * cos_theta;
  (*fx)(kTheta, kV) = dthetadot_dv;
  (*fx)(kTheta, kZeta) = dthetadot_dzeta;
  (*fx)(kS, kV) = dsdot_dv;
  (*fx)(kS, kS) = dsdot_ds;
  (*fx)(kS, kN) = dsdot_dn;
  (*fx)(kS, kXi) = dsdot_dxi;
  (*fx)(kN, kV) = sin_xi;
  (*fx)(kN, kXi) = v * cos_xi;
  (*fx)(kXi, kV) = dthetadot_dv - kappa * dsdot_dv;
  (*fx)(kXi, kZeta) = dthetadot_dzeta;
  (*fx)(kXi, kS) = -(kappa_prime * s_dot + kappa * dsdot_ds);
  (*fx)(kXi, kN) = -kappa * dsdot_dn;
  (*fx)(kXi, kXi) = -kappa * dsdot_dxi;
  (*fu)(kV, kAccel) = 1.0;
  (*fu)(kZeta, kSteerRate) = 1.0;
}

VecXd VehicleStateOnCenterline(const CenterlineSpline& lane, double s,
                               double v) {
  MMG_CHECK(std::isfinite(s) && std::isfinite(v));
  VecXd x = VecXd::Zero(kVehicleStateDim);
  const Eigen::Vector2d p = lane.Position(s);
  x[kPx] = p.x();
  x[kPy] = p.y();
  x[kV] = v;
  x[kTheta] = lane.Heading(s);
  x[kS] = s;
  return x;
}

MergeObjective::MergeObjective(int agent, double v_ref,
                               const MergeWeights& weights, double half_width,
                               double collision_support)
    : agent_(agent),
      other_(1 - agent),
      v_ref_(v_ref),
      w_(weights),
      half_width_(half_width),
      support_sq_(collision_support * collision_support) {
  MMG_CHECK(agent == 0 || agent == 1);
  MMG_CHECK(std::isfinite(v_ref));
  MMG_CHECK(weights.centerline >= 0.0 && weights.velocity >= 0.0 &&
            weights.boundary >= 0.0 && weights.control >= 0.0 &&
            weights.collision >= 0.0);
  MMG_CHECK(weights.boundary_sharpness > 0.0);
  MMG_CHECK(half_width > 0.0);
  MMG_CHECK(collision_support > 0.0);
}

// All state terms (centerline, velocity, boundary, collision) in one pass;
// dx/dxx may be null when only the value is needed.
void MergeObjective::StateExpansion(const VecXd& x, double* value, VecXd* dx,
                                    MatXd* dxx) const {
  MMG_CHECK(x.size() == kJointStateDim);
  const int base = kVehicleStateDim * agent_;
  const int base_other = kVehicleStateDim * other_;
  const double n = x[base + kN];
  const double v = x[base + kV];
  double total = 0.0;

  total += w_.centerline * n * n;
  total += w_.velocity * (v - v_ref_) * (v - v_ref_);
  if (dx != nullptr) {
    (*dx)[base + kN] += 2.0 * w_.centerline * n;
    (*dx)[base + kV] += 2.0 * w_.velocity * (v - v_ref_);
    (*dxx)(base + kN, base + kN) += 2.0 * w_.centerline;
    (*dxx)(base + kV, base + kV) += 2.0 * w_.velocity;
  }

  // Lane boundary: viol(n) smooths max(0, n - w) + max(0, -n - w).
  const double sharp = w_.boundary_sharpness;
  const double zl = sharp * (n - half_width_);
  const double zr = sharp * (-n - half_width_);
  const double viol = (Softplus(zl) + Softplus(zr)) / sharp;
  total += w_.boundary * viol * viol;
  if (dx != nullptr) {
    const double gl = Logistic(zl);
    const double gr = Logistic(zr);
    const double viol_d = gl - gr;
    const double viol_dd = sharp * (gl * (1.0 - gl) + gr * (1.0 - gr));
    (*dx)[base + kN] += 2.0 * w_.boundary * viol * viol_d;
    (*dxx)(base + kN, base + kN) +=
        2.0 * w_.boundary * (viol_d * viol_d + viol * viol_dd);
  }

  // Collision: quadratic in d^2, truncated at the support boundary and
  // concave in position inside it.
  const double dpx = x[base + kPx] - x[base_other + kPx];
  const double dpy = x[base + kPy] - x[base_other + kPy];
  const double dist_sq = dpx * dpx + dpy * dpy;
  const double gap = support_sq_ - dist_sq;
  if (gap > 0.0) {
    total += w_.collision * gap * gap;
    if (dx != nullptr) {
      const Eigen::Vector2d delta(dpx, dpy);
      const double coef = 4.0 * w_.collision * gap;
      (*dx).segment<2>(base + kPx) += -coef * delta;
      (*dx).segment<2>(base_other + kPx) += coef * delta;
      const Eigen::Matrix2d outer = 8.0 * w_.collision * delta * delta.transpose();
      const Eigen::Matrix2d diag =
          4.0 * w_.collision * gap * Eigen::Matrix2d::Identity();
      (*dxx).block<2, 2>(base + kPx, base + kPx) += outer - diag;
      (*dxx).block<2, 2>(base_other + kPx, base_other + kPx) += outer - diag;
      (*dxx).block<2, 2>(base + kPx, base_other + kPx) += diag - outer;
      (*dxx).block<2, 2>(base_other + kPx, base + kPx) += diag - outer;
    }
  }

  *value = total;
}

double MergeObjective::StateCost(const VecXd& x) const {
  double value = 0.0;
  StateExpansion(x, &value, nullptr, nullptr);
  return value;
}

double MergeObjective::RunningCost(const VecXd& x, const VecXd& u) const {
  MMG_CHECK(u.size() == kJointControlDim);
  const VecXd own = u.segment(kVehicleControlDim * agent_, kVehicleControlDim);
  return StateCost(x) + w_.control * own.squaredNorm();
}

double MergeObjective::TerminalCost(const VecXd& x) const {
  return StateCost(x);
}

void MergeObjective::QuadraticizeRunning(const VecXd& x, const VecXd& u,
                                         StageQuadraticExpansion* out) const {
  MMG_CHECK(u.size() == kJointControlDim);
  MMG_CHECK(out != nullptr);
  out->SetZero(kJointStateDim, kJointControlDim);
  StateExpansion(x, &out->value, &out->dx, &out->dxx);

  const int off = kVehicleControlDim * agent_;
  const VecXd own = u.segment(off, kVehicleControlDim);
  out->value += w_.control * own.squaredNorm();
  out->du.segment(off, kVehicleControlDim) = 2.0 * w_.control * own;
  out->duu.block(off, off, kVehicleControlDim, kVehicleControlDim) =
      2.0 * w_.control *
      MatXd::Identity(kVehicleControlDim, kVehicleControlDim);
}

void MergeObjective::QuadraticizeTerminal(
    const VecXd& x, TerminalQuadraticExpansion* out) const {
  MMG_CHECK(out != nullptr);
  out->SetZero(kJointStateDim);
  StateExpansion(x, &out->value, &out->dx, &out->dxx);
}

MergeConfig DefaultMergeConfig() {
  MergeConfig cfg;
  constexpr double kRampStart = -2.8;
  constexpr double kRampSpan = 2.8;
  for (int lane = 0; lane < 2; ++lane) {
    const double side = lane == 0 ? 1.0 : -1.0;
    std::vector<double>& xs = cfg.waypoints_x[lane];
    std::vector<double>& ys = cfg.waypoints_y[lane];
    // Half-cosine ramp from (kRampStart, +-0.6) into the merge point at the
    // origin; level at both ends so the blend into the straight is C1.
    for (int k = 0; k <= 14; ++k) {
      const double x = kRampStart + kRampSpan * k / 14.0;
      xs.push_back(x);
      ys.push_back(side * 0.3 *
                   (1.0 + std::cos(std::numbers::pi * (x - kRampStart) /
                                   kRampSpan)));
    }
    // Shared straight lane past the merge point.
    for (int k = 1; k <= 8; ++k) {
      xs.push_back(0.4 * k);
      ys.push_back(0.0);
    }
  }
  return cfg;
}

MergeScenario BuildMergeScenario(const MergeConfig& config) {
  MMG_CHECK(config.dt > 0.0 && std::isfinite(config.dt));
  MMG_CHECK(config.horizon >= 2);
  MMG_CHECK(config.radius[0] > 0.0 && config.radius[1] > 0.0);
  MMG_CHECK(config.collision_cost_scale > 0.0);
  MMG_CHECK(config.accel_max > 0.0 && config.steer_rate_max > 0.0);
  MMG_CHECK(config.brake_accel >= 0.0 && config.brake_steps >= 0);

  std::array<std::shared_ptr<const CenterlineSpline>, 2> lanes;
  std::array<double, 2> merge_s;
  for (int i = 0; i < 2; ++i) {
    lanes[i] = std::make_shared<CenterlineSpline>(
        config.waypoints_x[i], config.waypoints_y[i], config.half_width);
    merge_s[i] =
        lanes[i]->Project({config.merge_x, config.merge_y}).s;
    MMG_CHECK_MSG(config.start_s[i] >= 0.0 &&
                      config.start_s[i] < lanes[i]->Length(),
                  "start_s must lie on lane " << i);
    MMG_CHECK(config.v_ref[i] > 0.0);
  }

  auto dynamics = std::make_shared<StackedDynamics>(
      std::vector<std::shared_ptr<const DynamicsModel>>{
          std::make_shared<BicycleDynamics>(lanes[0], config.wheelbase),
          std::make_shared<BicycleDynamics>(lanes[1], config.wheelbase)});

  const double support =
      config.collision_cost_scale * (config.radius[0] + config.radius[1]);
  std::vector<std::shared_ptr<const AgentObjective>> objectives;
  for (int i = 0; i < 2; ++i)
    objectives.push_back(std::make_shared<MergeObjective>(
        i, config.v_ref[i], config.weights, config.half_width, support));

  DynamicGame game(dynamics, std::move(objectives), config.horizon,
                   config.dt);

  VecXd x0(kJointStateDim);
  for (int i = 0; i < 2; ++i)
    x0.segment(kVehicleStateDim * i, kVehicleStateDim) =
        VehicleStateOnCenterline(*lanes[i], config.start_s[i],
                                 config.v_ref[i]);

  return MergeScenario{config, lanes, merge_s, std::move(game),
                       std::move(x0)};
}

std::array<std::vector<VecXd>, 2> SeedModes(const MergeConfig& config) {
  MMG_CHECK(config.horizon >= 2);
  std::array<std::vector<VecXd>, 2> seeds;
  for (int mode = 0; mode < 2; ++mode) {
    const int yielder = mode == 0 ? 1 : 0;
    std::vector<VecXd>& seq = seeds[mode];
    seq.assign(config.horizon - 1, VecXd::Zero(kJointControlDim));
    for (int t = 0; t < config.horizon - 1; ++t) {
      double accel = 0.0;
      if (t < config.brake_steps)
        accel = -config.brake_accel;
      else if (t < 2 * config.brake_steps)
        accel = config.brake_accel;
      seq[t][kVehicleControlDim * yielder + kAccel] = accel;
    }
  }
  return seeds;
}

IlqOptions MergeIlqOptions(double beta) {
  IlqOptions opts;
  opts.beta = beta;
  opts.max_iterations = 150;
  opts.state_hessian_floor = 0.0;
  return opts;
}

ConfigMap MergeConfigToMap(const MergeConfig& config) {
  ConfigMap m;
  m.SetDouble("lane.half_width", config.half_width);
  m.SetDoubleList("lane0.x", config.waypoints_x[0]);
  m.SetDoubleList("lane0.y", config.waypoints_y[0]);
  m.SetDoubleList("lane1.x", config.waypoints_x[1]);
  m.SetDoubleList("lane1.y", config.waypoints_y[1]);
  m.SetDouble("vehicle.wheelbase", config.wheelbase);
  m.SetDoubleList("vehicle.radius", {config.radius[0], config.radius[1]});
  m.SetDouble("vehicle.accel_max", config.accel_max);
  m.SetDouble("vehicle.steer_rate_max", config.steer_rate_max);
  m.SetDoubleList("agents.v_ref", {config.v_ref[0], config.v_ref[1]});
  m.SetDoubleList("agents.start_s", {config.start_s[0], config.start_s[1]});
  m.SetDouble("costs.centerline", config.weights.centerline);
  m.SetDouble("costs.velocity", config.weights.velocity);
  m.SetDouble("costs.boundary", config.weights.boundary);
  m.SetDouble("costs.boundary_sharpness", config.weights.boundary_sharpness);
  m.SetDouble("costs.control", config.weights.control);
  m.SetDouble("costs.collision", config.weights.collision);
  m.SetDouble("costs.collision_cost_scale", config.collision_cost_scale);
  m.SetDouble("scenario.dt", config.dt);
  m.SetInt("scenario.horizon", config.horizon);
  m.SetDouble("scenario.merge_x", config.merge_x);
  m.SetDouble("scenario.merge_y", config.merge_y);
  m.SetDouble("seeds.brake_accel", config.brake_accel);
  m.SetInt("seeds.brake_steps", config.brake_steps);
  return m;
}

MergeConfig MergeConfigFromMap(const ConfigMap& m) {
  MergeConfig cfg = DefaultMergeConfig();
  cfg.half_width = m.GetDouble("lane.half_width", cfg.half_width);
  cfg.waypoints_x[0] = m.GetDoubleList("lane0.x", cfg.waypoints_x[0]);
  cfg.waypoints_y[0] = m.GetDoubleList("lane0.y", cfg.waypoints_y[0]);
  cfg.waypoints_x[1] = m.GetDoubleList("lane1.x", cfg.waypoints_x[1]);
  cfg.waypoints_y[1] = m.GetDoubleList("lane1.y", cfg.waypoints_y[1]);
  cfg.wheelbase = m.GetDouble("vehicle.wheelbase", cfg.wheelbase);
  cfg.radius = ToPair(
      m.GetDoubleList("vehicle.radius", {cfg.radius[0], cfg.radius[1]}),
      "vehicle.radius");
  cfg.accel_max = m.GetDouble("vehicle.accel_max", cfg.accel_max);
  cfg.steer_rate_max =
      m.GetDouble("vehicle.steer_rate_max", cfg.steer_rate_max);
  cfg.v_ref = ToPair(
      m.GetDoubleList("agents.v_ref", {cfg.v_ref[0], cfg.v_ref[1]}),
      "agents.v_ref");
  cfg.start_s = ToPair(
      m.GetDoubleList("agents.start_s", {cfg.start_s[0], cfg.start_s[1]}),
      "agents.start_s");
  cfg.weights.centerline =
      m.GetDouble("costs.centerline", cfg.weights.centerline);
  cfg.weights.velocity = m.GetDouble("costs.velocity", cfg.weights.velocity);
  cfg.weights.boundary = m.GetDouble("costs.boundary", cfg.weights.boundary);
  cfg.weights.boundary_sharpness = m.GetDouble(
      "costs.boundary_sharpness", cfg.weights.boundary_sharpness);
  cfg.weights.control = m.GetDouble("costs.control", cfg.weights.control);
  cfg.weights.collision =
      m.GetDouble("costs.collision", cfg.weights.collision);
  cfg.collision_cost_scale =
      m.GetDouble("costs.collision_cost_scale", cfg.collision_cost_scale);
  cfg.dt = m.GetDouble("scenario.dt", cfg.dt);
  cfg.horizon = static_cast<int>(m.GetInt("scenario.horizon", cfg.horizon));
  cfg.merge_x = m.GetDouble("scenario.merge_x", cfg.merge_x);
  cfg.merge_y = m.GetDouble("scenario.merge_y", cfg.merge_y);
  cfg.brake_accel = m.GetDouble("seeds.brake_accel", cfg.brake_accel);
  cfg.brake_steps =
      static_cast<int>(m.GetInt("seeds.brake_steps", cfg.brake_steps));
  return cfg;
}

MergeConfig LoadMergeConfig(const std::string& path) {
  return MergeConfigFromMap(ConfigMap::LoadFile(path));
}

void SaveMergeConfig(const MergeConfig& config, const std::string& path) {
  MergeConfigToMap(config).SaveFile(path);
}

}  // namespace mmg::merge
