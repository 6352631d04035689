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
// Two-vehicle lane merge: kinematic bicycles on spline centerlines with soft
// interaction costs and a two-mode seeding heuristic (either agent crosses
// the merge point first).
//
// Scenario config text format ('#' comments, [section] tables, key = value):
//
//   [lane]     half_width
//   [lane0]    x = [...]  y = [...]        # centerline waypoints, meters
//   [lane1]    x = [...]  y = [...]
//   [vehicle]  wheelbase, radius, accel_max, steer_rate_max
//   [agents]   v_ref = [v0, v1], start_s = [s0, s1]
//   [costs]    centerline, velocity, boundary, boundary_sharpness, control,
//              collision, collision_cost_scale
//   [scenario] dt, horizon, merge_x, merge_y
//   [seeds]    brake_accel, brake_steps
//
// Missing keys fall back to the documented defaults (DefaultMergeConfig).

#ifndef MMG_MERGE_MERGE_H_
#define MMG_MERGE_MERGE_H_

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "mmg/core/game.h"
#include "mmg/merge/spline.h"
#include "mmg/solver/ilq.h"
#include "mmg/support/miniconf.h"

namespace mmg::merge {

// Per-agent state layout: Cartesian pose plus a curvilinear companion frame
// along the agent's centerline.
enum VehicleStateIndex {
  kPx = 0,     // position, m
  kPy = 1,     // position, m
  kV = 2,      // speed, m/s
  kTheta = 3,  // heading, rad
  kZeta = 4,   // steering angle, rad
  kS = 5,      // arclength along the centerline, m
  kN = 6,      // lateral offset, m, positive left
  kXi = 7,     // heading error against the centerline tangent, rad
};
inline constexpr int kVehicleStateDim = 8;

enum VehicleControlIndex {
  kSteerRate = 0,  // rad/s
  kAccel = 1,      // m/s^2
};
inline constexpr int kVehicleControlDim = 2;

// Kinematic bicycle with the curvilinear companion integrated alongside:
//
//   p_x' = v cos(theta)            s'  = v cos(xi) / (1 - n kappa(s))
//   p_y' = v sin(theta)            n'  = v sin(xi)
//   v'   = a                       xi' = theta' - kappa(s) s'
//   theta' = v tan(zeta) / L
//   zeta'  = steering rate
//
// Both representations describe the same motion; projecting (p_x, p_y) onto
// the centerline recovers (s, n) within 1e-3 m per step (checked by tests).
// The flow throws NumericalError when the frame approaches the centerline
// singularity (1 - n kappa <= 0.1) or the steering angle leaves the model
// envelope; a rollout hitting either terminates.
class BicycleDynamics : public DynamicsModel {
 public:
  BicycleDynamics(std::shared_ptr<const CenterlineSpline> centerline,
                  double wheelbase);

  VecXd Flow(const VecXd& x, const VecXd& u) const override;
  void FlowJacobians(const VecXd& x, const VecXd& u, MatXd* fx,
                     MatXd* fu) const override;

  const CenterlineSpline& Centerline() const { return *centerline_; }
  double Wheelbase() const { return wheelbase_; }

 private:
  std::shared_ptr<const CenterlineSpline> centerline_;
  double wheelbase_;
};

// On-centerline state at arclength s moving at speed v: heading along the
// tangent, zero steering, offset, and heading error.
VecXd VehicleStateOnCenterline(const CenterlineSpline& lane, double s,
                               double v);

struct MergeWeights {
  double centerline = 2.0;   // n^2
  double velocity = 0.6;     // (v - v_ref)^2
  double boundary = 4.0;     // squared softplus of the lane-edge violation
  double control = 0.4;      // |u|^2
  double collision = 200.0;  // max(0, support^2 - d^2)^2
  // Softplus scale of the boundary penalty; larger is closer to a hinge.
  double boundary_sharpness = 40.0;
};

// Stage cost of one agent:
//
//   l = w_n n^2 + w_v (v - v_ref)^2 + w_b viol(n)^2 + w_u |u|^2
//     + w_c max(0, d_c^2 - d^2)^2
//
// with viol the softplus-smoothed exceedance of |n| over the lane half-width,
// d the Cartesian distance between the agents, and d_c the collision support
// diameter.  The terminal cost drops the control term.  The collision
// penalty is concave in position inside its support, which is what splits
// the game into the two merge orderings.
class MergeObjective : public AgentObjective {
 public:
  MergeObjective(int agent, double v_ref, const MergeWeights& weights,
                 double half_width, double collision_support);

  double RunningCost(const VecXd& x, const VecXd& u) const override;
  double TerminalCost(const VecXd& x) const override;
  void QuadraticizeRunning(const VecXd& x, const VecXd& u,
                           StageQuadraticExpansion* out) const override;
  void QuadraticizeTerminal(const VecXd& x,
                            TerminalQuadraticExpansion* out) const override;

 private:
  double StateCost(const VecXd& x) const;
  void StateExpansion(const VecXd& x, double* value, VecXd* dx,
                      MatXd* dxx) const;

  int agent_;
  int other_;
  double v_ref_;
  MergeWeights w_;
  double half_width_;
  double support_sq_;  // d_c^2
};

// Everything needed to build and run the scenario.  Defaults model
// tenth-scale cars: a symmetric Y junction whose ramps start 2.8 m before
// the merge point, offset 0.6 m either side, blending into a shared
// straight lane.  The default start is symmetric, so which agent merges
// first is decided entirely by the equilibrium mode, and both seeded
// orderings refine to mirror-image equilibria.
struct MergeConfig {
  std::array<std::vector<double>, 2> waypoints_x;
  std::array<std::vector<double>, 2> waypoints_y;
  double half_width = 0.35;

  double wheelbase = 0.33;
  std::array<double, 2> radius = {0.2, 0.2};
  double accel_max = 3.0;
  double steer_rate_max = 4.0;

  std::array<double, 2> v_ref = {1.5, 1.5};
  std::array<double, 2> start_s = {0.0, 0.0};

  MergeWeights weights;
  // The collision cost support diameter is scale * (radius_0 + radius_1);
  // scale > 1 keeps equilibria clear of the contact distance itself.
  double collision_cost_scale = 1.5;

  double dt = 0.05;
  int horizon = 61;  // states per plan, so horizon - 1 control stages
  // Where the lanes meet; used for seeding and outcome classification.
  double merge_x = 0.0;
  double merge_y = 0.0;

  // Yielding-agent seed profile: brake then recover at brake_accel.
  double brake_accel = 1.5;
  int brake_steps = 16;
};

MergeConfig DefaultMergeConfig();

// Built scenario: fitted lanes, the joint game, and the initial state
// derived from start_s and v_ref.
struct MergeScenario {
  MergeConfig config;
  std::array<std::shared_ptr<const CenterlineSpline>, 2> lanes;
  std::array<double, 2> merge_s;  // arclength of the merge point per lane
  DynamicGame game;
  VecXd x0;
};

MergeScenario BuildMergeScenario(const MergeConfig& config);

// Two joint control seeds over horizon - 1 stages.  Mode 0: agent 0 holds
// speed while agent 1 brakes and recovers, reaching the merge point later;
// mode 1 swaps the roles.  Refining each seed yields one local equilibrium.
std::array<std::vector<VecXd>, 2> SeedModes(const MergeConfig& config);

// Solver options tuned for the merge game.  The truncated collision cost is
// concave inside its support, so the state Hessians are clamped positive
// semidefinite to keep the coupled value recursion stable.
IlqOptions MergeIlqOptions(double beta);

// Config round trip; missing keys take DefaultMergeConfig values.
ConfigMap MergeConfigToMap(const MergeConfig& config);
MergeConfig MergeConfigFromMap(const ConfigMap& map);
MergeConfig LoadMergeConfig(const std::string& path);
void SaveMergeConfig(const MergeConfig& config, const std::string& path);

}  // namespace mmg::merge

#endif  // MMG_MERGE_MERGE_H_
