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
// Cubic-spline lane centerlines.  A CenterlineSpline is fit from waypoints,
// reparameterized by arclength, and queried by s for position, heading,
// curvature, and closest-point projection.

#ifndef MMG_MERGE_SPLINE_H_
#define MMG_MERGE_SPLINE_H_

#include <vector>

#include "mmg/support/numerics.h"

namespace mmg::merge {

// Natural cubic interpolant through (t_i, y_i) with strictly increasing t_i.
// Outside [t_front, t_back] the curve continues linearly with the boundary
// slope; queries never return non-finite values for finite arguments.
class CubicSpline1D {
 public:
  CubicSpline1D() = default;
  CubicSpline1D(std::vector<double> t, std::vector<double> y);

  double Value(double t) const;
  double Derivative(double t) const;
  double SecondDerivative(double t) const;

  double Front() const { return t_.front(); }
  double Back() const { return t_.back(); }

 private:
  int Interval(double t) const;

  std::vector<double> t_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at the knots
};

// Closest-point result.  n is the lateral offset of the query point, signed
// positive to the left of the tangent; |n| equals distance at the minimum.
struct Projection {
  double s = 0.0;
  double n = 0.0;
  double distance = 0.0;
};

// Planar centerline parameterized by arclength s with a constant-width lane
// around it.  Construction interpolates the waypoints with chord-length
// cubic splines, resamples the result at uniform arclength, and fits the
// signed curvature (positive turning left) as its own spline over the same
// knots.  The stored curvature stays within 5% of the curvature recomputed
// from the centerline derivatives wherever it is meaningfully nonzero;
// tests enforce this.
//
// Beyond [0, Length()] the centerline continues straight along the boundary
// tangent and curvature queries clamp to the boundary knot (natural end
// conditions pin the fitted curvature to zero there, matching the straight
// extension).
class CenterlineSpline {
 public:
  CenterlineSpline(const std::vector<double>& waypoint_x,
                   const std::vector<double>& waypoint_y, double half_width,
                   int knots = 513);

  double Length() const { return length_; }
  double HalfWidth() const { return half_width_; }

  Eigen::Vector2d Position(double s) const;
  // Unit tangent and its angle atan2(c_y', c_x').
  Eigen::Vector2d Tangent(double s) const;
  double Heading(double s) const;

  double Curvature(double s) const;
  double CurvatureDerivative(double s) const;
  // Curvature recomputed from the centerline derivatives, for consistency
  // checks against the stored curvature spline.
  double CurvatureFromDerivatives(double s) const;

  // Closest centerline point to p; hint_s >= 0 adds a warm-start candidate
  // for the refinement but the knot grid is always scanned.
  Projection Project(const Eigen::Vector2d& p, double hint_s = -1.0) const;

 private:
  CubicSpline1D x_;
  CubicSpline1D y_;
  CubicSpline1D kappa_;
  std::vector<double> knot_s_;
  double length_ = 0.0;
  double half_width_ = 0.0;
};

}  // namespace mmg::merge

#endif  // MMG_MERGE_SPLINE_H_
