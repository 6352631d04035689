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

#include "mmg/merge/spline.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "mmg/core/check.h"

namespace mmg::merge {
namespace {

bool AllFinite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

CubicSpline1D::CubicSpline1D(std::vector<double> t, std::vector<double> y)
    : t_(std::move(t)), y_(std::move(y)) {
  const int n = static_cast<int>(t_.size());
  MMG_CHECK_MSG(n >= 2, "spline needs at least two knots");
  MMG_CHECK(static_cast<int>(y_.size()) == n);
  MMG_CHECK_MSG(AllFinite(t_) && AllFinite(y_), "spline knots must be finite");
  for (int i = 1; i < n; ++i)
    MMG_CHECK_MSG(t_[i] > t_[i - 1], "knot abscissae must strictly increase");

  // Natural end conditions: zero second derivative at both boundary knots.
  // Interior second derivatives solve a tridiagonal system (Thomas sweep).
  m_.assign(n, 0.0);
  if (n > 2) {
    std::vector<double> diag(n - 2), rhs(n - 2), upper(n - 2);
    for (int i = 1; i + 1 < n; ++i) {
      const double h0 = t_[i] - t_[i - 1];
      const double h1 = t_[i + 1] - t_[i];
      diag[i - 1] = 2.0 * (h0 + h1);
      upper[i - 1] = h1;
      rhs[i - 1] =
          6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (int i = 1; i + 1 < n - 1; ++i) {
      const double lower = t_[i + 1] - t_[i];
      const double w = lower / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    for (int i = n - 3; i >= 0; --i) {
      const double num =
          rhs[i] - (i + 1 < n - 2 ? upper[i] * m_[i + 2] : 0.0);
      m_[i + 1] = num / diag[i];
    }
  }
}

int CubicSpline1D::Interval(double t) const {
  const int n = static_cast<int>(t_.size());
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  int i = static_cast<int>(it - t_.begin()) - 1;
  return std::clamp(i, 0, n - 2);
}

double CubicSpline1D::Value(double t) const {
  MMG_CHECK(std::isfinite(t));
  if (t <= t_.front())
    return y_.front() + Derivative(t_.front()) * (t - t_.front());
  if (t >= t_.back())
    return y_.back() + Derivative(t_.back()) * (t - t_.back());
  const int i = Interval(t);
  const double h = t_[i + 1] - t_[i];
  const double a = (t_[i + 1] - t) / h;
  const double b = (t - t_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h /
             6.0;
}

double CubicSpline1D::Derivative(double t) const {
  MMG_CHECK(std::isfinite(t));
  const double tc = std::clamp(t, t_.front(), t_.back());
  const int i = Interval(tc);
  const double h = t_[i + 1] - t_[i];
  const double a = (t_[i + 1] - tc) / h;
  const double b = (tc - t_[i]) / h;
  return (y_[i + 1] - y_[i]) / h -
         (3.0 * a * a - 1.0) * h * m_[i] / 6.0 +
         (3.0 * b * b - 1.0) * h * m_[i + 1] / 6.0;
}

double CubicSpline1D::SecondDerivative(double t) const {
  MMG_CHECK(std::isfinite(t));
  if (t < t_.front() || t > t_.back()) return 0.0;
  const int i = Interval(t);
  const double h = t_[i + 1] - t_[i];
  const double a = (t_[i + 1] - t) / h;
  const double b = (t - t_[i]) / h;
  return a * m_[i] + b * m_[i + 1];
}

CenterlineSpline::CenterlineSpline(const std::vector<double>& waypoint_x,
                                   const std::vector<double>& waypoint_y,
                                   double half_width, int knots)
    : half_width_(half_width) {
  const int n = static_cast<int>(waypoint_x.size());
  MMG_CHECK_MSG(n >= 2, "centerline needs at least two waypoints");
  MMG_CHECK(static_cast<int>(waypoint_y.size()) == n);
  MMG_CHECK(half_width > 0.0 && std::isfinite(half_width));
  MMG_CHECK(knots >= 8);

  // Chord-length parameter: close to arclength for dense waypoints, exact
  // for collinear ones.
  std::vector<double> chord(n, 0.0);
  for (int i = 1; i < n; ++i) {
    const double d = std::hypot(waypoint_x[i] - waypoint_x[i - 1],
                                waypoint_y[i] - waypoint_y[i - 1]);
    MMG_CHECK_MSG(d > 1e-12, "consecutive waypoints must be distinct");
    chord[i] = chord[i - 1] + d;
  }
  const CubicSpline1D cx(chord, waypoint_x);
  const CubicSpline1D cy(chord, waypoint_y);

  // Cumulative arclength of the chord-parameterized fit on a dense grid.
  const int samples = std::max(1025, 64 * (n - 1) + 1);
  std::vector<double> ts(samples), arc(samples);
  const double t_total = chord.back();
  double prev_speed = std::hypot(cx.Derivative(0.0), cy.Derivative(0.0));
  ts[0] = 0.0;
  arc[0] = 0.0;
  for (int k = 1; k < samples; ++k) {
    ts[k] = t_total * k / (samples - 1);
    const double speed = std::hypot(cx.Derivative(ts[k]), cy.Derivative(ts[k]));
    MMG_CHECK_MSG(speed > 1e-9, "centerline fit degenerated to a cusp");
    arc[k] = arc[k - 1] + 0.5 * (prev_speed + speed) * (ts[k] - ts[k - 1]);
    prev_speed = speed;
  }
  length_ = arc.back();
  MMG_CHECK(std::isfinite(length_) && length_ > 0.0);

  // Resample at uniform arclength and refit, so s is the curve parameter.
  knot_s_.resize(knots);
  std::vector<double> rx(knots), ry(knots);
  for (int j = 0; j < knots; ++j) {
    const double s = length_ * j / (knots - 1);
    const auto it = std::upper_bound(arc.begin(), arc.end(), s);
    const int k = std::clamp(static_cast<int>(it - arc.begin()) - 1, 0,
                             samples - 2);
    const double span = arc[k + 1] - arc[k];
    const double w = span > 0.0 ? (s - arc[k]) / span : 0.0;
    const double t = ts[k] + w * (ts[k + 1] - ts[k]);
    knot_s_[j] = s;
    rx[j] = cx.Value(t);
    ry[j] = cy.Value(t);
  }
  x_ = CubicSpline1D(knot_s_, rx);
  y_ = CubicSpline1D(knot_s_, ry);

  std::vector<double> curv(knots);
  for (int j = 0; j < knots; ++j) curv[j] = CurvatureFromDerivatives(knot_s_[j]);
  kappa_ = CubicSpline1D(knot_s_, curv);
}

Eigen::Vector2d CenterlineSpline::Position(double s) const {
  return {x_.Value(s), y_.Value(s)};
}

Eigen::Vector2d CenterlineSpline::Tangent(double s) const {
  Eigen::Vector2d d(x_.Derivative(s), y_.Derivative(s));
  const double norm = d.norm();
  MMG_CHECK_MSG(norm > 1e-9, "degenerate centerline tangent");
  return d / norm;
}

double CenterlineSpline::Heading(double s) const {
  return std::atan2(y_.Derivative(s), x_.Derivative(s));
}

double CenterlineSpline::Curvature(double s) const {
  return kappa_.Value(std::clamp(s, 0.0, length_));
}

double CenterlineSpline::CurvatureDerivative(double s) const {
  if (s < 0.0 || s > length_) return 0.0;
  return kappa_.Derivative(s);
}

double CenterlineSpline::CurvatureFromDerivatives(double s) const {
  const double xp = x_.Derivative(s);
  const double yp = y_.Derivative(s);
  const double xpp = x_.SecondDerivative(s);
  const double ypp = y_.SecondDerivative(s);
  const double speed_sq = xp * xp + yp * yp;
  MMG_CHECK_MSG(speed_sq > 1e-12, "degenerate centerline tangent");
  return (xp * ypp - yp * xpp) / (speed_sq * std::sqrt(speed_sq));
}

Projection CenterlineSpline::Project(const Eigen::Vector2d& p,
                                     double hint_s) const {
  MMG_CHECK(p.allFinite());

  // Coarse scan over the knot grid, then Newton refinement of the
  // perpendicularity condition (c(s) - p) . c'(s) = 0.
  double best_s = knot_s_.front();
  double best_d2 = (Position(best_s) - p).squaredNorm();
  for (const double s : knot_s_) {
    const double d2 = (Position(s) - p).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best_s = s;
    }
  }
  if (hint_s >= 0.0) {
    const double d2 = (Position(hint_s) - p).squaredNorm();
    if (d2 < best_d2) best_s = hint_s;
  }

  const double spacing = length_ / (static_cast<int>(knot_s_.size()) - 1);
  double s = std::clamp(best_s, 0.0, length_);
  for (int iter = 0; iter < 30; ++iter) {
    const Eigen::Vector2d diff = Position(s) - p;
    const Eigen::Vector2d d1(x_.Derivative(s), y_.Derivative(s));
    const Eigen::Vector2d d2(x_.SecondDerivative(s), y_.SecondDerivative(s));
    const double grad = diff.dot(d1);
    const double hess = d1.squaredNorm() + diff.dot(d2);
    if (!(hess > 1e-12)) break;
    // Inside the knot spacing the scan already brackets the minimum; larger
    // Newton steps would hop to a different branch.
    const double step = std::clamp(grad / hess, -spacing, spacing);
    s = std::clamp(s - step, 0.0, length_);
    if (std::abs(step) < 1e-12 * std::max(1.0, length_)) break;
  }

  // The straight extensions beyond either end are linear, so their closest
  // points have closed forms; keep whichever candidate lands outside.
  for (const double end : {0.0, length_}) {
    const Eigen::Vector2d d1(x_.Derivative(end), y_.Derivative(end));
    const Eigen::Vector2d c0 = Position(end);
    const double s_ext = end + d1.dot(p - c0) / d1.squaredNorm();
    const bool outside = end == 0.0 ? s_ext < 0.0 : s_ext > length_;
    if (outside &&
        (Position(s_ext) - p).squaredNorm() < (Position(s) - p).squaredNorm())
      s = s_ext;
  }

  Projection out;
  out.s = s;
  const Eigen::Vector2d tangent = Tangent(s);
  const Eigen::Vector2d d = p - Position(s);
  out.n = tangent.x() * d.y() - tangent.y() * d.x();
  out.distance = d.norm();
  return out;
}

}  // namespace mmg::merge
