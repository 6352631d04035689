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

#include "mmg/support/numerics.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmg/core/check.h"

namespace mmg {

double LogAdd(double a, double b) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  return hi + std::log1p(std::exp(lo - hi));
}

double LogSumExp(std::span<const double> v) {
  MMG_CHECK(!v.empty());
  const double hi = *std::max_element(v.begin(), v.end());
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

double Trapezoid(std::span<const double> y, double dx) {
  MMG_CHECK(y.size() >= 2);
  double acc = 0.5 * (y.front() + y.back());
  for (size_t k = 1; k + 1 < y.size(); ++k) acc += y[k];
  return acc * dx;
}

MatXd Symmetrize(const MatXd& m) { return 0.5 * (m + m.transpose()); }

double MinEigSym(const MatXd& m) {
  Eigen::SelfAdjointEigenSolver<MatXd> es(m, Eigen::EigenvaluesOnly);
  MMG_CHECK(es.info() == Eigen::Success);
  return es.eigenvalues().minCoeff();
}

double MakePositiveDefinite(MatXd* m, double floor) {
  const double lo = MinEigSym(*m);
  if (lo >= floor) return 0.0;
  const double shift = floor - lo;
  *m += shift * MatXd::Identity(m->rows(), m->cols());
  return shift;
}

double ClampEigenvalues(MatXd* m, double floor) {
  Eigen::SelfAdjointEigenSolver<MatXd> es(*m);
  const double lo = es.eigenvalues().minCoeff();
  if (lo >= floor) return 0.0;
  const VecXd clamped = es.eigenvalues().cwiseMax(floor);
  *m = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
  return floor - lo;
}

double GaussianLogDensity(const VecXd& x, const VecXd& mean,
                          const MatXd& cov) {
  MMG_CHECK(x.size() == mean.size() && cov.rows() == x.size() &&
            cov.cols() == x.size());
  Eigen::LLT<MatXd> llt(cov);
  MMG_CHECK_MSG(llt.info() == Eigen::Success,
                "covariance not positive definite");
  const VecXd d = x - mean;
  const VecXd z = llt.matrixL().solve(d);
  double logdet = 0.0;
  for (int k = 0; k < cov.rows(); ++k)
    logdet += 2.0 * std::log(llt.matrixL()(k, k));
  constexpr double kLog2Pi = 1.8378770664093454835606594728112;
  return -0.5 * (z.squaredNorm() + logdet + x.size() * kLog2Pi);
}

}  // namespace mmg
