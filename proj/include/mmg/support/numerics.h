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

#ifndef MMG_SUPPORT_NUMERICS_H_
#define MMG_SUPPORT_NUMERICS_H_

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace mmg {

using VecXd = Eigen::VectorXd;
using MatXd = Eigen::MatrixXd;

// log(exp(a) + exp(b)) without overflow for large-magnitude inputs.
double LogAdd(double a, double b);

// log(sum_k exp(v_k)); v must be non-empty.
double LogSumExp(std::span<const double> v);

// Composite trapezoid rule over uniformly spaced samples with spacing dx.
double Trapezoid(std::span<const double> y, double dx);

// 0.5 * (M + M^T).
MatXd Symmetrize(const MatXd& m);

// Smallest eigenvalue of a symmetric matrix.
double MinEigSym(const MatXd& m);

// Shifts m by lambda * I so its minimum eigenvalue is at least floor.
// Returns the shift applied (0 when the matrix already satisfies the floor).
double MakePositiveDefinite(MatXd* m, double floor = 1e-6);

// Clamps the eigenvalues of a symmetric matrix from below, keeping its
// eigenvectors.  Directions already above the floor are untouched.  Returns
// the largest raise applied (0 when the spectrum already satisfies the
// floor).
double ClampEigenvalues(MatXd* m, double floor);

// Log density of N(mean, cov) at x.  cov must be positive definite.
double GaussianLogDensity(const VecXd& x, const VecXd& mean, const MatXd& cov);

}  // namespace mmg

#endif  // MMG_SUPPORT_NUMERICS_H_
