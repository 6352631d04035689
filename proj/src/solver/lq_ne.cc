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

#include "mmg/solver/lq_ne.h"

#include <cmath>
#include <limits>

#include "mmg/core/check.h"

namespace mmg {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kSolveResidualTol = 1e-6;
constexpr double kSymmetryTol = 1e-8;  // relative to max |Z| entry
// A value quadratic beyond this magnitude signals a conjugate-point escape;
// past it the own-control eigenvalue floor drowns in reconstruction roundoff.
constexpr double kValueMagnitudeCap = 1e6;

double LogDetFromLlt(const Eigen::LLT<MatXd>& llt) {
  double logdet = 0.0;
  for (int k = 0; k < llt.matrixLLT().rows(); ++k)
    logdet += 2.0 * std::log(llt.matrixLLT()(k, k));
  return logdet;
}

LqNeSolution SolveCore(const LqApproximation& lq, double beta) {
  MMG_CHECK_MSG(beta > 0.0, "rationality beta must be positive");
  const bool stochastic = std::isfinite(beta);
  const int num_agents = lq.NumAgents();
  const int horizon = lq.Horizon();
  const int num_stages = horizon - 1;
  MMG_CHECK(num_stages >= 1);

  std::vector<int> dims(num_agents), offsets(num_agents);
  int m_total = 0;
  for (int i = 0; i < num_agents; ++i) {
    dims[i] = static_cast<int>(lq.cost[0][i].R[i].rows());
    offsets[i] = m_total;
    m_total += dims[i];
  }
  const int n = static_cast<int>(lq.A[0].rows());

  LqNeSolution sol;
  sol.beta = beta;
  sol.policies.resize(num_agents);
  sol.values.resize(num_agents);
  for (int i = 0; i < num_agents; ++i) {
    auto& pol = sol.policies[i];
    pol.beta = beta;
    pol.K.resize(num_stages);
    pol.k.resize(num_stages);
    pol.u_nom.resize(num_stages);
    pol.x_nom.resize(num_stages);
    pol.H.resize(num_stages);
    pol.Sigma.resize(num_stages);
    auto& val = sol.values[i];
    val.P.resize(horizon);
    val.p.resize(horizon);
    val.c.resize(horizon);
    val.x_nom = lq.nominal.states;
    val.P[horizon - 1] = lq.terminal[i].Q;
    val.p[horizon - 1] = lq.terminal[i].q;
    val.c[horizon - 1] = lq.terminal[i].value;
  }

  // Z/zeta/zc track each agent's value model at t+1 during the recursion.
  std::vector<MatXd> Z(num_agents);
  std::vector<VecXd> zeta(num_agents);
  std::vector<double> zc(num_agents);
  for (int i = 0; i < num_agents; ++i) {
    Z[i] = lq.terminal[i].Q;
    zeta[i] = lq.terminal[i].q;
    zc[i] = lq.terminal[i].value;
  }

  MatXd S(m_total, m_total);
  MatXd Y(m_total, n + 1);
  std::vector<MatXd> sigma(num_agents);
  std::vector<MatXd> H(num_agents);
  std::vector<double> logdet_h(num_agents);

  for (int t = num_stages - 1; t >= 0; --t) {
    const MatXd& A = lq.A[t];
    const std::vector<MatXd>& B = lq.B[t];

    // Stacked first-order conditions: row block i couples agent i's control
    // to every agent's control through Z_i.
    for (int i = 0; i < num_agents; ++i) {
      const MatXd BtZ = B[i].transpose() * Z[i];
      for (int j = 0; j < num_agents; ++j) {
        S.block(offsets[i], offsets[j], dims[i], dims[j]) = BtZ * B[j];
        if (i == j)
          S.block(offsets[i], offsets[i], dims[i], dims[i]) +=
              lq.cost[t][i].R[i];
      }
      Y.block(offsets[i], 0, dims[i], n) = BtZ * A;
      Y.block(offsets[i], n, dims[i], 1) =
          B[i].transpose() * zeta[i] + lq.cost[t][i].r[i];
    }
    if (!S.allFinite() || !Y.allFinite())
      throw NumericalError("value recursion diverged", t);

    // Own-control curvatures must stay positive definite for the solve and
    // the covariances; indefiniteness from concave state couplings is
    // shifted out and reported.
    for (int i = 0; i < num_agents; ++i) {
      MatXd h = Symmetrize(S.block(offsets[i], offsets[i], dims[i], dims[i]));
      sol.curvature_reg =
          std::max(sol.curvature_reg,
                   MakePositiveDefinite(&h, kOwnControlEigenFloor));
      S.block(offsets[i], offsets[i], dims[i], dims[i]) = h;
      H[i] = h;
      Eigen::LLT<MatXd> llt(h);
      MMG_CHECK(llt.info() == Eigen::Success);
      if (stochastic) {
        sigma[i] =
            llt.solve(MatXd::Identity(dims[i], dims[i])) / beta;
        logdet_h[i] = LogDetFromLlt(llt);
      } else {
        sigma[i] = MatXd::Zero(dims[i], dims[i]);
      }
    }

    Eigen::PartialPivLU<MatXd> lu(S);
    const MatXd PA = lu.solve(Y);
    const double residual =
        (S * PA - Y).cwiseAbs().maxCoeff() / (1.0 + Y.cwiseAbs().maxCoeff());
    if (!PA.allFinite() || residual > kSolveResidualTol)
      throw NumericalError("singular stacked stage system", t);

    // Closed-loop dynamics under all policy means.
    MatXd F = A;
    VecXd bvec = VecXd::Zero(n);
    for (int j = 0; j < num_agents; ++j) {
      F -= B[j] * PA.block(offsets[j], 0, dims[j], n);
      bvec -= B[j] * PA.block(offsets[j], n, dims[j], 1);
    }

    for (int i = 0; i < num_agents; ++i) {
      const MatXd Pi = PA.block(offsets[i], 0, dims[i], n);
      const VecXd ki = PA.block(offsets[i], n, dims[i], 1);
      auto& pol = sol.policies[i];
      pol.K[t] = Pi;
      pol.k[t] = ki;
      pol.x_nom[t] = lq.nominal.states[t];
      pol.u_nom[t] =
          lq.nominal.controls[t].segment(offsets[i], dims[i]);
      pol.H[t] = H[i];
      pol.Sigma[t] = sigma[i];
    }

    for (int i = 0; i < num_agents; ++i) {
      const LqStageCost& cost = lq.cost[t][i];

      MatXd Znew = cost.Q + F.transpose() * Z[i] * F;
      VecXd znew = cost.q + F.transpose() * (zeta[i] + Z[i] * bvec);
      double cnew = zc[i] + cost.value + zeta[i].dot(bvec) +
                    0.5 * bvec.dot(Z[i] * bvec);
      for (int j = 0; j < num_agents; ++j) {
        const MatXd Pj = PA.block(offsets[j], 0, dims[j], n);
        const VecXd kj = PA.block(offsets[j], n, dims[j], 1);
        Znew += Pj.transpose() * cost.R[j] * Pj;
        znew += Pj.transpose() * (cost.R[j] * kj - cost.r[j]);
        cnew += 0.5 * kj.dot(cost.R[j] * kj) - cost.r[j].dot(kj);
      }

      if (stochastic) {
        // Expectation of the stage-plus-value quadratic over the other
        // agents' policy noise.
        for (int j = 0; j < num_agents; ++j) {
          if (j == i) continue;
          cnew += 0.5 * (B[j].transpose() * Z[i] * B[j] * sigma[j]).trace() +
                  0.5 * (cost.R[j] * sigma[j]).trace();
        }
        // Log-partition of the agent's own Boltzmann minimization with
        // V = -(1/beta) log Z.
        cnew -= (0.5 * dims[i] * kLog2Pi -
                 0.5 * (dims[i] * std::log(beta) + logdet_h[i])) /
                beta;
      }

      const double magnitude = Znew.cwiseAbs().maxCoeff();
      if (!Znew.allFinite() || magnitude > kValueMagnitudeCap)
        throw NumericalError("value recursion diverged", t);
      // Roundoff asymmetry of F' Z F scales with the magnitude of Z, so the
      // guard is relative; a structural asymmetry bug shows up at O(1).
      const double asym = (Znew - Znew.transpose()).cwiseAbs().maxCoeff();
      if (asym > kSymmetryTol * std::max(1.0, magnitude))
        throw NumericalError("value quadratic lost symmetry", t);
      Z[i] = Symmetrize(Znew);
      zeta[i] = znew;
      zc[i] = cnew;

      auto& val = sol.values[i];
      val.P[t] = Z[i];
      val.p[t] = zeta[i];
      val.c[t] = zc[i];
    }
  }
  return sol;
}

}  // namespace

LqNeSolution SolveFeedbackNeLq(const LqApproximation& lq) {
  return SolveCore(lq, std::numeric_limits<double>::infinity());
}

LqNeSolution SolveMaxEntNeLq(const LqApproximation& lq, double beta) {
  MMG_CHECK_MSG(std::isfinite(beta) && beta > 0.0,
                "beta must be positive and finite");
  return SolveCore(lq, beta);
}

}  // namespace mmg
