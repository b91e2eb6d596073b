/*
 Copyright 2026 The lagmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include "lagmpc/kkt.hpp"
#include "lagmpc/problem.hpp"

#include <map>
#include <tuple>
#include <vector>

namespace lagmpc
{

/// Orthonormal null-space basis Z of G and the projected Hessian Z^T H Z.
struct ReducedHessian
{
  Matrix Z;
  Matrix reduced;
  double min_eig = 0.0;
};

/// Dense route: QR of G^T, then a symmetric eigen-solve. Intended for
/// windows with a few hundred stages at most.
ReducedHessian reduced_hessian(const KktSystem &kkt);
double reduced_hessian_min_eig(const KktSystem &kkt);

/**
 * Same eigenvalue without forming Z. For a shift gamma, Z^T (H - gamma I) Z is
 * positive definite exactly when the backward Riccati recursion of the
 * shifted stage problem keeps every R_k - gamma I + B_k^T P_{k+1} B_k positive
 * definite; gamma is bisected to abs_tol.
 */
double reduced_hessian_min_eig_structured(const KktSystem &kkt, double abs_tol = 1e-12);

/// Xi_{k,t} = [B_{k+t-1}, A_{k+t-1} B_{k+t-2}, ..., A_{k+t-1}...A_{k+1} B_k].
Matrix controllability_matrix(const ProblemModel &model, const Trajectory &z, int k, int t);

/// lambda_min(Xi Xi^T).
double controllability_min_eig(const Matrix &xi);

/// Sufficient terminal weight 16 U (U^{6t} - U^{4t}) / gamma_C^2 for SOSC of
/// the truncated subproblems. Diagnostic only.
double mu_threshold(double upsilon, double gamma_C, int t);

struct LineFit
{
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y ~ intercept + slope x. Needs two distinct x.
LineFit fit_line(const std::vector<double> &x, const std::vector<double> &y);

/// (i, j, part) with part 1 = primal response to primal input, 2 = primal
/// response to dual input, 3 = dual response to dual input. Stage indices are
/// absolute; j = n1 - 1 denotes the initial-condition slot.
using DecayBlockKey = std::tuple<int, int, int>;

struct DecayFitReport
{
  std::map<DecayBlockKey, double> block_norms;
  /// envelope[o] = largest block norm at offset o, o = 0..max_offset.
  std::vector<double> envelope;
  double fitted_rho = 0.0;
  double fitted_logK = 0.0;
  double r_squared = 0.0;
};

/// Offset of a block as used by the decay bound of the KKT inverse.
int decay_offset(int i, int j, int part, int n1);

/**
 * Probes K^{-1} with unit right-hand sides on every stage block, records the
 * exact 2-norm of each response block with offset <= max_offset, and fits
 * log(envelope) against the offset.
 */
DecayFitReport kkt_inverse_decay_probe(KktSystem &kkt, int max_offset);

} // namespace lagmpc
