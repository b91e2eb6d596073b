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

#include "lagmpc/problem.hpp"

#include <vector>

namespace lagmpc
{

struct OracleOptions
{
  double tol = 1e-10;
  int max_iter = 100;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;
};

struct OracleSolution
{
  Trajectory z_star;
  DualTrajectory lambda_star;
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Norm of the full-horizon Lagrangian gradient at (z, lambda).
double full_kkt_residual(const ProblemModel &model, const Trajectory &z,
                         const DualTrajectory &lambda);

/**
 * Damped Newton on the KKT conditions of the full problem, with backtracking
 * on the residual norm phi: a step alpha is taken once
 * phi(alpha) <= (1 - armijo * alpha) phi(0). x_0 is pinned to the initial
 * state after every update. On a stalled line search or max_iter the best
 * iterate is returned with converged = false; a singular KKT matrix throws.
 */
OracleSolution solve_full(const ProblemModel &model, const Trajectory &z0,
                          const DualTrajectory &lambda0, const OracleOptions &opts = {});

/// Zero primal-dual start with x_0 = xbar_0.
OracleSolution solve_full(const ProblemModel &model, const OracleOptions &opts = {});

struct AssumptionCertificate
{
  double gamma_H = 0.0;
  double reduced_hessian_min_eig = 0.0;
  bool sosc_passed = false;

  double gamma_C = 0.0;
  int t = 1;
  /// For k in [0, N - t]: max over t_k in [1, t] of lambda_min(Xi Xi^T).
  std::vector<double> controllability;
  double controllability_min = 0.0;
  std::vector<int> uncontrollable_stages;
  bool controllability_passed = false;

  bool passed() const { return sosc_passed && controllability_passed; }
};

/// Checks both certificates at the solution; a value passes when it is at
/// least the requested constant minus slack.
AssumptionCertificate verify_solution_assumptions(const ProblemModel &model,
                                                  const OracleSolution &sol, double gamma_H,
                                                  double gamma_C, int t, double slack = 0.0);

} // namespace lagmpc
