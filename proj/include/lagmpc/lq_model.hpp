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

/// Data of one linear-quadratic stage:
///   g_k = 1/2 [x;u]^T [[Q, S^T],[S, R]] [x;u] + q^T x + r^T u,
///   f_k = A x + B u + c.
struct LqStage
{
  Matrix Q, S, R, A, B;
  Vector q, r, c;
};

struct LqTerminal
{
  Matrix Q;
  Vector q;
};

/// Linear-quadratic dynamic program with stage-varying data. A single stage
/// entry is broadcast to all N stages.
class LinearQuadraticModel final : public ProblemModel
{
public:
  LinearQuadraticModel(int N, Vector x0, std::vector<LqStage> stages, LqTerminal terminal);

  const LqStage &stage(int k) const;

  double stage_cost(int k, const Vector &x, const Vector &u, const Vector &d) const override;
  double terminal_cost(const Vector &x) const override;
  Vector dynamics(int k, const Vector &x, const Vector &u, const Vector &d) const override;
  StageCostDerivatives stage_cost_derivatives(int k, const Vector &x, const Vector &u,
                                              const Vector &d) const override;
  TerminalCostDerivatives terminal_cost_derivatives(const Vector &x) const override;
  DynamicsJacobians dynamics_jacobians(int k, const Vector &x, const Vector &u,
                                       const Vector &d) const override;
  DynamicsCurvature dynamics_curvature(int k, const Vector &x, const Vector &u, const Vector &d,
                                       const Vector &lambda) const override;

private:
  std::vector<LqStage> stages_;
  LqTerminal terminal_;
};

} // namespace lagmpc
