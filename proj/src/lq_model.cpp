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

#include "lagmpc/lq_model.hpp"

#include <algorithm>
#include <string>

namespace lagmpc
{

namespace
{

Dimensions lq_dims(int N, const std::vector<LqStage> &stages)
{
  if (stages.empty())
  {
    throw DimensionError("linear-quadratic model needs at least one stage");
  }
  const auto &s = stages.front();
  return Dimensions{static_cast<int>(s.A.rows()), static_cast<int>(s.B.cols()), 1, N};
}

std::vector<Vector> zero_references(int N)
{
  return std::vector<Vector>(static_cast<std::size_t>(std::max(N, 0)), Vector::Zero(1));
}

} // namespace

LinearQuadraticModel::LinearQuadraticModel(int N, Vector x0, std::vector<LqStage> stages,
                                           LqTerminal terminal)
    : ProblemModel(lq_dims(N, stages), std::move(x0), zero_references(N)),
      stages_(std::move(stages)), terminal_(std::move(terminal))
{
  if (stages_.size() != 1 && stages_.size() != static_cast<std::size_t>(N))
  {
    throw DimensionError("expected 1 or N stage entries, got " + std::to_string(stages_.size()));
  }
  const int nx = dims_.nx;
  const int nu = dims_.nu;
  for (const auto &s : stages_)
  {
    if (s.Q.rows() != nx || s.Q.cols() != nx || s.R.rows() != nu || s.R.cols() != nu ||
        s.S.rows() != nu || s.S.cols() != nx || s.A.rows() != nx || s.A.cols() != nx ||
        s.B.rows() != nx || s.B.cols() != nu || s.q.size() != nx || s.r.size() != nu ||
        s.c.size() != nx)
    {
      throw DimensionError("inconsistent linear-quadratic stage data");
    }
  }
  if (terminal_.Q.rows() != nx || terminal_.Q.cols() != nx || terminal_.q.size() != nx)
  {
    throw DimensionError("inconsistent linear-quadratic terminal data");
  }
}

const LqStage &LinearQuadraticModel::stage(int k) const
{
  return stages_.size() == 1 ? stages_.front() : stages_.at(static_cast<std::size_t>(k));
}

double LinearQuadraticModel::stage_cost(int k, const Vector &x, const Vector &u,
                                        const Vector &) const
{
  const auto &s = stage(k);
  return 0.5 * x.dot(s.Q * x) + u.dot(s.S * x) + 0.5 * u.dot(s.R * u) + s.q.dot(x) + s.r.dot(u);
}

double LinearQuadraticModel::terminal_cost(const Vector &x) const
{
  return 0.5 * x.dot(terminal_.Q * x) + terminal_.q.dot(x);
}

Vector LinearQuadraticModel::dynamics(int k, const Vector &x, const Vector &u,
                                      const Vector &) const
{
  const auto &s = stage(k);
  return s.A * x + s.B * u + s.c;
}

StageCostDerivatives LinearQuadraticModel::stage_cost_derivatives(int k, const Vector &x,
                                                                  const Vector &u,
                                                                  const Vector &) const
{
  const auto &s = stage(k);
  StageCostDerivatives out;
  out.gx = s.Q * x + s.S.transpose() * u + s.q;
  out.gu = s.S * x + s.R * u + s.r;
  out.gxx = s.Q;
  out.gux = s.S;
  out.guu = s.R;
  return out;
}

TerminalCostDerivatives LinearQuadraticModel::terminal_cost_derivatives(const Vector &x) const
{
  return {terminal_.Q * x + terminal_.q, terminal_.Q};
}

DynamicsJacobians LinearQuadraticModel::dynamics_jacobians(int k, const Vector &, const Vector &,
                                                           const Vector &) const
{
  const auto &s = stage(k);
  return {s.A, s.B};
}

DynamicsCurvature LinearQuadraticModel::dynamics_curvature(int, const Vector &, const Vector &,
                                                           const Vector &, const Vector &) const
{
  const int nx = dims_.nx;
  const int nu = dims_.nu;
  return {Matrix::Zero(nx, nx), Matrix::Zero(nu, nx), Matrix::Zero(nu, nu)};
}

} // namespace lagmpc
