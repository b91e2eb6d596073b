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

#include "lagmpc/problem.hpp"

#include <string>

namespace lagmpc
{

namespace
{

void require_size(const Vector &v, int n, const char *what)
{
  if (v.size() != n)
  {
    throw DimensionError(std::string(what) + ": expected size " + std::to_string(n) + ", got " +
                         std::to_string(v.size()));
  }
}

void require_shape(const Matrix &m, int rows, int cols, const char *what)
{
  if (m.rows() != rows || m.cols() != cols)
  {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

} // namespace

void Dimensions::validate() const
{
  if (nx <= 0 || nu <= 0 || nd <= 0)
  {
    throw DimensionError("dimensions must be strictly positive");
  }
  if (N < 3)
  {
    throw DimensionError("horizon N must be at least 3, got " + std::to_string(N));
  }
}

Trajectory Trajectory::zeros(const Dimensions &dims) { return constant(dims, 0.0); }

Trajectory Trajectory::constant(const Dimensions &dims, double value)
{
  Trajectory z;
  z.x.assign(static_cast<std::size_t>(dims.N + 1), Vector::Constant(dims.nx, value));
  z.u.assign(static_cast<std::size_t>(dims.N), Vector::Constant(dims.nu, value));
  return z;
}

void Trajectory::validate(const Dimensions &dims) const
{
  if (x.size() != static_cast<std::size_t>(dims.N + 1) ||
      u.size() != static_cast<std::size_t>(dims.N))
  {
    throw DimensionError("trajectory must hold N+1 states and N controls");
  }
  for (const auto &xk : x)
  {
    require_size(xk, dims.nx, "state");
  }
  for (const auto &uk : u)
  {
    require_size(uk, dims.nu, "control");
  }
}

DualTrajectory DualTrajectory::zeros(const Dimensions &dims) { return constant(dims, 0.0); }

DualTrajectory DualTrajectory::constant(const Dimensions &dims, double value)
{
  DualTrajectory l;
  l.lambda.assign(static_cast<std::size_t>(dims.N + 1), Vector::Constant(dims.nx, value));
  return l;
}

void DualTrajectory::validate(const Dimensions &dims) const
{
  if (lambda.size() != static_cast<std::size_t>(dims.N + 1))
  {
    throw DimensionError("dual trajectory must hold N+1 multipliers");
  }
  for (const auto &l : lambda)
  {
    require_size(l, dims.nx, "multiplier");
  }
}

ProblemModel::ProblemModel(Dimensions dims, Vector x0, std::vector<Vector> references)
    : dims_(dims)
{
  dims_.validate();
  require_size(x0, dims_.nx, "initial state");
  if (references.size() != static_cast<std::size_t>(dims_.N))
  {
    throw DimensionError("expected N references d_0..d_{N-1}");
  }
  references_.reserve(references.size() + 1);
  references_.push_back(std::move(x0));
  for (auto &d : references)
  {
    require_size(d, dims_.nd, "reference");
    references_.push_back(std::move(d));
  }
}

const Vector &ProblemModel::reference(int k) const
{
  if (k < -1 || k > dims_.N - 1)
  {
    throw DimensionError("reference index " + std::to_string(k) + " out of range");
  }
  return references_[static_cast<std::size_t>(k + 1)];
}

StageLagrangianBlocks eval_lagrangian_blocks(const ProblemModel &model, int k, const Vector &x,
                                             const Vector &u, const Vector &lambda_prev,
                                             const Vector &lambda, const Vector &d)
{
  const auto &dims = model.dims();
  if (k < 0 || k > dims.N - 1)
  {
    throw DimensionError("stage " + std::to_string(k) + " out of range for Lagrangian blocks");
  }
  require_size(x, dims.nx, "state");
  require_size(u, dims.nu, "control");
  require_size(lambda_prev, dims.nx, "multiplier");
  require_size(lambda, dims.nx, "multiplier");

  const auto cost = model.stage_cost_derivatives(k, x, u, d);
  const auto jac = model.dynamics_jacobians(k, x, u, d);
  const auto curv = model.dynamics_curvature(k, x, u, d, lambda);
  require_shape(jac.A, dims.nx, dims.nx, "A_k");
  require_shape(jac.B, dims.nx, dims.nu, "B_k");
  require_shape(cost.gxx, dims.nx, dims.nx, "cost xx block");
  require_shape(cost.gux, dims.nu, dims.nx, "cost ux block");
  require_shape(cost.guu, dims.nu, dims.nu, "cost uu block");

  StageLagrangianBlocks out;
  out.grad_x = cost.gx + lambda_prev - jac.A.transpose() * lambda;
  out.grad_u = cost.gu - jac.B.transpose() * lambda;
  out.Q = cost.gxx - curv.xx;
  out.S = cost.gux - curv.ux;
  out.R = cost.guu - curv.uu;
  out.f = model.dynamics(k, x, u, d);
  require_size(out.f, dims.nx, "dynamics output");
  out.A = jac.A;
  out.B = jac.B;
  return out;
}

StageLagrangianBlocks eval_lagrangian_blocks(const ProblemModel &model, int k, const Vector &x,
                                             const Vector &u, const Vector &lambda_prev,
                                             const Vector &lambda)
{
  return eval_lagrangian_blocks(model, k, x, u, lambda_prev, lambda, model.reference(k));
}

double total_cost(const ProblemModel &model, const Trajectory &z)
{
  z.validate(model.dims());
  double sum = 0.0;
  for (int k = 0; k < model.horizon(); ++k)
  {
    const auto uk = static_cast<std::size_t>(k);
    sum += model.stage_cost(k, z.x[uk], z.u[uk], model.reference(k));
  }
  return sum + model.terminal_cost(z.x.back());
}

} // namespace lagmpc
