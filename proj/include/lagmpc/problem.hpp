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

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace lagmpc
{

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when vector/matrix sizes or stage indices do not match a contract.
class DimensionError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

struct Dimensions
{
  int nx = 1;
  int nu = 1;
  int nd = 1;
  int N = 3;

  /// Throws DimensionError unless all sizes are positive and N >= 3.
  void validate() const;
};

/// Primal trajectory: x_0..x_N and u_0..u_{N-1}.
struct Trajectory
{
  std::vector<Vector> x;
  std::vector<Vector> u;

  static Trajectory zeros(const Dimensions &dims);
  static Trajectory constant(const Dimensions &dims, double value);
  void validate(const Dimensions &dims) const;
};

/// Multipliers lambda_{-1}..lambda_{N-1}; lambda_{-1} lives in slot 0.
struct DualTrajectory
{
  std::vector<Vector> lambda;

  static DualTrajectory zeros(const Dimensions &dims);
  static DualTrajectory constant(const Dimensions &dims, double value);
  void validate(const Dimensions &dims) const;

  Vector &at(int k) { return lambda.at(static_cast<std::size_t>(k + 1)); }
  const Vector &at(int k) const { return lambda.at(static_cast<std::size_t>(k + 1)); }
};

struct StageCostDerivatives
{
  Vector gx;  // n_x
  Vector gu;  // n_u
  Matrix gxx; // n_x x n_x
  Matrix gux; // n_u x n_x
  Matrix guu; // n_u x n_u
};

struct TerminalCostDerivatives
{
  Vector gx;
  Matrix gxx;
};

struct DynamicsJacobians
{
  Matrix A; // n_x x n_x
  Matrix B; // n_x x n_u
};

/// Second-order contraction sum_i lambda_i * Hess f_i, split into blocks.
struct DynamicsCurvature
{
  Matrix xx;
  Matrix ux;
  Matrix uu;
};

/**
 * Discrete-time equality-constrained dynamic program
 *
 *   min  sum_{k<N} g_k(x_k, u_k; d_k) + g_N(x_N)
 *   s.t. x_{k+1} = f_k(x_k, u_k; d_k),  x_0 = xbar_0 = d_{-1}.
 *
 * Derivatives are exposed per stage block so that KKT assembly never needs
 * horizon-sized dense objects. Implementations must be immutable after
 * construction; every callback is a pure function of its arguments.
 */
class ProblemModel
{
public:
  explicit ProblemModel(Dimensions dims, Vector x0, std::vector<Vector> references);
  virtual ~ProblemModel() = default;

  const Dimensions &dims() const { return dims_; }
  int horizon() const { return dims_.N; }

  /// d_k for k in [-1, N-1]; d_{-1} is the initial state.
  const Vector &reference(int k) const;
  const Vector &initial_state() const { return references_.front(); }

  virtual double stage_cost(int k, const Vector &x, const Vector &u, const Vector &d) const = 0;
  virtual double terminal_cost(const Vector &x) const = 0;
  virtual Vector dynamics(int k, const Vector &x, const Vector &u, const Vector &d) const = 0;

  virtual StageCostDerivatives stage_cost_derivatives(int k, const Vector &x, const Vector &u,
                                                      const Vector &d) const = 0;
  virtual TerminalCostDerivatives terminal_cost_derivatives(const Vector &x) const = 0;
  virtual DynamicsJacobians dynamics_jacobians(int k, const Vector &x, const Vector &u,
                                               const Vector &d) const = 0;
  virtual DynamicsCurvature dynamics_curvature(int k, const Vector &x, const Vector &u,
                                               const Vector &d, const Vector &lambda) const = 0;

protected:
  Dimensions dims_;
  std::vector<Vector> references_; // slot 0 = d_{-1}
};

/// Gradient pieces and Hessian blocks of
/// L_k = g_k + lambda_{k-1}^T x_k - lambda_k^T f_k.
struct StageLagrangianBlocks
{
  Vector grad_x;
  Vector grad_u;
  Matrix Q; // xx
  Matrix S; // ux
  Matrix R; // uu
  Matrix A;
  Matrix B;
  Vector f; // f_k(x_k, u_k; d_k)
};

StageLagrangianBlocks eval_lagrangian_blocks(const ProblemModel &model, int k, const Vector &x,
                                             const Vector &u, const Vector &lambda_prev,
                                             const Vector &lambda, const Vector &d);

/// Convenience overload using the model's own reference d_k.
StageLagrangianBlocks eval_lagrangian_blocks(const ProblemModel &model, int k, const Vector &x,
                                             const Vector &u, const Vector &lambda_prev,
                                             const Vector &lambda);

/// Objective of the full problem evaluated along a trajectory.
double total_cost(const ProblemModel &model, const Trajectory &z);

} // namespace lagmpc
