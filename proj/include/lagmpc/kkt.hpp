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

#include "lagmpc/banded_lu.hpp"
#include "lagmpc/problem.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace lagmpc
{

/// One receding horizon [n1, n2]; index is 1-based.
struct HorizonWindow
{
  int index = 1;
  int n1 = 0;
  int n2 = 0;
  bool is_last = true;

  int length() const { return n2 - n1; }
  void validate(int N) const;
};

/// Horizon-truncated problem data: initial condition, references, and the
/// pieces of the modified terminal objective
///   g(x, u0; d) - lambda0^T f(x, u0; d) + mu/2 |x - x0|^2
/// used when the window does not reach the end of the full horizon.
struct SubproblemSpec
{
  HorizonWindow window;
  Vector x_bar_n1;
  /// d_{n1}..d_{n2}; d_{n2} is present only when terminal_modified.
  std::vector<Vector> references;
  Vector x0_n2;
  Vector u0_n2;
  Vector lambda0_n2;
  double mu = 0.0;
  bool terminal_modified = false;

  const Vector &reference(int k) const;
};

/// The full problem as a single window [0, N] with the plain terminal cost.
SubproblemSpec full_horizon_spec(const ProblemModel &model);

/// Primal-dual iterate restricted to a window: x_{n1..n2}, u_{n1..n2-1},
/// lambda_{n1-1..n2-1}.
struct WindowIterate
{
  int n1 = 0;
  std::vector<Vector> x;
  std::vector<Vector> u;
  std::vector<Vector> lambda;

  int n2() const { return n1 + static_cast<int>(u.size()); }

  Vector &x_at(int k) { return x.at(static_cast<std::size_t>(k - n1)); }
  const Vector &x_at(int k) const { return x.at(static_cast<std::size_t>(k - n1)); }
  Vector &u_at(int k) { return u.at(static_cast<std::size_t>(k - n1)); }
  const Vector &u_at(int k) const { return u.at(static_cast<std::size_t>(k - n1)); }
  Vector &lambda_at(int k) { return lambda.at(static_cast<std::size_t>(k - n1 + 1)); }
  const Vector &lambda_at(int k) const { return lambda.at(static_cast<std::size_t>(k - n1 + 1)); }

  static WindowIterate from_full(const Trajectory &z, const DualTrajectory &lambda,
                                 const HorizonWindow &window);
  /// Writes the window's entries into full-horizon trajectories.
  void scatter(Trajectory &z, DualTrajectory &lambda) const;

  WindowIterate &operator+=(const WindowIterate &step);
  WindowIterate scaled(double alpha) const;
  double norm() const;
};

/// Singular or numerically rank-deficient saddle matrix.
class SingularKktError : public std::runtime_error
{
public:
  SingularKktError(const std::string &what, int window_index, int stage)
      : std::runtime_error(what), window_index_(window_index), stage_(stage)
  {
  }
  int window_index() const { return window_index_; }
  int stage() const { return stage_; }

private:
  int window_index_;
  int stage_;
};

/// Per-stage blocks of the window Hessian and constraint Jacobian.
struct KktStageBlocks
{
  Matrix Q, S, R; // S is n_u x n_x
  Matrix A, B;
};

/**
 * Saddle-point system [[H, G^T], [G, 0]] of one window, with rhs
 * -(grad_z L; grad_lambda L).
 *
 * Unknowns are interleaved by stage as
 *   (lambda_{k-1}, x_k, u_k) for k = n1..n2-1, then (lambda_{n2-1}, x_{n2}),
 * which makes the matrix banded with half-bandwidth 2 n_x + n_u - 1.
 */
class KktSystem
{
public:
  HorizonWindow window;
  int nx = 0;
  int nu = 0;
  std::vector<KktStageBlocks> stages; // k = n1..n2-1
  Matrix terminal_hessian;
  Vector rhs;

  int stage_width() const { return 2 * nx + nu; }
  int dimension() const;
  int primal_dimension() const { return window.length() * (nx + nu) + nx; }
  int dual_dimension() const { return (window.length() + 1) * nx; }

  int x_index(int k) const;
  int u_index(int k) const;
  int lambda_index(int j) const;

  /// Stage owning an interleaved row/column index.
  int stage_of_index(int idx) const;

  BandedMatrix banded() const;
  Matrix dense() const;
  /// H and G in stage-major ordering (x_{n1}, u_{n1}, ..., x_{n2}) and
  /// (lambda_{n1-1}, ..., lambda_{n2-1}).
  Matrix dense_hessian() const;
  Matrix dense_jacobian() const;

  /// Factorizes on first use; throws SingularKktError.
  void factorize();
  bool factorized() const { return lu_ != nullptr; }
  Vector solve(const Vector &b);

  Vector multiply(const Vector &v) const;
  Vector pack(const WindowIterate &w) const;
  WindowIterate unpack(const Vector &v) const;

  double residual_norm() const { return rhs.norm(); }

private:
  std::shared_ptr<const BandedLu> lu_;
};

/// Window Lagrangian
///   sum_k L_k + L_{n2}(terminal) - lambda_{n1-1}^T xbar_{n1}.
double window_lagrangian(const ProblemModel &model, const SubproblemSpec &spec,
                         const WindowIterate &iterate);

/// Evaluates every block at the iterate and forms the Newton system.
KktSystem assemble_kkt(const ProblemModel &model, const SubproblemSpec &spec,
                       const WindowIterate &iterate);

/// Gradient of the window Lagrangian in interleaved ordering.
Vector kkt_gradient(const ProblemModel &model, const SubproblemSpec &spec,
                    const WindowIterate &iterate);

/// Newton direction (dz, dlambda) from the saddle system. Guarantees
/// |K sol - rhs| <= 1e-10 (1 + |rhs|) or throws SingularKktError.
WindowIterate solve_saddle(KktSystem &kkt);

} // namespace lagmpc
