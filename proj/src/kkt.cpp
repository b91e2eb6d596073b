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

#include "lagmpc/kkt.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace lagmpc
{

void HorizonWindow::validate(int N) const
{
  if (n1 < 0 || n1 >= n2 || n2 > N)
  {
    throw DimensionError("invalid window [" + std::to_string(n1) + ", " + std::to_string(n2) +
                         "] for horizon " + std::to_string(N));
  }
  if (is_last != (n2 == N))
  {
    throw DimensionError("window is_last flag inconsistent with n2 = " + std::to_string(n2));
  }
}

const Vector &SubproblemSpec::reference(int k) const
{
  const int idx = k - window.n1;
  if (idx < 0 || idx >= static_cast<int>(references.size()))
  {
    throw DimensionError("reference d_" + std::to_string(k) + " not part of the subproblem");
  }
  return references[static_cast<std::size_t>(idx)];
}

SubproblemSpec full_horizon_spec(const ProblemModel &model)
{
  const int N = model.horizon();
  SubproblemSpec spec;
  spec.window = HorizonWindow{1, 0, N, true};
  spec.x_bar_n1 = model.initial_state();
  spec.references.reserve(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k)
  {
    spec.references.push_back(model.reference(k));
  }
  spec.mu = 0.0;
  spec.terminal_modified = false;
  return spec;
}

WindowIterate WindowIterate::from_full(const Trajectory &z, const DualTrajectory &lambda,
                                       const HorizonWindow &window)
{
  WindowIterate w;
  w.n1 = window.n1;
  for (int k = window.n1; k <= window.n2; ++k)
  {
    w.x.push_back(z.x.at(static_cast<std::size_t>(k)));
  }
  for (int k = window.n1; k < window.n2; ++k)
  {
    w.u.push_back(z.u.at(static_cast<std::size_t>(k)));
  }
  for (int k = window.n1 - 1; k < window.n2; ++k)
  {
    w.lambda.push_back(lambda.at(k));
  }
  return w;
}

void WindowIterate::scatter(Trajectory &z, DualTrajectory &lambda) const
{
  for (int k = n1; k <= n2(); ++k)
  {
    z.x.at(static_cast<std::size_t>(k)) = x_at(k);
  }
  for (int k = n1; k < n2(); ++k)
  {
    z.u.at(static_cast<std::size_t>(k)) = u_at(k);
  }
  for (int k = n1 - 1; k < n2(); ++k)
  {
    lambda.at(k) = lambda_at(k);
  }
}

WindowIterate &WindowIterate::operator+=(const WindowIterate &step)
{
  if (step.n1 != n1 || step.x.size() != x.size() || step.u.size() != u.size() ||
      step.lambda.size() != lambda.size())
  {
    throw DimensionError("window iterate shapes differ");
  }
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    x[i] += step.x[i];
  }
  for (std::size_t i = 0; i < u.size(); ++i)
  {
    u[i] += step.u[i];
  }
  for (std::size_t i = 0; i < lambda.size(); ++i)
  {
    lambda[i] += step.lambda[i];
  }
  return *this;
}

WindowIterate WindowIterate::scaled(double alpha) const
{
  WindowIterate out = *this;
  for (auto &v : out.x)
  {
    v *= alpha;
  }
  for (auto &v : out.u)
  {
    v *= alpha;
  }
  for (auto &v : out.lambda)
  {
    v *= alpha;
  }
  return out;
}

double WindowIterate::norm() const
{
  double s = 0.0;
  for (const auto &v : x)
  {
    s += v.squaredNorm();
  }
  for (const auto &v : u)
  {
    s += v.squaredNorm();
  }
  for (const auto &v : lambda)
  {
    s += v.squaredNorm();
  }
  return std::sqrt(s);
}

int KktSystem::dimension() const { return window.length() * stage_width() + 2 * nx; }

int KktSystem::x_index(int k) const { return (k - window.n1) * stage_width() + nx; }

int KktSystem::u_index(int k) const { return (k - window.n1) * stage_width() + 2 * nx; }

int KktSystem::lambda_index(int j) const { return (j + 1 - window.n1) * stage_width(); }

int KktSystem::stage_of_index(int idx) const { return window.n1 + idx / stage_width(); }

BandedMatrix KktSystem::banded() const
{
  const int bw = stage_width() - 1;
  BandedMatrix K(dimension(), bw, bw);
  const auto put = [&K](int r0, int c0, const Matrix &m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
      for (Eigen::Index j = 0; j < m.cols(); ++j)
      {
        if (m(i, j) != 0.0)
        {
          K.add(r0 + static_cast<int>(i), c0 + static_cast<int>(j), m(i, j));
        }
      }
    }
  };
  const Matrix I = Matrix::Identity(nx, nx);
  const int n1 = window.n1;
  const int n2 = window.n2;

  // initial condition row
  put(lambda_index(n1 - 1), x_index(n1), I);
  put(x_index(n1), lambda_index(n1 - 1), I);

  for (int k = n1; k < n2; ++k)
  {
    const auto &b = stages[static_cast<std::size_t>(k - n1)];
    const int xi = x_index(k);
    const int ui = u_index(k);
    const int li = lambda_index(k);
    const int xn = x_index(k + 1);
    put(xi, xi, b.Q);
    put(ui, xi, b.S);
    put(xi, ui, b.S.transpose());
    put(ui, ui, b.R);
    put(li, xi, -b.A);
    put(li, ui, -b.B);
    put(li, xn, I);
    put(xi, li, -b.A.transpose());
    put(ui, li, -b.B.transpose());
    put(xn, li, I);
  }
  put(x_index(n2), x_index(n2), terminal_hessian);
  return K;
}

Matrix KktSystem::dense() const { return banded().to_dense(); }

Matrix KktSystem::dense_hessian() const
{
  const int n = primal_dimension();
  const int w = nx + nu;
  Matrix H = Matrix::Zero(n, n);
  for (int s = 0; s < window.length(); ++s)
  {
    const auto &b = stages[static_cast<std::size_t>(s)];
    H.block(s * w, s * w, nx, nx) = b.Q;
    H.block(s * w + nx, s * w, nu, nx) = b.S;
    H.block(s * w, s * w + nx, nx, nu) = b.S.transpose();
    H.block(s * w + nx, s * w + nx, nu, nu) = b.R;
  }
  H.bottomRightCorner(nx, nx) = terminal_hessian;
  return H;
}

Matrix KktSystem::dense_jacobian() const
{
  const int w = nx + nu;
  Matrix G = Matrix::Zero(dual_dimension(), primal_dimension());
  G.block(0, 0, nx, nx).setIdentity();
  for (int s = 0; s < window.length(); ++s)
  {
    const auto &b = stages[static_cast<std::size_t>(s)];
    const int row = (s + 1) * nx;
    G.block(row, s * w, nx, nx) = -b.A;
    G.block(row, s * w + nx, nx, nu) = -b.B;
    G.block(row, (s + 1) * w, nx, nx).setIdentity();
  }
  return G;
}

void KktSystem::factorize()
{
  if (lu_)
  {
    return;
  }
  try
  {
    lu_ = std::make_shared<const BandedLu>(banded(), 1e-12);
  }
  catch (const SingularMatrixError &e)
  {
    const int stage = stage_of_index(e.pivot_index());
    throw SingularKktError("singular KKT matrix in window " + std::to_string(window.index) +
                               " near stage " + std::to_string(stage),
                           window.index, stage);
  }
}

Vector KktSystem::solve(const Vector &b)
{
  factorize();
  return lu_->solve(b);
}

Vector KktSystem::multiply(const Vector &v) const { return banded().multiply(v); }

Vector KktSystem::pack(const WindowIterate &w) const
{
  Vector v(dimension());
  for (int j = window.n1 - 1; j < window.n2; ++j)
  {
    v.segment(lambda_index(j), nx) = w.lambda_at(j);
  }
  for (int k = window.n1; k <= window.n2; ++k)
  {
    v.segment(x_index(k), nx) = w.x_at(k);
  }
  for (int k = window.n1; k < window.n2; ++k)
  {
    v.segment(u_index(k), nu) = w.u_at(k);
  }
  return v;
}

WindowIterate KktSystem::unpack(const Vector &v) const
{
  if (v.size() != dimension())
  {
    throw DimensionError("vector does not match KKT dimension");
  }
  WindowIterate w;
  w.n1 = window.n1;
  for (int k = window.n1; k <= window.n2; ++k)
  {
    w.x.push_back(v.segment(x_index(k), nx));
  }
  for (int k = window.n1; k < window.n2; ++k)
  {
    w.u.push_back(v.segment(u_index(k), nu));
  }
  for (int j = window.n1 - 1; j < window.n2; ++j)
  {
    w.lambda.push_back(v.segment(lambda_index(j), nx));
  }
  return w;
}

namespace
{

void check_iterate(const ProblemModel &model, const SubproblemSpec &spec,
                   const WindowIterate &it)
{
  const auto &dims = model.dims();
  const auto &win = spec.window;
  win.validate(dims.N);
  if (spec.terminal_modified == win.is_last)
  {
    throw DimensionError("terminal modification must be on exactly for non-final windows");
  }
  if (it.n1 != win.n1 || it.n2() != win.n2 ||
      it.x.size() != static_cast<std::size_t>(win.length() + 1) ||
      it.lambda.size() != static_cast<std::size_t>(win.length() + 1))
  {
    throw DimensionError("iterate does not match window [" + std::to_string(win.n1) + ", " +
                         std::to_string(win.n2) + "]");
  }
  for (const auto &v : it.x)
  {
    if (v.size() != dims.nx)
      throw DimensionError("state size mismatch in window iterate");
  }
  for (const auto &v : it.u)
  {
    if (v.size() != dims.nu)
      throw DimensionError("control size mismatch in window iterate");
  }
  for (const auto &v : it.lambda)
  {
    if (v.size() != dims.nx)
      throw DimensionError("multiplier size mismatch in window iterate");
  }
  const std::size_t n_refs = static_cast<std::size_t>(win.length() + (win.is_last ? 0 : 1));
  if (spec.references.size() != n_refs)
  {
    throw DimensionError("subproblem carries " + std::to_string(spec.references.size()) +
                         " references, expected " + std::to_string(n_refs));
  }
  if (spec.x_bar_n1.size() != dims.nx)
  {
    throw DimensionError("initial state size mismatch");
  }
  if (spec.terminal_modified &&
      (spec.x0_n2.size() != dims.nx || spec.u0_n2.size() != dims.nu ||
       spec.lambda0_n2.size() != dims.nx))
  {
    throw DimensionError("terminal guess pieces have wrong size");
  }
}

void check_finite(const Matrix &m, int stage, const char *what)
{
  if (!m.allFinite())
  {
    throw std::domain_error(std::string("non-finite ") + what + " at stage " +
                            std::to_string(stage));
  }
}

struct Evaluated
{
  std::vector<StageLagrangianBlocks> stages;
  Vector terminal_grad;
  Matrix terminal_hess;
};

Evaluated evaluate(const ProblemModel &model, const SubproblemSpec &spec, const WindowIterate &it)
{
  check_iterate(model, spec, it);
  const auto &win = spec.window;
  Evaluated ev;
  ev.stages.reserve(static_cast<std::size_t>(win.length()));
  for (int k = win.n1; k < win.n2; ++k)
  {
    ev.stages.push_back(eval_lagrangian_blocks(model, k, it.x_at(k), it.u_at(k),
                                               it.lambda_at(k - 1), it.lambda_at(k),
                                               spec.reference(k)));
  }
  const Vector &xT = it.x_at(win.n2);
  const Vector &lamT = it.lambda_at(win.n2 - 1);
  if (spec.terminal_modified)
  {
    const auto t = eval_lagrangian_blocks(model, win.n2, xT, spec.u0_n2, lamT, spec.lambda0_n2,
                                          spec.reference(win.n2));
    const int nx = model.dims().nx;
    ev.terminal_grad = t.grad_x + spec.mu * (xT - spec.x0_n2);
    ev.terminal_hess = t.Q + spec.mu * Matrix::Identity(nx, nx);
  }
  else
  {
    const auto t = model.terminal_cost_derivatives(xT);
    ev.terminal_grad = t.gx + lamT;
    ev.terminal_hess = t.gxx;
  }
  return ev;
}

Vector gradient_from(const KktSystem &layout, const SubproblemSpec &spec, const WindowIterate &it,
                     const Evaluated &ev)
{
  const auto &win = spec.window;
  const int nx = layout.nx;
  const int nu = layout.nu;
  Vector g(layout.dimension());
  g.segment(layout.lambda_index(win.n1 - 1), nx) = it.x_at(win.n1) - spec.x_bar_n1;
  for (int k = win.n1; k < win.n2; ++k)
  {
    const auto &b = ev.stages[static_cast<std::size_t>(k - win.n1)];
    g.segment(layout.x_index(k), nx) = b.grad_x;
    g.segment(layout.u_index(k), nu) = b.grad_u;
    g.segment(layout.lambda_index(k), nx) = it.x_at(k + 1) - b.f;
  }
  g.segment(layout.x_index(win.n2), nx) = ev.terminal_grad;
  return g;
}

KktSystem layout_for(const ProblemModel &model, const SubproblemSpec &spec)
{
  KktSystem kkt;
  kkt.window = spec.window;
  kkt.nx = model.dims().nx;
  kkt.nu = model.dims().nu;
  return kkt;
}

} // namespace

double window_lagrangian(const ProblemModel &model, const SubproblemSpec &spec,
                         const WindowIterate &it)
{
  check_iterate(model, spec, it);
  const auto &win = spec.window;
  double L = -it.lambda_at(win.n1 - 1).dot(spec.x_bar_n1);
  for (int k = win.n1; k < win.n2; ++k)
  {
    const Vector &d = spec.reference(k);
    L += model.stage_cost(k, it.x_at(k), it.u_at(k), d) + it.lambda_at(k - 1).dot(it.x_at(k)) -
         it.lambda_at(k).dot(model.dynamics(k, it.x_at(k), it.u_at(k), d));
  }
  const Vector &xT = it.x_at(win.n2);
  L += it.lambda_at(win.n2 - 1).dot(xT);
  if (spec.terminal_modified)
  {
    const Vector &d = spec.reference(win.n2);
    L += model.stage_cost(win.n2, xT, spec.u0_n2, d) -
         spec.lambda0_n2.dot(model.dynamics(win.n2, xT, spec.u0_n2, d)) +
         0.5 * spec.mu * (xT - spec.x0_n2).squaredNorm();
  }
  else
  {
    L += model.terminal_cost(xT);
  }
  return L;
}

Vector kkt_gradient(const ProblemModel &model, const SubproblemSpec &spec,
                    const WindowIterate &iterate)
{
  const auto ev = evaluate(model, spec, iterate);
  return gradient_from(layout_for(model, spec), spec, iterate, ev);
}

KktSystem assemble_kkt(const ProblemModel &model, const SubproblemSpec &spec,
                       const WindowIterate &iterate)
{
  const auto ev = evaluate(model, spec, iterate);
  KktSystem kkt = layout_for(model, spec);
  kkt.stages.reserve(ev.stages.size());
  for (std::size_t s = 0; s < ev.stages.size(); ++s)
  {
    const auto &b = ev.stages[s];
    const int k = spec.window.n1 + static_cast<int>(s);
    check_finite(b.Q, k, "Q block");
    check_finite(b.S, k, "S block");
    check_finite(b.R, k, "R block");
    check_finite(b.A, k, "A block");
    check_finite(b.B, k, "B block");
    kkt.stages.push_back(KktStageBlocks{b.Q, b.S, b.R, b.A, b.B});
  }
  check_finite(ev.terminal_hess, spec.window.n2, "terminal Hessian");
  kkt.terminal_hessian = ev.terminal_hess;
  kkt.rhs = -gradient_from(kkt, spec, iterate, ev);
  if (!kkt.rhs.allFinite())
  {
    throw std::domain_error("non-finite Lagrangian gradient in window " +
                            std::to_string(spec.window.index));
  }
  return kkt;
}

WindowIterate solve_saddle(KktSystem &kkt)
{
  const BandedMatrix K = kkt.banded();
  Vector sol = kkt.solve(kkt.rhs);
  const double bound = 1e-10 * (1.0 + kkt.rhs.norm());
  Vector r = kkt.rhs - K.multiply(sol);
  if (!(r.norm() <= bound))
  {
    sol += kkt.solve(r);
    r = kkt.rhs - K.multiply(sol);
    if (!(r.norm() <= bound))
    {
      char msg[128];
      std::snprintf(msg, sizeof(msg), "KKT solve residual %.3e exceeds %.3e in window %d",
                    r.norm(), bound, kkt.window.index);
      throw SingularKktError(msg,
                             kkt.window.index, kkt.window.n1);
    }
  }
  return kkt.unpack(sol);
}

} // namespace lagmpc
