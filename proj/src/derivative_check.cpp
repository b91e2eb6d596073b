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

#include "lagmpc/derivative_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lagmpc
{

namespace
{

double fd_step(double v)
{
  static const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
  return h0 * std::max(1.0, std::abs(v));
}

double rel_error(const Matrix &analytic, const Matrix &fd)
{
  if (analytic.rows() != fd.rows() || analytic.cols() != fd.cols())
  {
    return std::numeric_limits<double>::infinity();
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i < fd.rows(); ++i)
  {
    for (Eigen::Index j = 0; j < fd.cols(); ++j)
    {
      const double e = std::abs(analytic(i, j) - fd(i, j)) / std::max(1.0, std::abs(fd(i, j)));
      if (!std::isfinite(e))
      {
        return std::numeric_limits<double>::infinity();
      }
      worst = std::max(worst, e);
    }
  }
  return worst;
}

/// Central-difference Jacobian of fn: R^n -> R^m at v.
template <class Fn>
Matrix fd_jacobian(Fn &&fn, const Vector &v)
{
  const Vector f0 = fn(v);
  Matrix J(f0.size(), v.size());
  Vector vp = v;
  for (Eigen::Index j = 0; j < v.size(); ++j)
  {
    const double h = fd_step(v(j));
    vp(j) = v(j) + h;
    const Vector fp = fn(vp);
    vp(j) = v(j) - h;
    const Vector fm = fn(vp);
    vp(j) = v(j);
    J.col(j) = (fp - fm) / (2.0 * h);
  }
  return J;
}

struct Accumulator
{
  DerivativeBlockResult result;

  explicit Accumulator(std::string kind) { result.kind = std::move(kind); }

  void add(int stage, double err)
  {
    if (result.worst_stage < 0 || !(err <= result.max_rel_error))
    {
      result.max_rel_error = err;
      result.worst_stage = stage;
    }
  }
};

} // namespace

const DerivativeBlockResult &DerivativeReport::block(const std::string &kind) const
{
  for (const auto &b : blocks)
  {
    if (b.kind == kind)
    {
      return b;
    }
  }
  throw std::out_of_range("no derivative block '" + kind + "'");
}

std::string DerivativeReport::summary() const
{
  std::ostringstream os;
  os.precision(3);
  for (const auto &b : blocks)
  {
    os << b.kind << ": max rel err " << std::scientific << b.max_rel_error << " (stage "
       << b.worst_stage << ") " << (b.passed ? "ok" : "FAIL") << "\n";
  }
  return os.str();
}

DerivativeReport check_derivatives(const ProblemModel &model, const Trajectory &z,
                                   const DualTrajectory &lambda, double rel_tol)
{
  if (!(rel_tol > 0.0))
  {
    throw std::invalid_argument("rel_tol must be positive");
  }
  const auto &dims = model.dims();
  z.validate(dims);
  lambda.validate(dims);
  const int nx = dims.nx;
  const int nu = dims.nu;

  Accumulator grad("cost_gradient");
  Accumulator hess("cost_hessian");
  Accumulator jac("dynamics_jacobian");
  Accumulator curv("dynamics_curvature");
  Accumulator tgrad("terminal_gradient");
  Accumulator thess("terminal_hessian");
  std::vector<int> failing;

  for (int k = 0; k < dims.N; ++k)
  {
    const auto uk = static_cast<std::size_t>(k);
    const Vector &d = model.reference(k);
    const Vector &lam = lambda.at(k);
    Vector w(nx + nu);
    w << z.x[uk], z.u[uk];

    const auto split_x = [nx](const Vector &v) { return Vector(v.head(nx)); };
    const auto split_u = [nx, nu](const Vector &v) { return Vector(v.segment(nx, nu)); };

    const auto cost = model.stage_cost_derivatives(k, z.x[uk], z.u[uk], d);
    Vector g(nx + nu);
    g << cost.gx, cost.gu;
    Matrix H(nx + nu, nx + nu);
    H.topLeftCorner(nx, nx) = cost.gxx;
    H.bottomLeftCorner(nu, nx) = cost.gux;
    H.topRightCorner(nx, nu) = cost.gux.transpose();
    H.bottomRightCorner(nu, nu) = cost.guu;

    const Matrix g_fd = fd_jacobian(
        [&](const Vector &v) {
          return Vector::Constant(1, model.stage_cost(k, split_x(v), split_u(v), d));
        },
        w);
    const Matrix H_fd = fd_jacobian(
        [&](const Vector &v) {
          const auto c = model.stage_cost_derivatives(k, split_x(v), split_u(v), d);
          Vector out(nx + nu);
          out << c.gx, c.gu;
          return out;
        },
        w);

    const auto J = model.dynamics_jacobians(k, z.x[uk], z.u[uk], d);
    Matrix AB(nx, nx + nu);
    AB << J.A, J.B;
    const Matrix AB_fd = fd_jacobian(
        [&](const Vector &v) { return model.dynamics(k, split_x(v), split_u(v), d); }, w);

    const auto C = model.dynamics_curvature(k, z.x[uk], z.u[uk], d, lam);
    Matrix Cfull(nx + nu, nx + nu);
    Cfull.topLeftCorner(nx, nx) = C.xx;
    Cfull.bottomLeftCorner(nu, nx) = C.ux;
    Cfull.topRightCorner(nx, nu) = C.ux.transpose();
    Cfull.bottomRightCorner(nu, nu) = C.uu;
    const Matrix C_fd = fd_jacobian(
        [&](const Vector &v) {
          const auto Jv = model.dynamics_jacobians(k, split_x(v), split_u(v), d);
          Vector out(nx + nu);
          out << Jv.A.transpose() * lam, Jv.B.transpose() * lam;
          return out;
        },
        w);

    const double errs[] = {rel_error(g.transpose(), g_fd), rel_error(H, H_fd),
                           rel_error(AB, AB_fd), rel_error(Cfull, C_fd)};
    grad.add(k, errs[0]);
    hess.add(k, errs[1]);
    jac.add(k, errs[2]);
    curv.add(k, errs[3]);
    if (std::any_of(std::begin(errs), std::end(errs), [&](double e) { return !(e <= rel_tol); }))
    {
      failing.push_back(k);
    }
  }

  const Vector &xN = z.x.back();
  const auto term = model.terminal_cost_derivatives(xN);
  const Matrix tg_fd = fd_jacobian(
      [&](const Vector &v) { return Vector::Constant(1, model.terminal_cost(v)); }, xN);
  const Matrix tH_fd =
      fd_jacobian([&](const Vector &v) { return model.terminal_cost_derivatives(v).gx; }, xN);
  const double te[] = {rel_error(term.gx.transpose(), tg_fd), rel_error(term.gxx, tH_fd)};
  tgrad.add(dims.N, te[0]);
  thess.add(dims.N, te[1]);
  if (!(te[0] <= rel_tol) || !(te[1] <= rel_tol))
  {
    failing.push_back(dims.N);
  }

  DerivativeReport report;
  report.rel_tol = rel_tol;
  for (auto *acc : {&grad, &hess, &jac, &curv, &tgrad, &thess})
  {
    acc->result.passed = acc->result.max_rel_error <= rel_tol;
    report.passed = report.passed && acc->result.passed;
    report.blocks.push_back(acc->result);
  }
  report.failing_stages = std::move(failing);
  return report;
}

} // namespace lagmpc
