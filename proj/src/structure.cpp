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

#include "lagmpc/structure.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lagmpc
{

ReducedHessian reduced_hessian(const KktSystem &kkt)
{
  if (kkt.window.length() < 1)
  {
    throw DimensionError("reduced Hessian needs a window of length >= 1");
  }
  const Matrix G = kkt.dense_jacobian();
  const Matrix H = kkt.dense_hessian();
  const int n = static_cast<int>(G.cols());
  const int m = static_cast<int>(G.rows());

  Eigen::HouseholderQR<Matrix> qr(G.transpose());
  const Matrix Qfull = qr.householderQ() * Matrix::Identity(n, n);

  ReducedHessian out;
  out.Z = Qfull.rightCols(n - m);
  out.reduced = out.Z.transpose() * H * out.Z;
  out.reduced = 0.5 * (out.reduced + out.reduced.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(out.reduced, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
  {
    throw std::runtime_error("eigen-decomposition of the reduced Hessian failed");
  }
  out.min_eig = eig.eigenvalues()(0);
  return out;
}

double reduced_hessian_min_eig(const KktSystem &kkt) { return reduced_hessian(kkt).min_eig; }

namespace
{

bool shifted_problem_convex(const KktSystem &kkt, double gamma)
{
  const Matrix Ix = Matrix::Identity(kkt.nx, kkt.nx);
  const Matrix Iu = Matrix::Identity(kkt.nu, kkt.nu);
  Matrix P = kkt.terminal_hessian - gamma * Ix;
  for (int s = kkt.window.length() - 1; s >= 0; --s)
  {
    const auto &b = kkt.stages[static_cast<std::size_t>(s)];
    const Matrix Mk = b.R - gamma * Iu + b.B.transpose() * P * b.B;
    Eigen::LLT<Matrix> llt(0.5 * (Mk + Mk.transpose()));
    if (llt.info() != Eigen::Success)
    {
      return false;
    }
    const Matrix Kk = b.S + b.B.transpose() * P * b.A;
    P = b.Q - gamma * Ix + b.A.transpose() * P * b.A - Kk.transpose() * llt.solve(Kk);
    P = 0.5 * (P + P.transpose()).eval();
    if (!P.allFinite())
    {
      return false;
    }
  }
  return true;
}

} // namespace

double reduced_hessian_min_eig_structured(const KktSystem &kkt, double abs_tol)
{
  if (kkt.window.length() < 1)
  {
    throw DimensionError("reduced Hessian needs a window of length >= 1");
  }
  double h = kkt.terminal_hessian.norm();
  for (const auto &b : kkt.stages)
  {
    h = std::max({h, b.Q.norm() + b.S.norm() + b.R.norm(), b.A.norm(), b.B.norm()});
  }
  // Interlacing keeps the answer inside the spectrum of H.
  double lo = -h - 1.0;
  double hi = h + 1.0;
  if (!shifted_problem_convex(kkt, lo))
  {
    throw std::runtime_error("Riccati test failed at the lower bracket");
  }
  while (hi - lo > abs_tol)
  {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
    {
      break;
    }
    (shifted_problem_convex(kkt, mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Matrix controllability_matrix(const ProblemModel &model, const Trajectory &z, int k, int t)
{
  const auto &dims = model.dims();
  if (t < 1 || k < 0 || k + t > dims.N)
  {
    throw DimensionError("controllability matrix needs 1 <= t <= N - k, got k = " +
                         std::to_string(k) + ", t = " + std::to_string(t));
  }
  z.validate(dims);
  Matrix xi(dims.nx, t * dims.nu);
  Matrix phi = Matrix::Identity(dims.nx, dims.nx);
  for (int m = 0; m < t; ++m)
  {
    const int s = k + t - 1 - m;
    const auto us = static_cast<std::size_t>(s);
    const auto jac = model.dynamics_jacobians(s, z.x[us], z.u[us], model.reference(s));
    xi.middleCols(m * dims.nu, dims.nu) = phi * jac.B;
    phi = phi * jac.A;
  }
  return xi;
}

double controllability_min_eig(const Matrix &xi)
{
  const Matrix gram = xi * xi.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

double mu_threshold(double upsilon, double gamma_C, int t)
{
  if (!(gamma_C > 0.0) || t < 1)
  {
    throw std::invalid_argument("mu_threshold needs gamma_C > 0 and t >= 1");
  }
  return 16.0 * upsilon * (std::pow(upsilon, 6 * t) - std::pow(upsilon, 4 * t)) /
         (gamma_C * gamma_C);
}

LineFit fit_line(const std::vector<double> &x, const std::vector<double> &y)
{
  if (x.size() != y.size() || x.size() < 2)
  {
    throw std::invalid_argument("line fit needs two or more paired samples");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0))
  {
    throw std::invalid_argument("line fit needs two distinct abscissae");
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

int decay_offset(int i, int j, int part, int n1)
{
  const bool initial_slot = j == n1 - 1;
  switch (part)
  {
  case 1:
    return std::abs(i - j);
  case 2:
    return initial_slot ? i - n1 : std::abs(i - j);
  case 3:
    return initial_slot ? i + 1 - n1 : std::abs(i + 1 - j);
  default:
    throw std::invalid_argument("decay block part must be 1, 2 or 3");
  }
}

namespace
{

double block_norm(const Matrix &block)
{
  const double s = block.size() == 0
                       ? 0.0
                       : Eigen::JacobiSVD<Matrix>(block).singularValues()(0);
  return std::max(s, DBL_MIN);
}

} // namespace

DecayFitReport kkt_inverse_decay_probe(KktSystem &kkt, int max_offset)
{
  if (max_offset < 1)
  {
    throw std::invalid_argument("max_offset must be at least 1");
  }
  kkt.factorize();
  const int n1 = kkt.window.n1;
  const int n2 = kkt.window.n2;
  const int nx = kkt.nx;
  const int nu = kkt.nu;
  const int dim = kkt.dimension();

  // Row/column index sets of a primal stage block (x_i; u_i) and dual block.
  const auto primal_rows = [&](int i) {
    std::vector<int> rows;
    for (int r = 0; r < nx; ++r)
      rows.push_back(kkt.x_index(i) + r);
    if (i < n2)
    {
      for (int r = 0; r < nu; ++r)
        rows.push_back(kkt.u_index(i) + r);
    }
    return rows;
  };
  const auto dual_rows = [&](int j) {
    std::vector<int> rows;
    for (int r = 0; r < nx; ++r)
      rows.push_back(kkt.lambda_index(j) + r);
    return rows;
  };
  const auto responses = [&](const std::vector<int> &cols) {
    Matrix X(dim, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
    {
      Vector e = Vector::Zero(dim);
      e(cols[c]) = 1.0;
      X.col(static_cast<Eigen::Index>(c)) = kkt.solve(e);
    }
    return X;
  };
  const auto take = [](const Matrix &X, const std::vector<int> &rows) {
    Matrix B(static_cast<Eigen::Index>(rows.size()), X.cols());
    for (std::size_t r = 0; r < rows.size(); ++r)
      B.row(static_cast<Eigen::Index>(r)) = X.row(rows[r]);
    return B;
  };

  DecayFitReport report;
  const auto record = [&](const Matrix &X, const std::vector<int> &rows, int i, int j, int part) {
    if (decay_offset(i, j, part, n1) <= max_offset)
    {
      report.block_norms[{i, j, part}] = block_norm(take(X, rows));
    }
  };
  for (int j = n1; j <= n2; ++j)
  {
    const Matrix X = responses(primal_rows(j));
    for (int i = n1; i <= n2; ++i)
    {
      record(X, primal_rows(i), i, j, 1);
    }
  }
  for (int j = n1 - 1; j < n2; ++j)
  {
    const Matrix X = responses(dual_rows(j));
    for (int i = n1; i <= n2; ++i)
    {
      record(X, primal_rows(i), i, j, 2);
    }
    for (int i = n1 - 1; i < n2; ++i)
    {
      record(X, dual_rows(i), i, j, 3);
    }
  }

  const int top = std::min(max_offset, kkt.window.length());
  report.envelope.assign(static_cast<std::size_t>(top + 1), 0.0);
  for (const auto &[key, norm] : report.block_norms)
  {
    const auto [i, j, part] = key;
    const int off = decay_offset(i, j, part, n1);
    if (off >= 0 && off <= top)
    {
      auto &slot = report.envelope[static_cast<std::size_t>(off)];
      slot = std::max(slot, norm);
    }
  }
  std::vector<double> xs, ys;
  for (int o = 0; o <= top; ++o)
  {
    xs.push_back(o);
    ys.push_back(std::log(std::max(report.envelope[static_cast<std::size_t>(o)], DBL_MIN)));
  }
  const LineFit fit = fit_line(xs, ys);
  report.fitted_rho = std::exp(fit.slope);
  report.fitted_logK = fit.intercept;
  report.r_squared = fit.r_squared;
  return report;
}

} // namespace lagmpc
