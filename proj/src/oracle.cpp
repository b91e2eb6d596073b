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

#include "lagmpc/oracle.hpp"

#include "lagmpc/kkt.hpp"
#include "lagmpc/structure.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace lagmpc
{

namespace
{

// Windows longer than this use the Riccati-bisection eigenvalue.
constexpr int kDenseReducedHessianLimit = 300;

} // namespace

double full_kkt_residual(const ProblemModel &model, const Trajectory &z,
                         const DualTrajectory &lambda)
{
  const auto spec = full_horizon_spec(model);
  return kkt_gradient(model, spec, WindowIterate::from_full(z, lambda, spec.window)).norm();
}

OracleSolution solve_full(const ProblemModel &model, const Trajectory &z0,
                          const DualTrajectory &lambda0, const OracleOptions &opts)
{
  if (!(opts.tol > 0.0) || opts.max_iter < 0)
  {
    throw std::invalid_argument("oracle needs tol > 0 and max_iter >= 0");
  }
  const auto &dims = model.dims();
  z0.validate(dims);
  lambda0.validate(dims);
  if (z0.x.front() != model.initial_state())
  {
    throw std::invalid_argument("oracle start must satisfy x_0 = xbar_0");
  }

  const auto spec = full_horizon_spec(model);
  WindowIterate it = WindowIterate::from_full(z0, lambda0, spec.window);
  const auto pin = [&](WindowIterate &w) { w.x_at(0) = model.initial_state(); };

  OracleSolution sol;
  double phi = kkt_gradient(model, spec, it).norm();
  while (phi > opts.tol && sol.iterations < opts.max_iter)
  {
    KktSystem kkt = assemble_kkt(model, spec, it);
    const WindowIterate step = solve_saddle(kkt);

    double alpha = 1.0;
    bool accepted = false;
    WindowIterate trial;
    double phi_trial = phi;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt)
    {
      trial = it;
      trial += step.scaled(alpha);
      pin(trial);
      phi_trial = kkt_gradient(model, spec, trial).norm();
      if (phi_trial <= (1.0 - opts.armijo * alpha) * phi)
      {
        accepted = true;
        break;
      }
      alpha *= opts.backtrack;
    }
    if (!accepted)
    {
      break;
    }
    it = std::move(trial);
    phi = phi_trial;
    ++sol.iterations;
  }

  sol.z_star = Trajectory::zeros(dims);
  sol.lambda_star = DualTrajectory::zeros(dims);
  it.scatter(sol.z_star, sol.lambda_star);
  sol.kkt_residual = phi;
  sol.converged = phi <= opts.tol;
  return sol;
}

OracleSolution solve_full(const ProblemModel &model, const OracleOptions &opts)
{
  Trajectory z = Trajectory::zeros(model.dims());
  z.x.front() = model.initial_state();
  return solve_full(model, z, DualTrajectory::zeros(model.dims()), opts);
}

AssumptionCertificate verify_solution_assumptions(const ProblemModel &model,
                                                  const OracleSolution &sol, double gamma_H,
                                                  double gamma_C, int t, double slack)
{
  const int N = model.horizon();
  if (t < 1 || t > N)
  {
    throw std::invalid_argument("controllability length t must lie in [1, N]");
  }
  AssumptionCertificate cert;
  cert.gamma_H = gamma_H;
  cert.gamma_C = gamma_C;
  cert.t = t;

  const auto spec = full_horizon_spec(model);
  const KktSystem kkt = assemble_kkt(
      model, spec, WindowIterate::from_full(sol.z_star, sol.lambda_star, spec.window));
  cert.reduced_hessian_min_eig = N > kDenseReducedHessianLimit
                                     ? reduced_hessian_min_eig_structured(kkt)
                                     : reduced_hessian_min_eig(kkt);
  cert.sosc_passed = cert.reduced_hessian_min_eig >= gamma_H - slack;

  cert.controllability_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= N - t; ++k)
  {
    double best = -std::numeric_limits<double>::infinity();
    for (int tk = 1; tk <= t; ++tk)
    {
      best = std::max(best,
                      controllability_min_eig(controllability_matrix(model, sol.z_star, k, tk)));
    }
    cert.controllability.push_back(best);
    cert.controllability_min = std::min(cert.controllability_min, best);
    if (!(best >= gamma_C - slack))
    {
      cert.uncontrollable_stages.push_back(k);
    }
  }
  cert.controllability_passed = cert.uncontrollable_stages.empty();
  return cert;
}

} // namespace lagmpc
