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
#include "lagmpc/oracle.hpp"
#include "test_models.hpp"

#include <gtest/gtest.h>

using namespace lagmpc;
using namespace lagmpc::testing;

TEST(Oracle, QuadraticProblemsConvergeInOneStep)
{
  for (unsigned seed = 0; seed < 5; ++seed)
  {
    const auto lq = random_lq(50, 2, 1, 60 + seed);
    const auto sol = solve_full(*lq);
    EXPECT_TRUE(sol.converged);
    EXPECT_EQ(sol.iterations, 1);
    EXPECT_LT(sol.kkt_residual, 1e-10);
  }
  BenchmarkParams p = case_params(1, 200);
  p.include_cosine = false;
  const auto sol = solve_full(*make_benchmark(p));
  EXPECT_EQ(sol.iterations, 1);
  EXPECT_LT(sol.kkt_residual, 1e-10);
}

TEST(Oracle, CaseOneConvergesQuickly)
{
  const auto m = make_benchmark(case_params(1, 200));
  const auto sol = solve_full(*m);
  EXPECT_TRUE(sol.converged);
  EXPECT_LT(sol.kkt_residual, 1e-10);
  EXPECT_LE(sol.iterations, 15);
  EXPECT_NEAR(full_kkt_residual(*m, sol.z_star, sol.lambda_star), sol.kkt_residual, 1e-15);
}

TEST(Oracle, SolutionSatisfiesStageStationarity)
{
  const auto m = make_benchmark(case_params(2, 200));
  const auto sol = solve_full(*m);
  ASSERT_TRUE(sol.converged);
  for (int k = 0; k < 200; ++k)
  {
    const auto uk = static_cast<std::size_t>(k);
    const auto c = m->stage_cost_derivatives(k, sol.z_star.x[uk], sol.z_star.u[uk], m->reference(k));
    const auto j = m->dynamics_jacobians(k, sol.z_star.x[uk], sol.z_star.u[uk], m->reference(k));
    EXPECT_LT((c.gu - j.B.transpose() * sol.lambda_star.at(k)).norm(), 1e-8) << k;
    const Vector f = m->dynamics(k, sol.z_star.x[uk], sol.z_star.u[uk], m->reference(k));
    EXPECT_LT((sol.z_star.x[uk + 1] - f).norm(), 1e-8) << k;
  }
  EXPECT_EQ(sol.z_star.x[0], m->initial_state());
}

TEST(Oracle, SolutionIsAFixedPoint)
{
  const PendulumModel m(60);
  const auto sol = solve_full(m);
  ASSERT_TRUE(sol.converged);
  const auto again = solve_full(m, sol.z_star, sol.lambda_star);
  EXPECT_TRUE(again.converged);
  EXPECT_EQ(again.iterations, 0);
}

TEST(Oracle, InsensitiveToInitialScale)
{
  for (int id = 1; id <= 3; ++id)
  {
    const auto m = make_benchmark(case_params(id, 200));
    const auto a = solve_full(*m);
    auto z = Trajectory::constant(m->dims(), 0.1);
    z.x[0] = m->initial_state();
    const auto b = solve_full(*m, z, DualTrajectory::constant(m->dims(), 0.1));
    ASSERT_TRUE(a.converged && b.converged) << "case " << id;
    for (std::size_t k = 0; k < a.z_star.x.size(); ++k)
      EXPECT_NEAR(a.z_star.x[k](0), b.z_star.x[k](0), 1e-8);
    for (std::size_t k = 0; k < a.z_star.u.size(); ++k)
      EXPECT_NEAR(a.z_star.u[k](0), b.z_star.u[k](0), 1e-8);
    for (std::size_t k = 0; k < a.lambda_star.lambda.size(); ++k)
      EXPECT_NEAR(a.lambda_star.lambda[k](0), b.lambda_star.lambda[k](0), 1e-8);
  }
}

TEST(Oracle, IterationBudgetExhaustionIsReported)
{
  const auto m = make_benchmark(case_params(3, 200));
  OracleOptions opts;
  opts.max_iter = 1;
  const auto sol = solve_full(*m, opts);
  EXPECT_FALSE(sol.converged);
  EXPECT_EQ(sol.iterations, 1);
  EXPECT_GT(sol.kkt_residual, opts.tol);
  EXPECT_NEAR(full_kkt_residual(*m, sol.z_star, sol.lambda_star), sol.kkt_residual,
              1e-12 * (1.0 + sol.kkt_residual));
}

TEST(Oracle, RejectsInfeasibleStart)
{
  const auto m = make_benchmark(case_params(1, 20));
  auto z = Trajectory::constant(m->dims(), 0.3);
  EXPECT_THROW(solve_full(*m, z, DualTrajectory::zeros(m->dims())), std::invalid_argument);
  OracleOptions bad;
  bad.tol = 0.0;
  EXPECT_THROW(solve_full(*m, bad), std::invalid_argument);
}

TEST(Oracle, SingularProblemThrows)
{
  const Matrix zero = Matrix::Zero(1, 1);
  const auto m = simple_lq(6, zero, zero, zero, zero, zero);
  auto z = Trajectory::zeros(m->dims());
  z.x[0] = m->initial_state();
  z.x[2] = Vector::Ones(1);
  EXPECT_THROW(solve_full(*m, z, DualTrajectory::zeros(m->dims())), SingularKktError);
}

TEST(Certificates, CaseOneMatchesCaseConstants)
{
  const auto m = make_benchmark(case_params(1, 200));
  const auto sol = solve_full(*m);
  const auto cert = verify_solution_assumptions(*m, sol, 0.5, 1.0, 1, 1e-6);
  EXPECT_TRUE(cert.passed());
  EXPECT_GE(cert.reduced_hessian_min_eig, 0.5 - 1e-6);
  EXPECT_NEAR(cert.controllability_min, 1.0, 1e-12);
  EXPECT_EQ(cert.controllability.size(), 200u);
}

TEST(Certificates, PositiveDefiniteLqPasses)
{
  const Matrix I = Matrix::Identity(2, 2);
  const auto m = simple_lq(30, I, I, I, I, I);
  const auto sol = solve_full(*m);
  const auto cert = verify_solution_assumptions(*m, sol, 0.5, 0.5, 1);
  EXPECT_TRUE(cert.sosc_passed);
  EXPECT_TRUE(cert.controllability_passed);
}

TEST(Certificates, UncontrollableSystemFailsEverywhere)
{
  const Matrix I = Matrix::Identity(2, 2);
  const auto m = simple_lq(20, I, Matrix::Identity(1, 1), I, Matrix::Zero(2, 1), I);
  const auto sol = solve_full(*m);
  const auto cert = verify_solution_assumptions(*m, sol, 0.5, 0.1, 3);
  EXPECT_FALSE(cert.controllability_passed);
  EXPECT_EQ(cert.uncontrollable_stages.size(), 18u);
  EXPECT_EQ(cert.controllability_min, 0.0);
  EXPECT_FALSE(cert.passed());
}

TEST(Certificates, LargeHorizonUsesStructuredRoute)
{
  const auto m = make_benchmark(case_params(3, 1000));
  const auto sol = solve_full(*m);
  ASSERT_TRUE(sol.converged);
  const auto cert = verify_solution_assumptions(*m, sol, 4.5, 1.0, 1, 1e-6);
  EXPECT_TRUE(cert.passed());
}
