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
#include "test_models.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace lagmpc;
using namespace lagmpc::testing;

namespace
{

std::pair<Trajectory, DualTrajectory> random_point(const ProblemModel &m, std::mt19937_64 &rng)
{
  auto z = Trajectory::zeros(m.dims());
  auto l = DualTrajectory::zeros(m.dims());
  for (auto &v : z.x)
    v = random_vector(rng, m.dims().nx, 1.0);
  for (auto &v : z.u)
    v = random_vector(rng, m.dims().nu, 1.0);
  for (auto &v : l.lambda)
    v = random_vector(rng, m.dims().nx, 1.0);
  return {z, l};
}

} // namespace

TEST(DerivativeCheck, TableCasesPassAtTwentyRandomPoints)
{
  for (int id = 1; id <= 3; ++id)
  {
    const auto m = make_benchmark(case_params(id, 50));
    std::mt19937_64 rng(100 + id);
    for (int p = 0; p < 20; ++p)
    {
      const auto [z, l] = random_point(*m, rng);
      const auto rep = check_derivatives(*m, z, l, 1e-6);
      ASSERT_TRUE(rep.passed) << "case " << id << "\n" << rep.summary();
      EXPECT_EQ(rep.blocks.size(), 6u);
    }
  }
}

TEST(DerivativeCheck, NonlinearDynamicsModelPasses)
{
  const PendulumModel m(15);
  std::mt19937_64 rng(7);
  for (int p = 0; p < 20; ++p)
  {
    const auto [z, l] = random_point(m, rng);
    const auto rep = check_derivatives(m, z, l, 1e-6);
    ASSERT_TRUE(rep.passed) << rep.summary();
  }
}

TEST(DerivativeCheck, DetectsWrongJacobianSignAtOffendingStage)
{
  const WrongSignModel m(case_params(1, 10), 6);
  std::mt19937_64 rng(1);
  const auto [z, l] = random_point(m, rng);
  const auto rep = check_derivatives(m, z, l, 1e-6);
  EXPECT_FALSE(rep.passed);
  const auto &jac = rep.block("dynamics_jacobian");
  EXPECT_FALSE(jac.passed);
  EXPECT_EQ(jac.worst_stage, 6);
  EXPECT_NE(std::find(rep.failing_stages.begin(), rep.failing_stages.end(), 6),
            rep.failing_stages.end());
  EXPECT_TRUE(rep.block("cost_gradient").passed);
}

TEST(DerivativeCheck, QuadraticModelMatchesToRounding)
{
  const auto lq = random_lq(10, 3, 2, 21);
  std::mt19937_64 rng(5);
  const auto [z, l] = random_point(*lq, rng);
  const auto rep = check_derivatives(*lq, z, l, 1e-6);
  ASSERT_TRUE(rep.passed);
  for (const auto &b : rep.blocks)
  {
    EXPECT_LT(b.max_rel_error, 1e-9) << b.kind;
  }
}

TEST(DerivativeCheck, UnknownBlockKindThrows)
{
  const auto m = make_benchmark(case_params(1, 5));
  std::mt19937_64 rng(1);
  const auto [z, l] = random_point(*m, rng);
  const auto rep = check_derivatives(*m, z, l, 1e-6);
  EXPECT_THROW(rep.block("nope"), std::out_of_range);
}
