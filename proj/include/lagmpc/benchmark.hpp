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

#include "lagmpc/problem.hpp"

#include <memory>
#include <string>
#include <vector>

namespace lagmpc
{

/// Reference profile d_k for the scalar tracking benchmark; k is the stage
/// index interpreted in radians.
struct ReferenceProfile
{
  enum class Kind
  {
    Constant,
    Sine,
    SineSquared,
  };

  Kind kind = Kind::Constant;
  double amplitude = 1.0;

  double value(int k) const;
  std::string name() const;
  static ReferenceProfile parse(const std::string &name, double amplitude);
};

/**
 * Scalar benchmark
 *
 *   g_k = 2 cos^2(x - d) + C1 (x - d)^2 - C2 (u - d)^2,   g_N = C1 x_N^2,
 *   x_{k+1} = x_k + u_k + d_k,   x_0 = 0.
 *
 * With include_cosine = false the cosine term is dropped and the problem is
 * linear-quadratic.
 */
struct BenchmarkParams
{
  double C1 = 8.0;
  double C2 = 1.0;
  ReferenceProfile profile{};
  int N = 200;
  bool include_cosine = true;

  /// C1 - 2 > 4|C2|.
  bool sosc_certified() const;
  /// (C1 - 2 - 4|C2|) / 4.
  double gamma_H() const;
  /// Uniform bound max(1, 4 + 2|C1|, 2|C2|) on the Hessian and Jacobian blocks.
  double upper_bound() const;
};

/// One of the three reference benchmark setups.
struct TableCase
{
  int id = 1;
  BenchmarkParams params;
  int full_N = 0;
  int L = 5;
  double mu = 10.0;
  std::vector<int> M_list;
};

/// Cases 1-3; N is set to the desk default min(full_N, 2000).
TableCase table_case(int id);

class BenchmarkModel final : public ProblemModel
{
public:
  explicit BenchmarkModel(const BenchmarkParams &params);

  const BenchmarkParams &params() const { return params_; }

  double stage_cost(int k, const Vector &x, const Vector &u, const Vector &d) const override;
  double terminal_cost(const Vector &x) const override;
  Vector dynamics(int k, const Vector &x, const Vector &u, const Vector &d) const override;
  StageCostDerivatives stage_cost_derivatives(int k, const Vector &x, const Vector &u,
                                              const Vector &d) const override;
  TerminalCostDerivatives terminal_cost_derivatives(const Vector &x) const override;
  DynamicsJacobians dynamics_jacobians(int k, const Vector &x, const Vector &u,
                                       const Vector &d) const override;
  DynamicsCurvature dynamics_curvature(int k, const Vector &x, const Vector &u, const Vector &d,
                                       const Vector &lambda) const override;

private:
  BenchmarkParams params_;
};

std::shared_ptr<const BenchmarkModel> make_benchmark(const BenchmarkParams &params);

} // namespace lagmpc
