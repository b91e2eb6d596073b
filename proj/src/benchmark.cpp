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

#include "lagmpc/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lagmpc
{

double ReferenceProfile::value(int k) const
{
  const double t = static_cast<double>(k);
  switch (kind)
  {
  case Kind::Constant:
    return amplitude;
  case Kind::Sine:
    return amplitude * std::sin(t);
  case Kind::SineSquared:
  {
    const double s = std::sin(t);
    return amplitude * s * s;
  }
  }
  return amplitude;
}

std::string ReferenceProfile::name() const
{
  switch (kind)
  {
  case Kind::Constant:
    return "constant";
  case Kind::Sine:
    return "sine";
  case Kind::SineSquared:
    return "sine_squared";
  }
  return "constant";
}

ReferenceProfile ReferenceProfile::parse(const std::string &name, double amplitude)
{
  if (name == "constant")
  {
    return {Kind::Constant, amplitude};
  }
  if (name == "sine")
  {
    return {Kind::Sine, amplitude};
  }
  if (name == "sine_squared")
  {
    return {Kind::SineSquared, amplitude};
  }
  throw std::invalid_argument("unknown reference profile '" + name + "'");
}

bool BenchmarkParams::sosc_certified() const { return C1 - 2.0 > 4.0 * std::abs(C2); }

double BenchmarkParams::gamma_H() const { return (C1 - 2.0 - 4.0 * std::abs(C2)) / 4.0; }

double BenchmarkParams::upper_bound() const
{
  return std::max({1.0, 4.0 + 2.0 * std::abs(C1), 2.0 * std::abs(C2)});
}

TableCase table_case(int id)
{
  TableCase c;
  c.id = id;
  switch (id)
  {
  case 1:
    c.params.profile = {ReferenceProfile::Kind::Constant, 1.0};
    c.params.C1 = 8.0;
    c.params.C2 = 1.0;
    c.full_N = 5000;
    c.L = 5;
    c.M_list = {10, 20, 30, 40};
    break;
  case 2:
    c.params.profile = {ReferenceProfile::Kind::Sine, 5.0};
    c.params.C1 = 12.0;
    c.params.C2 = 2.0;
    c.full_N = 10000;
    c.L = 10;
    c.M_list = {30, 40, 50, 60};
    break;
  case 3:
    c.params.profile = {ReferenceProfile::Kind::SineSquared, 10.0};
    c.params.C1 = 40.0;
    c.params.C2 = 5.0;
    c.full_N = 40000;
    c.L = 10;
    c.M_list = {50, 60, 70, 80};
    break;
  default:
    throw std::invalid_argument("unknown benchmark case " + std::to_string(id));
  }
  c.mu = 10.0;
  c.params.N = std::min(c.full_N, 2000);
  return c;
}

namespace
{

std::vector<Vector> build_references(const BenchmarkParams &p)
{
  if (p.N < 3)
  {
    throw DimensionError("benchmark horizon N must be at least 3");
  }
  std::vector<Vector> refs;
  refs.reserve(static_cast<std::size_t>(p.N));
  for (int k = 0; k < p.N; ++k)
  {
    refs.push_back(Vector::Constant(1, p.profile.value(k)));
  }
  return refs;
}

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

} // namespace

BenchmarkModel::BenchmarkModel(const BenchmarkParams &params)
    : ProblemModel(Dimensions{1, 1, 1, params.N}, Vector::Zero(1), build_references(params)),
      params_(params)
{
}

double BenchmarkModel::stage_cost(int, const Vector &x, const Vector &u, const Vector &d) const
{
  const double y = x(0) - d(0);
  const double v = u(0) - d(0);
  double g = params_.C1 * y * y - params_.C2 * v * v;
  if (params_.include_cosine)
  {
    const double c = std::cos(y);
    g += 2.0 * c * c;
  }
  return g;
}

double BenchmarkModel::terminal_cost(const Vector &x) const { return params_.C1 * x(0) * x(0); }

Vector BenchmarkModel::dynamics(int, const Vector &x, const Vector &u, const Vector &d) const
{
  return x + u + d;
}

StageCostDerivatives BenchmarkModel::stage_cost_derivatives(int, const Vector &x, const Vector &u,
                                                            const Vector &d) const
{
  const double y = x(0) - d(0);
  const double v = u(0) - d(0);
  double gx = 2.0 * params_.C1 * y;
  double gxx = 2.0 * params_.C1;
  if (params_.include_cosine)
  {
    // d/dy 2cos^2(y) = -2 sin(2y),  d2/dy2 = -4 cos(2y)
    gx -= 2.0 * std::sin(2.0 * y);
    gxx -= 4.0 * std::cos(2.0 * y);
  }
  StageCostDerivatives out;
  out.gx = Vector::Constant(1, gx);
  out.gu = Vector::Constant(1, -2.0 * params_.C2 * v);
  out.gxx = scalar(gxx);
  out.gux = scalar(0.0);
  out.guu = scalar(-2.0 * params_.C2);
  return out;
}

TerminalCostDerivatives BenchmarkModel::terminal_cost_derivatives(const Vector &x) const
{
  return {Vector::Constant(1, 2.0 * params_.C1 * x(0)), scalar(2.0 * params_.C1)};
}

DynamicsJacobians BenchmarkModel::dynamics_jacobians(int, const Vector &, const Vector &,
                                                     const Vector &) const
{
  return {scalar(1.0), scalar(1.0)};
}

DynamicsCurvature BenchmarkModel::dynamics_curvature(int, const Vector &, const Vector &,
                                                     const Vector &, const Vector &) const
{
  return {scalar(0.0), scalar(0.0), scalar(0.0)};
}

std::shared_ptr<const BenchmarkModel> make_benchmark(const BenchmarkParams &params)
{
  return std::make_shared<const BenchmarkModel>(params);
}

} // namespace lagmpc
