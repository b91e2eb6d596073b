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

#include <string>
#include <vector>

namespace lagmpc
{

struct DerivativeBlockResult
{
  std::string kind;
  double max_rel_error = 0.0;
  int worst_stage = -1;
  bool passed = true;
};

struct DerivativeReport
{
  double rel_tol = 0.0;
  bool passed = true;
  std::vector<DerivativeBlockResult> blocks;
  /// Stages where some block exceeded rel_tol (N denotes the terminal cost).
  std::vector<int> failing_stages;

  const DerivativeBlockResult &block(const std::string &kind) const;
  std::string summary() const;
};

/// Compares every analytic derivative block of the model against central
/// finite differences at the given primal-dual point. The error measure is
/// |analytic - fd| / max(1, |fd|), maximised over entries.
DerivativeReport check_derivatives(const ProblemModel &model, const Trajectory &z,
                                   const DualTrajectory &lambda, double rel_tol);

} // namespace lagmpc
