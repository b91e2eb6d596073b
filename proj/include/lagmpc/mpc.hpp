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

#include "lagmpc/kkt.hpp"
#include "lagmpc/oracle.hpp"
#include "lagmpc/problem.hpp"

#include <optional>
#include <vector>

namespace lagmpc
{

/// Invalid online MPC configuration.
class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

struct MpcConfig
{
  int N = 0;
  int M = 0;
  int L = 1;
  double mu = 0.0;
  Trajectory z0;
  DualTrajectory lambda0;

  int S() const { return L > 0 ? M / L : 0; }

  /// M = S L with S >= 2, L >= 1, M <= N, mu >= 0, and a guess with
  /// x_0 = xbar_0 of matching dimensions. Throws ConfigError.
  void validate(const ProblemModel &model) const;

  /// Zero guess except x_0 = xbar_0.
  static MpcConfig with_zero_guess(const ProblemModel &model, int M, int L, double mu);
};

/// Horizon schedule n1(i) = (i-1) L, n2(i) = min(n1(i) + M, N), i = 1..T.
class Schedule
{
public:
  Schedule(int N, int M, int L);

  int N() const { return N_; }
  int M() const { return M_; }
  int L() const { return L_; }
  int S() const { return M_ / L_; }
  int T() const { return static_cast<int>(windows_.size()); }

  const std::vector<HorizonWindow> &windows() const { return windows_; }
  const HorizonWindow &window(int i) const;

  /// T_k: last subproblem whose window contains stage k.
  int last_visitor(int k) const;
  /// s(k, i): number of subproblems h < i with k in [n1(h), n2(h)).
  int scan_count(int k, int i) const;
  /// s_k = s(k, T_k).
  int total_scans(int k) const { return scan_count(k, last_visitor(k)); }
  /// Last stage whose post-Newton iterate is handed from subproblem i-1 to i.
  int copy_end(int i) const;

private:
  int N_, M_, L_;
  std::vector<HorizonWindow> windows_;
};

SubproblemSpec make_subproblem(const ProblemModel &model, const MpcConfig &cfg,
                               const Schedule &schedule, int i, const Vector &carried_state);

/// Input iterate of subproblem i >= 2: previous outputs on [n1(i), copy_end(i)]
/// (multipliers from n1(i) - 1), the original guess elsewhere.
WindowIterate transfer_iterates(const WindowIterate &prev_output, const Trajectory &z0,
                                const DualTrajectory &lambda0, const Schedule &schedule, int i);

/// Newton direction of the subproblem at the iterate.
WindowIterate newton_direction(const ProblemModel &model, const SubproblemSpec &spec,
                               const WindowIterate &iterate);

/// input + full Newton step.
WindowIterate one_newton_step(const ProblemModel &model, const SubproblemSpec &spec,
                              const WindowIterate &input);

/// Stage error |(z_k - z*_k; lambda_k - lambda*_k)|, or |x_k - x*_k| when
/// state_only.
double stage_error(const Vector &x, const Vector *u, const Vector *lambda,
                   const OracleSolution &ref, int k, bool state_only);

struct SubproblemRecord
{
  HorizonWindow window;
  WindowIterate input;
  WindowIterate output;
  /// Indexed by k - n1 for k in [n1, n2]; empty without an oracle.
  std::vector<double> psi0;
  std::vector<double> psi1;
};

struct MpcRunRecord
{
  int S = 0;
  Trajectory z_hat;
  DualTrajectory lambda_hat;
  std::vector<SubproblemRecord> subproblems;
  bool has_errors = false;
  /// Psi^0_{k, T_k} for k = 0..N (state-only at N).
  std::vector<double> output_errors;
};

struct MpcOptions
{
  /// Keep per-subproblem input/output iterates in the record.
  bool keep_iterates = true;
};

/// One Newton step per horizon with lag L; the oracle, when given, fills the
/// error fields.
MpcRunRecord run_mpc(const ProblemModel &model, const MpcConfig &cfg,
                     const OracleSolution *oracle = nullptr, const MpcOptions &opts = {});

struct GroupErrors
{
  /// Omega_s for s = 0..S-1; NaN when no stage carries that scan count.
  std::vector<double> omega;
  /// log max_{k in group g} Psi^0_{k, T_k} for groups [gL, (g+1)L) of [0, N).
  std::vector<double> group_log_max;
};

GroupErrors compute_group_errors(const MpcRunRecord &record, const Schedule &schedule);

} // namespace lagmpc
