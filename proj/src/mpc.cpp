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

#include "lagmpc/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lagmpc
{

namespace
{

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

} // namespace

void MpcConfig::validate(const ProblemModel &model) const
{
  const auto &dims = model.dims();
  if (N != dims.N)
  {
    throw ConfigError("config N = " + std::to_string(N) + " differs from model horizon " +
                      std::to_string(dims.N));
  }
  if (L < 1)
  {
    throw ConfigError("lag L must be at least 1");
  }
  if (M % L != 0 || M / L < 2)
  {
    throw ConfigError("M = " + std::to_string(M) + " must be S*L with integer S >= 2 (L = " +
                      std::to_string(L) + ")");
  }
  if (M > N)
  {
    throw ConfigError("M = " + std::to_string(M) + " exceeds N = " + std::to_string(N));
  }
  if (!(mu >= 0.0) || !std::isfinite(mu))
  {
    throw ConfigError("mu must be finite and non-negative");
  }
  try
  {
    z0.validate(dims);
    lambda0.validate(dims);
  }
  catch (const DimensionError &e)
  {
    throw ConfigError(std::string("initial guess: ") + e.what());
  }
  if (z0.x.front() != model.initial_state())
  {
    throw ConfigError("initial guess must satisfy x_0 = xbar_0");
  }
}

MpcConfig MpcConfig::with_zero_guess(const ProblemModel &model, int M, int L, double mu)
{
  MpcConfig cfg;
  cfg.N = model.horizon();
  cfg.M = M;
  cfg.L = L;
  cfg.mu = mu;
  cfg.z0 = Trajectory::zeros(model.dims());
  cfg.z0.x.front() = model.initial_state();
  cfg.lambda0 = DualTrajectory::zeros(model.dims());
  return cfg;
}

Schedule::Schedule(int N, int M, int L) : N_(N), M_(M), L_(L)
{
  if (L < 1 || M < L || M > N || M % L != 0)
  {
    throw ConfigError("schedule needs 1 <= L, M = S L, M <= N");
  }
  const int T = (N - M + L - 1) / L + 1;
  windows_.reserve(static_cast<std::size_t>(T));
  for (int i = 1; i <= T; ++i)
  {
    const int n1 = (i - 1) * L;
    const int n2 = std::min(n1 + M, N);
    windows_.push_back(HorizonWindow{i, n1, n2, n2 == N});
  }
}

const HorizonWindow &Schedule::window(int i) const
{
  if (i < 1 || i > T())
  {
    throw std::out_of_range("subproblem index " + std::to_string(i) + " outside [1, " +
                            std::to_string(T()) + "]");
  }
  return windows_[static_cast<std::size_t>(i - 1)];
}

int Schedule::last_visitor(int k) const
{
  if (k < 0 || k > N_)
  {
    throw std::out_of_range("stage " + std::to_string(k) + " outside [0, N]");
  }
  return std::min(T(), k / L_ + 1);
}

int Schedule::scan_count(int k, int i) const
{
  if (k < 0 || k > N_ || i < 1 || i > T())
  {
    throw std::out_of_range("scan_count arguments out of range");
  }
  if (k >= N_)
  {
    return 0;
  }
  // h with n1(h) <= k < n1(h) + M, restricted to h < i.
  const int lo = std::max(1, floor_div(k - M_, L_) + 2);
  const int hi = std::min({i - 1, k / L_ + 1, T()});
  return std::max(0, hi - lo + 1);
}

int Schedule::copy_end(int i) const
{
  const auto &w = window(i);
  return std::max(w.n1, w.n2 - 2 * L_);
}

SubproblemSpec make_subproblem(const ProblemModel &model, const MpcConfig &cfg,
                               const Schedule &schedule, int i, const Vector &carried_state)
{
  const auto &win = schedule.window(i);
  SubproblemSpec spec;
  spec.window = win;
  spec.x_bar_n1 = carried_state;
  spec.mu = cfg.mu;
  spec.terminal_modified = !win.is_last;
  const int last_ref = win.is_last ? win.n2 - 1 : win.n2;
  for (int k = win.n1; k <= last_ref; ++k)
  {
    spec.references.push_back(model.reference(k));
  }
  if (spec.terminal_modified)
  {
    const auto n2 = static_cast<std::size_t>(win.n2);
    spec.x0_n2 = cfg.z0.x.at(n2);
    spec.u0_n2 = cfg.z0.u.at(n2);
    spec.lambda0_n2 = cfg.lambda0.at(win.n2);
  }
  return spec;
}

WindowIterate transfer_iterates(const WindowIterate &prev_output, const Trajectory &z0,
                                const DualTrajectory &lambda0, const Schedule &schedule, int i)
{
  if (i < 2)
  {
    throw std::invalid_argument("transfer applies to subproblems i >= 2");
  }
  const auto &win = schedule.window(i);
  const auto &prev = schedule.window(i - 1);
  if (prev_output.n1 != prev.n1 || prev_output.n2() != prev.n2)
  {
    throw std::invalid_argument("previous outputs missing for subproblem " +
                                std::to_string(i - 1));
  }
  const int last = schedule.copy_end(i);
  WindowIterate in = WindowIterate::from_full(z0, lambda0, win);
  for (int k = win.n1; k <= last; ++k)
  {
    in.x_at(k) = prev_output.x_at(k);
    in.u_at(k) = prev_output.u_at(k);
  }
  for (int j = win.n1 - 1; j <= last; ++j)
  {
    in.lambda_at(j) = prev_output.lambda_at(j);
  }
  return in;
}

WindowIterate newton_direction(const ProblemModel &model, const SubproblemSpec &spec,
                               const WindowIterate &iterate)
{
  KktSystem kkt = assemble_kkt(model, spec, iterate);
  return solve_saddle(kkt);
}

WindowIterate one_newton_step(const ProblemModel &model, const SubproblemSpec &spec,
                              const WindowIterate &input)
{
  WindowIterate out = input;
  out += newton_direction(model, spec, input);
  return out;
}

double stage_error(const Vector &x, const Vector *u, const Vector *lambda,
                   const OracleSolution &ref, int k, bool state_only)
{
  const auto uk = static_cast<std::size_t>(k);
  double s = (x - ref.z_star.x.at(uk)).squaredNorm();
  if (!state_only)
  {
    if (u)
      s += (*u - ref.z_star.u.at(uk)).squaredNorm();
    if (lambda)
      s += (*lambda - ref.lambda_star.at(k)).squaredNorm();
  }
  return std::sqrt(s);
}

namespace
{

std::vector<double> window_errors(const WindowIterate &w, const OracleSolution &ref)
{
  std::vector<double> psi;
  psi.reserve(w.x.size());
  for (int k = w.n1; k <= w.n2(); ++k)
  {
    if (k == w.n2())
    {
      psi.push_back(stage_error(w.x_at(k), nullptr, nullptr, ref, k, true));
    }
    else
    {
      psi.push_back(stage_error(w.x_at(k), &w.u_at(k), &w.lambda_at(k), ref, k, false));
    }
  }
  return psi;
}

} // namespace

MpcRunRecord run_mpc(const ProblemModel &model, const MpcConfig &cfg, const OracleSolution *oracle,
                     const MpcOptions &opts)
{
  cfg.validate(model);
  const Schedule schedule(cfg.N, cfg.M, cfg.L);
  const int N = cfg.N;

  MpcRunRecord rec;
  rec.S = schedule.S();
  rec.z_hat = Trajectory::zeros(model.dims());
  rec.lambda_hat = DualTrajectory::zeros(model.dims());
  rec.lambda_hat.at(-1) = cfg.lambda0.at(-1);
  rec.has_errors = oracle != nullptr;

  WindowIterate prev;
  for (int i = 1; i <= schedule.T(); ++i)
  {
    const auto &win = schedule.window(i);
    WindowIterate input = i == 1 ? WindowIterate::from_full(cfg.z0, cfg.lambda0, win)
                                 : transfer_iterates(prev, cfg.z0, cfg.lambda0, schedule, i);
    const SubproblemSpec spec = make_subproblem(model, cfg, schedule, i, input.x_at(win.n1));

    for (int k = win.n1; k <= win.n2; ++k)
    {
      if (schedule.last_visitor(k) != i)
        continue;
      const auto uk = static_cast<std::size_t>(k);
      rec.z_hat.x[uk] = input.x_at(k);
      if (k < N)
      {
        rec.z_hat.u[uk] = input.u_at(k);
        rec.lambda_hat.at(k) = input.lambda_at(k);
      }
    }

    WindowIterate output = one_newton_step(model, spec, input);

    SubproblemRecord sub;
    sub.window = win;
    if (oracle)
    {
      sub.psi0 = window_errors(input, *oracle);
      sub.psi1 = window_errors(output, *oracle);
    }
    if (opts.keep_iterates)
    {
      sub.input = std::move(input);
      sub.output = output;
    }
    rec.subproblems.push_back(std::move(sub));
    prev = std::move(output);
  }

  if (oracle)
  {
    rec.output_errors.reserve(static_cast<std::size_t>(N + 1));
    for (int k = 0; k <= N; ++k)
    {
      const auto uk = static_cast<std::size_t>(k);
      if (k == N)
      {
        rec.output_errors.push_back(stage_error(rec.z_hat.x[uk], nullptr, nullptr, *oracle, k, true));
      }
      else
      {
        rec.output_errors.push_back(stage_error(rec.z_hat.x[uk], &rec.z_hat.u[uk],
                                                &rec.lambda_hat.at(k), *oracle, k, false));
      }
    }
  }
  return rec;
}

GroupErrors compute_group_errors(const MpcRunRecord &record, const Schedule &schedule)
{
  if (!record.has_errors)
  {
    throw std::invalid_argument("group errors need a run with an attached oracle");
  }
  GroupErrors out;
  const int S = schedule.S();
  out.omega.assign(static_cast<std::size_t>(S), std::numeric_limits<double>::quiet_NaN());
  for (const auto &sub : record.subproblems)
  {
    const auto &w = sub.window;
    for (int k = w.n1; k <= w.n2; ++k)
    {
      const int s = schedule.scan_count(k, w.index);
      if (s < 0 || s >= S)
        continue;
      const double psi = sub.psi0[static_cast<std::size_t>(k - w.n1)];
      double &slot = out.omega[static_cast<std::size_t>(s)];
      slot = std::isnan(slot) ? psi : std::max(slot, psi);
    }
  }

  const int N = schedule.N();
  const int L = schedule.L();
  for (int g = 0; g * L < N; ++g)
  {
    double m = 0.0;
    for (int k = g * L; k < std::min((g + 1) * L, N); ++k)
    {
      m = std::max(m, record.output_errors[static_cast<std::size_t>(k)]);
    }
    out.group_log_max.push_back(std::log(std::max(m, 1e-300)));
  }
  return out;
}

} // namespace lagmpc
