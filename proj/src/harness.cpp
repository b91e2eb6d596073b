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

#include "lagmpc/harness.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace lagmpc
{

using nlohmann::json;

namespace
{

constexpr int kDerivativePoints = 20;
constexpr double kDerivativeTol = 1e-6;

const std::vector<std::pair<std::string, std::string>> kDecisionVersions = {
    {"derivative_interface", "stage-block callbacks, d_{-1} stored as xbar_0 (v1)"},
    {"finite_differences", "central, h = cbrt(eps) * max(1, |v|) (v1)"},
    {"kkt_factorization", "banded LU, partial pivoting within the stage band (v1)"},
    {"singularity_threshold", "pivot < 1e-12 * max|K| (v1)"},
    {"reduced_hessian", "QR null space up to 300 stages, Riccati bisection above (v1)"},
    {"decay_probe", "SVD block norms, log-linear fit of the per-offset maximum (v1)"},
    {"mu", "user value; threshold reported as a diagnostic only (v1)"},
    {"oracle", "Newton, Armijo 1e-4 on |grad L|, factor 0.5, 40 backtracks (v1)"},
    {"oracle_defaults", "tol 1e-10, max_iter 100, zero start (v1)"},
    {"mpc_lag", "M = S L with S >= 2, M <= N (v1)"},
    {"mpc_transfer", "copy stages [n1, max(n1, n2 - 2L)], guess elsewhere (v1)"},
    {"mpc_output", "pre-Newton iterate of the last visiting subproblem (v1)"},
    {"error_norm", "Euclidean stage norm, state-only at n2 (v1)"},
    {"desk_scaling", "N = min(full case N, 2000) unless configured (v1)"},
    {"config_format", "JSON, strict keys (v1)"},
    {"trajectory_rows", "k = 0..N-1, since u and lambda end at N-1 (v1)"},
};

const std::set<std::string> kIntegerColumns = {"k", "M", "S", "group", "side", "offset"};

std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17e", v);
  return buf;
}

int case_id_from_label(const std::string &label)
{
  if (label == "case1")
    return 1;
  if (label == "case2")
    return 2;
  if (label == "case3")
    return 3;
  return 0;
}

template <typename T>
T require(const json &j, const char *key)
{
  if (!j.contains(key))
  {
    throw ConfigError(std::string("missing config key '") + key + "'");
  }
  try
  {
    return j.at(key).get<T>();
  }
  catch (const json::exception &e)
  {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

} // namespace

std::uint64_t fnv1a64(const std::string &data)
{
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data)
  {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void ExperimentConfig::validate() const
{
  if (N < 3)
    throw ConfigError("N must be at least 3");
  if (L < 1)
    throw ConfigError("L must be at least 1");
  if (!(mu >= 0.0) || !std::isfinite(mu))
    throw ConfigError("mu must be finite and non-negative");
  if (M_list.empty())
    throw ConfigError("M_list must not be empty");
  for (int M : M_list)
  {
    if (M % L != 0 || M / L < 2 || M > N)
    {
      throw ConfigError("M = " + std::to_string(M) + " must equal S*L with S >= 2 and M <= N");
    }
  }
  if (!(oracle_tol > 0.0))
    throw ConfigError("oracle_tol must be positive");
  if (params.N != N)
    throw ConfigError("benchmark horizon out of sync with N");
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(canonical); }

ExperimentConfig ExperimentConfig::parse(const std::string &json_text)
{
  json doc;
  try
  {
    doc = json::parse(json_text);
  }
  catch (const json::parse_error &e)
  {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object())
  {
    throw ConfigError("config must be a JSON object");
  }
  static const std::set<std::string> allowed = {"case", "N", "L", "mu", "M_list",
                                                "oracle_tol", "out_dir", "seed"};
  for (const auto &item : doc.items())
  {
    if (!allowed.count(item.key()))
    {
      throw ConfigError("unknown config key '" + item.key() + "'");
    }
  }

  ExperimentConfig cfg;
  if (!doc.contains("case"))
  {
    throw ConfigError("missing config key 'case'");
  }
  const json &c = doc.at("case");
  int default_N = 0;
  if (c.is_string())
  {
    cfg.case_label = c.get<std::string>();
    const int id = case_id_from_label(cfg.case_label);
    if (id == 0)
    {
      throw ConfigError("unknown case '" + cfg.case_label + "' (expected case1, case2 or case3)");
    }
    const TableCase tc = table_case(id);
    cfg.params = tc.params;
    default_N = tc.params.N;
  }
  else if (c.is_object())
  {
    static const std::set<std::string> case_keys = {"d_profile", "amplitude", "C1", "C2"};
    for (const auto &item : c.items())
    {
      if (!case_keys.count(item.key()))
      {
        throw ConfigError("unknown case key '" + item.key() + "'");
      }
    }
    cfg.case_label = "custom";
    try
    {
      cfg.params.profile = ReferenceProfile::parse(require<std::string>(c, "d_profile"),
                                                   require<double>(c, "amplitude"));
    }
    catch (const std::invalid_argument &e)
    {
      throw ConfigError(e.what());
    }
    cfg.params.C1 = require<double>(c, "C1");
    cfg.params.C2 = require<double>(c, "C2");
  }
  else
  {
    throw ConfigError("'case' must be a case name or an object");
  }

  if (doc.contains("N"))
    cfg.N = require<int>(doc, "N");
  else if (default_N > 0)
    cfg.N = default_N;
  else
    throw ConfigError("missing config key 'N' (required for custom cases)");
  cfg.L = require<int>(doc, "L");
  cfg.mu = require<double>(doc, "mu");
  cfg.M_list = require<std::vector<int>>(doc, "M_list");
  if (doc.contains("oracle_tol"))
    cfg.oracle_tol = require<double>(doc, "oracle_tol");
  if (doc.contains("out_dir"))
    cfg.out_dir = require<std::string>(doc, "out_dir");
  if (doc.contains("seed"))
    cfg.seed = require<std::uint64_t>(doc, "seed");
  cfg.params.N = cfg.N;
  cfg.validate();

  // Hash the resolved experiment, not the output location.
  json canon = {{"case", cfg.case_label},
                {"d_profile", cfg.params.profile.name()},
                {"amplitude", cfg.params.profile.amplitude},
                {"C1", cfg.params.C1},
                {"C2", cfg.params.C2},
                {"N", cfg.N},
                {"L", cfg.L},
                {"mu", cfg.mu},
                {"M_list", cfg.M_list},
                {"oracle_tol", cfg.oracle_tol},
                {"seed", cfg.seed}};
  cfg.canonical = canon.dump();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open config file " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const std::vector<std::string> &dataset_schema(const std::string &kind)
{
  static const std::map<std::string, std::vector<std::string>> schemas = {
      {"trajectory", {"k", "x_hat", "u_hat", "lambda_hat", "x_star", "u_star", "lambda_star"}},
      {"group_trend", {"group", "log_max_error"}},
      {"end_zoom", {"side", "group", "log_max_error"}},
      {"error_vs_M", {"M", "S", "log_omega"}},
      {"decay", {"offset", "max_block_norm", "log_max_block_norm"}},
  };
  const auto it = schemas.find(kind);
  if (it == schemas.end())
  {
    throw std::invalid_argument("unknown dataset kind '" + kind + "'");
  }
  return it->second;
}

void FigureDataset::validate() const
{
  if (columns != dataset_schema(kind))
  {
    throw std::invalid_argument("dataset '" + name + "' does not match the " + kind + " schema");
  }
  for (const auto &row : rows)
  {
    if (row.size() != columns.size())
    {
      throw std::invalid_argument("dataset '" + name + "' has a row of wrong width");
    }
  }
}

void emit_csv(const FigureDataset &dataset, const std::filesystem::path &path)
{
  dataset.validate();
  std::ofstream out(path);
  if (!out)
  {
    throw std::runtime_error("cannot write " + path.string());
  }
  for (std::size_t c = 0; c < dataset.columns.size(); ++c)
  {
    out << (c ? "," : "") << dataset.columns[c];
  }
  out << '\n';
  for (const auto &row : dataset.rows)
  {
    for (std::size_t c = 0; c < row.size(); ++c)
    {
      out << (c ? "," : "");
      if (kIntegerColumns.count(dataset.columns[c]))
        out << static_cast<long long>(std::llround(row[c]));
      else
        out << format_double(row[c]);
    }
    out << '\n';
  }
  if (!out)
  {
    throw std::runtime_error("write failed for " + path.string());
  }
  if (dataset.fit)
  {
    auto fit_path = path;
    fit_path.replace_filename(dataset.name + "_fit.csv");
    std::ofstream f(fit_path);
    if (!f)
    {
      throw std::runtime_error("cannot write " + fit_path.string());
    }
    f << "slope,intercept,r_squared\n"
      << format_double(dataset.fit->slope) << ',' << format_double(dataset.fit->intercept) << ','
      << format_double(dataset.fit->r_squared) << '\n';
  }
}

std::string CertificateReport::summary() const
{
  std::ostringstream os;
  os << std::setprecision(17);
  os << "derivatives: " << (derivatives.passed ? "PASS" : "FAIL") << " (" << derivative_points
     << " points, rel_tol " << derivatives.rel_tol << ")\n";
  for (const auto &b : derivatives.blocks)
  {
    os << "  " << b.kind << ": max_rel_error " << b.max_rel_error << " at stage "
       << b.worst_stage << "\n";
  }
  os << "oracle: " << (oracle.converged ? "converged" : "NOT converged") << ", residual "
     << oracle.kkt_residual << ", iterations " << oracle.iterations << "\n";
  if (!oracle_error.empty())
  {
    os << "  aborted: " << oracle_error << "\n";
    os << "sosc: FAIL, not evaluated without an oracle solution\n";
    os << "controllability: FAIL, not evaluated without an oracle solution\n";
  }
  else
  {
    os << "sosc: " << (assumptions.sosc_passed ? "PASS" : "FAIL") << ", reduced Hessian min eig "
       << assumptions.reduced_hessian_min_eig << " vs gamma_H " << assumptions.gamma_H << "\n";
    os << "controllability: " << (assumptions.controllability_passed ? "PASS" : "FAIL")
       << ", min_k lambda_min(Xi Xi^T) " << assumptions.controllability_min << " vs gamma_C "
       << assumptions.gamma_C << " (t = " << assumptions.t << ")";
    if (!assumptions.uncontrollable_stages.empty())
    {
      os << ", first failing stage " << assumptions.uncontrollable_stages.front();
    }
    os << "\n";
  }
  os << "mu threshold (diagnostic): " << mu_threshold << "\n";
  return os.str();
}

bool CaseResult::passed() const
{
  if (!certificates.passed())
    return false;
  return std::all_of(runs.begin(), runs.end(), [](const MRunSummary &r) { return r.ok; });
}

std::shared_ptr<const BenchmarkModel> build_model(const ExperimentConfig &cfg)
{
  BenchmarkParams p = cfg.params;
  p.N = cfg.N;
  return make_benchmark(p);
}

CertificateReport certify(const ExperimentConfig &cfg, const ProblemModel &model)
{
  CertificateReport rep;
  const auto &dims = model.dims();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const auto draw = [&](Vector &v) {
    for (Eigen::Index r = 0; r < v.size(); ++r)
      v(r) = unif(rng);
  };

  std::map<std::string, DerivativeBlockResult> worst;
  rep.derivatives.rel_tol = kDerivativeTol;
  std::set<int> failing;
  for (int p = 0; p < kDerivativePoints; ++p)
  {
    Trajectory z = Trajectory::zeros(dims);
    DualTrajectory l = DualTrajectory::zeros(dims);
    for (auto &v : z.x)
      draw(v);
    for (auto &v : z.u)
      draw(v);
    for (auto &v : l.lambda)
      draw(v);
    const auto r = check_derivatives(model, z, l, kDerivativeTol);
    for (const auto &b : r.blocks)
    {
      auto it = worst.find(b.kind);
      if (it == worst.end() || b.max_rel_error > it->second.max_rel_error)
        worst[b.kind] = b;
    }
    failing.insert(r.failing_stages.begin(), r.failing_stages.end());
    rep.derivatives.passed = rep.derivatives.passed && r.passed;
    if (p == 0)
    {
      for (const auto &b : r.blocks)
        rep.derivatives.blocks.push_back(b);
    }
  }
  for (auto &b : rep.derivatives.blocks)
    b = worst[b.kind];
  rep.derivatives.failing_stages.assign(failing.begin(), failing.end());
  rep.derivative_points = kDerivativePoints;

  OracleOptions opts;
  opts.tol = cfg.oracle_tol;
  rep.gamma_H_claimed = cfg.params.gamma_H();
  try
  {
    rep.oracle = solve_full(model, opts);
    rep.assumptions =
        verify_solution_assumptions(model, rep.oracle, rep.gamma_H_claimed, 1.0, 1, 1e-6);
  }
  catch (const std::runtime_error &e)
  {
    rep.oracle.converged = false;
    rep.oracle.kkt_residual = std::numeric_limits<double>::quiet_NaN();
    rep.oracle_error = e.what();
    rep.assumptions.gamma_H = rep.gamma_H_claimed;
  }
  rep.mu_threshold = mu_threshold(cfg.params.upper_bound(), 1.0, 1);
  return rep;
}

namespace
{

MRunSummary run_single_m(const ProblemModel &model, const OracleSolution &oracle,
                         const ExperimentConfig &cfg, int M, FigureDataset &trajectory)
{
  MRunSummary sum;
  sum.M = M;
  sum.S = M / cfg.L;
  try
  {
    const MpcConfig mcfg = MpcConfig::with_zero_guess(model, M, cfg.L, cfg.mu);
    MpcOptions opts;
    opts.keep_iterates = false;
    const MpcRunRecord rec = run_mpc(model, mcfg, &oracle, opts);
    const Schedule schedule(cfg.N, M, cfg.L);
    const GroupErrors ge = compute_group_errors(rec, schedule);
    sum.omega = ge.omega;
    sum.group_log_max = ge.group_log_max;
    for (const auto &sub : rec.subproblems)
    {
      const int i = sub.window.index;
      double m = 0.0;
      if (i >= 2)
      {
        for (int k = sub.window.n1; k <= schedule.copy_end(i); ++k)
          m = std::max(m, sub.psi0[static_cast<std::size_t>(k - sub.window.n1)]);
      }
      sum.transferred_max.push_back(m);
    }

    trajectory.kind = "trajectory";
    trajectory.name = "trajectory_M" + std::to_string(M);
    trajectory.columns = dataset_schema("trajectory");
    for (int k = 0; k < cfg.N; ++k)
    {
      const auto uk = static_cast<std::size_t>(k);
      trajectory.rows.push_back({static_cast<double>(k), rec.z_hat.x[uk](0), rec.z_hat.u[uk](0),
                                 rec.lambda_hat.at(k)(0), oracle.z_star.x[uk](0),
                                 oracle.z_star.u[uk](0), oracle.lambda_star.at(k)(0)});
    }
    sum.ok = true;
  }
  catch (const std::exception &e)
  {
    sum.ok = false;
    sum.error = e.what();
  }
  return sum;
}

} // namespace

CaseResult run_case(const ExperimentConfig &cfg)
{
  cfg.validate();
  const auto model = build_model(cfg);
  CaseResult result;
  result.certificates = certify(cfg, *model);
  const OracleSolution &oracle = result.certificates.oracle;
  if (!oracle.converged)
  {
    for (int M : cfg.M_list)
    {
      MRunSummary s;
      s.M = M;
      s.S = M / cfg.L;
      s.error = "oracle did not converge";
      result.runs.push_back(s);
    }
    return result;
  }

  std::vector<FigureDataset> trajectories(cfg.M_list.size());
  std::vector<std::future<MRunSummary>> futures;
  for (std::size_t m = 0; m < cfg.M_list.size(); ++m)
  {
    futures.push_back(std::async(std::launch::async, run_single_m, std::cref(*model),
                                 std::cref(oracle), std::cref(cfg), cfg.M_list[m],
                                 std::ref(trajectories[m])));
  }
  for (auto &f : futures)
  {
    result.runs.push_back(f.get());
  }

  FigureDataset err;
  err.kind = "error_vs_M";
  err.name = "error_vs_M";
  err.columns = dataset_schema("error_vs_M");
  std::vector<double> ms, logs;
  for (std::size_t m = 0; m < result.runs.size(); ++m)
  {
    const auto &run = result.runs[m];
    if (!run.ok)
      continue;
    result.datasets.push_back(std::move(trajectories[m]));

    FigureDataset trend;
    trend.kind = "group_trend";
    trend.name = "group_trend_M" + std::to_string(run.M);
    trend.columns = dataset_schema("group_trend");
    for (std::size_t g = 0; g < run.group_log_max.size(); ++g)
      trend.rows.push_back({static_cast<double>(g), run.group_log_max[g]});
    result.datasets.push_back(trend);

    FigureDataset zoom;
    zoom.kind = "end_zoom";
    zoom.name = "end_zoom_M" + std::to_string(run.M);
    zoom.columns = dataset_schema("end_zoom");
    const std::size_t G = run.group_log_max.size();
    const std::size_t width = std::min<std::size_t>(2 * static_cast<std::size_t>(run.S), G);
    for (std::size_t g = 0; g < width; ++g)
      zoom.rows.push_back({0.0, static_cast<double>(g), run.group_log_max[g]});
    for (std::size_t g = G - width; g < G; ++g)
      zoom.rows.push_back({1.0, static_cast<double>(g), run.group_log_max[g]});
    result.datasets.push_back(zoom);

    const double omega_last = run.omega.back();
    const double lo = std::log(std::max(omega_last, 1e-300));
    err.rows.push_back({static_cast<double>(run.M), static_cast<double>(run.S), lo});
    ms.push_back(run.M);
    logs.push_back(lo);
  }
  if (ms.size() >= 2)
  {
    err.fit = fit_line(ms, logs);
  }
  result.datasets.push_back(err);
  return result;
}

DecayProbeResult probe_decay(const ExperimentConfig &cfg, int max_offset)
{
  const auto model = build_model(cfg);
  OracleOptions opts;
  opts.tol = cfg.oracle_tol;
  const OracleSolution sol = solve_full(*model, opts);
  if (!sol.converged)
  {
    throw std::runtime_error("oracle did not converge; residual " +
                             format_double(sol.kkt_residual));
  }
  const auto spec = full_horizon_spec(*model);
  KktSystem kkt = assemble_kkt(
      *model, spec, WindowIterate::from_full(sol.z_star, sol.lambda_star, spec.window));

  DecayProbeResult out;
  out.report = kkt_inverse_decay_probe(kkt, max_offset);
  out.dataset.kind = "decay";
  out.dataset.name = "decay";
  out.dataset.columns = dataset_schema("decay");
  for (std::size_t o = 0; o < out.report.envelope.size(); ++o)
  {
    const double v = out.report.envelope[o];
    out.dataset.rows.push_back({static_cast<double>(o), v, std::log(v)});
  }
  out.dataset.fit = LineFit{std::log(out.report.fitted_rho), out.report.fitted_logK,
                            out.report.r_squared};
  return out;
}

void write_manifest(const ExperimentConfig &cfg, const std::filesystem::path &dir,
                    const std::string &command)
{
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.txt");
  if (!out)
  {
    throw std::runtime_error("cannot write manifest in " + dir.string());
  }
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(cfg.hash()));
  out << "command: " << command << "\n";
  out << "config_hash: fnv1a64:" << hash << "\n";
  out << "config: " << cfg.canonical << "\n";
  out << "oracle_tol: " << format_double(cfg.oracle_tol) << "\n";
  out << "decisions:\n";
  for (const auto &[key, version] : kDecisionVersions)
  {
    out << "  " << key << ": " << version << "\n";
  }
}

void write_case_outputs(const ExperimentConfig &cfg, const CaseResult &result,
                        const std::filesystem::path &dir)
{
  std::filesystem::create_directories(dir);
  for (const auto &ds : result.datasets)
  {
    emit_csv(ds, dir / (ds.name + ".csv"));
  }
  std::ofstream cert(dir / "certificates.txt");
  cert << result.certificates.summary();
  for (const auto &run : result.runs)
  {
    cert << "M = " << run.M << ": " << (run.ok ? "ok" : "FAILED: " + run.error) << "\n";
  }
  write_manifest(cfg, dir, "run");
}

} // namespace lagmpc
