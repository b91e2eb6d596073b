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

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

using namespace lagmpc;

namespace
{

ExperimentConfig load_config(const std::string &path, const std::string &out_dir)
{
  ExperimentConfig cfg = ExperimentConfig::load(path);
  if (!out_dir.empty())
  {
    cfg.out_dir = out_dir;
  }
  return cfg;
}

int cmd_run(const std::string &path, const std::string &out_dir)
{
  const ExperimentConfig cfg = load_config(path, out_dir);
  const CaseResult result = run_case(cfg);
  write_case_outputs(cfg, result, cfg.out_dir);

  std::cout << result.certificates.summary();
  for (const auto &run : result.runs)
  {
    if (!run.ok)
    {
      std::cout << "M = " << run.M << ": solver abort: " << run.error << "\n";
      continue;
    }
    std::cout << "M = " << run.M << " (S = " << run.S << "): log Omega_{S-1} = "
              << std::log(run.omega.back()) << "\n";
  }
  for (const auto &ds : result.datasets)
  {
    if (ds.kind == "error_vs_M" && ds.fit)
    {
      std::cout << "error_vs_M fit: slope " << ds.fit->slope << ", r^2 " << ds.fit->r_squared
                << "\n";
    }
  }
  std::cout << "outputs written to " << cfg.out_dir << "\n";
  return result.passed() ? 0 : 1;
}

int cmd_certify(const std::string &path, const std::string &out_dir)
{
  const ExperimentConfig cfg = load_config(path, out_dir);
  const auto model = build_model(cfg);
  const CertificateReport rep = certify(cfg, *model);
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream(std::filesystem::path(cfg.out_dir) / "certificates.txt") << rep.summary();
  write_manifest(cfg, cfg.out_dir, "certify");
  std::cout << rep.summary();
  return rep.passed() ? 0 : 1;
}

int cmd_probe(const std::string &path, const std::string &out_dir, int max_offset)
{
  const ExperimentConfig cfg = load_config(path, out_dir);
  const DecayProbeResult res = probe_decay(cfg, max_offset);
  std::filesystem::create_directories(cfg.out_dir);
  emit_csv(res.dataset, std::filesystem::path(cfg.out_dir) / "decay.csv");
  write_manifest(cfg, cfg.out_dir, "probe-decay");
  std::cout << "fitted rho " << res.report.fitted_rho << ", log K " << res.report.fitted_logK
            << ", r^2 " << res.report.r_squared << " over offsets 0.."
            << res.report.envelope.size() - 1 << "\n";
  return 0;
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Lag-L online MPC with one Newton step per horizon"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int max_offset = 20;

  auto *run = app.add_subcommand("run", "run every M of a case and write the figure datasets");
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out-dir", out_dir, "override the config's out_dir");

  auto *cert = app.add_subcommand("certify", "derivative, SOSC and controllability checks");
  cert->add_option("config", config_path, "experiment config (JSON)")->required();
  cert->add_option("--out-dir", out_dir, "override the config's out_dir");

  auto *probe = app.add_subcommand("probe-decay", "block decay of the KKT inverse at the solution");
  probe->add_option("config", config_path, "experiment config (JSON)")->required();
  probe->add_option("--max-offset", max_offset, "largest stage offset in the fit")
      ->required()
      ->check(CLI::PositiveNumber);
  probe->add_option("--out-dir", out_dir, "override the config's out_dir");

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (run->parsed())
      return cmd_run(config_path, out_dir);
    if (cert->parsed())
      return cmd_certify(config_path, out_dir);
    return cmd_probe(config_path, out_dir, max_offset);
  }
  catch (const ConfigError &e)
  {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
