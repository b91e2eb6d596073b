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

#include "lagmpc/benchmark.hpp"
#include "lagmpc/derivative_check.hpp"
#include "lagmpc/mpc.hpp"
#include "lagmpc/oracle.hpp"
#include "lagmpc/structure.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lagmpc
{

struct ExperimentConfig
{
  /// "case1".."case3" or "custom".
  std::string case_label;
  BenchmarkParams params;
  int N = 0;
  int L = 1;
  double mu = 0.0;
  std::vector<int> M_list;
  double oracle_tol = 1e-10;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  /// Canonical serialisation used for the manifest hash.
  std::string canonical;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
  std::uint64_t hash() const;

  /// Parses the JSON document; unknown keys are rejected.
  static ExperimentConfig parse(const std::string &json_text);
  static ExperimentConfig load(const std::filesystem::path &path);
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string &data);

struct FigureDataset
{
  std::string kind; // trajectory, group_trend, end_zoom, error_vs_M, decay
  std::string name; // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::optional<LineFit> fit;

  /// Column names must match the schema of kind and rows must be complete.
  void validate() const;
};

/// Expected columns for a dataset kind; throws for unknown kinds.
const std::vector<std::string> &dataset_schema(const std::string &kind);

/// Header row plus one line per row; integer columns are printed as integers
/// and everything else as %.17e. A fit, when present, goes to <name>_fit.csv.
void emit_csv(const FigureDataset &dataset, const std::filesystem::path &path);

struct CertificateReport
{
  DerivativeReport derivatives;
  int derivative_points = 0;
  OracleSolution oracle;
  /// Set when the oracle aborted; the assumption checks are then skipped.
  std::string oracle_error;
  AssumptionCertificate assumptions;
  double gamma_H_claimed = 0.0;
  double mu_threshold = 0.0;

  bool passed() const { return derivatives.passed && oracle.converged && assumptions.passed(); }
  std::string summary() const;
};

struct MRunSummary
{
  int M = 0;
  int S = 0;
  bool ok = false;
  std::string error;
  std::vector<double> omega;
  std::vector<double> group_log_max;
  /// Largest Psi^0 over transferred stages, per subproblem.
  std::vector<double> transferred_max;
};

struct CaseResult
{
  CertificateReport certificates;
  std::vector<MRunSummary> runs;
  std::vector<FigureDataset> datasets;

  bool passed() const;
};

/// Model of the configured case at the configured N.
std::shared_ptr<const BenchmarkModel> build_model(const ExperimentConfig &cfg);

/// Derivative check at 20 seeded random points in [-1, 1], oracle solve, and
/// SOSC / controllability (t = 1, gamma_C = 1) at the oracle solution.
CertificateReport certify(const ExperimentConfig &cfg, const ProblemModel &model);

/// Full experiment: certificates, one MPC run per M against the oracle, and
/// the figure datasets. Runs for distinct M execute concurrently.
CaseResult run_case(const ExperimentConfig &cfg);

struct DecayProbeResult
{
  DecayFitReport report;
  FigureDataset dataset;
};

DecayProbeResult probe_decay(const ExperimentConfig &cfg, int max_offset);

/// Writes manifest.txt with the config hash, oracle tolerance and the
/// versions of the numerical choices baked into this build.
void write_manifest(const ExperimentConfig &cfg, const std::filesystem::path &dir,
                    const std::string &command);

/// Writes every dataset of the result plus certificates.txt and the manifest.
void write_case_outputs(const ExperimentConfig &cfg, const CaseResult &result,
                        const std::filesystem::path &dir);

} // namespace lagmpc
