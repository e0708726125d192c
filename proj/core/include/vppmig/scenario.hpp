// Copyright 2026 The vppmig Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * \file vppmig/scenario.hpp
 *
 * \brief Scenario files (JSON), synthetic scenario generation, and run
 *  artifact persistence (JSON + CSV).
 */

#ifndef VPPMIG_SCENARIO_HPP
#define VPPMIG_SCENARIO_HPP

#include <vppmig/admm.hpp>
#include <vppmig/allocate.hpp>
#include <vppmig/assemble.hpp>
#include <vppmig/model.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace vppmig::scenario {

inline constexpr const char* kScenarioSchema = "vppmig-scenario/1";
inline constexpr const char* kResultsSchema = "vppmig-results/1";

/// Algorithm inputs carried alongside the system data.
struct SolverConfig {
  double beta = 0.9;
  double gamma = 0.1;
  double rho = 1.0;
  double tolerance = 1e-4;
  int max_iterations = 500;
};

struct ScenarioFile {
  std::string name;
  model::NetworkConfig network;
  std::vector<model::VppProfile> vpps;
  SolverConfig solver;

  /// Context with network.beta and network.gamma taken from `solver`.
  assemble::ProblemContext context() const;
};

/// Parses and fully validates a scenario document. Schema violations throw
/// SchemaError with the field path; invariant violations throw SchemaError
/// or InvalidArgument naming the offending values.
ScenarioFile parse_scenario(const nlohmann::json& doc);
nlohmann::json to_json(const ScenarioFile& file);

ScenarioFile read_scenario(const std::filesystem::path& path);
void write_scenario(const ScenarioFile& file, const std::filesystem::path& path);

/// Loads, validates and applies defaults (SoC_0 = 0.5, rho = 1, tol = 1e-4).
assemble::ProblemContext load_scenario(const std::filesystem::path& path);

/// Deterministic synthetic scenario. `complementarity` in [0, 1] phase-shifts
/// PV peaks and price valleys across VPPs and diversifies their assets;
/// 0 yields identical VPPs. For N = 4 the distance matrix is the four-site
/// US data-center table; otherwise sites are drawn on a 4500 km square.
ScenarioFile generate_synthetic(std::uint64_t seed, std::size_t n_vpps, std::size_t horizon,
                                double complementarity);

/// The four-site distance table (km).
std::vector<std::vector<double>> us_datacenter_distances();

struct ModeResult {
  std::vector<model::ScheduleDecision> schedules;
  std::vector<model::DrMetrics> dr;  ///< per VPP (independent) or one aggregate entry
  std::vector<double> costs;         ///< per-VPP objective (independent) or operating cost
  double objective = 0.0;
};

struct RunArtifacts {
  std::string scenario_name;
  SolverConfig settings;
  std::vector<std::string> vpp_ids;
  ModeResult independent;
  ModeResult cooperative;
  model::MigrationTensor migration;
  allocate::AllocationReport allocation;
  std::vector<admm::TraceRow> trace;
  std::string admm_status;
  int admm_iterations = 0;
};

struct Manifest {
  std::filesystem::path directory;
  std::vector<std::string> files;
};

inline constexpr const char* kResultsFile = "results.json";
inline constexpr const char* kSchedulesFile = "schedules.csv";
inline constexpr const char* kMigrationFile = "migration.csv";
inline constexpr const char* kTraceFile = "trace.csv";
inline constexpr const char* kSummaryFile = "summary.txt";
inline constexpr const char* kManifestFile = "manifest.json";

/// Writes results.json, schedules.csv, migration.csv (i < j rows only),
/// trace.csv, summary.txt and manifest.json. Throws IoError.
Manifest export_run(const RunArtifacts& artifacts, const std::filesystem::path& dir);

/// Reads results.json back.
RunArtifacts load_run(const std::filesystem::path& dir);

nlohmann::json to_json(const RunArtifacts& artifacts);
RunArtifacts run_from_json(const nlohmann::json& doc);

/// Tables mirroring the demand-response comparison (d, similarity,
/// incentive per VPP and cooperative) and the cost comparison.
std::string format_summary(const RunArtifacts& artifacts);

}  // namespace vppmig::scenario

#endif  // VPPMIG_SCENARIO_HPP
