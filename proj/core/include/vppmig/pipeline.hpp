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
 * \file vppmig/pipeline.hpp
 *
 * \brief End-to-end orchestration used by the command-line tool: the
 *  two-phase pipeline (cooperative optimization, then cost allocation), the
 *  invariant validation suite, and the scalability benchmark.
 */

#ifndef VPPMIG_PIPELINE_HPP
#define VPPMIG_PIPELINE_HPP

#include <vppmig/admm.hpp>
#include <vppmig/scenario.hpp>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace vppmig::pipeline {

struct IndependentSolution {
  std::vector<model::ScheduleDecision> schedules;
  std::vector<model::DrMetrics> dr;
  std::vector<double> objectives;  ///< c({i})
};

/// Solves every VPP's independent problem. Throws SolverFailure naming the
/// VPP on a non-optimal outcome.
IndependentSolution solve_independent(const assemble::ProblemContext& ctx,
                                      const program::SolverSettings& settings = {});

struct CentralizedSolution {
  std::vector<model::ScheduleDecision> schedules;
  model::MigrationTensor migration;
  model::DrMetrics aggregate_dr;
  double objective = 0.0;
  std::vector<double> primal;
};

CentralizedSolution solve_centralized(const assemble::ProblemContext& ctx,
                                      const program::SolverSettings& settings = {});

/// Checks of the allocation identities; empty when all hold.
std::vector<std::string> allocation_identity_failures(const allocate::AllocationReport& report,
                                                      double relative_tolerance = 1e-9);

struct PipelineOutcome {
  scenario::RunArtifacts artifacts;
  admm::AdmmStatus admm_status = admm::AdmmStatus::iteration_limit;
  std::optional<scenario::Manifest> manifest;
};

/// Phase 1 (independent solves and ADMM) followed by Phase 2 (allocation),
/// then export to `out_dir` when given. The export also happens when ADMM
/// stops at the iteration limit. Throws InvalidArgument when beta < 1/2 and
/// Error if an allocation identity fails.
PipelineOutcome run_pipeline(const assemble::ProblemContext& ctx,
                             const scenario::SolverConfig& config,
                             const std::optional<std::filesystem::path>& out_dir,
                             const std::string& scenario_name = {});

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs the invariant suite on a scenario and a reduced N = 2, T = 6
/// synthetic instance derived from `seed`.
std::vector<PropertyResult> run_validation(const assemble::ProblemContext& ctx,
                                           const scenario::SolverConfig& config,
                                           std::uint64_t seed = 7);

struct BenchRow {
  std::size_t n_vpps = 0;
  double centralized_seconds = 0.0;
  double admm_seconds = 0.0;
  int admm_iterations = 0;
  double improved_seconds = 0.0;
  std::size_t improved_evaluations = 0;
  std::optional<double> standard_seconds;  ///< only for N <= 8
  std::optional<std::size_t> standard_evaluations;
};

struct BenchOptions {
  std::size_t n_min = 2;
  std::size_t n_max = 5;
  std::size_t horizon = 12;
  int repeats = 1;
  std::uint64_t seed = 11;
  double complementarity = 0.8;
  int admm_max_iterations = 500;
};

std::vector<BenchRow> run_bench(const BenchOptions& options);
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace vppmig::pipeline

#endif  // VPPMIG_PIPELINE_HPP
