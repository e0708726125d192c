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
 * \file vppmig/admm.hpp
 *
 * \brief Consensus ADMM coordinator for the cooperative problem.
 *
 * Each iteration solves the N local subproblems (in parallel), updates the
 * antisymmetric migration globals in closed form, solves the small global
 * load-curve program, and finally moves the duals. All consensus quantities
 * are kept in per-unit scaled form (see ConsensusScaling).
 */

#ifndef VPPMIG_ADMM_HPP
#define VPPMIG_ADMM_HPP

#include <vppmig/assemble.hpp>
#include <vppmig/errors.hpp>
#include <vppmig/model.hpp>
#include <vppmig/program.hpp>

#include <cstddef>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace vppmig::admm {

using assemble::ConsensusScaling;
using assemble::ConsensusState;
using assemble::ProblemContext;

using SolverFactory = std::function<std::unique_ptr<program::ConicSolver>()>;

struct AdmmSettings {
  double rho = 1.0;
  /// Stopping threshold per sqrt(consensus dimension).
  double tolerance = 1e-4;
  int max_iterations = 500;
  program::SolverSettings solver{1e-8, 200};
  bool parallel = true;
  /// After the loop, fix the consensus variables at their global values and
  /// re-solve each local problem so the returned point is exactly feasible.
  bool recover_primal = true;
  SolverFactory solver_factory;  ///< defaults to ClarabelSolver
};

enum class AdmmStatus { converged, iteration_limit };

const char* to_string(AdmmStatus status) noexcept;

struct TraceRow {
  int iteration = 0;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double wall_seconds = 0.0;
};

struct AdmmState {
  int iteration = 0;
  ConsensusState globals;
  ConsensusState duals;
  double distance = 0.0;  ///< global aggregate CDL distance d
  double rho = 1.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  std::vector<double> objective_trace;
};

struct AdmmResult {
  AdmmStatus status = AdmmStatus::iteration_limit;
  int iterations = 0;
  std::vector<model::ScheduleDecision> schedules;
  model::MigrationTensor migration;  ///< physical units, exactly antisymmetric
  model::DrMetrics aggregate_dr;
  std::vector<assemble::CostBreakdown> local_costs;
  double objective = 0.0;  ///< cooperative objective at the returned point
  std::vector<TraceRow> trace;
  AdmmState state;
  /// True when every local re-solve with fixed consensus values succeeded.
  bool primal_recovered = false;
};

/// A local subproblem had no optimal solution.
class LocalSubproblemFailure : public SolverFailure {
 public:
  LocalSubproblemFailure(std::size_t vpp, int iteration, program::SolveStatus status);
  std::size_t vpp() const noexcept { return vpp_; }
  int iteration() const noexcept { return iteration_; }
  program::SolveStatus status() const noexcept { return status_; }

 private:
  std::size_t vpp_;
  int iteration_;
  program::SolveStatus status_;
};

/// Runs the coordinator. Throws InvalidArgument for rho <= 0, tolerance <= 0
/// or max_iterations < 1, and LocalSubproblemFailure as described above.
/// Hitting the iteration limit is reported through the status and the best
/// (last) iterate is still returned.
AdmmResult run(const ProblemContext& ctx, const AdmmSettings& settings = {});

/// y <- y + rho (local - global) for the migration and purchase families.
/// `locals.migration` holds VPP i's copy of i->j at (t, i, j); entries for
/// which no copy exists (diagonal) are ignored.
void dual_update(ConsensusState& duals, const ConsensusState& locals,
                 const ConsensusState& globals, double rho);

/// r = ||local - global||_2 stacked over every consensus entry,
/// s = rho ||global - previous_global||_2.
std::pair<double, double> residuals(const ConsensusState& locals, const ConsensusState& globals,
                                    const ConsensusState& previous_globals, double rho);

/// Number of consensus entries: 2 N (N - 1) T migration copies + N T purchases.
std::size_t consensus_dimension(std::size_t n_vpps, std::size_t horizon) noexcept;

/// One CSV row per iteration: iteration,objective,primal_residual,dual_residual,wall_seconds
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

}  // namespace vppmig::admm

#endif  // VPPMIG_ADMM_HPP
