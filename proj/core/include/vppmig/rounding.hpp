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
 * \file vppmig/rounding.hpp
 *
 * \brief Relax-then-round correction for server counts.
 */

#ifndef VPPMIG_ROUNDING_HPP
#define VPPMIG_ROUNDING_HPP

#include <vppmig/assemble.hpp>
#include <vppmig/program.hpp>

#include <span>
#include <vector>

namespace vppmig::assemble {

struct RoundingReport {
  std::vector<std::vector<double>> continuous_servers;  ///< per VPP entry, per slot
  std::vector<std::vector<int>> rounded_servers;
  /// First-order estimate sum df/ds(s*) (ceil(s*) - s*) of the cost of rounding.
  double objective_gap_bound = 0.0;
  double relaxed_objective = 0.0;
  /// Optimal objective with servers fixed at the rounded counts.
  double rounded_objective = 0.0;
  std::vector<double> rounded_primal;

  double realized_gap() const noexcept { return rounded_objective - relaxed_objective; }
};

/// Rounds every server variable of an independent or centralized program up
/// to the next integer, re-solves with the counts fixed, and reports the
/// realized change next to its first-order bound. Values within 1e-7 of an
/// integer count as integral. Throws InfeasibleParameters if a rounded count
/// exceeds s_max, SolverFailure if the corrected program cannot be solved.
RoundingReport round_servers(const ProblemContext& ctx, const AssembledProgram& assembled,
                             std::span<const double> relaxed_primal,
                             program::ConicSolver& solver,
                             const program::SolverSettings& settings = {});

/// Analytic df/ds at the relaxed optimum along the correction path: the
/// added server power is bought in the same slot (price plus the change in
/// demand-response revenue) and the delay cost is re-evaluated at the new
/// count. One entry per (VPP entry, slot).
std::vector<std::vector<double>> server_gradient(const ProblemContext& ctx,
                                                 const AssembledProgram& assembled,
                                                 std::span<const double> relaxed_primal);

}  // namespace vppmig::assemble

#endif  // VPPMIG_ROUNDING_HPP
