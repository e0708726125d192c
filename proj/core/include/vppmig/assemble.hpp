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
 * \file vppmig/assemble.hpp
 *
 * \brief Builders for the deterministic-equivalent conic programs: the
 *  independent per-VPP problem, the centralized cooperative problem, and the
 *  two ADMM subproblems (per-VPP local and global load curve).
 *
 * Fuzzy workload and PV enter every program through their crisp equivalents
 * at the context's confidence level. Server counts are relaxed to continuous
 * variables tagged VarKind::relaxed_integer.
 */

#ifndef VPPMIG_ASSEMBLE_HPP
#define VPPMIG_ASSEMBLE_HPP

#include <vppmig/model.hpp>
#include <vppmig/program.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace vppmig::assemble {

using program::VarId;

struct ProblemContext {
  model::NetworkConfig network;
  std::vector<model::VppProfile> profiles;

  std::size_t n_vpps() const noexcept { return profiles.size(); }
  std::size_t horizon() const noexcept { return network.horizon; }
  double beta() const noexcept { return network.beta; }

  /// Validates the network, every profile, and the profile count.
  void validate() const;
  /// Context over `members` (ascending VPP indices): profiles, distance
  /// submatrix, and the same network-wide parameters.
  ProblemContext restrict_to(std::span<const std::size_t> members) const;
};

enum class ProgramKind { independent, centralized, admm_local, admm_global };

/// Crisp equivalents of one VPP's fuzzy inputs in one slot.
struct SlotEquivalents {
  double workload = 0.0;       ///< lambda~ = (2-2b) b^l + (2b-1) c^l
  double pv = 0.0;             ///< p~ = (2-2b) b^p + (2b-1) a^p
  double balance_shift = 0.0;  ///< fuzzy part of the power-balance crisp equivalent
};

SlotEquivalents slot_equivalents(const model::VppProfile& profile, double beta, std::size_t t);

struct VppVariables {
  std::size_t vpp = 0;  ///< index into the context's profiles
  std::vector<VarId> servers;
  std::vector<VarId> grid_buy;
  std::vector<VarId> charge;
  std::vector<VarId> discharge;
  std::vector<VarId> batch;
  std::vector<VarId> soc;
  std::vector<std::optional<VarId>> qos_aux;  ///< absent where kappa * lambda~ == 0
  std::vector<std::optional<VarId>> qos_epi;
  std::vector<double> qos_scale;  ///< the qos_aux variable holds qos_scale * z
};

/// Migration variables for ordered pairs i != j, flattened like MigrationTensor.
struct MigrationVariables {
  std::size_t horizon = 0;
  std::size_t n_vpps = 0;
  std::vector<std::optional<VarId>> workload;
  std::vector<std::optional<VarId>> energy;
  std::vector<std::optional<VarId>> workload_out;  ///< epigraph of max(0, workload)
  std::vector<std::optional<VarId>> energy_out;

  std::size_t index(std::size_t t, std::size_t i, std::size_t j) const noexcept {
    return (t * n_vpps + i) * n_vpps + j;
  }
  bool empty() const noexcept { return workload.empty(); }
};

struct AssembledProgram {
  program::ConicProgram program;
  ProgramKind kind = ProgramKind::independent;
  std::vector<VppVariables> vpps;
  MigrationVariables migration;
  std::vector<std::vector<VarId>> global_load;  ///< admm_global only, N x T
  std::optional<VarId> dr_distance;
  std::optional<VarId> penalty;  ///< ADMM quadratic penalty epigraph
};

/// Independent problem for one VPP. Throws InfeasibleParameters naming the
/// slot when the fleet cannot cover the crisp-equivalent workload.
AssembledProgram build_independent(const ProblemContext& ctx, std::size_t vpp);

/// Cooperative problem over all VPPs of the context with antisymmetric
/// migration and aggregate demand response.
AssembledProgram build_centralized(const ProblemContext& ctx);

/// Per-unit scales for the ADMM consensus variables. Workload copies are
/// divided by `workload`, energy and purchase copies by `power`, and every
/// dollar amount in the subproblem objectives by `cost`.
struct ConsensusScaling {
  double workload = 1.0;
  double power = 1.0;
  double cost = 1.0;

  /// workload = max c^lambda, power = max_i 2 declared capacity / T,
  /// cost = 4 max_i (declared capacity * mean price).
  static ConsensusScaling per_unit(const ProblemContext& ctx);
};

/// Consensus quantities in scaled units: migration copies (workload and
/// energy, T x N x N) and purchased-energy copies (N x T).
struct ConsensusState {
  model::MigrationTensor migration;
  std::vector<std::vector<double>> load;

  static ConsensusState zeros(std::size_t horizon, std::size_t n_vpps);
};

/// Local subproblem of `vpp`: its own constraints, its row of migration
/// copies, its purchase copies, linear dual terms and a single rotated-cone
/// epigraph for (rho/2) ||local - global||^2. No demand-response term.
AssembledProgram build_admm_local(const ProblemContext& ctx, std::size_t vpp,
                                  const ConsensusState& globals, const ConsensusState& duals,
                                  double rho, const ConsensusScaling& scaling);

/// Global load-curve subproblem over (p^{b,g}, d) given the locals' purchase
/// copies (scaled, N x T).
AssembledProgram build_admm_global_load(const ProblemContext& ctx,
                                        const std::vector<std::vector<double>>& local_load,
                                        const ConsensusState& duals, double rho,
                                        const ConsensusScaling& scaling);

/// Pi_c(x) = min(max(x, -c), c).
double project(double x, double cap) noexcept;

/// Closed-form antisymmetric global migration update. `locals` holds VPP
/// i's copy of transfer i->j at (t, i, j); caps are in the same units.
model::MigrationTensor update_globals_migration(const model::MigrationTensor& locals,
                                                const model::MigrationTensor& duals, double rho,
                                                double lambda_cap, double power_cap);

model::ScheduleDecision extract_schedule(const AssembledProgram& assembled,
                                         const ProblemContext& ctx, std::size_t entry,
                                         std::span<const double> x);

/// Migration tensor from a centralized solution (physical units).
model::MigrationTensor extract_migration(const AssembledProgram& assembled,
                                         std::span<const double> x);

/// Full assignment for a centralized program from per-VPP schedules, a
/// migration tensor and purchases. Epigraph variables take their tight values.
std::vector<double> centralized_point(const AssembledProgram& centralized,
                                      const ProblemContext& ctx,
                                      std::span<const model::ScheduleDecision> schedules,
                                      const model::MigrationTensor& migration);

/// Itemized local operating cost of one VPP (no demand-response revenue).
struct CostBreakdown {
  double energy = 0.0;     ///< sum_t price * grid_buy
  double pv = 0.0;         ///< PV generation cost at the modal forecast
  double bess = 0.0;       ///< degradation
  double qos = 0.0;        ///< kappa lambda~ z^2
  double migration = 0.0;  ///< transfers paid by this VPP

  double total() const noexcept { return energy + pv + bess + qos + migration; }
};

CostBreakdown operating_cost(const ProblemContext& ctx, std::size_t vpp,
                             const model::ScheduleDecision& schedule,
                             const model::MigrationTensor* migration = nullptr);

/// Largest min(charge, discharge) tolerated in one slot.
inline constexpr double kComplementarityTolerance = 1e-6;

/// Solves, then re-solves with the smaller battery flow fixed to zero in every
/// slot where both flows exceed kComplementarityTolerance, until no such slot
/// remains. Fixed flows stay in `assembled.program`.
program::SolveOutcome solve_with_complementarity(AssembledProgram& assembled, program::ConicSolver& solver,
                                                 const program::SolverSettings& settings);

}  // namespace vppmig::assemble

#endif  // VPPMIG_ASSEMBLE_HPP
