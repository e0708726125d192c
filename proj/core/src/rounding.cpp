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


#include <vppmig/rounding.hpp>

#include <vppmig/errors.hpp>

#include <cmath>
#include <sstream>

namespace vppmig::assemble {

namespace {

constexpr double kIntegralTolerance = 1e-7;

void require_rounding_kind(const AssembledProgram& assembled) {
  if (assembled.kind != ProgramKind::independent && assembled.kind != ProgramKind::centralized) {
    throw InvalidArgument("rounding applies to independent or centralized programs only");
  }
}

double effective_load(const ProblemContext& ctx, const AssembledProgram& assembled, std::size_t vpp,
                      std::size_t t, std::span<const double> x) {
  double load = slot_equivalents(ctx.profiles[vpp], ctx.beta(), t).workload;
  const MigrationVariables& m = assembled.migration;
  if (!m.empty()) {
    for (std::size_t j = 0; j < m.n_vpps; ++j) {
      const auto& id = m.workload[m.index(t, vpp, j)];
      if (id) load -= x[id->index];
    }
  }
  return load;
}

}  // namespace

std::vector<std::vector<double>> server_gradient(const ProblemContext& ctx, const AssembledProgram& assembled,
                                                 std::span<const double> x) {
  require_rounding_kind(assembled);
  const std::size_t T = ctx.horizon();
  double capacity = 0.0;
  std::vector<double> purchase(T, 0.0);
  for (const VppVariables& v : assembled.vpps) {
    capacity += ctx.profiles[v.vpp].declared_capacity;
    for (std::size_t t = 0; t < T; ++t) purchase[t] += x[v.grid_buy[t].index];
  }
  const model::DrMetrics dr = model::dr_metrics(purchase, capacity, ctx.network.cdl, ctx.network.dr_price);

  std::vector<std::vector<double>> grad;
  for (const VppVariables& v : assembled.vpps) {
    const model::VppProfile& prof = ctx.profiles[v.vpp];
    const model::ServerFleetParams& fleet = prof.fleet;
    std::vector<double> row(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
      // Extra static power bought in the same slot.
      double marginal_energy = prof.price_buy[t];
      if (dr.distance > 1e-12) {
        marginal_energy += ctx.network.dr_price * (dr.load_shape[t] - ctx.network.cdl[t]) / dr.distance;
      }
      row[t] = marginal_energy * fleet.static_power();
      if (v.qos_aux[t]) {
        const double kappa_load = fleet.delay_cost * slot_equivalents(prof, ctx.beta(), t).workload;
        const double slack = x[v.servers[t].index] * fleet.service_rate - effective_load(ctx, assembled, v.vpp, t, x);
        row[t] -= 2.0 * kappa_load * fleet.service_rate / (slack * slack * slack);
      }
    }
    grad.push_back(std::move(row));
  }
  return grad;
}

RoundingReport round_servers(const ProblemContext& ctx, const AssembledProgram& assembled,
                             std::span<const double> x, program::ConicSolver& solver,
                             const program::SolverSettings& settings) {
  require_rounding_kind(assembled);
  if (x.size() != assembled.program.num_variables()) {
    throw InvalidArgument("relaxed primal does not match the program");
  }
  RoundingReport report;
  report.relaxed_objective = assembled.program.objective().evaluate(x);
  const auto grad = server_gradient(ctx, assembled, x);
  program::ConicProgram fixed = assembled.program;

  for (std::size_t e = 0; e < assembled.vpps.size(); ++e) {
    const VppVariables& v = assembled.vpps[e];
    const model::VppProfile& prof = ctx.profiles[v.vpp];
    std::vector<double> cont;
    std::vector<int> rounded;
    for (std::size_t t = 0; t < v.servers.size(); ++t) {
      const double s = x[v.servers[t].index];
      const double nearest = std::round(s);
      const double up = std::abs(s - nearest) <= kIntegralTolerance ? nearest : std::ceil(s);
      if (up > prof.fleet.s_max) {
        std::ostringstream os;
        os << "VPP '" << prof.id << "' slot " << t << ": rounded server count " << up << " exceeds s_max "
           << prof.fleet.s_max;
        throw InfeasibleParameters(os.str(), v.vpp, static_cast<std::ptrdiff_t>(t));
      }
      cont.push_back(s);
      rounded.push_back(static_cast<int>(up));
      fixed.fix(v.servers[t], up);
      report.objective_gap_bound += grad[e][t] * (up - s);
    }
    report.continuous_servers.push_back(std::move(cont));
    report.rounded_servers.push_back(std::move(rounded));
  }

  const program::SolveOutcome outcome = solver.solve(fixed, settings);
  if (!outcome.optimal()) {
    throw SolverFailure(std::string("program with rounded server counts returned ") +
                        program::to_string(outcome.status));
  }
  report.rounded_objective = outcome.objective_value;
  report.rounded_primal = *outcome.primal;
  return report;
}

}  // namespace vppmig::assemble
