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


#include <vppmig/admm.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <optional>
#include <thread>

namespace vppmig::admm {

using assemble::AssembledProgram;
using model::MigrationTensor;

const char* to_string(AdmmStatus status) noexcept {
  return status == AdmmStatus::converged ? "converged" : "iteration-limit";
}

LocalSubproblemFailure::LocalSubproblemFailure(std::size_t vpp, int iteration, program::SolveStatus status)
    : SolverFailure("local subproblem of VPP " + std::to_string(vpp) + " at iteration " +
                    std::to_string(iteration) + " returned " + program::to_string(status)),
      vpp_(vpp), iteration_(iteration), status_(status) {}

std::size_t consensus_dimension(std::size_t n_vpps, std::size_t horizon) noexcept {
  return 2 * n_vpps * (n_vpps - (n_vpps > 0 ? 1 : 0)) * horizon + n_vpps * horizon;
}

void dual_update(ConsensusState& duals, const ConsensusState& locals, const ConsensusState& globals, double rho) {
  const MigrationTensor& lm = locals.migration;
  const std::size_t N = lm.n_vpps();
  for (std::size_t t = 0; t < lm.horizon(); ++t) {
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < N; ++j) {
        if (i == j) continue;
        duals.migration.workload(t, i, j) += rho * (lm.workload(t, i, j) - globals.migration.workload(t, i, j));
        duals.migration.energy(t, i, j) += rho * (lm.energy(t, i, j) - globals.migration.energy(t, i, j));
      }
    }
  }
  for (std::size_t i = 0; i < locals.load.size(); ++i) {
    for (std::size_t t = 0; t < locals.load[i].size(); ++t) {
      duals.load[i][t] += rho * (locals.load[i][t] - globals.load[i][t]);
    }
  }
}

namespace {

double squared_gap(const ConsensusState& a, const ConsensusState& b) {
  const MigrationTensor& am = a.migration;
  const std::size_t N = am.n_vpps();
  double sq = 0.0;
  for (std::size_t t = 0; t < am.horizon(); ++t) {
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < N; ++j) {
        if (i == j) continue;
        const double dw = am.workload(t, i, j) - b.migration.workload(t, i, j);
        const double de = am.energy(t, i, j) - b.migration.energy(t, i, j);
        sq += dw * dw + de * de;
      }
    }
  }
  for (std::size_t i = 0; i < a.load.size(); ++i) {
    for (std::size_t t = 0; t < a.load[i].size(); ++t) {
      const double d = a.load[i][t] - b.load[i][t];
      sq += d * d;
    }
  }
  return sq;
}

std::unique_ptr<program::ConicSolver> make_solver(const AdmmSettings& settings) {
  if (settings.solver_factory) return settings.solver_factory();
  return std::make_unique<program::ClarabelSolver>();
}

struct LocalSolution {
  AssembledProgram assembled;
  program::SolveOutcome outcome;
};

// Runs `job(i)` for every VPP, fanned out over threads when requested.
template <typename Job>
void for_each_vpp(std::size_t n, bool parallel, Job job) {
  if (!parallel || n < 2) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  {
    std::vector<std::jthread> workers;
    workers.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      workers.emplace_back([&, i] {
        try {
          job(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double total_capacity(const ProblemContext& ctx) {
  double s = 0.0;
  for (const auto& p : ctx.profiles) s += p.declared_capacity;
  return s;
}

// Migration tensor in physical units from VPP-owned rows of scaled copies.
MigrationTensor to_physical(const MigrationTensor& scaled, const ConsensusScaling& scaling, double lambda_cap,
                            double power_cap) {
  MigrationTensor out(scaled.horizon(), scaled.n_vpps());
  for (std::size_t t = 0; t < scaled.horizon(); ++t) {
    for (std::size_t i = 0; i < scaled.n_vpps(); ++i) {
      for (std::size_t j = 0; j < scaled.n_vpps(); ++j) {
        out.workload(t, i, j) = assemble::project(scaled.workload(t, i, j) * scaling.workload, lambda_cap);
        out.energy(t, i, j) = assemble::project(scaled.energy(t, i, j) * scaling.power, power_cap);
      }
    }
  }
  return out;
}

}  // namespace

std::pair<double, double> residuals(const ConsensusState& locals, const ConsensusState& globals,
                                    const ConsensusState& previous_globals, double rho) {
  return {std::sqrt(squared_gap(locals, globals)), rho * std::sqrt(squared_gap(globals, previous_globals))};
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "iteration,objective,primal_residual,dual_residual,wall_seconds\n";
  out << std::setprecision(17);
  for (const TraceRow& r : trace) {
    out << r.iteration << ',' << r.objective << ',' << r.primal_residual << ',' << r.dual_residual << ','
        << r.wall_seconds << '\n';
  }
}

AdmmResult run(const ProblemContext& ctx, const AdmmSettings& settings) {
  if (!(settings.rho > 0.0)) throw InvalidArgument("ADMM penalty rho must be > 0");
  if (!(settings.tolerance > 0.0)) throw InvalidArgument("ADMM tolerance must be > 0");
  if (settings.max_iterations < 1) throw InvalidArgument("ADMM needs at least one iteration");
  ctx.validate();

  const auto start = std::chrono::steady_clock::now();
  const std::size_t N = ctx.n_vpps();
  const std::size_t T = ctx.horizon();
  const double rho = settings.rho;
  const ConsensusScaling scaling = ConsensusScaling::per_unit(ctx);
  const double lcap = ctx.network.lambda_cap / scaling.workload;
  const double pcap = ctx.network.power_cap / scaling.power;
  const double threshold = settings.tolerance * std::sqrt(static_cast<double>(consensus_dimension(N, T)));
  const double cap_total = total_capacity(ctx);

  std::vector<std::unique_ptr<program::ConicSolver>> solvers;
  for (std::size_t i = 0; i < N; ++i) solvers.push_back(make_solver(settings));
  auto global_solver = make_solver(settings);

  AdmmState state;
  state.rho = rho;
  state.globals = ConsensusState::zeros(T, N);
  state.duals = ConsensusState::zeros(T, N);

  // Warm start: purchases of the autarkic schedules.
  for_each_vpp(N, settings.parallel, [&](std::size_t i) {
    const AssembledProgram p = assemble::build_independent(ctx, i);
    const program::SolveOutcome o = solvers[i]->solve(p.program, settings.solver);
    if (!o.optimal()) throw LocalSubproblemFailure(i, 0, o.status);
    for (std::size_t t = 0; t < T; ++t) state.globals.load[i][t] = (*o.primal)[p.vpps[0].grid_buy[t].index] / scaling.power;
  });

  AdmmResult result;
  std::vector<LocalSolution> locals(N);
  ConsensusState local_state = ConsensusState::zeros(T, N);

  for (int k = 1; k <= settings.max_iterations; ++k) {
    for_each_vpp(N, settings.parallel, [&](std::size_t i) {
      LocalSolution& ls = locals[i];
      ls.assembled = assemble::build_admm_local(ctx, i, state.globals, state.duals, rho, scaling);
      ls.outcome = solvers[i]->solve(ls.assembled.program, settings.solver);
      if (!ls.outcome.optimal()) throw LocalSubproblemFailure(i, k, ls.outcome.status);
      const std::vector<double>& x = *ls.outcome.primal;
      const assemble::MigrationVariables& m = ls.assembled.migration;
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t j = 0; j < N; ++j) {
          if (j == i) continue;
          local_state.migration.workload(t, i, j) = x[m.workload[m.index(t, i, j)]->index] / scaling.workload;
          local_state.migration.energy(t, i, j) = x[m.energy[m.index(t, i, j)]->index] / scaling.power;
        }
        local_state.load[i][t] = x[ls.assembled.vpps[0].grid_buy[t].index] / scaling.power;
      }
    });

    const ConsensusState previous = state.globals;
    state.globals.migration = assemble::update_globals_migration(local_state.migration, state.duals.migration, rho,
                                                                 lcap, pcap);
    const AssembledProgram global = assemble::build_admm_global_load(ctx, local_state.load, state.duals, rho, scaling);
    const program::SolveOutcome go = global_solver->solve(global.program, settings.solver);
    if (!go.optimal()) {
      throw SolverFailure(std::string("global load subproblem at iteration ") + std::to_string(k) + " returned " +
                          program::to_string(go.status));
    }
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t t = 0; t < T; ++t) state.globals.load[i][t] = std::max(0.0, (*go.primal)[global.global_load[i][t].index]);
    }
    state.distance = (*go.primal)[global.dr_distance->index];

    const auto [r, s] = residuals(local_state, state.globals, previous, rho);
    dual_update(state.duals, local_state, state.globals, rho);
    state.iteration = k;
    state.primal_residual = r;
    state.dual_residual = s;

    // Local operating costs with purchases and transfers at their global values.
    double objective = -ctx.network.dr_price * cap_total * (1.0 - state.distance);
    const MigrationTensor global_phys = to_physical(state.globals.migration, scaling, ctx.network.lambda_cap,
                                                    ctx.network.power_cap);
    for (std::size_t i = 0; i < N; ++i) {
      model::ScheduleDecision sched = assemble::extract_schedule(locals[i].assembled, ctx, 0, *locals[i].outcome.primal);
      for (std::size_t t = 0; t < T; ++t) sched.grid_buy[t] = state.globals.load[i][t] * scaling.power;
      objective += assemble::operating_cost(ctx, i, sched, &global_phys).total();
    }
    state.objective_trace.push_back(objective);
    result.trace.push_back({k, objective, r, s,
                            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
    result.iterations = k;
    if (r < threshold && s < threshold) {
      result.status = AdmmStatus::converged;
      break;
    }
  }

  // Exact bookkeeping of the declared-capacity total before recovery.
  double purchased = 0.0;
  for (const auto& row : state.globals.load) {
    for (double v : row) purchased += v * scaling.power;
  }
  if (purchased > 0.0) {
    const double factor = cap_total / purchased;
    for (auto& row : state.globals.load) {
      for (double& v : row) v *= factor;
    }
  }

  result.migration = to_physical(state.globals.migration, scaling, ctx.network.lambda_cap, ctx.network.power_cap);
  std::vector<model::ScheduleDecision> schedules(N);
  std::vector<bool> recovered(N, false);
  if (settings.recover_primal) {
    const ConsensusState zero = ConsensusState::zeros(T, N);
    for_each_vpp(N, settings.parallel, [&](std::size_t i) {
      AssembledProgram p = assemble::build_admm_local(ctx, i, state.globals, zero, rho, scaling);
      const assemble::MigrationVariables& m = p.migration;
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t j = 0; j < N; ++j) {
          if (j == i) continue;
          p.program.fix(*m.workload[m.index(t, i, j)], result.migration.workload(t, i, j));
          p.program.fix(*m.energy[m.index(t, i, j)], result.migration.energy(t, i, j));
        }
        p.program.fix(p.vpps[0].grid_buy[t], state.globals.load[i][t] * scaling.power);
      }
      const program::SolveOutcome o = assemble::solve_with_complementarity(p, *solvers[i], settings.solver);
      if (!o.optimal()) return;
      schedules[i] = assemble::extract_schedule(p, ctx, 0, *o.primal);
      for (std::size_t t = 0; t < T; ++t) schedules[i].grid_buy[t] = state.globals.load[i][t] * scaling.power;
      recovered[i] = true;
    });
  }
  result.primal_recovered = settings.recover_primal && std::all_of(recovered.begin(), recovered.end(), [](bool b) { return b; });
  if (!result.primal_recovered) {
    for (std::size_t i = 0; i < N; ++i) {
      schedules[i] = assemble::extract_schedule(locals[i].assembled, ctx, 0, *locals[i].outcome.primal);
    }
  }

  std::vector<double> aggregate(T, 0.0);
  for (const auto& s : schedules) {
    for (std::size_t t = 0; t < T; ++t) aggregate[t] += s.grid_buy[t];
  }
  result.aggregate_dr = model::dr_metrics(aggregate, cap_total, ctx.network.cdl, ctx.network.dr_price);
  result.objective = -result.aggregate_dr.incentive;
  for (std::size_t i = 0; i < N; ++i) {
    result.local_costs.push_back(assemble::operating_cost(ctx, i, schedules[i], &result.migration));
    result.objective += result.local_costs.back().total();
  }
  result.schedules = std::move(schedules);
  result.state = std::move(state);
  return result;
}

}  // namespace vppmig::admm
