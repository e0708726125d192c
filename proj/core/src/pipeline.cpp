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


#include <vppmig/pipeline.hpp>

#include <vppmig/errors.hpp>
#include <vppmig/fuzzy.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

namespace vppmig::pipeline {

using assemble::AssembledProgram;
using assemble::ProblemContext;

namespace {

double relative(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

template <typename... Args>
std::string cat(const Args&... parts) {
  std::ostringstream os;
  os << std::setprecision(6);
  (os << ... << parts);
  return os.str();
}

}  // namespace

IndependentSolution solve_independent(const ProblemContext& ctx, const program::SolverSettings& settings) {
  IndependentSolution out;
  program::ClarabelSolver solver;
  for (std::size_t i = 0; i < ctx.n_vpps(); ++i) {
    AssembledProgram p = assemble::build_independent(ctx, i);
    const program::SolveOutcome o = assemble::solve_with_complementarity(p, solver, settings);
    if (!o.optimal()) {
      throw SolverFailure("independent problem of VPP '" + ctx.profiles[i].id + "' returned " +
                          program::to_string(o.status));
    }
    out.schedules.push_back(assemble::extract_schedule(p, ctx, 0, *o.primal));
    out.dr.push_back(model::dr_metrics(out.schedules.back().grid_buy, ctx.profiles[i].declared_capacity,
                                       ctx.network.cdl, ctx.network.dr_price));
    out.objectives.push_back(o.objective_value);
  }
  return out;
}

CentralizedSolution solve_centralized(const ProblemContext& ctx, const program::SolverSettings& settings) {
  program::ClarabelSolver solver;
  AssembledProgram p = assemble::build_centralized(ctx);
  const program::SolveOutcome o = assemble::solve_with_complementarity(p, solver, settings);
  if (!o.optimal()) {
    throw SolverFailure(std::string("centralized problem returned ") + program::to_string(o.status));
  }
  CentralizedSolution out;
  std::vector<double> aggregate(ctx.horizon(), 0.0);
  double capacity = 0.0;
  for (std::size_t e = 0; e < p.vpps.size(); ++e) {
    out.schedules.push_back(assemble::extract_schedule(p, ctx, e, *o.primal));
    for (std::size_t t = 0; t < ctx.horizon(); ++t) aggregate[t] += out.schedules.back().grid_buy[t];
    capacity += ctx.profiles[e].declared_capacity;
  }
  out.migration = assemble::extract_migration(p, *o.primal);
  out.aggregate_dr = model::dr_metrics(aggregate, capacity, ctx.network.cdl, ctx.network.dr_price);
  out.objective = o.objective_value;
  out.primal = *o.primal;
  return out;
}

std::vector<std::string> allocation_identity_failures(const allocate::AllocationReport& r, double tol) {
  std::vector<std::string> failures;
  const double scale = std::max({1.0, std::abs(r.coalition_cost),
                                 std::accumulate(r.standalone_costs.begin(), r.standalone_costs.end(), 0.0,
                                                 [](double s, double c) { return s + std::abs(c); })});
  const double sum_phi = std::accumulate(r.allocations.begin(), r.allocations.end(), 0.0);
  if (!r.degenerate && std::abs(sum_phi - r.coalition_cost) > tol * scale) {
    failures.push_back(cat("sum of allocations ", sum_phi, " != coalition cost ", r.coalition_cost));
  }
  if (!r.degenerate) {
    const double sum_theta = std::accumulate(r.ratios.begin(), r.ratios.end(), 0.0);
    if (std::abs(sum_theta - 1.0) > tol * static_cast<double>(std::max<std::size_t>(1, r.ratios.size())) * 10.0) {
      failures.push_back(cat("sum of ratios ", sum_theta, " != 1"));
    }
  }
  const double sum_final = std::accumulate(r.final_costs.begin(), r.final_costs.end(), 0.0);
  if (std::abs(sum_final - (r.coalition_cost + r.vppo_fee)) > tol * scale) {
    failures.push_back(cat("sum of final costs ", sum_final, " != c(N) + fee ", r.coalition_cost + r.vppo_fee));
  }
  const double standalone_sum = std::accumulate(r.standalone_costs.begin(), r.standalone_costs.end(), 0.0);
  const bool positive = std::all_of(r.standalone_costs.begin(), r.standalone_costs.end(), [](double c) { return c > 0.0; });
  if (positive && r.coalition_cost <= standalone_sum) {
    for (std::size_t i = 0; i < r.final_costs.size(); ++i) {
      if (r.final_costs[i] > r.standalone_costs[i] + tol * scale) {
        failures.push_back(cat("VPP ", i, " pays ", r.final_costs[i], " above its standalone cost ", r.standalone_costs[i]));
      }
    }
  }
  return failures;
}

PipelineOutcome run_pipeline(const ProblemContext& input, const scenario::SolverConfig& config,
                             const std::optional<std::filesystem::path>& out_dir,
                             const std::string& scenario_name) {
  if (!(config.beta >= 0.5 && config.beta <= 1.0)) {
    throw InvalidArgument(cat("confidence level beta must lie in [0.5, 1], got ", config.beta));
  }
  ProblemContext ctx = input;
  ctx.network.beta = config.beta;
  ctx.network.gamma = config.gamma;
  ctx.validate();

  const program::SolverSettings solver_settings;
  const IndependentSolution independent = solve_independent(ctx, solver_settings);

  admm::AdmmSettings settings;
  settings.rho = config.rho;
  settings.tolerance = config.tolerance;
  settings.max_iterations = config.max_iterations;
  settings.solver = solver_settings;
  const admm::AdmmResult coop = admm::run(ctx, settings);

  PipelineOutcome out;
  out.admm_status = coop.status;
  scenario::RunArtifacts& a = out.artifacts;
  a.scenario_name = scenario_name;
  a.settings = config;
  for (const auto& p : ctx.profiles) a.vpp_ids.push_back(p.id);
  a.independent.schedules = independent.schedules;
  a.independent.dr = independent.dr;
  a.independent.costs = independent.objectives;
  a.independent.objective = std::accumulate(independent.objectives.begin(), independent.objectives.end(), 0.0);
  a.cooperative.schedules = coop.schedules;
  a.cooperative.dr = {coop.aggregate_dr};
  for (const auto& c : coop.local_costs) a.cooperative.costs.push_back(c.total());
  a.cooperative.objective = coop.objective;
  a.migration = coop.migration;
  a.trace = coop.trace;
  a.admm_status = admm::to_string(coop.status);
  a.admm_iterations = coop.iterations;
  a.allocation = allocate::improved_allocation(independent.objectives, coop.objective, config.gamma);

  if (out_dir) out.manifest = scenario::export_run(a, *out_dir);

  const auto failures = allocation_identity_failures(a.allocation);
  if (!failures.empty()) {
    std::string msg = "allocation identity violated:";
    for (const auto& f : failures) msg += " " + f + ";";
    throw Error(msg);
  }
  return out;
}

namespace {

PropertyResult property(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

PropertyResult fuzzy_boundary_property(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const int terms = 1 + static_cast<int>(rng() % 3);
    fuzzy::LinearFuzzyConstraint c;
    c.confidence = 0.5 + 0.5 * u01(rng);
    for (int j = 0; j < terms; ++j) {
      const double a = 20.0 * u01(rng) - 10.0;
      const double b = a + 5.0 * u01(rng);
      const double cc = b + 5.0 * u01(rng);
      c.terms.push_back({4.0 * u01(rng) - 2.0, {a, b, cc}});
    }
    const fuzzy::CrispInequality eq = fuzzy::crisp_equivalent(c);
    c.offset = -eq.fuzzy_shift;  // boundary point
    const fuzzy::FuzzyTriple sum = fuzzy::linear_combination(c.terms, c.offset);
    if (sum.a == sum.c) continue;
    worst = std::max(worst, std::abs(fuzzy::credibility_leq(sum, 0.0) - c.confidence));
  }
  return property("fuzzy crisp-equivalent boundary", worst <= 1e-9, cat("max |Cr - beta| = ", worst));
}

}  // namespace

std::vector<PropertyResult> run_validation(const ProblemContext& input, const scenario::SolverConfig& config,
                                           std::uint64_t seed) {
  std::vector<PropertyResult> out;
  ProblemContext ctx = input;
  ctx.network.beta = config.beta;
  ctx.network.gamma = config.gamma;
  try {
    ctx.validate();
    out.push_back(property("scenario invariants", true, cat(ctx.n_vpps(), " VPPs, ", ctx.horizon(), " slots")));
  } catch (const Error& e) {
    out.push_back(property("scenario invariants", false, e.what()));
    return out;
  }
  out.push_back(fuzzy_boundary_property(seed));

  const program::SolverSettings settings;
  IndependentSolution ind;
  CentralizedSolution cen;
  try {
    ind = solve_independent(ctx, settings);
    cen = solve_centralized(ctx, settings);
  } catch (const Error& e) {
    out.push_back(property("solves", false, e.what()));
    return out;
  }

  double soc_gap = 0.0;
  double qos_gap = 0.0;
  double both_flows = 0.0;
  auto structural = [&](const model::ScheduleDecision& s, std::size_t vpp, const model::MigrationTensor* m) {
    const auto& prof = ctx.profiles[vpp];
    soc_gap = std::max(soc_gap, std::abs(s.soc.back() - prof.bess.soc_init));
    for (std::size_t t = 0; t < ctx.horizon(); ++t) {
      both_flows = std::max(both_flows, std::min(s.charge[t], s.discharge[t]));
      const double lam = assemble::slot_equivalents(prof, ctx.beta(), t).workload;
      if (prof.fleet.delay_cost * lam > 0.0) {
        const double load = lam - (m ? m->net_workload_out(t, vpp) : 0.0);
        qos_gap = std::max(qos_gap, std::abs(s.qos_aux[t] - 1.0 / (s.servers[t] * prof.fleet.service_rate - load)));
      }
    }
  };
  for (std::size_t i = 0; i < ctx.n_vpps(); ++i) {
    structural(ind.schedules[i], i, nullptr);
    structural(cen.schedules[i], i, &cen.migration);
  }
  out.push_back(property("SoC cyclic condition", soc_gap <= 1e-6, cat("max |SoC_T - SoC_0| = ", soc_gap)));
  out.push_back(property("QoS cone tightness", qos_gap <= 1e-6, cat("max |z - 1/(su - load)| = ", qos_gap)));
  out.push_back(property("BESS complementarity", both_flows <= 1e-6, cat("max min(q_ch, q_dis) = ", both_flows)));

  const model::MigrationTensor& m = cen.migration;
  double net = 0.0;
  for (std::size_t t = 0; t < m.horizon(); ++t) {
    double wl = 0.0;
    double en = 0.0;
    for (std::size_t i = 0; i < m.n_vpps(); ++i) {
      wl += m.net_workload_out(t, i);
      en += m.net_energy_out(t, i);
    }
    net = std::max({net, std::abs(wl), std::abs(en)});
  }
  const double anti = m.antisymmetry_violation();
  out.push_back(property("migration antisymmetry", anti <= 1e-6, cat("max |x_ij + x_ji| = ", anti)));
  out.push_back(property("zero net transfer", net <= 1e-6, cat("max |sum_ij x_ij| = ", net)));
  const double caps = m.cap_violation(ctx.network.lambda_cap, ctx.network.power_cap);
  out.push_back(property("migration caps", caps <= 1e-6, cat("max cap excess = ", std::max(0.0, caps))));

  const double independent_total = std::accumulate(ind.objectives.begin(), ind.objectives.end(), 0.0);
  out.push_back(property("cooperation dominance", cen.objective <= independent_total + 1e-6 * std::abs(independent_total),
                         cat("c(N) = ", cen.objective, ", sum c({i}) = ", independent_total)));

  const auto report = allocate::improved_allocation(ind.objectives, cen.objective, ctx.network.gamma);
  const auto failures = allocation_identity_failures(report);
  out.push_back(property("allocation identities", failures.empty(), failures.empty() ? "all hold" : failures.front()));

  try {
    const ProblemContext reduced = scenario::generate_synthetic(seed, 2, 6, 0.8).context();
    const CentralizedSolution oracle = solve_centralized(reduced, settings);
    admm::AdmmSettings as;
    as.rho = config.rho;
    as.tolerance = config.tolerance;
    as.max_iterations = config.max_iterations;
    const admm::AdmmResult r = admm::run(reduced, as);
    const double gap = relative(r.objective, oracle.objective);
    const AssembledProgram central = assemble::build_centralized(reduced);
    const auto point = assemble::centralized_point(central, reduced, r.schedules, r.migration);
    const double violation = program::check_feasibility(central.program, point);
    out.push_back(property("ADMM vs centralized (N=2, T=6)", gap <= 1e-3 && violation <= 1e-5,
                           cat("relative gap = ", gap, ", violation = ", violation, ", iterations = ", r.iterations)));
  } catch (const Error& e) {
    out.push_back(property("ADMM vs centralized (N=2, T=6)", false, e.what()));
  }
  return out;
}

std::vector<BenchRow> run_bench(const BenchOptions& o) {
  if (o.n_min < 1 || o.n_max < o.n_min || o.horizon < 1 || o.repeats < 1) {
    throw InvalidArgument("bench needs 1 <= n_min <= n_max, horizon >= 1 and repeats >= 1");
  }
  using clock = std::chrono::steady_clock;
  auto seconds = [](clock::time_point a) { return std::chrono::duration<double>(clock::now() - a).count(); };
  std::vector<BenchRow> rows;
  for (std::size_t n = o.n_min; n <= o.n_max; ++n) {
    const ProblemContext ctx = scenario::generate_synthetic(o.seed, n, o.horizon, o.complementarity).context();
    BenchRow row;
    row.n_vpps = n;
    program::ClarabelSolver solver;
    allocate::CountingCharacteristic characteristic(
        [&](allocate::Coalition s) { return allocate::characteristic_cost(ctx, s, solver); });
    for (int rep = 0; rep < o.repeats; ++rep) {
      auto t0 = clock::now();
      solve_centralized(ctx);
      row.centralized_seconds += seconds(t0);

      admm::AdmmSettings as;
      as.max_iterations = o.admm_max_iterations;
      t0 = clock::now();
      const admm::AdmmResult r = admm::run(ctx, as);
      row.admm_seconds += seconds(t0);
      row.admm_iterations = r.iterations;

      characteristic.reset();
      t0 = clock::now();
      allocate::improved_allocation(n, characteristic, ctx.network.gamma);
      row.improved_seconds += seconds(t0);
      row.improved_evaluations = characteristic.calls();

      if (n <= allocate::kMaxShapleyPlayers) {
        characteristic.reset();
        t0 = clock::now();
        allocate::standard_shapley(n, characteristic);
        row.standard_seconds = row.standard_seconds.value_or(0.0) + seconds(t0);
        row.standard_evaluations = characteristic.calls();
      }
    }
    const double reps = o.repeats;
    row.centralized_seconds /= reps;
    row.admm_seconds /= reps;
    row.improved_seconds /= reps;
    if (row.standard_seconds) *row.standard_seconds /= reps;
    rows.push_back(row);
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "n_vpps,centralized_seconds,admm_seconds,admm_iterations,improved_seconds,improved_evaluations,"
         "standard_seconds,standard_evaluations\n";
  out << std::setprecision(9);
  for (const BenchRow& r : rows) {
    out << r.n_vpps << ',' << r.centralized_seconds << ',' << r.admm_seconds << ',' << r.admm_iterations << ','
        << r.improved_seconds << ',' << r.improved_evaluations << ',';
    if (r.standard_seconds) out << *r.standard_seconds;
    out << ',';
    if (r.standard_evaluations) out << *r.standard_evaluations;
    out << '\n';
  }
}

}  // namespace vppmig::pipeline
