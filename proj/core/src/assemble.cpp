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


#include <vppmig/assemble.hpp>

#include <vppmig/errors.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace vppmig::assemble {

using program::ConicProgram;
using program::kInf;
using program::LinearExpr;
using program::VarKind;

void ProblemContext::validate() const {
  network.validate();
  if (profiles.size() != network.n_vpps) {
    throw InvalidArgument("context has " + std::to_string(profiles.size()) + " profiles for n_vpps = " +
                          std::to_string(network.n_vpps));
  }
  for (const model::VppProfile& p : profiles) p.validate(network.horizon);
}

ProblemContext ProblemContext::restrict_to(std::span<const std::size_t> members) const {
  if (members.empty()) throw InvalidArgument("restrict_to needs at least one member");
  ProblemContext out;
  out.network = network;
  out.network.n_vpps = members.size();
  out.network.distance.assign(members.size(), std::vector<double>(members.size(), 0.0));
  for (std::size_t a = 0; a < members.size(); ++a) {
    if (members[a] >= profiles.size() || (a > 0 && members[a] <= members[a - 1])) {
      throw InvalidArgument("restrict_to needs ascending in-range member indices");
    }
    out.profiles.push_back(profiles[members[a]]);
    for (std::size_t b = 0; b < members.size(); ++b) {
      out.network.distance[a][b] = network.distance[members[a]][members[b]];
    }
  }
  return out;
}

SlotEquivalents slot_equivalents(const model::VppProfile& profile, double beta, std::size_t t) {
  const fuzzy::FuzzyTriple& load = profile.workload_fuzzy.at(t);
  const fuzzy::FuzzyTriple& pv = profile.pv_fuzzy.at(t);
  SlotEquivalents eq;
  eq.workload = fuzzy::upper_equivalent(load, beta);
  eq.pv = fuzzy::lower_equivalent(pv, beta);
  // Cr{ k * load - pv + (crisp part) <= 0 } >= beta.
  fuzzy::LinearFuzzyConstraint balance{
      {{profile.fleet.energy_per_request(), load}, {-1.0, pv}}, 0.0, beta};
  eq.balance_shift = fuzzy::crisp_equivalent(balance).fuzzy_shift;
  return eq;
}

namespace {

std::string name(const std::string& prefix, const char* what, std::size_t t) {
  return prefix + what + "[" + std::to_string(t) + "]";
}

std::string pair_name(const char* what, std::size_t t, std::size_t i, std::size_t j) {
  return std::string(what) + "[" + std::to_string(t) + "][" + std::to_string(i) + "][" +
         std::to_string(j) + "]";
}

struct BlockInputs {
  /// Per slot sum_j workload(t, i, j) and energy(t, i, j); empty when the
  /// VPP has no migration variables.
  std::vector<LinearExpr> workload_out;
  std::vector<LinearExpr> energy_out;
  double cost_scale = 1.0;
};

// Variables and constraints of one VPP plus its operating cost (excluding
// demand response and migration) added to `cost`.
VppVariables add_vpp_block(ConicProgram& prog, const ProblemContext& ctx, std::size_t vpp,
                           const BlockInputs& in, LinearExpr& cost) {
  const model::VppProfile& prof = ctx.profiles.at(vpp);
  const model::ServerFleetParams& fleet = prof.fleet;
  const model::BessParams& bess = prof.bess;
  const std::size_t T = ctx.horizon();
  const double beta = ctx.beta();
  const std::string prefix = "v" + std::to_string(vpp) + ".";
  const double batch_cap = prof.batch_slot_cap < 0.0 ? kInf : prof.batch_slot_cap;
  const bool migrating = !in.workload_out.empty();
  const double k = fleet.energy_per_request();
  const double inv_cost = 1.0 / in.cost_scale;

  VppVariables v;
  v.vpp = vpp;
  LinearExpr batch_total;
  for (std::size_t t = 0; t < T; ++t) {
    v.servers.push_back(prog.add_variable(name(prefix, "s", t), 0.0, fleet.s_max, VarKind::relaxed_integer));
    v.grid_buy.push_back(prog.add_variable(name(prefix, "pb", t), 0.0, kInf));
    v.charge.push_back(prog.add_variable(name(prefix, "qch", t), 0.0, bess.q_ch_max));
    v.discharge.push_back(prog.add_variable(name(prefix, "qdis", t), 0.0, bess.q_dis_max));
    v.batch.push_back(prog.add_variable(name(prefix, "eb", t), 0.0, batch_cap));
    v.soc.push_back(prog.add_variable(name(prefix, "soc", t), bess.soc_min, bess.soc_max));
  }
  for (std::size_t t = 0; t < T; ++t) {
    const SlotEquivalents eq = slot_equivalents(prof, beta, t);
    const double kappa_load = fleet.delay_cost * eq.workload;

    // Power balance (crisp equivalent of the fuzzy chance constraint).
    LinearExpr balance(eq.balance_shift);
    balance.add(v.servers[t], fleet.static_power())
        .add(v.charge[t], 1.0)
        .add(v.discharge[t], -1.0)
        .add(v.grid_buy[t], -1.0)
        .add(v.batch[t], 1.0);
    if (migrating) {
      balance += in.energy_out[t];
      balance -= k * in.workload_out[t];
    }
    prog.add_less_equal(balance, LinearExpr{}, name(prefix, "balance", t));

    // Effective load and capacity.
    LinearExpr load(eq.workload);
    if (migrating) {
      load -= in.workload_out[t];
      prog.add_greater_equal(load, LinearExpr{}, name(prefix, "load_nonneg", t));
    }
    LinearExpr slack = LinearExpr(v.servers[t], fleet.service_rate) - load;
    prog.add_greater_equal(slack, LinearExpr{}, name(prefix, "capacity", t));

    if (kappa_load > 0.0) {
      // Stored as zeta = sigma z and w = zeta^2 so both cone sides are of
      // comparable magnitude.
      const double sigma = std::max(1.0, eq.workload);
      const VarId z = prog.add_variable(name(prefix, "z", t), 0.0, kInf);
      const VarId w = prog.add_variable(name(prefix, "w", t), 0.0, kInf);
      prog.add_rotated_cone({LinearExpr(std::sqrt(sigma))}, z, slack, name(prefix, "qos", t));
      prog.add_rotated_cone({LinearExpr(z)}, w, LinearExpr(1.0), name(prefix, "qos_epi", t));
      cost.add(w, kappa_load * inv_cost / (sigma * sigma));
      v.qos_aux.emplace_back(z);
      v.qos_epi.emplace_back(w);
      v.qos_scale.push_back(sigma);
    } else {
      v.qos_aux.emplace_back(std::nullopt);
      v.qos_epi.emplace_back(std::nullopt);
      v.qos_scale.push_back(1.0);
    }

    // State of charge.
    LinearExpr prev = t == 0 ? LinearExpr(bess.soc_init) : LinearExpr(v.soc[t - 1]);
    LinearExpr next = (1.0 - bess.self_discharge) * prev;
    next.add(v.charge[t], bess.eff_ch / bess.capacity);
    next.add(v.discharge[t], -1.0 / (bess.eff_dis * bess.capacity));
    prog.add_equal(LinearExpr(v.soc[t]), next, name(prefix, "soc", t));

    cost.add(v.grid_buy[t], prof.price_buy[t] * inv_cost);
    cost.add(v.charge[t], bess.degr_cost * inv_cost);
    cost.add(v.discharge[t], bess.degr_cost * inv_cost);
    cost.add_constant(prof.pv_unit_cost * prof.pv_fuzzy[t].b * inv_cost);
    batch_total.add(v.batch[t], 1.0);
  }
  prog.add_equal(LinearExpr(v.soc[T - 1]), LinearExpr(bess.soc_init), prefix + "soc_cyclic");
  prog.add_equal(batch_total, LinearExpr(prof.batch_energy_total), prefix + "batch_total");
  return v;
}

void check_capacity(const ProblemContext& ctx, std::size_t vpp, double relief) {
  const model::VppProfile& prof = ctx.profiles.at(vpp);
  for (std::size_t t = 0; t < ctx.horizon(); ++t) {
    const double need = slot_equivalents(prof, ctx.beta(), t).workload - relief;
    const double capacity = prof.fleet.s_max * prof.fleet.service_rate;
    if (capacity < need) {
      std::ostringstream os;
      os << "VPP '" << prof.id << "' slot " << t << ": s_max * u = " << capacity
         << " cannot serve the crisp-equivalent workload " << need;
      throw InfeasibleParameters(os.str(), vpp, static_cast<std::ptrdiff_t>(t));
    }
  }
}

// ||sum_i coeff * load_i / total - cdl|| <= d, returns d.
VarId add_dr_cone(ConicProgram& prog, const ProblemContext& ctx,
                  const std::vector<std::vector<LinearExpr>>& purchases, double total_capacity) {
  const VarId d = prog.add_variable("dr_distance", 0.0, kInf);
  std::vector<LinearExpr> args;
  for (std::size_t t = 0; t < ctx.horizon(); ++t) {
    LinearExpr e(-ctx.network.cdl[t]);
    for (const auto& row : purchases) e += (1.0 / total_capacity) * row[t];
    args.push_back(std::move(e));
  }
  prog.add_cone(std::move(args), LinearExpr(d), "dr");
  return d;
}

double total_capacity(const ProblemContext& ctx) {
  double s = 0.0;
  for (const model::VppProfile& p : ctx.profiles) s += p.declared_capacity;
  return s;
}

}  // namespace

AssembledProgram build_independent(const ProblemContext& ctx, std::size_t vpp) {
  if (vpp >= ctx.n_vpps()) throw InvalidArgument("VPP index out of range");
  if (!(ctx.beta() >= 0.5 && ctx.beta() <= 1.0)) {
    throw InvalidArgument("confidence level must lie in [0.5, 1]");
  }
  check_capacity(ctx, vpp, 0.0);
  const model::VppProfile& prof = ctx.profiles[vpp];
  AssembledProgram out;
  out.kind = ProgramKind::independent;
  LinearExpr cost;
  out.vpps.push_back(add_vpp_block(out.program, ctx, vpp, {}, cost));
  const VppVariables& v = out.vpps.back();

  LinearExpr purchased;
  std::vector<LinearExpr> row;
  for (VarId pb : v.grid_buy) {
    purchased.add(pb, 1.0);
    row.emplace_back(pb);
  }
  out.program.add_equal(purchased, LinearExpr(prof.declared_capacity), "declared_capacity");
  out.dr_distance = add_dr_cone(out.program, ctx, {row}, prof.declared_capacity);
  // Demand-response revenue rho_o (1 - d) P^D enters as a negative cost.
  const double scale = ctx.network.dr_price * prof.declared_capacity;
  cost.add(*out.dr_distance, scale);
  cost.add_constant(-scale);
  out.program.minimize(std::move(cost));
  return out;
}

namespace {

// Migration variables with antisymmetry and max(0, .) epigraphs. Pair costs
// are added to `cost` in dollars divided by `cost_scale`. When `only_row` is
// set, only transfers out of that VPP are created and antisymmetry is not
// imposed.
MigrationVariables add_migration(ConicProgram& prog, const ProblemContext& ctx, LinearExpr& cost,
                                 double cost_scale, std::optional<std::size_t> only_row) {
  const std::size_t N = ctx.n_vpps();
  const std::size_t T = ctx.horizon();
  const model::NetworkConfig& net = ctx.network;
  MigrationVariables m;
  m.horizon = T;
  m.n_vpps = N;
  m.workload.resize(T * N * N);
  m.energy.resize(T * N * N);
  m.workload_out.resize(T * N * N);
  m.energy_out.resize(T * N * N);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < N; ++i) {
      if (only_row && *only_row != i) continue;
      for (std::size_t j = 0; j < N; ++j) {
        if (i == j) continue;
        const std::size_t idx = m.index(t, i, j);
        const VarId dl = prog.add_variable(pair_name("dl", t, i, j), -net.lambda_cap, net.lambda_cap);
        const VarId dp = prog.add_variable(pair_name("dp", t, i, j), -net.power_cap, net.power_cap);
        const VarId ml = prog.add_variable(pair_name("dl+", t, i, j), 0.0, kInf);
        const VarId mp = prog.add_variable(pair_name("dp+", t, i, j), 0.0, kInf);
        prog.add_greater_equal(LinearExpr(ml), LinearExpr(dl), pair_name("epi_dl", t, i, j));
        prog.add_greater_equal(LinearExpr(mp), LinearExpr(dp), pair_name("epi_dp", t, i, j));
        cost.add(ml, net.w_workload * net.distance[i][j] / cost_scale);
        cost.add(mp, net.w_energy * net.distance[i][j] / cost_scale);
        m.workload[idx] = dl;
        m.energy[idx] = dp;
        m.workload_out[idx] = ml;
        m.energy_out[idx] = mp;
      }
    }
  }
  if (!only_row) {
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = i + 1; j < N; ++j) {
          LinearExpr sl(*m.workload[m.index(t, i, j)]);
          sl.add(*m.workload[m.index(t, j, i)], 1.0);
          prog.add_equal(sl, LinearExpr{}, pair_name("anti_dl", t, i, j));
          LinearExpr sp(*m.energy[m.index(t, i, j)]);
          sp.add(*m.energy[m.index(t, j, i)], 1.0);
          prog.add_equal(sp, LinearExpr{}, pair_name("anti_dp", t, i, j));
        }
      }
    }
  }
  return m;
}

BlockInputs outflows(const MigrationVariables& m, std::size_t i, double cost_scale) {
  BlockInputs in;
  in.cost_scale = cost_scale;
  for (std::size_t t = 0; t < m.horizon; ++t) {
    LinearExpr wl;
    LinearExpr en;
    for (std::size_t j = 0; j < m.n_vpps; ++j) {
      if (i == j) continue;
      wl.add(*m.workload[m.index(t, i, j)], 1.0);
      en.add(*m.energy[m.index(t, i, j)], 1.0);
    }
    in.workload_out.push_back(std::move(wl));
    in.energy_out.push_back(std::move(en));
  }
  return in;
}

void check_beta(const ProblemContext& ctx) {
  if (!(ctx.beta() >= 0.5 && ctx.beta() <= 1.0)) {
    throw InvalidArgument("confidence level must lie in [0.5, 1]");
  }
}

}  // namespace

AssembledProgram build_centralized(const ProblemContext& ctx) {
  check_beta(ctx);
  const std::size_t N = ctx.n_vpps();
  for (std::size_t i = 0; i < N; ++i) {
    check_capacity(ctx, i, static_cast<double>(N - 1) * ctx.network.lambda_cap);
  }
  AssembledProgram out;
  out.kind = ProgramKind::centralized;
  LinearExpr cost;
  if (N > 1) out.migration = add_migration(out.program, ctx, cost, 1.0, std::nullopt);
  std::vector<std::vector<LinearExpr>> purchases;
  LinearExpr purchased;
  for (std::size_t i = 0; i < N; ++i) {
    const BlockInputs in = N > 1 ? outflows(out.migration, i, 1.0) : BlockInputs{};
    out.vpps.push_back(add_vpp_block(out.program, ctx, i, in, cost));
    std::vector<LinearExpr> row;
    for (VarId pb : out.vpps.back().grid_buy) {
      row.emplace_back(pb);
      purchased.add(pb, 1.0);
    }
    purchases.push_back(std::move(row));
  }
  const double cap = total_capacity(ctx);
  out.program.add_equal(purchased, LinearExpr(cap), "declared_capacity");
  out.dr_distance = add_dr_cone(out.program, ctx, purchases, cap);
  const double scale = ctx.network.dr_price * cap;
  cost.add(*out.dr_distance, scale);
  cost.add_constant(-scale);
  out.program.minimize(std::move(cost));
  return out;
}

ConsensusScaling ConsensusScaling::per_unit(const ProblemContext& ctx) {
  ConsensusScaling s;
  s.workload = 0.0;
  s.power = 0.0;
  s.cost = 0.0;
  for (const model::VppProfile& p : ctx.profiles) {
    for (const fuzzy::FuzzyTriple& w : p.workload_fuzzy) s.workload = std::max(s.workload, w.c);
    s.power = std::max(s.power, 2.0 * p.declared_capacity / static_cast<double>(p.price_buy.size()));
    const double mean_price =
        std::accumulate(p.price_buy.begin(), p.price_buy.end(), 0.0) / static_cast<double>(p.price_buy.size());
    s.cost = std::max(s.cost, 4.0 * p.declared_capacity * mean_price);
  }
  if (!(s.workload > 0.0)) s.workload = 1.0;
  if (!(s.power > 0.0)) s.power = 1.0;
  if (!(s.cost > 0.0)) s.cost = 1.0;
  return s;
}

ConsensusState ConsensusState::zeros(std::size_t horizon, std::size_t n_vpps) {
  ConsensusState s;
  s.migration = model::MigrationTensor(horizon, n_vpps);
  s.load.assign(n_vpps, std::vector<double>(horizon, 0.0));
  return s;
}

AssembledProgram build_admm_local(const ProblemContext& ctx, std::size_t vpp, const ConsensusState& globals,
                                  const ConsensusState& duals, double rho, const ConsensusScaling& scaling) {
  check_beta(ctx);
  if (!(rho > 0.0)) throw InvalidArgument("penalty rho must be > 0");
  const std::size_t N = ctx.n_vpps();
  const std::size_t T = ctx.horizon();
  if (vpp >= N) throw InvalidArgument("VPP index out of range");
  check_capacity(ctx, vpp, static_cast<double>(N - 1) * ctx.network.lambda_cap);

  AssembledProgram out;
  out.kind = ProgramKind::admm_local;
  LinearExpr cost;
  std::vector<LinearExpr> gaps;
  if (N > 1) {
    out.migration = add_migration(out.program, ctx, cost, scaling.cost, vpp);
  }
  BlockInputs in;
  in.cost_scale = scaling.cost;
  if (N > 1) in = outflows(out.migration, vpp, scaling.cost);
  out.vpps.push_back(add_vpp_block(out.program, ctx, vpp, in, cost));
  const VppVariables& v = out.vpps.back();

  auto couple = [&](VarId local, double unit, double global, double dual) {
    LinearExpr scaled(local, 1.0 / unit);
    cost += dual * (scaled - LinearExpr(global));
    gaps.push_back(scaled - LinearExpr(global));
  };
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < N; ++j) {
      if (j == vpp) continue;
      const std::size_t idx = out.migration.index(t, vpp, j);
      couple(*out.migration.workload[idx], scaling.workload, globals.migration.workload(t, vpp, j),
             duals.migration.workload(t, vpp, j));
      couple(*out.migration.energy[idx], scaling.power, globals.migration.energy(t, vpp, j),
             duals.migration.energy(t, vpp, j));
    }
  }
  for (std::size_t t = 0; t < T; ++t) {
    couple(v.grid_buy[t], scaling.power, globals.load.at(vpp).at(t), duals.load.at(vpp).at(t));
  }
  out.penalty = out.program.add_variable("penalty", 0.0, kInf);
  out.program.add_rotated_cone(gaps, LinearExpr(*out.penalty), LinearExpr(1.0), "penalty");
  cost.add(*out.penalty, 0.5 * rho);
  out.program.minimize(std::move(cost));
  return out;
}

AssembledProgram build_admm_global_load(const ProblemContext& ctx,
                                        const std::vector<std::vector<double>>& local_load,
                                        const ConsensusState& duals, double rho,
                                        const ConsensusScaling& scaling) {
  if (!(rho > 0.0)) throw InvalidArgument("penalty rho must be > 0");
  const std::size_t N = ctx.n_vpps();
  const std::size_t T = ctx.horizon();
  if (local_load.size() != N) throw InvalidArgument("local load copies must have one row per VPP");

  AssembledProgram out;
  out.kind = ProgramKind::admm_global;
  LinearExpr cost;
  std::vector<LinearExpr> gaps;
  std::vector<std::vector<LinearExpr>> purchases(N);
  LinearExpr purchased;
  for (std::size_t i = 0; i < N; ++i) {
    if (local_load[i].size() != T) throw InvalidArgument("local load copies must have T entries");
    std::vector<VarId> row;
    for (std::size_t t = 0; t < T; ++t) {
      const VarId g = out.program.add_variable(pair_name("g", t, i, i), 0.0, kInf);
      row.push_back(g);
      purchases[i].push_back(LinearExpr(g, scaling.power));
      purchased.add(g, scaling.power);
      const LinearExpr gap = LinearExpr(local_load[i][t]) - LinearExpr(g);
      cost += duals.load.at(i).at(t) * gap;
      gaps.push_back(gap);
    }
    out.global_load.push_back(std::move(row));
  }
  const double cap = total_capacity(ctx);
  out.program.add_equal(purchased, LinearExpr(cap), "declared_capacity");
  out.dr_distance = add_dr_cone(out.program, ctx, purchases, cap);
  const double scale = ctx.network.dr_price * cap / scaling.cost;
  cost.add(*out.dr_distance, scale);
  cost.add_constant(-scale);
  out.penalty = out.program.add_variable("penalty", 0.0, kInf);
  out.program.add_rotated_cone(gaps, LinearExpr(*out.penalty), LinearExpr(1.0), "penalty");
  cost.add(*out.penalty, 0.5 * rho);
  out.program.minimize(std::move(cost));
  return out;
}

double project(double x, double cap) noexcept { return std::min(std::max(x, -cap), cap); }

model::MigrationTensor update_globals_migration(const model::MigrationTensor& locals,
                                                const model::MigrationTensor& duals, double rho,
                                                double lambda_cap, double power_cap) {
  if (locals.n_vpps() != duals.n_vpps() || locals.horizon() != duals.horizon()) {
    throw InvalidArgument("locals and duals are dimensioned differently");
  }
  if (!(rho > 0.0)) throw InvalidArgument("penalty rho must be > 0");
  const std::size_t N = locals.n_vpps();
  model::MigrationTensor g(locals.horizon(), N);
  for (std::size_t t = 0; t < locals.horizon(); ++t) {
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = i + 1; j < N; ++j) {
        const double wl = project(0.5 * (locals.workload(t, i, j) - locals.workload(t, j, i)) +
                                      (duals.workload(t, i, j) - duals.workload(t, j, i)) / (2.0 * rho),
                                  lambda_cap);
        const double en = project(0.5 * (locals.energy(t, i, j) - locals.energy(t, j, i)) +
                                      (duals.energy(t, i, j) - duals.energy(t, j, i)) / (2.0 * rho),
                                  power_cap);
        g.workload(t, i, j) = wl;
        g.workload(t, j, i) = -wl;
        g.energy(t, i, j) = en;
        g.energy(t, j, i) = -en;
      }
    }
  }
  return g;
}

model::ScheduleDecision extract_schedule(const AssembledProgram& assembled, const ProblemContext& ctx,
                                         std::size_t entry, std::span<const double> x) {
  const VppVariables& v = assembled.vpps.at(entry);
  const model::VppProfile& prof = ctx.profiles.at(v.vpp);
  const std::size_t T = v.servers.size();
  model::ScheduleDecision s;
  auto value = [&](VarId id) { return x[id.index]; };
  for (std::size_t t = 0; t < T; ++t) {
    s.servers.push_back(value(v.servers[t]));
    s.grid_buy.push_back(value(v.grid_buy[t]));
    s.charge.push_back(value(v.charge[t]));
    s.discharge.push_back(value(v.discharge[t]));
    s.batch.push_back(value(v.batch[t]));
    s.soc.push_back(value(v.soc[t]));
    s.qos_aux.push_back(v.qos_aux[t] ? value(*v.qos_aux[t]) / v.qos_scale[t] : 0.0);
    double load = slot_equivalents(prof, ctx.beta(), t).workload;
    if (!assembled.migration.empty()) {
      for (std::size_t j = 0; j < assembled.migration.n_vpps; ++j) {
        const auto& id = assembled.migration.workload[assembled.migration.index(t, v.vpp, j)];
        if (id) load -= value(*id);
      }
    }
    const double capacity = s.servers.back() * prof.fleet.service_rate;
    s.utilization.push_back(capacity > 0.0 ? std::clamp(load / capacity, 0.0, 1.0) : 0.0);
  }
  return s;
}

model::MigrationTensor extract_migration(const AssembledProgram& assembled, std::span<const double> x) {
  const MigrationVariables& m = assembled.migration;
  const std::size_t n = m.empty() ? assembled.vpps.size() : m.n_vpps;
  const std::size_t T = m.empty() ? (assembled.vpps.empty() ? 0 : assembled.vpps[0].servers.size()) : m.horizon;
  model::MigrationTensor out(T, n);
  if (m.empty()) return out;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t idx = m.index(t, i, j);
        if (m.workload[idx]) out.workload(t, i, j) = x[m.workload[idx]->index];
        if (m.energy[idx]) out.energy(t, i, j) = x[m.energy[idx]->index];
      }
    }
  }
  return out;
}

std::vector<double> centralized_point(const AssembledProgram& centralized, const ProblemContext& ctx,
                                      std::span<const model::ScheduleDecision> schedules,
                                      const model::MigrationTensor& migration) {
  if (centralized.kind != ProgramKind::centralized) {
    throw InvalidArgument("centralized_point needs a centralized program");
  }
  if (schedules.size() != centralized.vpps.size()) {
    throw InvalidArgument("centralized_point needs one schedule per VPP");
  }
  std::vector<double> x(centralized.program.num_variables(), 0.0);
  const MigrationVariables& m = centralized.migration;
  const std::size_t N = ctx.n_vpps();
  const std::size_t T = ctx.horizon();
  if (!m.empty()) {
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
          const std::size_t idx = m.index(t, i, j);
          if (!m.workload[idx]) continue;
          const double wl = migration.workload(t, i, j);
          const double en = migration.energy(t, i, j);
          x[m.workload[idx]->index] = wl;
          x[m.energy[idx]->index] = en;
          x[m.workload_out[idx]->index] = std::max(0.0, wl);
          x[m.energy_out[idx]->index] = std::max(0.0, en);
        }
      }
    }
  }
  std::vector<double> aggregate(T, 0.0);
  for (std::size_t e = 0; e < centralized.vpps.size(); ++e) {
    const VppVariables& v = centralized.vpps[e];
    const model::ScheduleDecision& s = schedules[e];
    const model::VppProfile& prof = ctx.profiles[v.vpp];
    for (std::size_t t = 0; t < T; ++t) {
      x[v.servers[t].index] = s.servers[t];
      x[v.grid_buy[t].index] = s.grid_buy[t];
      x[v.charge[t].index] = s.charge[t];
      x[v.discharge[t].index] = s.discharge[t];
      x[v.batch[t].index] = s.batch[t];
      x[v.soc[t].index] = s.soc[t];
      aggregate[t] += s.grid_buy[t];
      if (v.qos_aux[t]) {
        const double load = slot_equivalents(prof, ctx.beta(), t).workload - migration.net_workload_out(t, v.vpp);
        const double z = 1.0 / (s.servers[t] * prof.fleet.service_rate - load);
        x[v.qos_aux[t]->index] = z * v.qos_scale[t];
        x[v.qos_epi[t]->index] = z * z * v.qos_scale[t] * v.qos_scale[t];
      }
    }
  }
  if (centralized.dr_distance) {
    const model::DrMetrics dr = model::dr_metrics(aggregate, total_capacity(ctx), ctx.network.cdl, 0.0);
    x[centralized.dr_distance->index] = dr.distance;
  }
  return x;
}

CostBreakdown operating_cost(const ProblemContext& ctx, std::size_t vpp, const model::ScheduleDecision& schedule,
                             const model::MigrationTensor* migration) {
  const model::VppProfile& prof = ctx.profiles.at(vpp);
  CostBreakdown c;
  for (std::size_t t = 0; t < ctx.horizon(); ++t) {
    c.energy += prof.price_buy[t] * schedule.grid_buy[t];
    c.pv += prof.pv_unit_cost * prof.pv_fuzzy[t].b;
    c.bess += prof.bess.degr_cost * (schedule.charge[t] + schedule.discharge[t]);
    const double z = schedule.qos_aux[t];
    c.qos += prof.fleet.delay_cost * slot_equivalents(prof, ctx.beta(), t).workload * z * z;
  }
  if (migration != nullptr && migration->n_vpps() > 1) {
    c.migration = model::migration_cost(ctx.network, *migration, vpp);
  }
  return c;
}

program::SolveOutcome solve_with_complementarity(AssembledProgram& assembled, program::ConicSolver& solver,
                                                 const program::SolverSettings& settings) {
  program::SolveOutcome out = solver.solve(assembled.program, settings);
  // Each round fixes at least one flow, so the loop ends.
  while (out.optimal()) {
    bool cut = false;
    for (const auto& v : assembled.vpps) {
      for (std::size_t t = 0; t < v.charge.size(); ++t) {
        const double ch = (*out.primal)[v.charge[t].index];
        const double dis = (*out.primal)[v.discharge[t].index];
        if (std::min(ch, dis) > kComplementarityTolerance) {
          assembled.program.fix(ch < dis ? v.charge[t] : v.discharge[t], 0.0);
          cut = true;
        }
      }
    }
    if (!cut) break;
    out = solver.solve(assembled.program, settings);
  }
  return out;
}

}  // namespace vppmig::assemble
