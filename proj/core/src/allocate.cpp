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


#include <vppmig/allocate.hpp>

#include <vppmig/errors.hpp>

#include <bit>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace vppmig::allocate {

std::size_t Coalition::size() const { return static_cast<std::size_t>(std::popcount(mask_)); }

std::vector<std::size_t> Coalition::members() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < 32; ++i) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

AllocationReport improved_allocation(std::span<const double> standalone, double coalition, double gamma) {
  if (standalone.empty()) throw InvalidArgument("allocation needs at least one VPP");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must lie in [0, 1)");
  const std::size_t n = standalone.size();
  AllocationReport r;
  r.standalone_costs.assign(standalone.begin(), standalone.end());
  r.coalition_cost = coalition;
  r.gamma = gamma;
  const double sum = std::accumulate(standalone.begin(), standalone.end(), 0.0);
  r.total_savings = sum - coalition;
  r.vppo_fee = gamma * r.total_savings;
  for (std::size_t i = 0; i < n; ++i) {
    if (standalone[i] < 0.0) {
      r.warnings.push_back("standalone cost of VPP " + std::to_string(i) +
                           " is negative; proportional weights lose their meaning");
    }
  }

  if (sum == 0.0 || r.total_savings == 0.0) {
    r.degenerate = true;
    r.allocations = r.standalone_costs;
    r.savings_components.assign(n, 0.0);
    r.final_costs = r.standalone_costs;
    if (sum == 0.0) r.warnings.push_back("standalone costs sum to zero; allocation is undefined");
    return r;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = standalone[i] + (standalone[i] / sum) * (coalition - sum);
    r.allocations.push_back(phi);
    r.savings_components.push_back(standalone[i] - phi);
    r.ratios.push_back(r.savings_components.back() / r.total_savings);
    r.final_costs.push_back(standalone[i] - r.ratios.back() * (1.0 - gamma) * r.total_savings);
  }
  return r;
}

AllocationReport improved_allocation(std::size_t n, CountingCharacteristic& characteristic, double gamma) {
  if (n == 0 || n > 32) throw InvalidArgument("allocation needs between 1 and 32 VPPs");
  std::vector<double> standalone;
  for (std::size_t i = 0; i < n; ++i) standalone.push_back(characteristic(Coalition::singleton(i)));
  const double coalition = n == 1 ? standalone[0] : characteristic(Coalition::grand(n));
  return improved_allocation(standalone, coalition, gamma);
}

std::vector<double> standard_shapley(std::size_t n, CountingCharacteristic& characteristic) {
  if (n == 0 || n > kMaxShapleyPlayers) {
    throw InvalidArgument("standard Shapley supports 1.." + std::to_string(kMaxShapleyPlayers) + " players");
  }
  const std::uint32_t full = Coalition::grand(n).mask();
  std::vector<double> cost(std::size_t{full} + 1, 0.0);
  for (std::uint32_t m = 1; m <= full; ++m) cost[m] = characteristic(Coalition(m));

  std::vector<double> factorial(n + 1, 1.0);
  for (std::size_t k = 1; k <= n; ++k) factorial[k] = factorial[k - 1] * static_cast<double>(k);
  std::vector<double> phi(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t bit = std::uint32_t{1} << i;
    for (std::uint32_t m = 0; m <= full; ++m) {
      if (m & bit) continue;
      const std::size_t s = static_cast<std::size_t>(std::popcount(m));
      const double weight = factorial[s] * factorial[n - s - 1] / factorial[n];
      phi[i] += weight * (cost[m | bit] - cost[m]);
    }
  }
  return phi;
}

double characteristic_cost(const assemble::ProblemContext& ctx, Coalition s, program::ConicSolver& solver,
                           const program::SolverSettings& settings) {
  if (s.empty()) throw InvalidArgument("characteristic cost of the empty coalition is not defined");
  const std::vector<std::size_t> members = s.members();
  if (members.back() >= ctx.n_vpps()) throw InvalidArgument("coalition names a VPP outside the context");
  const assemble::ProblemContext sub = ctx.restrict_to(members);
  const assemble::AssembledProgram p =
      members.size() == 1 ? assemble::build_independent(sub, 0) : assemble::build_centralized(sub);
  const program::SolveOutcome o = solver.solve(p.program, settings);
  if (!o.optimal()) {
    throw SolverFailure("characteristic program for coalition mask " + std::to_string(s.mask()) + " returned " +
                        program::to_string(o.status));
  }
  return o.objective_value;
}

nlohmann::json to_json(const AllocationReport& r) {
  return {{"standalone_costs", r.standalone_costs},
          {"coalition_cost", r.coalition_cost},
          {"total_savings", r.total_savings},
          {"vppo_fee", r.vppo_fee},
          {"gamma", r.gamma},
          {"allocations", r.allocations},
          {"savings_components", r.savings_components},
          {"ratios", r.ratios},
          {"final_costs", r.final_costs},
          {"degenerate", r.degenerate},
          {"warnings", r.warnings}};
}

AllocationReport allocation_from_json(const nlohmann::json& doc) {
  try {
    AllocationReport r;
    doc.at("standalone_costs").get_to(r.standalone_costs);
    doc.at("coalition_cost").get_to(r.coalition_cost);
    doc.at("total_savings").get_to(r.total_savings);
    doc.at("vppo_fee").get_to(r.vppo_fee);
    doc.at("gamma").get_to(r.gamma);
    doc.at("allocations").get_to(r.allocations);
    doc.at("savings_components").get_to(r.savings_components);
    doc.at("ratios").get_to(r.ratios);
    doc.at("final_costs").get_to(r.final_costs);
    doc.at("degenerate").get_to(r.degenerate);
    doc.at("warnings").get_to(r.warnings);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("/allocation", e.what());
  }
}

std::string format_cost_table(const AllocationReport& r, std::span<const std::string> ids) {
  const std::size_t n = r.standalone_costs.size();
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  const int w = 14;
  os << std::left << std::setw(26) << "Operation mode" << std::right;
  for (std::size_t i = 0; i < n; ++i) os << std::setw(w) << (i < ids.size() ? ids[i] : "VPP" + std::to_string(i + 1));
  os << std::setw(w) << "SUM" << '\n';
  auto row = [&](const char* label, const std::vector<double>& v, double extra) {
    os << std::left << std::setw(26) << label << std::right;
    double sum = extra;
    for (double x : v) {
      os << std::setw(w) << x;
      sum += x;
    }
    os << std::setw(w) << sum << '\n';
  };
  row("Independent operation", r.standalone_costs, 0.0);
  row("Cooperative operation", r.final_costs, 0.0);
  os << std::left << std::setw(26) << "Coalition cost c(N)" << std::right << std::setw(w) << r.coalition_cost << '\n';
  os << std::left << std::setw(26) << "Total savings" << std::right << std::setw(w) << r.total_savings << '\n';
  os << std::left << std::setw(26) << "Operator fee" << std::right << std::setw(w) << r.vppo_fee << '\n';
  return os.str();
}

}  // namespace vppmig::allocate
