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


#include <vppmig/model.hpp>

#include <vppmig/errors.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vppmig::model {

namespace {

template <typename... Args>
[[noreturn]] void fail(const Args&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  throw InvalidArgument(os.str());
}

void require_length(const std::string& field, std::size_t got, std::size_t want) {
  if (got != want) fail(field, ": expected ", want, " slots, got ", got);
}

}  // namespace

void ServerFleetParams::validate() const {
  if (!(e_idle >= 0.0)) fail("fleet.e_idle must be >= 0, got ", e_idle);
  if (!(e_peak >= e_idle)) fail("fleet.e_peak must be >= e_idle, got ", e_peak);
  if (!(pue >= 1.0)) fail("fleet.pue must be >= 1, got ", pue);
  if (!(service_rate > 0.0)) fail("fleet.service_rate must be > 0, got ", service_rate);
  if (s_max < 1) fail("fleet.s_max must be >= 1, got ", s_max);
  if (!(delay_cost >= 0.0)) fail("fleet.delay_cost must be >= 0, got ", delay_cost);
}

void BessParams::validate() const {
  if (!(capacity > 0.0)) fail("bess.capacity must be > 0, got ", capacity);
  if (!(eff_ch > 0.0 && eff_ch <= 1.0)) fail("bess.eff_ch must lie in (0, 1], got ", eff_ch);
  if (!(eff_dis > 0.0 && eff_dis <= 1.0)) fail("bess.eff_dis must lie in (0, 1], got ", eff_dis);
  if (!(self_discharge >= 0.0 && self_discharge < 1.0))
    fail("bess.self_discharge must lie in [0, 1), got ", self_discharge);
  if (!(degr_cost >= 0.0)) fail("bess.degr_cost must be >= 0, got ", degr_cost);
  if (!(soc_min >= 0.0 && soc_min <= soc_init && soc_init <= soc_max && soc_max <= 1.0))
    fail("bess needs 0 <= soc_min <= soc_init <= soc_max <= 1, got ", soc_min, ", ", soc_init, ", ",
         soc_max);
  if (!(q_ch_max >= 0.0)) fail("bess.q_ch_max must be >= 0, got ", q_ch_max);
  if (!(q_dis_max >= 0.0)) fail("bess.q_dis_max must be >= 0, got ", q_dis_max);
}

void VppProfile::validate(std::size_t horizon) const {
  require_length(id + ".price_buy", price_buy.size(), horizon);
  require_length(id + ".pv_fuzzy", pv_fuzzy.size(), horizon);
  require_length(id + ".workload_fuzzy", workload_fuzzy.size(), horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    if (!(price_buy[t] >= 0.0)) fail(id, ".price_buy[", t, "] must be >= 0, got ", price_buy[t]);
    if (!pv_fuzzy[t].is_valid() || pv_fuzzy[t].a < 0.0)
      fail(id, ".pv_fuzzy[", t, "] must satisfy 0 <= a <= b <= c");
    if (!workload_fuzzy[t].is_valid() || workload_fuzzy[t].a < 0.0)
      fail(id, ".workload_fuzzy[", t, "] must satisfy 0 <= a <= b <= c");
  }
  if (!(pv_unit_cost >= 0.0)) fail(id, ".pv_unit_cost must be >= 0, got ", pv_unit_cost);
  if (!(batch_energy_total >= 0.0)) fail(id, ".batch_energy_total must be >= 0, got ", batch_energy_total);
  if (!(declared_capacity > 0.0)) fail(id, ".declared_capacity must be > 0, got ", declared_capacity);
  fleet.validate();
  bess.validate();
}

void NetworkConfig::validate() const {
  if (n_vpps < 1) fail("network.n_vpps must be >= 1");
  if (horizon < 1) fail("network.horizon must be >= 1");
  if (distance.size() != n_vpps) fail("network.distance: expected ", n_vpps, " rows, got ", distance.size());
  for (std::size_t i = 0; i < n_vpps; ++i) {
    if (distance[i].size() != n_vpps)
      fail("network.distance[", i, "]: expected ", n_vpps, " entries, got ", distance[i].size());
  }
  for (std::size_t i = 0; i < n_vpps; ++i) {
    if (distance[i][i] != 0.0) fail("network.distance(", i, ",", i, ") must be 0, got ", distance[i][i]);
    for (std::size_t j = 0; j < n_vpps; ++j) {
      if (!(distance[i][j] >= 0.0)) fail("network.distance(", i, ",", j, ") must be >= 0");
      if (distance[i][j] != distance[j][i])
        fail("network.distance is not symmetric at (", i, ",", j, "): ", distance[i][j], " vs ",
             distance[j][i]);
    }
  }
  if (!(w_workload >= 0.0)) fail("network.w_workload must be >= 0");
  if (!(w_energy >= 0.0)) fail("network.w_energy must be >= 0");
  if (!(lambda_cap >= 0.0)) fail("network.lambda_cap must be >= 0");
  if (!(power_cap >= 0.0)) fail("network.power_cap must be >= 0");
  if (!(dr_price >= 0.0)) fail("network.dr_price must be >= 0");
  require_length("network.cdl", cdl.size(), horizon);
  double total = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    if (!(cdl[t] >= 0.0)) fail("network.cdl[", t, "] must be >= 0, got ", cdl[t]);
    total += cdl[t];
  }
  if (std::abs(total - 1.0) > 1e-6) fail("network.cdl must sum to 1, got ", total);
  if (!(beta >= 0.5 && beta <= 1.0)) fail("network.beta must lie in [0.5, 1], got ", beta);
  if (!(gamma >= 0.0 && gamma < 1.0)) fail("network.gamma must lie in [0, 1), got ", gamma);
}

MigrationTensor::MigrationTensor(std::size_t horizon, std::size_t n_vpps)
    : horizon_(horizon), n_(n_vpps), workload_(horizon * n_vpps * n_vpps, 0.0),
      energy_(horizon * n_vpps * n_vpps, 0.0) {}

double MigrationTensor::net_workload_out(std::size_t t, std::size_t i) const {
  double s = 0.0;
  for (std::size_t j = 0; j < n_; ++j) s += workload(t, i, j);
  return s;
}

double MigrationTensor::net_energy_out(std::size_t t, std::size_t i) const {
  double s = 0.0;
  for (std::size_t j = 0; j < n_; ++j) s += energy(t, i, j);
  return s;
}

double MigrationTensor::antisymmetry_violation() const {
  double worst = 0.0;
  for (std::size_t t = 0; t < horizon_; ++t) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i; j < n_; ++j) {
        worst = std::max(worst, std::abs(workload(t, i, j) + workload(t, j, i)) / (i == j ? 2.0 : 1.0));
        worst = std::max(worst, std::abs(energy(t, i, j) + energy(t, j, i)) / (i == j ? 2.0 : 1.0));
      }
    }
  }
  return worst;
}

double MigrationTensor::cap_violation(double lambda_cap, double power_cap) const {
  double worst = 0.0;
  for (double v : workload_) worst = std::max(worst, std::abs(v) - lambda_cap);
  for (double v : energy_) worst = std::max(worst, std::abs(v) - power_cap);
  return worst;
}

double dc_power(const ServerFleetParams& fleet, double servers, double effective_load, double batch) {
  if (!(servers >= 1.0)) fail("dc_power needs at least one server, got ", servers);
  if (effective_load < 0.0) fail("dc_power: load must be >= 0, got ", effective_load);
  const double capacity = servers * fleet.service_rate;
  if (effective_load > capacity * (1.0 + 1e-12))
    fail("dc_power: load ", effective_load, " exceeds capacity ", capacity);
  const double utilization = effective_load / capacity;
  return servers * (fleet.e_idle + (fleet.e_peak - fleet.e_idle) * utilization +
                    (fleet.pue - 1.0) * fleet.e_peak) +
         batch;
}

namespace {

template <typename Term>
double queue_sum(const ServerFleetParams& fleet, std::span<const double> servers,
                 std::span<const double> load, Term term) {
  if (servers.size() != load.size()) fail("qos cost: servers and load lengths differ");
  double total = 0.0;
  for (std::size_t t = 0; t < load.size(); ++t) {
    const double slack = servers[t] * fleet.service_rate - load[t];
    if (!(slack > 0.0)) fail("qos cost: slot ", t, " is saturated (s u = ", servers[t] * fleet.service_rate,
                             ", load = ", load[t], ")");
    total += term(fleet.delay_cost * load[t], slack);
  }
  return total;
}

}  // namespace

double qos_cost(const ServerFleetParams& fleet, std::span<const double> servers,
                std::span<const double> load) {
  return queue_sum(fleet, servers, load, [](double num, double slack) { return num / slack; });
}

double qos_cost_squared(const ServerFleetParams& fleet, std::span<const double> servers,
                        std::span<const double> load) {
  return queue_sum(fleet, servers, load,
                   [](double num, double slack) { return num / (slack * slack); });
}

double bess_step(const BessParams& p, double soc_prev, double charge, double discharge) {
  return (1.0 - p.self_discharge) * soc_prev + p.eff_ch * charge / p.capacity -
         discharge / (p.eff_dis * p.capacity);
}

DrMetrics dr_metrics(std::span<const double> grid_buy, double capacity, std::span<const double> cdl,
                     double dr_price) {
  if (!(capacity > 0.0)) fail("dr_metrics: capacity must be > 0, got ", capacity);
  if (grid_buy.size() != cdl.size()) fail("dr_metrics: load and CDL lengths differ");
  DrMetrics m;
  m.load_shape.resize(grid_buy.size());
  double sq = 0.0;
  for (std::size_t t = 0; t < grid_buy.size(); ++t) {
    m.load_shape[t] = grid_buy[t] / capacity;
    const double e = m.load_shape[t] - cdl[t];
    sq += e * e;
  }
  m.distance = std::sqrt(sq);
  m.similarity = 1.0 - m.distance;
  m.incentive = dr_price * m.similarity * capacity;
  return m;
}

double migration_cost(const NetworkConfig& net, const MigrationTensor& tensor, std::size_t origin) {
  const std::size_t n = tensor.n_vpps();
  if (origin >= n) fail("migration_cost: origin ", origin, " out of range");
  double workload = 0.0;
  double energy = 0.0;
  for (std::size_t t = 0; t < tensor.horizon(); ++t) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == origin) continue;
      const double d = net.distance.at(origin).at(j);
      workload += d * std::max(0.0, tensor.workload(t, origin, j));
      energy += d * std::max(0.0, tensor.energy(t, origin, j));
    }
  }
  return net.w_workload * workload + net.w_energy * energy;
}

}  // namespace vppmig::model
