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
 * \file vppmig/model.hpp
 *
 * \brief Parameter records and cost/metric primitives for data centers, PV,
 *  battery storage, load-shape tracking, and inter-VPP migration.
 *
 * Time slots are one hour long, so kW and kWh per slot coincide numerically.
 */

#ifndef VPPMIG_MODEL_HPP
#define VPPMIG_MODEL_HPP

#include <vppmig/fuzzy.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace vppmig::model {

struct ServerFleetParams {
  double e_idle = 0.0;        ///< kW per server
  double e_peak = 0.0;        ///< kW per server
  double pue = 1.0;           ///< power usage effectiveness, >= 1
  double service_rate = 1.0;  ///< requests/slot per server
  int s_max = 1;              ///< maximum active servers
  double delay_cost = 0.0;    ///< $ per unit queuing delay

  /// Per-server power that does not scale with load: e_idle + (pue - 1) e_peak.
  double static_power() const noexcept { return e_idle + (pue - 1.0) * e_peak; }
  /// Marginal kWh per request: (e_peak - e_idle) / service_rate.
  double energy_per_request() const noexcept { return (e_peak - e_idle) / service_rate; }

  void validate() const;
};

struct BessParams {
  double capacity = 1.0;        ///< kWh
  double eff_ch = 1.0;
  double eff_dis = 1.0;
  double self_discharge = 0.0;  ///< fraction lost per slot
  double degr_cost = 0.0;       ///< $/kWh throughput
  double soc_min = 0.0;
  double soc_max = 1.0;
  double q_ch_max = 0.0;        ///< kW
  double q_dis_max = 0.0;       ///< kW
  double soc_init = 0.5;

  void validate() const;
};

struct VppProfile {
  std::string id;
  std::vector<double> price_buy;                ///< $/kWh per slot
  double pv_unit_cost = 0.0;                    ///< $/kWh
  std::vector<fuzzy::FuzzyTriple> pv_fuzzy;     ///< kW per slot
  std::vector<fuzzy::FuzzyTriple> workload_fuzzy;  ///< requests per slot
  double batch_energy_total = 0.0;              ///< kWh over the horizon
  double declared_capacity = 1.0;               ///< kWh over the horizon
  double batch_slot_cap = -1.0;                 ///< kWh per slot, negative = unbounded
  ServerFleetParams fleet;
  BessParams bess;

  std::size_t horizon() const noexcept { return price_buy.size(); }
  /// Throws InvalidArgument naming the offending field and slot.
  void validate(std::size_t horizon) const;
};

struct NetworkConfig {
  std::size_t n_vpps = 0;
  std::size_t horizon = 0;
  std::vector<std::vector<double>> distance;  ///< km, symmetric, zero diagonal
  double w_workload = 0.0;  ///< $ per request-km
  double w_energy = 0.0;    ///< $ per kWh-km
  double lambda_cap = 0.0;  ///< requests/slot per ordered pair
  double power_cap = 0.0;   ///< kW per ordered pair
  double dr_price = 0.0;    ///< $/kWh of declared capacity
  std::vector<double> cdl;  ///< target load shape, sums to 1
  double beta = 0.9;
  double gamma = 0.1;

  void validate() const;
};

/// One VPP's schedule over the horizon.
struct ScheduleDecision {
  std::vector<double> servers;     ///< continuous or rounded server counts
  std::vector<double> grid_buy;    ///< kWh
  std::vector<double> charge;      ///< kW
  std::vector<double> discharge;   ///< kW
  std::vector<double> batch;       ///< kWh
  std::vector<double> soc;         ///< SoC_1..SoC_T
  std::vector<double> qos_aux;     ///< z_t
  std::vector<double> utilization; ///< U_t
};

/// Per-slot antisymmetric transfer matrices, flattened t-major.
class MigrationTensor {
 public:
  MigrationTensor() = default;
  MigrationTensor(std::size_t horizon, std::size_t n_vpps);

  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t n_vpps() const noexcept { return n_; }

  double& workload(std::size_t t, std::size_t i, std::size_t j) { return workload_[index(t, i, j)]; }
  double workload(std::size_t t, std::size_t i, std::size_t j) const { return workload_[index(t, i, j)]; }
  double& energy(std::size_t t, std::size_t i, std::size_t j) { return energy_[index(t, i, j)]; }
  double energy(std::size_t t, std::size_t i, std::size_t j) const { return energy_[index(t, i, j)]; }

  std::span<const double> workload_data() const noexcept { return workload_; }
  std::span<const double> energy_data() const noexcept { return energy_; }

  /// Net workload leaving VPP i in slot t: sum_j workload(t, i, j).
  double net_workload_out(std::size_t t, std::size_t i) const;
  double net_energy_out(std::size_t t, std::size_t i) const;

  /// Largest |x_ij + x_ji| and |x_ii| over both commodities.
  double antisymmetry_violation() const;
  /// Largest amount by which |workload| or |energy| exceeds its cap.
  double cap_violation(double lambda_cap, double power_cap) const;

  friend bool operator==(const MigrationTensor&, const MigrationTensor&) = default;

 private:
  std::size_t index(std::size_t t, std::size_t i, std::size_t j) const noexcept {
    return (t * n_ + i) * n_ + j;
  }

  std::size_t horizon_ = 0;
  std::size_t n_ = 0;
  std::vector<double> workload_;
  std::vector<double> energy_;
};

struct DrMetrics {
  std::vector<double> load_shape;  ///< L_t
  double distance = 0.0;           ///< ||L - L_cdl||_2
  double similarity = 1.0;         ///< 1 - distance, not clamped
  double incentive = 0.0;          ///< dr_price * similarity * capacity

  /// Similarity below zero means the tracking failed outright.
  bool tracking_failed() const noexcept { return similarity < 0.0; }
};

/// Facility energy in one slot:
/// s [e_idle + (e_peak - e_idle) load / (s u) + (pue - 1) e_peak] + batch.
double dc_power(const ServerFleetParams& fleet, double servers, double effective_load, double batch);

/// Queuing delay cost sum_t kappa load_t / (s_t u - load_t). Throws on saturation.
double qos_cost(const ServerFleetParams& fleet, std::span<const double> servers,
                std::span<const double> load);

/// Delay cost in the form the conic programs minimize:
/// sum_t kappa load_t / (s_t u - load_t)^2.
double qos_cost_squared(const ServerFleetParams& fleet, std::span<const double> servers,
                        std::span<const double> load);

/// One-slot state-of-charge recursion.
double bess_step(const BessParams& params, double soc_prev, double charge, double discharge);

DrMetrics dr_metrics(std::span<const double> grid_buy, double capacity,
                     std::span<const double> cdl, double dr_price);

/// Migration cost charged to `origin`: each transfer is paid once, by its
/// sender, at the pair distance.
double migration_cost(const NetworkConfig& net, const MigrationTensor& tensor, std::size_t origin);

}  // namespace vppmig::model

#endif  // VPPMIG_MODEL_HPP
