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
 * \file vppmig/allocate.hpp
 *
 * \brief Characteristic-function evaluation and cost allocation among
 *  cooperating VPPs: the proportional linear-complexity rule with an
 *  operator fee, and the exponential Shapley value for small N.
 */

#ifndef VPPMIG_ALLOCATE_HPP
#define VPPMIG_ALLOCATE_HPP

#include <vppmig/assemble.hpp>
#include <vppmig/program.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace vppmig::allocate {

/// Subset of {0, ..., n-1} as a bitmask (n <= 32).
class Coalition {
 public:
  constexpr Coalition() = default;
  constexpr explicit Coalition(std::uint32_t mask) : mask_(mask) {}

  static constexpr Coalition singleton(std::size_t i) { return Coalition(std::uint32_t{1} << i); }
  static constexpr Coalition grand(std::size_t n) {
    return Coalition(n >= 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << n) - 1);
  }

  constexpr bool contains(std::size_t i) const { return (mask_ >> i) & 1U; }
  constexpr Coalition with(std::size_t i) const { return Coalition(mask_ | (std::uint32_t{1} << i)); }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr std::uint32_t mask() const { return mask_; }
  std::size_t size() const;
  std::vector<std::size_t> members() const;

  friend constexpr bool operator==(Coalition, Coalition) = default;

 private:
  std::uint32_t mask_ = 0;
};

using CostFunction = std::function<double(Coalition)>;

/// Wraps a characteristic function and counts evaluations.
class CountingCharacteristic {
 public:
  explicit CountingCharacteristic(CostFunction cost) : cost_(std::move(cost)) {}

  double operator()(Coalition s) {
    ++calls_;
    return cost_(s);
  }
  std::size_t calls() const noexcept { return calls_; }
  void reset() noexcept { calls_ = 0; }

 private:
  CostFunction cost_;
  std::size_t calls_ = 0;
};

struct AllocationReport {
  std::vector<double> standalone_costs;  ///< c({i})
  double coalition_cost = 0.0;           ///< c(N)
  double total_savings = 0.0;            ///< V_save
  double vppo_fee = 0.0;                 ///< gamma * V_save
  double gamma = 0.0;
  std::vector<double> allocations;         ///< phi'_i
  std::vector<double> savings_components;  ///< V^c_i
  std::vector<double> ratios;              ///< theta_i (empty when degenerate)
  std::vector<double> final_costs;         ///< C*_i
  bool degenerate = false;                 ///< no savings or zero standalone sum
  std::vector<std::string> warnings;
};

/// Proportional allocation from N standalone costs and the grand-coalition
/// cost. Throws InvalidArgument for empty input or gamma outside [0, 1).
AllocationReport improved_allocation(std::span<const double> standalone, double coalition,
                                     double gamma);

/// Same rule, pulling the N + 1 required values from a characteristic function.
AllocationReport improved_allocation(std::size_t n, CountingCharacteristic& characteristic,
                                     double gamma);

inline constexpr std::size_t kMaxShapleyPlayers = 8;

/// Shapley value. Evaluates each of the 2^n - 1 nonempty coalitions exactly
/// once. Throws InvalidArgument for n == 0 or n > kMaxShapleyPlayers.
std::vector<double> standard_shapley(std::size_t n, CountingCharacteristic& characteristic);

/// Optimal cooperative objective of the coalition's members (migration only
/// among members, demand response over their aggregate). Throws
/// SolverFailure when the program has no optimal solution.
double characteristic_cost(const assemble::ProblemContext& ctx, Coalition s,
                           program::ConicSolver& solver,
                           const program::SolverSettings& settings = {});

nlohmann::json to_json(const AllocationReport& report);
AllocationReport allocation_from_json(const nlohmann::json& doc);

/// Plain-text cost table: one column per VPP plus a SUM column, rows for
/// independent and cooperative (allocated) operation.
std::string format_cost_table(const AllocationReport& report,
                              std::span<const std::string> vpp_ids);

}  // namespace vppmig::allocate

#endif  // VPPMIG_ALLOCATE_HPP
