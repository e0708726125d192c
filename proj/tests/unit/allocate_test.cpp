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
#include <vppmig/pipeline.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "toys.hpp"

namespace vppmig::allocate {
namespace {

TEST(Coalition, Basics) {
  const Coalition s = Coalition::singleton(0).with(2);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.members(), (std::vector<std::size_t>{0, 2}));
  EXPECT_TRUE(s.contains(2));
  EXPECT_FALSE(s.contains(1));
  EXPECT_EQ(Coalition::grand(3).mask(), 7u);
  EXPECT_TRUE(Coalition().empty());
}

TEST(Improved, HandValuesWithoutFee) {
  const std::vector<double> c{10.0, 20.0};
  const AllocationReport r = improved_allocation(c, 24.0, 0.0);
  EXPECT_DOUBLE_EQ(r.total_savings, 6.0);
  EXPECT_DOUBLE_EQ(r.vppo_fee, 0.0);
  EXPECT_DOUBLE_EQ(r.allocations[0], 8.0);
  EXPECT_DOUBLE_EQ(r.allocations[1], 16.0);
  EXPECT_DOUBLE_EQ(r.ratios[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.ratios[1], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.final_costs[0], 8.0);
  EXPECT_DOUBLE_EQ(r.final_costs[1], 16.0);
  EXPECT_FALSE(r.degenerate);
}

TEST(Improved, HandValuesWithFee) {
  const std::vector<double> c{10.0, 20.0};
  const AllocationReport r = improved_allocation(c, 24.0, 0.5);
  EXPECT_DOUBLE_EQ(r.vppo_fee, 3.0);
  EXPECT_DOUBLE_EQ(r.final_costs[0], 9.0);
  EXPECT_DOUBLE_EQ(r.final_costs[1], 18.0);
  EXPECT_NEAR(r.final_costs[0] + r.final_costs[1] - r.vppo_fee, 24.0, 1e-12);
}

TEST(Improved, DegenerateWhenNoSavings) {
  const std::vector<double> c{10.0, 20.0};
  const AllocationReport r = improved_allocation(c, 30.0, 0.1);
  EXPECT_TRUE(r.degenerate);
  EXPECT_TRUE(r.ratios.empty());
  EXPECT_EQ(r.final_costs, c);
  const std::vector<double> zero{0.0, 0.0};
  const AllocationReport z = improved_allocation(zero, -1.0, 0.1);
  EXPECT_TRUE(z.degenerate);
  EXPECT_FALSE(z.warnings.empty());
}

TEST(Improved, RejectsBadInput) {
  const std::vector<double> c{1.0};
  EXPECT_THROW(improved_allocation(std::span<const double>{}, 1.0, 0.1), InvalidArgument);
  EXPECT_THROW(improved_allocation(c, 1.0, 1.0), InvalidArgument);
  EXPECT_THROW(improved_allocation(c, 1.0, -0.1), InvalidArgument);
}

// Property: identities hold and the allocation scales with the costs.
TEST(Improved, IdentitiesAndScalingCovariance) {
  testing::Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.integer(1, 9);
    std::vector<double> c;
    for (int i = 0; i < n; ++i) c.push_back(rng.uniform(1.0, 100.0));
    const double sum = std::accumulate(c.begin(), c.end(), 0.0);
    const double coalition = sum * rng.uniform(0.5, 0.99);
    const double gamma = rng.uniform(0.0, 0.9);
    const AllocationReport r = improved_allocation(c, coalition, gamma);
    const double tol = 1e-9 * sum;
    EXPECT_NEAR(std::accumulate(r.allocations.begin(), r.allocations.end(), 0.0), coalition, tol);
    EXPECT_NEAR(std::accumulate(r.ratios.begin(), r.ratios.end(), 0.0), 1.0, 1e-12);
    EXPECT_NEAR(std::accumulate(r.final_costs.begin(), r.final_costs.end(), 0.0) - r.vppo_fee, coalition, tol);
    for (int i = 0; i < n; ++i) EXPECT_LE(r.final_costs[i], c[i] + tol);
    EXPECT_TRUE(pipeline::allocation_identity_failures(r).empty());

    const double k = rng.uniform(0.1, 10.0);
    std::vector<double> scaled(c);
    for (double& v : scaled) v *= k;
    const AllocationReport s = improved_allocation(scaled, coalition * k, gamma);
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(s.final_costs[i], k * r.final_costs[i], 1e-9 * k * sum);
      EXPECT_NEAR(s.ratios[i], r.ratios[i], 1e-12);
    }
  }
}

TEST(Improved, UsesExactlyNPlusOneEvaluations) {
  for (std::size_t n = 2; n <= 12; ++n) {
    CountingCharacteristic v([](Coalition s) { return static_cast<double>(s.size()) + 1.0; });
    improved_allocation(n, v, 0.1);
    EXPECT_EQ(v.calls(), n + 1);
  }
}

// Oracle: average marginal contribution over every ordering of the players.
std::vector<double> permutation_shapley(std::size_t n, const CostFunction& cost) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(n, 0.0);
  double count = 0.0;
  do {
    Coalition s;
    double before = 0.0;
    for (std::size_t i : order) {
      s = s.with(i);
      const double after = cost(s);
      phi[i] += after - before;
      before = after;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& p : phi) p /= count;
  return phi;
}

TEST(Shapley, MatchesPermutationOracle) {
  testing::Rng rng(4);
  for (std::size_t n = 1; n <= 6; ++n) {
    std::vector<double> table(std::size_t{1} << n);
    for (double& v : table) v = rng.uniform(0.0, 50.0);
    table[0] = 0.0;
    const CostFunction cost = [&](Coalition s) { return table[s.mask()]; };
    CountingCharacteristic v(cost);
    const auto phi = standard_shapley(n, v);
    const auto oracle = permutation_shapley(n, cost);
    EXPECT_EQ(v.calls(), (std::size_t{1} << n) - 1);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(phi[i], oracle[i], 1e-9);
    EXPECT_NEAR(std::accumulate(phi.begin(), phi.end(), 0.0), table.back(), 1e-9);
  }
}

TEST(Shapley, AdditiveGameReturnsStandaloneCosts) {
  const std::vector<double> w{3.0, 5.0, 7.0, 11.0};
  CountingCharacteristic v([&](Coalition s) {
    double sum = 0.0;
    for (std::size_t i : s.members()) sum += w[i];
    return sum;
  });
  const auto phi = standard_shapley(4, v);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(phi[i], w[i], 1e-12);
}

TEST(Shapley, RejectsTooManyPlayers) {
  CountingCharacteristic v([](Coalition) { return 1.0; });
  EXPECT_THROW(standard_shapley(0, v), InvalidArgument);
  EXPECT_THROW(standard_shapley(kMaxShapleyPlayers + 1, v), InvalidArgument);
  EXPECT_EQ(v.calls(), 0u);
}

TEST(Characteristic, SingletonEqualsIndependentOptimum) {
  const auto ctx = testing::random_context(5, 3, 6);
  const auto ind = pipeline::solve_independent(ctx);
  program::ClarabelSolver solver;
  for (std::size_t i = 0; i < 3; ++i) {
    const double c = characteristic_cost(ctx, Coalition::singleton(i), solver);
    EXPECT_NEAR(c, ind.objectives[i], 1e-6 * std::abs(ind.objectives[i]));
  }
  const double grand = characteristic_cost(ctx, Coalition::grand(3), solver);
  EXPECT_LE(grand, std::accumulate(ind.objectives.begin(), ind.objectives.end(), 0.0) + 1e-6);
  EXPECT_THROW(characteristic_cost(ctx, Coalition(), solver), InvalidArgument);
  EXPECT_THROW(characteristic_cost(ctx, Coalition::singleton(3), solver), InvalidArgument);
}

TEST(Report, JsonRoundTripAndTable) {
  const std::vector<double> c{10.0, 20.0};
  const AllocationReport r = improved_allocation(c, 24.0, 0.1);
  const AllocationReport back = allocation_from_json(to_json(r));
  EXPECT_EQ(back.final_costs, r.final_costs);
  EXPECT_EQ(back.ratios, r.ratios);
  EXPECT_EQ(back.vppo_fee, r.vppo_fee);
  const std::vector<std::string> ids{"alpha", "beta"};
  const std::string table = format_cost_table(r, ids);
  EXPECT_NE(table.find("alpha"), std::string::npos);
  EXPECT_NE(table.find("SUM"), std::string::npos);
}

}  // namespace
}  // namespace vppmig::allocate
