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
#include <vppmig/pipeline.hpp>

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "toys.hpp"

namespace vppmig::admm {
namespace {

TEST(Consensus, Dimension) {
  EXPECT_EQ(consensus_dimension(2, 6), 2u * 2 * 1 * 6 + 2 * 6);
  EXPECT_EQ(consensus_dimension(4, 24), 2u * 4 * 3 * 24 + 4 * 24);
  EXPECT_EQ(consensus_dimension(1, 5), 5u);
}

TEST(Consensus, DualUpdateMovesByScaledGap) {
  ConsensusState duals = ConsensusState::zeros(1, 2);
  ConsensusState locals = ConsensusState::zeros(1, 2);
  ConsensusState globals = ConsensusState::zeros(1, 2);
  locals.migration.workload(0, 0, 1) = 4.0;
  globals.migration.workload(0, 0, 1) = 3.0;
  locals.migration.energy(0, 1, 0) = -1.0;
  locals.migration.workload(0, 0, 0) = 100.0;  // diagonal is ignored
  locals.load[1][0] = 2.0;
  globals.load[1][0] = 2.5;
  dual_update(duals, locals, globals, 2.0);
  EXPECT_DOUBLE_EQ(duals.migration.workload(0, 0, 1), 2.0);
  EXPECT_DOUBLE_EQ(duals.migration.energy(0, 1, 0), -2.0);
  EXPECT_DOUBLE_EQ(duals.migration.workload(0, 0, 0), 0.0);
  EXPECT_DOUBLE_EQ(duals.load[1][0], -1.0);
}

TEST(Consensus, ResidualNorms) {
  ConsensusState locals = ConsensusState::zeros(1, 2);
  ConsensusState globals = ConsensusState::zeros(1, 2);
  ConsensusState previous = ConsensusState::zeros(1, 2);
  locals.migration.workload(0, 0, 1) = 3.0;
  locals.load[0][0] = 4.0;
  globals.load[1][0] = 1.0;
  previous.load[1][0] = 3.0;
  const auto [r, s] = residuals(locals, globals, previous, 0.5);
  EXPECT_DOUBLE_EQ(r, std::sqrt(9.0 + 16.0 + 1.0));
  EXPECT_DOUBLE_EQ(s, 0.5 * 2.0);
}

// Oracle: minimize the two augmented-Lagrangian terms over a fine grid of
// antisymmetric candidates g (i->j) and -g (j->i).
double grid_global(double a_ij, double a_ji, double y_ij, double y_ji, double rho, double cap) {
  double best = 0.0;
  double best_val = std::numeric_limits<double>::infinity();
  const int n = 400001;
  for (int k = 0; k < n; ++k) {
    const double g = -cap + 2.0 * cap * k / (n - 1);
    const double v = y_ij * (a_ij - g) + 0.5 * rho * (a_ij - g) * (a_ij - g) + y_ji * (a_ji + g) +
                     0.5 * rho * (a_ji + g) * (a_ji + g);
    if (v < best_val) {
      best_val = v;
      best = g;
    }
  }
  return best;
}

TEST(GlobalMigration, MatchesGridOracle) {
  testing::Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    model::MigrationTensor locals(1, 2);
    model::MigrationTensor duals(1, 2);
    locals.workload(0, 0, 1) = rng.uniform(-8.0, 8.0);
    locals.workload(0, 1, 0) = rng.uniform(-8.0, 8.0);
    locals.energy(0, 0, 1) = rng.uniform(-3.0, 3.0);
    locals.energy(0, 1, 0) = rng.uniform(-3.0, 3.0);
    duals.workload(0, 0, 1) = rng.uniform(-2.0, 2.0);
    duals.workload(0, 1, 0) = rng.uniform(-2.0, 2.0);
    duals.energy(0, 0, 1) = rng.uniform(-2.0, 2.0);
    duals.energy(0, 1, 0) = rng.uniform(-2.0, 2.0);
    const double rho = rng.uniform(0.2, 3.0);
    const auto g = assemble::update_globals_migration(locals, duals, rho, 5.0, 2.0);
    EXPECT_NEAR(g.workload(0, 0, 1),
                grid_global(locals.workload(0, 0, 1), locals.workload(0, 1, 0), duals.workload(0, 0, 1),
                            duals.workload(0, 1, 0), rho, 5.0),
                1e-4);
    EXPECT_NEAR(g.energy(0, 0, 1),
                grid_global(locals.energy(0, 0, 1), locals.energy(0, 1, 0), duals.energy(0, 0, 1),
                            duals.energy(0, 1, 0), rho, 2.0),
                1e-4);
    EXPECT_EQ(g.workload(0, 1, 0), -g.workload(0, 0, 1));
    EXPECT_EQ(g.energy(0, 1, 0), -g.energy(0, 0, 1));
    EXPECT_EQ(g.antisymmetry_violation(), 0.0);
  }
}

TEST(GlobalMigration, HandValues) {
  EXPECT_EQ(assemble::project(7.0, 5.0), 5.0);
  EXPECT_EQ(assemble::project(-7.0, 5.0), -5.0);
  EXPECT_EQ(assemble::project(3.0, 5.0), 3.0);
  model::MigrationTensor locals(1, 2);
  model::MigrationTensor duals(1, 2);
  locals.workload(0, 0, 1) = 4.0;
  locals.workload(0, 1, 0) = -4.0;
  EXPECT_DOUBLE_EQ(assemble::update_globals_migration(locals, duals, 1.0, 10.0, 10.0).workload(0, 0, 1), 4.0);
  locals.workload(0, 1, 0) = -2.0;
  EXPECT_DOUBLE_EQ(assemble::update_globals_migration(locals, duals, 1.0, 10.0, 10.0).workload(0, 0, 1), 3.0);
}

TEST(Run, RejectsBadSettings) {
  const auto ctx = testing::random_context(1, 2, 2);
  AdmmSettings s;
  s.rho = 0.0;
  EXPECT_THROW(run(ctx, s), InvalidArgument);
  s = {};
  s.tolerance = -1.0;
  EXPECT_THROW(run(ctx, s), InvalidArgument);
  s = {};
  s.max_iterations = 0;
  EXPECT_THROW(run(ctx, s), InvalidArgument);
}

TEST(Run, IterationLimitStillReturnsIterate) {
  const auto ctx = testing::random_context(2, 2, 6);
  AdmmSettings s;
  s.max_iterations = 1;
  const AdmmResult r = run(ctx, s);
  EXPECT_EQ(r.status, AdmmStatus::iteration_limit);
  EXPECT_EQ(r.iterations, 1);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace[0].iteration, 1);
  EXPECT_EQ(r.schedules.size(), 2u);
  std::ostringstream csv;
  write_trace_csv(csv, r.trace);
  EXPECT_EQ(csv.str().rfind("iteration,objective,primal_residual,dual_residual,wall_seconds\n", 0), 0u);
}

class SmallInstance : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(SmallInstance, MatchesCentralizedAndKeepsInvariants) {
  const auto ctx = testing::random_context(GetParam(), 2, 6);
  const AdmmResult r = run(ctx, {});
  const auto central = pipeline::solve_centralized(ctx);
  EXPECT_EQ(r.status, AdmmStatus::converged);
  EXPECT_TRUE(r.primal_recovered);
  EXPECT_LE(std::abs(r.objective - central.objective), 1e-3 * std::abs(central.objective));
  EXPECT_GE(r.objective, central.objective - 1e-6 * std::abs(central.objective));

  EXPECT_EQ(r.migration.antisymmetry_violation(), 0.0);
  EXPECT_LE(r.migration.cap_violation(ctx.network.lambda_cap, ctx.network.power_cap), 1e-9);
  double bought = 0.0;
  double declared = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    declared += ctx.profiles[i].declared_capacity;
    for (double p : r.schedules[i].grid_buy) {
      EXPECT_GE(p, -1e-7);
      bought += p;
    }
    for (std::size_t t = 0; t < 6; ++t) {
      EXPECT_LE(std::min(r.schedules[i].charge[t], r.schedules[i].discharge[t]),
                assemble::kComplementarityTolerance);
    }
  }
  EXPECT_NEAR(bought, declared, 1e-6 * declared);
  ASSERT_EQ(static_cast<int>(r.trace.size()), r.iterations);
  for (std::size_t k = 0; k < r.trace.size(); ++k) EXPECT_EQ(r.trace[k].iteration, static_cast<int>(k + 1));
}

INSTANTIATE_TEST_SUITE_P(Seeds, SmallInstance, ::testing::Values(1u, 4u));

TEST(Run, DeterministicAndIndependentOfParallelism) {
  const auto ctx = testing::random_context(3, 2, 4);
  AdmmSettings s;
  s.max_iterations = 40;
  const AdmmResult a = run(ctx, s);
  const AdmmResult b = run(ctx, s);
  s.parallel = false;
  const AdmmResult c = run(ctx, s);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  ASSERT_EQ(a.trace.size(), c.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    EXPECT_EQ(a.trace[k].objective, b.trace[k].objective);
    EXPECT_EQ(a.trace[k].objective, c.trace[k].objective);
    EXPECT_EQ(a.trace[k].primal_residual, c.trace[k].primal_residual);
  }
  EXPECT_EQ(a.migration, c.migration);
}

TEST(Run, UsesInjectedSolverFactory) {
  const auto ctx = testing::random_context(3, 2, 3);
  auto made = std::make_shared<std::atomic<int>>(0);
  AdmmSettings s;
  s.max_iterations = 3;
  s.solver_factory = [made] {
    ++*made;
    return std::make_unique<program::ClarabelSolver>();
  };
  run(ctx, s);
  EXPECT_GT(made->load(), 0);
}

}  // namespace
}  // namespace vppmig::admm
