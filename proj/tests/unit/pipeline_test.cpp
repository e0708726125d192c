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

#include <vppmig/errors.hpp>
#include <vppmig/pipeline.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "toys.hpp"

namespace vppmig::pipeline {
namespace {

TEST(Independent, NamesTheInfeasibleVpp) {
  auto ctx = testing::random_context(2, 2, 4);
  ctx.profiles[1].fleet.s_max = 1;
  try {
    solve_independent(ctx);
    FAIL() << "infeasible fleet accepted";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(ctx.profiles[1].id), std::string::npos) << e.what();
  }
}

TEST(Independent, ComplementarityHolds) {
  const auto ctx = testing::random_context(6, 3, 8);
  const IndependentSolution ind = solve_independent(ctx);
  ASSERT_EQ(ind.schedules.size(), 3u);
  for (const auto& s : ind.schedules) {
    for (std::size_t t = 0; t < 8; ++t) {
      EXPECT_LE(std::min(s.charge[t], s.discharge[t]), assemble::kComplementarityTolerance);
    }
  }
}

TEST(Centralized, NoWorseThanIndependent) {
  const auto ctx = testing::random_context(6, 3, 8);
  const IndependentSolution ind = solve_independent(ctx);
  const CentralizedSolution c = solve_centralized(ctx);
  EXPECT_LE(c.objective, std::accumulate(ind.objectives.begin(), ind.objectives.end(), 0.0) + 1e-6);
  EXPECT_LE(c.migration.antisymmetry_violation(), 1e-9);
}

TEST(Identities, DetectCorruptedReport) {
  const std::vector<double> c{10.0, 20.0};
  allocate::AllocationReport r = allocate::improved_allocation(c, 24.0, 0.1);
  EXPECT_TRUE(allocation_identity_failures(r).empty());
  r.final_costs[0] += 0.5;
  EXPECT_FALSE(allocation_identity_failures(r).empty());
}

TEST(Pipeline, RejectsLowBeta) {
  const auto ctx = testing::random_context(2, 2, 4);
  scenario::SolverConfig cfg;
  cfg.beta = 0.4;
  EXPECT_THROW(run_pipeline(ctx, cfg, std::nullopt), InvalidArgument);
}

TEST(Pipeline, ProducesConsistentArtifacts) {
  const scenario::ScenarioFile f = scenario::generate_synthetic(9, 3, 4, 0.8);
  const PipelineOutcome out = run_pipeline(f.context(), f.solver, std::nullopt, f.name);
  const auto& a = out.artifacts;
  EXPECT_FALSE(out.manifest.has_value());
  EXPECT_EQ(a.vpp_ids.size(), 3u);
  EXPECT_EQ(a.scenario_name, f.name);
  EXPECT_EQ(a.admm_iterations, static_cast<int>(a.trace.size()));
  EXPECT_TRUE(allocation_identity_failures(a.allocation).empty());
  EXPECT_NEAR(a.allocation.coalition_cost, a.cooperative.objective, 1e-9 * std::abs(a.cooperative.objective));
  EXPECT_NEAR(std::accumulate(a.allocation.standalone_costs.begin(), a.allocation.standalone_costs.end(), 0.0),
              a.independent.objective, 1e-9 * std::abs(a.independent.objective));
}

TEST(Validation, AllPropertiesPassOnSmallScenario) {
  const scenario::ScenarioFile f = scenario::generate_synthetic(4, 3, 6, 0.8);
  const auto results = run_validation(f.context(), f.solver, 4);
  ASSERT_FALSE(results.empty());
  for (const PropertyResult& r : results) EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;
}

TEST(Bench, RowsAndEvaluationCounts) {
  BenchOptions o;
  o.n_min = 2;
  o.n_max = 3;
  o.horizon = 3;
  o.admm_max_iterations = 20;
  const auto rows = run_bench(o);
  ASSERT_EQ(rows.size(), 2u);
  for (const BenchRow& r : rows) {
    EXPECT_EQ(r.improved_evaluations, r.n_vpps + 1);
    ASSERT_TRUE(r.standard_evaluations.has_value());
    EXPECT_EQ(*r.standard_evaluations, (std::size_t{1} << r.n_vpps) - 1);
    EXPECT_GE(r.admm_iterations, 1);
    EXPECT_LE(r.admm_iterations, 20);
  }
  std::ostringstream csv;
  write_bench_csv(csv, rows);
  std::string header;
  std::getline(std::istringstream(csv.str()) >> std::ws, header);
  EXPECT_NE(header.find("n_vpps"), std::string::npos);
}

}  // namespace
}  // namespace vppmig::pipeline
