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
#include <vppmig/scenario.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "toys.hpp"

namespace vppmig::scenario {
namespace {

namespace fs = std::filesystem;

const fs::path kDemo = fs::path(VPPMIG_DATA_DIR) / "demo_scenario.json";

nlohmann::json demo_json() {
  std::ifstream in(kDemo);
  return nlohmann::json::parse(in);
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vppmig_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string schema_path_of(const nlohmann::json& doc) {
  try {
    parse_scenario(doc);
  } catch (const SchemaError& e) {
    return e.path();
  }
  return "<accepted>";
}

// Numeric leaves compared within an absolute tolerance, everything else exactly.
void expect_json_close(const nlohmann::json& a, const nlohmann::json& b, double tol, const std::string& at = "") {
  if (a.is_number() && b.is_number()) {
    EXPECT_NEAR(a.get<double>(), b.get<double>(), tol) << at;
    return;
  }
  ASSERT_EQ(a.type(), b.type()) << at;
  if (a.is_object()) {
    ASSERT_EQ(a.size(), b.size()) << at;
    for (auto it = a.begin(); it != a.end(); ++it) {
      ASSERT_TRUE(b.contains(it.key())) << at << "/" << it.key();
      expect_json_close(it.value(), b.at(it.key()), tol, at + "/" + it.key());
    }
  } else if (a.is_array()) {
    ASSERT_EQ(a.size(), b.size()) << at;
    for (std::size_t k = 0; k < a.size(); ++k) expect_json_close(a[k], b[k], tol, at + "/" + std::to_string(k));
  } else {
    EXPECT_EQ(a, b) << at;
  }
}

TEST(Scenario, DemoLoads) {
  const assemble::ProblemContext ctx = load_scenario(kDemo);
  EXPECT_EQ(ctx.n_vpps(), 4u);
  EXPECT_EQ(ctx.horizon(), 24u);
  EXPECT_DOUBLE_EQ(ctx.network.distance[0][1], 2048.0);
  EXPECT_EQ(ctx.network.distance, us_datacenter_distances());
  EXPECT_NEAR(std::accumulate(ctx.network.cdl.begin(), ctx.network.cdl.end(), 0.0), 1.0, 1e-12);
}

TEST(Scenario, RejectsEmptyVppList) {
  nlohmann::json doc = demo_json();
  doc["vpps"] = nlohmann::json::array();
  EXPECT_EQ(schema_path_of(doc), "/vpps");
}

TEST(Scenario, AsymmetricDistanceNamesThePair) {
  nlohmann::json doc = demo_json();
  doc["network"]["distance"][0][2] = 1.0;
  try {
    parse_scenario(doc);
    FAIL() << "asymmetric distance accepted";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("(0,2)"), std::string::npos) << e.what();
  }
}

TEST(Scenario, UnitsMustMatchExactly) {
  nlohmann::json doc = demo_json();
  doc["units"]["energy"] = "MWh";
  EXPECT_EQ(schema_path_of(doc), "/units/energy");
  doc = demo_json();
  doc.erase("units");
  EXPECT_NE(schema_path_of(doc), "<accepted>");
}

TEST(Scenario, FieldErrorsCarryPaths) {
  nlohmann::json doc = demo_json();
  doc["vpps"][2]["fleet"]["pue"] = "high";
  EXPECT_EQ(schema_path_of(doc), "/vpps/2/fleet/pue");
  doc = demo_json();
  doc["vpps"][1]["workload_fuzzy"][3] = {5.0, 4.0, 6.0};
  EXPECT_EQ(schema_path_of(doc), "/vpps/1/workload_fuzzy/3");
  doc = demo_json();
  doc["schema"] = "other/9";
  EXPECT_EQ(schema_path_of(doc), "/schema");
}

TEST(Scenario, DefaultsApplied) {
  nlohmann::json doc = demo_json();
  doc["vpps"][0]["bess"].erase("soc_init");
  doc["solver"].erase("rho");
  doc["solver"].erase("tolerance");
  const ScenarioFile f = parse_scenario(doc);
  EXPECT_DOUBLE_EQ(f.vpps[0].bess.soc_init, 0.5);
  EXPECT_DOUBLE_EQ(f.solver.rho, 1.0);
  EXPECT_DOUBLE_EQ(f.solver.tolerance, 1e-4);
}

TEST(Scenario, MissingFileIsIoError) {
  EXPECT_THROW(load_scenario("/nonexistent/vppmig.json"), IoError);
}

TEST(Generator, DeterministicBytes) {
  const fs::path dir = scratch_dir("gen");
  write_scenario(generate_synthetic(3, 3, 8, 0.5), dir / "a.json");
  write_scenario(generate_synthetic(3, 3, 8, 0.5), dir / "b.json");
  std::ifstream a(dir / "a.json");
  std::ifstream b(dir / "b.json");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_NE(to_json(generate_synthetic(4, 3, 8, 0.5)), to_json(generate_synthetic(3, 3, 8, 0.5)));
  EXPECT_THROW(generate_synthetic(1, 2, 4, 1.5), InvalidArgument);
  EXPECT_THROW(generate_synthetic(1, 0, 4, 0.5), InvalidArgument);
}

TEST(Generator, ScenarioRoundTripIsExact) {
  const ScenarioFile f = generate_synthetic(8, 3, 5, 0.7);
  EXPECT_EQ(to_json(parse_scenario(to_json(f))), to_json(f));
  const fs::path dir = scratch_dir("rt");
  write_scenario(f, dir / "s.json");
  EXPECT_EQ(to_json(read_scenario(dir / "s.json")), to_json(f));
}

TEST(Generator, ComplementarityDrivesSavings) {
  auto savings = [](double comp) {
    const auto ctx = generate_synthetic(12, 2, 6, comp).context();
    const auto ind = pipeline::solve_independent(ctx);
    const double sum = std::accumulate(ind.objectives.begin(), ind.objectives.end(), 0.0);
    return (sum - pipeline::solve_centralized(ctx).objective) / std::abs(sum);
  };
  EXPECT_NEAR(savings(0.0), 0.0, 1e-5);
  EXPECT_GT(savings(1.0), 1e-3);
}

class Artifacts : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const ScenarioFile f = generate_synthetic(5, 2, 4, 0.8);
    dir_ = new fs::path(scratch_dir("run"));
    outcome_ = new pipeline::PipelineOutcome(pipeline::run_pipeline(f.context(), f.solver, *dir_, f.name));
  }
  static void TearDownTestSuite() {
    delete outcome_;
    delete dir_;
  }
  static fs::path* dir_;
  static pipeline::PipelineOutcome* outcome_;
};

fs::path* Artifacts::dir_ = nullptr;
pipeline::PipelineOutcome* Artifacts::outcome_ = nullptr;

TEST_F(Artifacts, ManifestListsEveryFile) {
  ASSERT_TRUE(outcome_->manifest.has_value());
  const auto& files = outcome_->manifest->files;
  for (const char* name : {kResultsFile, kSchedulesFile, kMigrationFile, kTraceFile, kSummaryFile}) {
    EXPECT_NE(std::find(files.begin(), files.end(), name), files.end()) << name;
    EXPECT_TRUE(fs::exists(*dir_ / name)) << name;
  }
  EXPECT_TRUE(fs::exists(*dir_ / kManifestFile));
}

TEST_F(Artifacts, RunRoundTrip) {
  const RunArtifacts back = load_run(*dir_);
  expect_json_close(to_json(back), to_json(outcome_->artifacts), 1e-12);
  EXPECT_EQ(back.scenario_name, "synthetic-s5-n2-t4-c0.8");
}

TEST_F(Artifacts, MigrationCsvHasUpperTriangleOnly) {
  std::ifstream in(*dir_ / kMigrationFile);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string t, i, j;
    std::getline(fields, t, ',');
    std::getline(fields, i, ',');
    std::getline(fields, j, ',');
    EXPECT_LT(std::stoi(i), std::stoi(j)) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 4);  // T * N (N - 1) / 2
}

TEST_F(Artifacts, SummaryMentionsEveryVpp) {
  const std::string s = format_summary(outcome_->artifacts);
  for (const std::string& id : outcome_->artifacts.vpp_ids) EXPECT_NE(s.find(id), std::string::npos);
}

TEST(Export, UnwritableDirectoryIsIoError) {
  RunArtifacts a;
  EXPECT_THROW(export_run(a, "/proc/vppmig/out"), IoError);
}

}  // namespace
}  // namespace vppmig::scenario
