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
#include <vppmig/model.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "toys.hpp"

namespace vppmig::model {
namespace {

ServerFleetParams fleet() {
  ServerFleetParams f;
  f.e_idle = 0.1;
  f.e_peak = 0.3;
  f.pue = 1.5;
  f.service_rate = 10.0;
  f.s_max = 50;
  f.delay_cost = 2.0;
  return f;
}

TEST(DcPower, HandComputed) {
  // 20 servers at half utilization: 20 (0.1 + 0.2 * 0.5 + 0.5 * 0.3) = 7, plus batch 1.
  EXPECT_NEAR(dc_power(fleet(), 20.0, 100.0, 1.0), 8.0, 1e-12);
  // Equivalent split used by the programs: s * static + k * load + batch.
  EXPECT_NEAR(dc_power(fleet(), 20.0, 100.0, 1.0), testing::fleet_power(fleet(), 20.0, 100.0) + 1.0, 1e-12);
}

TEST(DcPower, RejectsOverloadAndNoServers) {
  EXPECT_THROW(dc_power(fleet(), 2.0, 30.0, 0.0), InvalidArgument);
  EXPECT_THROW(dc_power(fleet(), 0.0, 0.0, 0.0), InvalidArgument);
}

TEST(Qos, LinearAndSquaredForms) {
  const std::vector<double> s{12.0, 20.0};
  const std::vector<double> load{100.0, 150.0};
  // kappa load / slack: 2*100/20 + 2*150/50.
  EXPECT_NEAR(qos_cost(fleet(), s, load), 10.0 + 6.0, 1e-12);
  EXPECT_NEAR(qos_cost_squared(fleet(), s, load), 200.0 / 400.0 + 300.0 / 2500.0, 1e-12);
}

TEST(Qos, SaturatedSlotThrowsNamingTheSlot) {
  const std::vector<double> s{12.0, 10.0};
  const std::vector<double> load{100.0, 100.0};
  try {
    qos_cost(fleet(), s, load);
    FAIL() << "expected a throw";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("slot 1"), std::string::npos);
  }
}

TEST(Bess, StepMatchesRecursion) {
  BessParams b;
  b.capacity = 100.0;
  b.eff_ch = 0.9;
  b.eff_dis = 0.8;
  b.self_discharge = 0.01;
  b.soc_min = 0.1;
  b.soc_max = 0.9;
  b.soc_init = 0.5;
  EXPECT_NEAR(bess_step(b, 0.5, 10.0, 0.0), 0.99 * 0.5 + 0.09, 1e-15);
  EXPECT_NEAR(bess_step(b, 0.5, 0.0, 8.0), 0.99 * 0.5 - 0.1, 1e-15);
}

TEST(DrMetrics, PerfectTrackingAndSimilarity) {
  const std::vector<double> cdl{0.25, 0.25, 0.5};
  const std::vector<double> buy{25.0, 25.0, 50.0};
  const DrMetrics m = dr_metrics(buy, 100.0, cdl, 0.02);
  EXPECT_NEAR(m.distance, 0.0, 1e-15);
  EXPECT_NEAR(m.similarity, 1.0, 1e-15);
  EXPECT_NEAR(m.incentive, 2.0, 1e-12);
  EXPECT_FALSE(m.tracking_failed());
}

TEST(DrMetrics, SimilarityIsNotClamped) {
  const std::vector<double> cdl{1.0, 0.0};
  const std::vector<double> buy{0.0, 300.0};
  const DrMetrics m = dr_metrics(buy, 100.0, cdl, 0.02);
  EXPECT_NEAR(m.distance, std::sqrt(1.0 + 9.0), 1e-12);
  EXPECT_LT(m.similarity, 0.0);
  EXPECT_TRUE(m.tracking_failed());
  EXPECT_LT(m.incentive, 0.0);
}

TEST(Migration, AntisymmetryAndNetFlows) {
  MigrationTensor m(2, 3);
  m.workload(0, 0, 1) = 5.0;
  m.workload(0, 1, 0) = -5.0;
  m.energy(1, 2, 0) = 2.0;
  m.energy(1, 0, 2) = -2.0;
  EXPECT_DOUBLE_EQ(m.antisymmetry_violation(), 0.0);
  EXPECT_DOUBLE_EQ(m.net_workload_out(0, 0), 5.0);
  EXPECT_DOUBLE_EQ(m.net_energy_out(1, 0), -2.0);
  m.workload(0, 1, 0) = -4.0;
  EXPECT_DOUBLE_EQ(m.antisymmetry_violation(), 1.0);
  EXPECT_DOUBLE_EQ(m.cap_violation(3.0, 10.0), 2.0);
}

TEST(Migration, SenderPaysOncePerTransfer) {
  NetworkConfig net = testing::plain_network(2, 1);
  net.distance = {{0.0, 2048.0}, {2048.0, 0.0}};
  net.w_workload = 1e-3;
  net.w_energy = 1e-2;
  MigrationTensor m(1, 2);
  m.workload(0, 0, 1) = 10.0;
  m.workload(0, 1, 0) = -10.0;
  m.energy(0, 1, 0) = 3.0;
  m.energy(0, 0, 1) = -3.0;
  EXPECT_NEAR(migration_cost(net, m, 0), 1e-3 * 2048.0 * 10.0, 1e-9);
  EXPECT_NEAR(migration_cost(net, m, 1), 1e-2 * 2048.0 * 3.0, 1e-9);
}

TEST(Validation, MessagesNameFieldAndSlot) {
  VppProfile p = testing::plain_profile(3, 100.0, 0.1);
  p.id = "north";
  p.workload_fuzzy[2] = {5.0, 4.0, 6.0};
  try {
    p.validate(3);
    FAIL() << "expected a throw";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("north.workload_fuzzy[2]"), std::string::npos) << e.what();
  }
  VppProfile q = testing::plain_profile(3, 100.0, 0.1);
  EXPECT_THROW(q.validate(4), InvalidArgument);
}

TEST(Validation, NetworkRejectsAsymmetryAndBadCdl) {
  NetworkConfig net = testing::plain_network(3, 2);
  net.distance[0][2] = 7.0;
  try {
    net.validate();
    FAIL() << "expected a throw";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("(0,2)"), std::string::npos) << e.what();
  }
  NetworkConfig net2 = testing::plain_network(2, 2);
  net2.cdl = {0.7, 0.7};
  EXPECT_THROW(net2.validate(), InvalidArgument);
  NetworkConfig net3 = testing::plain_network(2, 2);
  net3.beta = 0.3;
  EXPECT_THROW(net3.validate(), InvalidArgument);
}

TEST(Validation, FleetAndBessRanges) {
  ServerFleetParams f = fleet();
  f.pue = 0.9;
  EXPECT_THROW(f.validate(), InvalidArgument);
  BessParams b;
  b.soc_min = 0.6;
  b.soc_init = 0.5;
  EXPECT_THROW(b.validate(), InvalidArgument);
}

}  // namespace
}  // namespace vppmig::model
