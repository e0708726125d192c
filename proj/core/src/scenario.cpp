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


#include <vppmig/scenario.hpp>

#include <vppmig/errors.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace vppmig::scenario {

using nlohmann::json;

namespace {

const json kUnits = {{"energy", "kWh"},     {"power", "kW"},   {"workload", "requests/slot"},
                     {"distance", "km"},    {"currency", "USD"}, {"slot", "1h"}};

// Typed field access that reports JSON-pointer-like paths.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw SchemaError(path_, "expected an object");
  }

  bool has(const char* key) const { return node_.contains(key) && !node_.at(key).is_null(); }

  const json& at(const char* key) const {
    if (!node_.contains(key)) throw SchemaError(path_ + "/" + key, "missing required field");
    return node_.at(key);
  }

  std::string child(const char* key) const { return path_ + "/" + key; }

  double number(const char* key) const {
    const json& v = at(key);
    if (!v.is_number()) throw SchemaError(child(key), "expected a number");
    return v.get<double>();
  }
  double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

  int integer(const char* key) const {
    const json& v = at(key);
    if (!v.is_number_integer()) throw SchemaError(child(key), "expected an integer");
    return v.get<int>();
  }
  int integer(const char* key, int fallback) const { return has(key) ? integer(key) : fallback; }

  std::string string(const char* key) const {
    const json& v = at(key);
    if (!v.is_string()) throw SchemaError(child(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char* key) const {
    const json& v = at(key);
    if (!v.is_array()) throw SchemaError(child(key), "expected an array");
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!v[k].is_number()) throw SchemaError(child(key) + "/" + std::to_string(k), "expected a number");
      out.push_back(v[k].get<double>());
    }
    return out;
  }

  std::vector<fuzzy::FuzzyTriple> triples(const char* key) const {
    const json& v = at(key);
    if (!v.is_array()) throw SchemaError(child(key), "expected an array of [a, b, c]");
    std::vector<fuzzy::FuzzyTriple> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const std::string p = child(key) + "/" + std::to_string(k);
      const json& e = v[k];
      if (!e.is_array() || e.size() != 3 || !e[0].is_number() || !e[1].is_number() || !e[2].is_number()) {
        throw SchemaError(p, "expected [a, b, c]");
      }
      fuzzy::FuzzyTriple t{e[0].get<double>(), e[1].get<double>(), e[2].get<double>()};
      if (!t.is_valid()) throw SchemaError(p, "triple must satisfy a <= b <= c");
      out.push_back(t);
    }
    return out;
  }

 private:
  const json& node_;
  std::string path_;
};

json triples_json(const std::vector<fuzzy::FuzzyTriple>& v) {
  json out = json::array();
  for (const auto& t : v) out.push_back({t.a, t.b, t.c});
  return out;
}

template <typename F>
void rethrow_as_schema(const std::string& path, F&& body) {
  try {
    body();
  } catch (const InvalidArgument& e) {
    throw SchemaError(path, e.what());
  }
}

}  // namespace

assemble::ProblemContext ScenarioFile::context() const {
  assemble::ProblemContext ctx;
  ctx.network = network;
  ctx.network.beta = solver.beta;
  ctx.network.gamma = solver.gamma;
  ctx.profiles = vpps;
  return ctx;
}

ScenarioFile parse_scenario(const json& doc) {
  const Reader root(doc, "");
  if (root.string("schema") != kScenarioSchema) {
    throw SchemaError("/schema", "unsupported schema '" + root.string("schema") + "'");
  }
  const json& units = root.at("units");
  if (!units.is_object()) throw SchemaError("/units", "expected an object");
  for (const auto& [key, expected] : kUnits.items()) {
    if (!units.contains(key)) throw SchemaError("/units/" + key, "missing unit declaration");
    if (units.at(key) != expected) {
      throw SchemaError("/units/" + key, "expected '" + expected.get<std::string>() + "', got " + units.at(key).dump());
    }
  }

  ScenarioFile f;
  f.name = root.has("name") ? root.string("name") : std::string("scenario");

  const Reader net(root.at("network"), "/network");
  f.network.cdl = net.numbers("cdl");
  f.network.horizon = f.network.cdl.size();
  f.network.w_workload = net.number("w_workload");
  f.network.w_energy = net.number("w_energy");
  f.network.lambda_cap = net.number("lambda_cap");
  f.network.power_cap = net.number("power_cap");
  f.network.dr_price = net.number("dr_price");
  const json& dist = net.at("distance");
  if (!dist.is_array()) throw SchemaError("/network/distance", "expected a matrix");
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const json& row = dist[i];
    const std::string p = "/network/distance/" + std::to_string(i);
    if (!row.is_array()) throw SchemaError(p, "expected an array");
    std::vector<double> r;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!row[j].is_number()) throw SchemaError(p + "/" + std::to_string(j), "expected a number");
      r.push_back(row[j].get<double>());
    }
    f.network.distance.push_back(std::move(r));
  }

  const json& vpps = root.at("vpps");
  if (!vpps.is_array()) throw SchemaError("/vpps", "expected an array");
  if (vpps.empty()) throw SchemaError("/vpps", "at least one VPP is required");
  f.network.n_vpps = vpps.size();
  for (std::size_t i = 0; i < vpps.size(); ++i) {
    const std::string p = "/vpps/" + std::to_string(i);
    const Reader v(vpps[i], p);
    model::VppProfile prof;
    prof.id = v.has("id") ? v.string("id") : "VPP" + std::to_string(i + 1);
    prof.price_buy = v.numbers("price_buy");
    prof.pv_unit_cost = v.number("pv_unit_cost");
    prof.pv_fuzzy = v.triples("pv_fuzzy");
    prof.workload_fuzzy = v.triples("workload_fuzzy");
    prof.batch_energy_total = v.number("batch_energy_total");
    prof.declared_capacity = v.number("declared_capacity");
    prof.batch_slot_cap = v.number("batch_slot_cap", -1.0);
    const Reader fl(v.at("fleet"), p + "/fleet");
    prof.fleet.e_idle = fl.number("e_idle");
    prof.fleet.e_peak = fl.number("e_peak");
    prof.fleet.pue = fl.number("pue");
    prof.fleet.service_rate = fl.number("service_rate");
    prof.fleet.s_max = fl.integer("s_max");
    prof.fleet.delay_cost = fl.number("delay_cost");
    const Reader b(v.at("bess"), p + "/bess");
    prof.bess.capacity = b.number("capacity");
    prof.bess.eff_ch = b.number("eff_ch");
    prof.bess.eff_dis = b.number("eff_dis");
    prof.bess.self_discharge = b.number("self_discharge");
    prof.bess.degr_cost = b.number("degr_cost");
    prof.bess.soc_min = b.number("soc_min");
    prof.bess.soc_max = b.number("soc_max");
    prof.bess.q_ch_max = b.number("q_ch_max");
    prof.bess.q_dis_max = b.number("q_dis_max");
    prof.bess.soc_init = b.number("soc_init", 0.5);
    rethrow_as_schema(p, [&] { prof.validate(f.network.horizon); });
    f.vpps.push_back(std::move(prof));
  }

  if (root.has("solver")) {
    const Reader s(root.at("solver"), "/solver");
    f.solver.beta = s.number("beta", f.solver.beta);
    f.solver.gamma = s.number("gamma", f.solver.gamma);
    f.solver.rho = s.number("rho", f.solver.rho);
    f.solver.tolerance = s.number("tolerance", f.solver.tolerance);
    f.solver.max_iterations = s.integer("max_iterations", f.solver.max_iterations);
  }
  f.network.beta = f.solver.beta;
  f.network.gamma = f.solver.gamma;
  rethrow_as_schema("/network", [&] { f.network.validate(); });
  if (!(f.solver.rho > 0.0)) throw SchemaError("/solver/rho", "must be > 0");
  if (!(f.solver.tolerance > 0.0)) throw SchemaError("/solver/tolerance", "must be > 0");
  if (f.solver.max_iterations < 1) throw SchemaError("/solver/max_iterations", "must be >= 1");
  return f;
}

json to_json(const ScenarioFile& f) {
  json vpps = json::array();
  for (const model::VppProfile& p : f.vpps) {
    json v = {{"id", p.id},
              {"price_buy", p.price_buy},
              {"pv_unit_cost", p.pv_unit_cost},
              {"pv_fuzzy", triples_json(p.pv_fuzzy)},
              {"workload_fuzzy", triples_json(p.workload_fuzzy)},
              {"batch_energy_total", p.batch_energy_total},
              {"declared_capacity", p.declared_capacity},
              {"fleet",
               {{"e_idle", p.fleet.e_idle},
                {"e_peak", p.fleet.e_peak},
                {"pue", p.fleet.pue},
                {"service_rate", p.fleet.service_rate},
                {"s_max", p.fleet.s_max},
                {"delay_cost", p.fleet.delay_cost}}},
              {"bess",
               {{"capacity", p.bess.capacity},
                {"eff_ch", p.bess.eff_ch},
                {"eff_dis", p.bess.eff_dis},
                {"self_discharge", p.bess.self_discharge},
                {"degr_cost", p.bess.degr_cost},
                {"soc_min", p.bess.soc_min},
                {"soc_max", p.bess.soc_max},
                {"q_ch_max", p.bess.q_ch_max},
                {"q_dis_max", p.bess.q_dis_max},
                {"soc_init", p.bess.soc_init}}}};
    if (p.batch_slot_cap >= 0.0) v["batch_slot_cap"] = p.batch_slot_cap;
    vpps.push_back(std::move(v));
  }
  return {{"schema", kScenarioSchema},
          {"name", f.name},
          {"units", kUnits},
          {"network",
           {{"distance", f.network.distance},
            {"w_workload", f.network.w_workload},
            {"w_energy", f.network.w_energy},
            {"lambda_cap", f.network.lambda_cap},
            {"power_cap", f.network.power_cap},
            {"dr_price", f.network.dr_price},
            {"cdl", f.network.cdl}}},
          {"vpps", vpps},
          {"solver",
           {{"beta", f.solver.beta},
            {"gamma", f.solver.gamma},
            {"rho", f.solver.rho},
            {"tolerance", f.solver.tolerance},
            {"max_iterations", f.solver.max_iterations}}}};
}

ScenarioFile read_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

void write_scenario(const ScenarioFile& file, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scenario file " + path.string());
  out << to_json(file).dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

assemble::ProblemContext load_scenario(const std::filesystem::path& path) {
  return read_scenario(path).context();
}

std::vector<std::vector<double>> us_datacenter_distances() {
  return {{0, 2048, 2540, 1764}, {2048, 0, 4515, 423}, {2540, 4515, 0, 4232}, {1764, 423, 4232, 0}};
}

namespace {

// Portable uniform draw in [0, 1) from the raw engine output.
double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double smooth_cycle(double hour, double peak_hour) {
  return std::cos(2.0 * std::numbers::pi * (hour - peak_hour) / 24.0);
}

double round_to(double v, double step) { return std::round(v / step) * step; }

}  // namespace

ScenarioFile generate_synthetic(std::uint64_t seed, std::size_t n, std::size_t horizon, double complementarity) {
  if (n < 1) throw InvalidArgument("synthetic scenario needs at least one VPP");
  if (horizon < 1) throw InvalidArgument("synthetic scenario needs at least one slot");
  if (!(complementarity >= 0.0 && complementarity <= 1.0)) {
    throw InvalidArgument("complementarity must lie in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  const double c = complementarity;
  const std::size_t T = horizon;
  auto hour_of = [T](std::size_t t) { return (static_cast<double>(t) + 0.5) * 24.0 / static_cast<double>(T); };

  // Draws shared by every VPP, then per-VPP deviations scaled by c.
  std::vector<double> common_noise(T);
  for (double& v : common_noise) v = u01(rng) - 0.5;
  struct Deviation {
    double load, pv, price, pue, noise_seed;
  };
  std::vector<Deviation> dev(n);
  for (Deviation& d : dev) d = {2.0 * u01(rng) - 1.0, 2.0 * u01(rng) - 1.0, 2.0 * u01(rng) - 1.0, u01(rng), u01(rng)};

  ScenarioFile f;
  std::ostringstream name;
  name << "synthetic-s" << seed << "-n" << n << "-t" << T << "-c" << c;
  f.name = name.str();
  f.network.n_vpps = n;
  f.network.horizon = T;
  f.network.w_workload = 2e-7;
  f.network.w_energy = 2e-5;
  f.network.lambda_cap = 300.0;
  f.network.power_cap = 10.0;
  f.network.dr_price = 0.02;

  if (n == 4) {
    f.network.distance = us_datacenter_distances();
  } else {
    std::vector<std::pair<double, double>> sites(n);
    for (auto& s : sites) s = {4500.0 * u01(rng), 4500.0 * u01(rng)};
    f.network.distance.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = std::round(std::hypot(sites[i].first - sites[j].first, sites[i].second - sites[j].second));
        f.network.distance[i][j] = f.network.distance[j][i] = std::max(d, 1.0);
      }
    }
  }

  std::vector<double> cdl(T);
  double cdl_sum = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    cdl[t] = 1.0 + 0.3 * smooth_cycle(hour_of(t), 14.0);
    cdl_sum += cdl[t];
  }
  for (double& v : cdl) v /= cdl_sum;
  f.network.cdl = cdl;

  const double day_fraction = static_cast<double>(T) / 24.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Deviation& d = dev[i];
    const double phase = c * 12.0 * static_cast<double>(i) / static_cast<double>(n);
    model::VppProfile p;
    p.id = "VPP" + std::to_string(i + 1);
    p.fleet = {0.15, 0.3, 1.5 + 0.1 * c * d.pue, 10.0, 1, 5.0};
    p.bess = {100.0, 0.95, 0.95, 0.001, 0.01, 0.1, 0.9, 25.0, 25.0, 0.5};
    p.pv_unit_cost = 0.02;
    p.batch_energy_total = round_to(300.0 * day_fraction * (1.0 + 0.2 * c * d.load), 1e-3);

    const double load_base = 2000.0 * (1.0 + 0.25 * c * d.load);
    const double pv_peak = 40.0 * (1.0 + 0.25 * c * d.pv);
    double peak_load = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const double h = hour_of(t);
      const double b_load = round_to(load_base * (1.0 + 0.3 * smooth_cycle(h, 15.0 + phase)) *
                                         (1.0 + 0.04 * common_noise[t]),
                                     1e-3);
      p.workload_fuzzy.push_back({round_to(0.9 * b_load, 1e-3), b_load, round_to(1.1 * b_load, 1e-3)});
      peak_load = std::max(peak_load, p.workload_fuzzy.back().c);

      const double sun = std::max(0.0, std::cos(std::numbers::pi * (h - 12.0 - phase) / 12.0));
      const double b_pv = round_to(pv_peak * sun * sun, 1e-3);
      p.pv_fuzzy.push_back({round_to(0.8 * b_pv, 1e-3), b_pv, round_to(1.2 * b_pv, 1e-3)});

      const double price = 0.12 + 0.05 * smooth_cycle(h, 17.0 + phase) + 0.01 * common_noise[t] +
                           0.01 * c * d.price;
      p.price_buy.push_back(round_to(std::clamp(price, 0.05, 0.2), 1e-5));
    }
    p.fleet.s_max = static_cast<int>(std::ceil(1.3 * peak_load / p.fleet.service_rate));

    // Declared capacity: energy to serve the worst-case workload at minimal
    // server counts with the lowest PV forecast, plus a small margin.
    double need = 0.0;
    const double batch_avg = p.batch_energy_total / static_cast<double>(T);
    for (std::size_t t = 0; t < T; ++t) {
      const double load = p.workload_fuzzy[t].c;
      const double demand = p.fleet.static_power() * load / p.fleet.service_rate +
                            p.fleet.energy_per_request() * load + batch_avg;
      need += std::max(0.0, demand - p.pv_fuzzy[t].a);
    }
    p.declared_capacity = round_to(1.02 * need, 1e-3);
    f.vpps.push_back(std::move(p));
  }
  f.network.beta = f.solver.beta;
  f.network.gamma = f.solver.gamma;
  return f;
}

}  // namespace vppmig::scenario
