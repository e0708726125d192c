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

#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace vppmig::scenario {

using nlohmann::json;

namespace {

json schedule_json(const model::ScheduleDecision& s) {
  return {{"servers", s.servers},     {"grid_buy", s.grid_buy}, {"charge", s.charge},
          {"discharge", s.discharge}, {"batch", s.batch},       {"soc", s.soc},
          {"qos_aux", s.qos_aux},     {"utilization", s.utilization}};
}

model::ScheduleDecision schedule_from(const json& j) {
  model::ScheduleDecision s;
  j.at("servers").get_to(s.servers);
  j.at("grid_buy").get_to(s.grid_buy);
  j.at("charge").get_to(s.charge);
  j.at("discharge").get_to(s.discharge);
  j.at("batch").get_to(s.batch);
  j.at("soc").get_to(s.soc);
  j.at("qos_aux").get_to(s.qos_aux);
  j.at("utilization").get_to(s.utilization);
  return s;
}

json dr_json(const model::DrMetrics& m) {
  return {{"load_shape", m.load_shape}, {"distance", m.distance}, {"similarity", m.similarity}, {"incentive", m.incentive}};
}

model::DrMetrics dr_from(const json& j) {
  model::DrMetrics m;
  j.at("load_shape").get_to(m.load_shape);
  j.at("distance").get_to(m.distance);
  j.at("similarity").get_to(m.similarity);
  j.at("incentive").get_to(m.incentive);
  return m;
}

json mode_json(const ModeResult& m) {
  json schedules = json::array();
  for (const auto& s : m.schedules) schedules.push_back(schedule_json(s));
  json dr = json::array();
  for (const auto& d : m.dr) dr.push_back(dr_json(d));
  return {{"schedules", schedules}, {"dr", dr}, {"costs", m.costs}, {"objective", m.objective}};
}

ModeResult mode_from(const json& j) {
  ModeResult m;
  for (const json& s : j.at("schedules")) m.schedules.push_back(schedule_from(s));
  for (const json& d : j.at("dr")) m.dr.push_back(dr_from(d));
  j.at("costs").get_to(m.costs);
  j.at("objective").get_to(m.objective);
  return m;
}

json tensor_json(const model::MigrationTensor& t) {
  return {{"horizon", t.horizon()},
          {"n_vpps", t.n_vpps()},
          {"workload", std::vector<double>(t.workload_data().begin(), t.workload_data().end())},
          {"energy", std::vector<double>(t.energy_data().begin(), t.energy_data().end())}};
}

model::MigrationTensor tensor_from(const json& j) {
  const auto T = j.at("horizon").get<std::size_t>();
  const auto n = j.at("n_vpps").get<std::size_t>();
  const auto wl = j.at("workload").get<std::vector<double>>();
  const auto en = j.at("energy").get<std::vector<double>>();
  if (wl.size() != T * n * n || en.size() != T * n * n) throw SchemaError("/migration", "tensor size mismatch");
  model::MigrationTensor out(T, n);
  std::size_t k = 0;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t jj = 0; jj < n; ++jj, ++k) {
        out.workload(t, i, jj) = wl[k];
        out.energy(t, i, jj) = en[k];
      }
    }
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string schedules_csv(const RunArtifacts& a) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "mode,vpp,slot,servers,grid_buy,charge,discharge,batch,soc,qos_aux,utilization\n";
  auto emit = [&](const char* mode, const ModeResult& m) {
    for (std::size_t i = 0; i < m.schedules.size(); ++i) {
      const auto& s = m.schedules[i];
      const std::string id = i < a.vpp_ids.size() ? a.vpp_ids[i] : std::to_string(i);
      for (std::size_t t = 0; t < s.servers.size(); ++t) {
        os << mode << ',' << id << ',' << t << ',' << s.servers[t] << ',' << s.grid_buy[t] << ',' << s.charge[t]
           << ',' << s.discharge[t] << ',' << s.batch[t] << ',' << s.soc[t] << ',' << s.qos_aux[t] << ','
           << s.utilization[t] << '\n';
      }
    }
  };
  emit("independent", a.independent);
  emit("cooperative", a.cooperative);
  return os.str();
}

std::string migration_csv(const RunArtifacts& a) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "slot,from,to,workload,energy\n";
  const model::MigrationTensor& m = a.migration;
  for (std::size_t t = 0; t < m.horizon(); ++t) {
    for (std::size_t i = 0; i < m.n_vpps(); ++i) {
      for (std::size_t j = i + 1; j < m.n_vpps(); ++j) {
        os << t << ',' << i << ',' << j << ',' << m.workload(t, i, j) << ',' << m.energy(t, i, j) << '\n';
      }
    }
  }
  return os.str();
}

}  // namespace

json to_json(const RunArtifacts& a) {
  json trace = json::array();
  for (const admm::TraceRow& r : a.trace) {
    trace.push_back({{"iteration", r.iteration},
                     {"objective", r.objective},
                     {"primal_residual", r.primal_residual},
                     {"dual_residual", r.dual_residual},
                     {"wall_seconds", r.wall_seconds}});
  }
  return {{"schema", kResultsSchema},
          {"scenario_name", a.scenario_name},
          {"settings",
           {{"beta", a.settings.beta},
            {"gamma", a.settings.gamma},
            {"rho", a.settings.rho},
            {"tolerance", a.settings.tolerance},
            {"max_iterations", a.settings.max_iterations}}},
          {"vpp_ids", a.vpp_ids},
          {"independent", mode_json(a.independent)},
          {"cooperative", mode_json(a.cooperative)},
          {"migration", tensor_json(a.migration)},
          {"allocation", allocate::to_json(a.allocation)},
          {"trace", trace},
          {"admm_status", a.admm_status},
          {"admm_iterations", a.admm_iterations}};
}

RunArtifacts run_from_json(const json& doc) {
  try {
    if (doc.at("schema").get<std::string>() != kResultsSchema) {
      throw SchemaError("/schema", "unsupported results schema");
    }
    RunArtifacts a;
    doc.at("scenario_name").get_to(a.scenario_name);
    const json& s = doc.at("settings");
    s.at("beta").get_to(a.settings.beta);
    s.at("gamma").get_to(a.settings.gamma);
    s.at("rho").get_to(a.settings.rho);
    s.at("tolerance").get_to(a.settings.tolerance);
    s.at("max_iterations").get_to(a.settings.max_iterations);
    doc.at("vpp_ids").get_to(a.vpp_ids);
    a.independent = mode_from(doc.at("independent"));
    a.cooperative = mode_from(doc.at("cooperative"));
    a.migration = tensor_from(doc.at("migration"));
    a.allocation = allocate::allocation_from_json(doc.at("allocation"));
    for (const json& r : doc.at("trace")) {
      a.trace.push_back({r.at("iteration").get<int>(), r.at("objective").get<double>(),
                         r.at("primal_residual").get<double>(), r.at("dual_residual").get<double>(),
                         r.at("wall_seconds").get<double>()});
    }
    doc.at("admm_status").get_to(a.admm_status);
    doc.at("admm_iterations").get_to(a.admm_iterations);
    return a;
  } catch (const json::exception& e) {
    throw SchemaError("/", e.what());
  }
}

Manifest export_run(const RunArtifacts& a, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  Manifest m;
  m.directory = dir;
  write_file(dir / kResultsFile, to_json(a).dump(1) + "\n");
  write_file(dir / kSchedulesFile, schedules_csv(a));
  write_file(dir / kMigrationFile, migration_csv(a));
  std::ostringstream trace;
  admm::write_trace_csv(trace, a.trace);
  write_file(dir / kTraceFile, trace.str());
  write_file(dir / kSummaryFile, format_summary(a));
  m.files = {kResultsFile, kSchedulesFile, kMigrationFile, kTraceFile, kSummaryFile};
  const json manifest = {{"schema", kResultsSchema}, {"files", m.files}};
  write_file(dir / kManifestFile, manifest.dump(2) + "\n");
  return m;
}

RunArtifacts load_run(const std::filesystem::path& dir) {
  std::ifstream in(dir / kResultsFile);
  if (!in) throw IoError("cannot open " + (dir / kResultsFile).string());
  try {
    return run_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw SchemaError("/", e.what());
  }
}

std::string format_summary(const RunArtifacts& a) {
  std::ostringstream os;
  os << "Scenario: " << a.scenario_name << "\n";
  os << "ADMM: " << a.admm_status << " after " << a.admm_iterations << " iterations\n\n";
  os << std::fixed;
  os << "Demand response\n";
  os << std::left << std::setw(26) << "Mode" << std::right << std::setw(12) << "d" << std::setw(12) << "epsilon"
     << std::setw(14) << "incentive" << '\n';
  for (std::size_t i = 0; i < a.independent.dr.size(); ++i) {
    const auto& d = a.independent.dr[i];
    const std::string label = "Independent " + (i < a.vpp_ids.size() ? a.vpp_ids[i] : std::to_string(i));
    os << std::left << std::setw(26) << label << std::right << std::setprecision(4) << std::setw(12) << d.distance
       << std::setw(12) << d.similarity << std::setprecision(2) << std::setw(14) << d.incentive
       << (d.tracking_failed() ? "  (tracking failed)" : "") << '\n';
  }
  for (const auto& d : a.cooperative.dr) {
    os << std::left << std::setw(26) << "Cooperative (aggregate)" << std::right << std::setprecision(4)
       << std::setw(12) << d.distance << std::setw(12) << d.similarity << std::setprecision(2) << std::setw(14)
       << d.incentive << (d.tracking_failed() ? "  (tracking failed)" : "") << '\n';
  }
  os << "\nOperation costs\n";
  os << allocate::format_cost_table(a.allocation, a.vpp_ids);
  const double independent = std::accumulate(a.allocation.standalone_costs.begin(),
                                             a.allocation.standalone_costs.end(), 0.0);
  if (independent != 0.0) {
    os << std::setprecision(3) << "Savings: " << 100.0 * a.allocation.total_savings / independent << " %\n";
  }
  return os.str();
}

}  // namespace vppmig::scenario
