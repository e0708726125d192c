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

// vppmig: command-line front end.
//
// Exit codes:
//   0  success
//   1  a validation property or allocation identity failed
//   2  parse, schema or usage error
//   3  infeasible parameters or solver failure
//   4  ADMM stopped at the iteration limit (artifacts are still written)
//   5  I/O failure

#include <vppmig/pipeline.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace vppmig;
namespace fs = std::filesystem;
using nlohmann::json;

enum ExitCode : int {
  kOk = 0,
  kPropertyFailure = 1,
  kUsage = 2,
  kSolver = 3,
  kIterationLimit = 4,
  kIo = 5,
};

struct SolverFlags {
  std::optional<double> beta;
  std::optional<double> gamma;
  std::optional<double> rho;
  std::optional<double> tol;
  std::optional<int> max_iters;

  void apply(scenario::SolverConfig& config) const {
    if (beta) config.beta = *beta;
    if (gamma) config.gamma = *gamma;
    if (rho) config.rho = *rho;
    if (tol) config.tolerance = *tol;
    if (max_iters) config.max_iterations = *max_iters;
  }
};

void add_beta(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--beta", f.beta, "Credibility confidence level, in [0.5, 1] (default 0.9)");
}
void add_gamma(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--gamma", f.gamma, "Operator fee share of cooperative savings (default 0.1)");
}
void add_admm(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--rho", f.rho, "ADMM penalty (default 1.0)");
  cmd->add_option("--tol", f.tol, "ADMM stopping tolerance (default 1e-4)");
  cmd->add_option("--max-iters", f.max_iters, "ADMM iteration limit (default 500)");
}

void check_config(const scenario::SolverConfig& c) {
  if (!(c.beta >= 0.5 && c.beta <= 1.0)) {
    throw InvalidArgument("--beta must lie in [0.5, 1]; the crisp equivalent is undefined below 0.5");
  }
  if (!(c.gamma >= 0.0 && c.gamma < 1.0)) throw InvalidArgument("--gamma must lie in [0, 1)");
  if (!(c.rho > 0.0)) throw InvalidArgument("--rho must be > 0");
  if (!(c.tolerance > 0.0)) throw InvalidArgument("--tol must be > 0");
  if (c.max_iterations < 1) throw InvalidArgument("--max-iters must be >= 1");
}

struct Loaded {
  scenario::ScenarioFile file;
  assemble::ProblemContext ctx;
};

Loaded load(const std::string& path, const SolverFlags& flags) {
  Loaded l{scenario::read_scenario(path), {}};
  flags.apply(l.file.solver);
  check_config(l.file.solver);
  l.ctx = l.file.context();
  return l;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::string fmt(double v, int precision = 2) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

int cmd_solve_independent(const std::string& path, const SolverFlags& flags, bool as_json) {
  const Loaded l = load(path, flags);
  const pipeline::IndependentSolution sol = pipeline::solve_independent(l.ctx);
  const double total = std::accumulate(sol.objectives.begin(), sol.objectives.end(), 0.0);
  if (as_json) {
    json rows = json::array();
    for (std::size_t i = 0; i < sol.objectives.size(); ++i) {
      rows.push_back({{"id", l.ctx.profiles[i].id},
                      {"cost", sol.objectives[i]},
                      {"distance", sol.dr[i].distance},
                      {"similarity", sol.dr[i].similarity},
                      {"incentive", sol.dr[i].incentive},
                      {"tracking_failed", sol.dr[i].tracking_failed()}});
    }
    std::cout << json{{"mode", "independent"}, {"vpps", rows}, {"total", total}}.dump(2) << "\n";
    return kOk;
  }
  std::cout << std::left << std::setw(12) << "VPP" << std::right << std::setw(14) << "cost" << std::setw(10)
            << "d" << std::setw(10) << "eps" << std::setw(12) << "incentive" << "\n";
  for (std::size_t i = 0; i < sol.objectives.size(); ++i) {
    std::cout << std::left << std::setw(12) << l.ctx.profiles[i].id << std::right << std::setw(14)
              << fmt(sol.objectives[i]) << std::setw(10) << fmt(sol.dr[i].distance, 4) << std::setw(10)
              << fmt(sol.dr[i].similarity, 4) << std::setw(12) << fmt(sol.dr[i].incentive) << "\n";
  }
  std::cout << std::left << std::setw(12) << "TOTAL" << std::right << std::setw(14) << fmt(total) << "\n";
  return kOk;
}

int cmd_solve_coop(const std::string& path, const SolverFlags& flags, bool centralized,
                   const std::optional<std::string>& out_dir, bool as_json) {
  const Loaded l = load(path, flags);
  if (centralized) {
    const pipeline::CentralizedSolution sol = pipeline::solve_centralized(l.ctx);
    if (as_json) {
      std::cout << json{{"mode", "centralized"},
                        {"objective", sol.objective},
                        {"distance", sol.aggregate_dr.distance},
                        {"similarity", sol.aggregate_dr.similarity},
                        {"incentive", sol.aggregate_dr.incentive}}
                       .dump(2)
                << "\n";
    } else {
      std::cout << "centralized objective " << fmt(sol.objective) << "  d " << fmt(sol.aggregate_dr.distance, 4)
                << "  eps " << fmt(sol.aggregate_dr.similarity, 4) << "  incentive "
                << fmt(sol.aggregate_dr.incentive) << "\n";
    }
    return kOk;
  }

  admm::AdmmSettings settings;
  settings.rho = l.file.solver.rho;
  settings.tolerance = l.file.solver.tolerance;
  settings.max_iterations = l.file.solver.max_iterations;
  const admm::AdmmResult r = admm::run(l.ctx, settings);
  if (out_dir) {
    ensure_dir(*out_dir);
    std::ostringstream trace;
    admm::write_trace_csv(trace, r.trace);
    write_text(fs::path(*out_dir) / scenario::kTraceFile, trace.str());
  }
  if (as_json) {
    json costs = json::array();
    for (const auto& c : r.local_costs) costs.push_back(c.total());
    std::cout << json{{"mode", "admm"},
                      {"status", admm::to_string(r.status)},
                      {"iterations", r.iterations},
                      {"objective", r.objective},
                      {"primal_recovered", r.primal_recovered},
                      {"operating_costs", costs},
                      {"distance", r.aggregate_dr.distance},
                      {"similarity", r.aggregate_dr.similarity},
                      {"incentive", r.aggregate_dr.incentive}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "admm " << admm::to_string(r.status) << " after " << r.iterations << " iterations\n"
              << "cooperative objective " << fmt(r.objective) << "  d " << fmt(r.aggregate_dr.distance, 4)
              << "  eps " << fmt(r.aggregate_dr.similarity, 4) << "  incentive " << fmt(r.aggregate_dr.incentive)
              << "\n";
  }
  return r.status == admm::AdmmStatus::converged ? kOk : kIterationLimit;
}

int cmd_allocate(const std::string& path, const SolverFlags& flags, const std::string& method, bool as_json) {
  const Loaded l = load(path, flags);
  const std::size_t n = l.ctx.n_vpps();
  program::ClarabelSolver solver;
  allocate::CountingCharacteristic c(
      [&](allocate::Coalition s) { return allocate::characteristic_cost(l.ctx, s, solver); });
  std::vector<std::string> ids;
  for (const auto& p : l.ctx.profiles) ids.push_back(p.id);

  if (method == "standard") {
    const std::vector<double> phi = allocate::standard_shapley(n, c);
    if (as_json) {
      std::cout << json{{"method", "standard"}, {"ids", ids}, {"shapley", phi}, {"evaluations", c.calls()}}.dump(2)
                << "\n";
    } else {
      for (std::size_t i = 0; i < n; ++i) std::cout << std::left << std::setw(12) << ids[i] << fmt(phi[i]) << "\n";
      std::cout << "characteristic evaluations: " << c.calls() << "\n";
    }
    return kOk;
  }

  const allocate::AllocationReport report = allocate::improved_allocation(n, c, l.file.solver.gamma);
  const auto failures = pipeline::allocation_identity_failures(report);
  if (as_json) {
    json doc = allocate::to_json(report);
    doc["method"] = "improved";
    doc["ids"] = ids;
    doc["evaluations"] = c.calls();
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << allocate::format_cost_table(report, ids);
    for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
    std::cout << "characteristic evaluations: " << c.calls() << "\n";
  }
  for (const auto& f : failures) std::cerr << "allocation identity failed: " << f << "\n";
  return failures.empty() ? kOk : kPropertyFailure;
}

int cmd_pipeline(const std::string& path, const SolverFlags& flags, const std::optional<std::string>& out_dir,
                 bool as_json) {
  const Loaded l = load(path, flags);
  std::optional<fs::path> out;
  if (out_dir) out = fs::path(*out_dir);
  const pipeline::PipelineOutcome o = pipeline::run_pipeline(l.ctx, l.file.solver, out, l.file.name);
  if (as_json) {
    std::cout << scenario::to_json(o.artifacts).dump(2) << "\n";
  } else {
    std::cout << scenario::format_summary(o.artifacts);
    if (o.manifest) std::cout << "artifacts written to " << o.manifest->directory.string() << "\n";
  }
  if (o.admm_status != admm::AdmmStatus::converged) {
    std::cerr << "ADMM stopped at the iteration limit (" << o.artifacts.admm_iterations << ")\n";
    return kIterationLimit;
  }
  return kOk;
}

int cmd_validate(const std::string& path, const SolverFlags& flags, std::uint64_t seed, bool as_json) {
  const Loaded l = load(path, flags);
  const auto results = pipeline::run_validation(l.ctx, l.file.solver, seed);
  bool all = true;
  json rows = json::array();
  for (const auto& r : results) {
    all = all && r.passed;
    if (as_json) {
      rows.push_back({{"property", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    } else {
      std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  " << r.detail << "\n";
    }
  }
  if (as_json) std::cout << json{{"properties", rows}, {"all_passed", all}}.dump(2) << "\n";
  return all ? kOk : kPropertyFailure;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      const auto v = static_cast<std::size_t>(std::stoul(text));
      return {v, v};
    }
    return {static_cast<std::size_t>(std::stoul(text.substr(0, colon))),
            static_cast<std::size_t>(std::stoul(text.substr(colon + 1)))};
  } catch (const std::exception&) {
    throw InvalidArgument("--n-range expects MIN:MAX, got '" + text + "'");
  }
}

int cmd_bench(const std::string& n_range, std::size_t horizon, int repeats, std::uint64_t seed,
              const std::optional<std::string>& out_file) {
  pipeline::BenchOptions opt;
  std::tie(opt.n_min, opt.n_max) = parse_range(n_range);
  if (opt.n_min < 2 || opt.n_max < opt.n_min || opt.n_max > 31) {
    throw InvalidArgument("--n-range must satisfy 2 <= MIN <= MAX <= 31");
  }
  if (horizon < 1) throw InvalidArgument("--t must be >= 1");
  if (repeats < 1) throw InvalidArgument("--repeats must be >= 1");
  opt.horizon = horizon;
  opt.repeats = repeats;
  opt.seed = seed;
  const auto rows = pipeline::run_bench(opt);
  std::ostringstream csv;
  pipeline::write_bench_csv(csv, rows);
  if (out_file) {
    write_text(*out_file, csv.str());
  } else {
    std::cout << csv.str();
  }
  return kOk;
}

int cmd_generate(std::uint64_t seed, std::size_t n, std::size_t horizon, double complementarity,
                 const std::string& out_file) {
  if (n < 1 || horizon < 1) throw InvalidArgument("--n and --t must be >= 1");
  if (!(complementarity >= 0.0 && complementarity <= 1.0)) {
    throw InvalidArgument("--complementarity must lie in [0, 1]");
  }
  scenario::write_scenario(scenario::generate_synthetic(seed, n, horizon, complementarity), out_file);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative dispatch of data-center virtual power plants"};
  app.require_subcommand(1, 1);

  std::string scenario_path;
  SolverFlags flags;
  bool as_json = false;
  std::optional<std::string> out_dir;

  auto* indep = app.add_subcommand("solve-independent", "Solve each VPP on its own");
  indep->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  add_beta(indep, flags);
  indep->add_flag("--json", as_json, "Machine-readable output");

  bool centralized = false;
  auto* coop = app.add_subcommand("solve-coop", "Solve the cooperative problem with ADMM");
  coop->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  add_beta(coop, flags);
  add_admm(coop, flags);
  coop->add_flag("--centralized", centralized, "Solve the monolithic program instead of running ADMM");
  coop->add_option("--out", out_dir, "Directory for trace.csv");
  coop->add_flag("--json", as_json, "Machine-readable output");

  std::string method = "improved";
  auto* alloc = app.add_subcommand("allocate", "Allocate cooperative costs");
  alloc->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  add_beta(alloc, flags);
  add_gamma(alloc, flags);
  alloc->add_option("--method", method, "improved (N+1 solves) or standard (2^N-1 solves)")
      ->check(CLI::IsMember({"improved", "standard"}));
  alloc->add_flag("--json", as_json, "Machine-readable output");

  auto* pipe = app.add_subcommand("pipeline", "Independent solves, ADMM, allocation and export");
  pipe->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  add_beta(pipe, flags);
  add_gamma(pipe, flags);
  add_admm(pipe, flags);
  pipe->add_option("--out", out_dir, "Artifact directory");
  pipe->add_flag("--json", as_json, "Print the results document instead of the summary");

  std::uint64_t seed = 7;
  auto* val = app.add_subcommand("validate", "Run the invariant suite");
  val->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  add_beta(val, flags);
  add_gamma(val, flags);
  add_admm(val, flags);
  val->add_option("--seed", seed, "Seed for random checks and the reduced instance");
  val->add_flag("--json", as_json, "Machine-readable output");

  std::string n_range = "2:5";
  std::size_t horizon = 12;
  int repeats = 1;
  std::uint64_t bench_seed = 11;
  std::optional<std::string> bench_out;
  auto* bench = app.add_subcommand("bench", "Wall-time scaling in the number of VPPs (CSV)");
  bench->add_option("--n-range", n_range, "MIN:MAX number of VPPs")->capture_default_str();
  bench->add_option("--t", horizon, "Slots per instance")->capture_default_str();
  bench->add_option("--repeats", repeats, "Timed repetitions per N")->capture_default_str();
  bench->add_option("--seed", bench_seed, "Synthetic scenario seed")->capture_default_str();
  bench->add_option("--out", bench_out, "CSV file (default stdout)");

  std::uint64_t gen_seed = 7;
  std::size_t gen_n = 4;
  std::size_t gen_t = 24;
  double complementarity = 0.8;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "Write a synthetic scenario");
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--n", gen_n, "Number of VPPs")->capture_default_str();
  gen->add_option("--t", gen_t, "Number of slots")->capture_default_str();
  gen->add_option("--complementarity", complementarity, "Diversity of VPP profiles in [0, 1]")
      ->capture_default_str();
  gen->add_option("--out", gen_out, "Output JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*indep) return cmd_solve_independent(scenario_path, flags, as_json);
    if (*coop) return cmd_solve_coop(scenario_path, flags, centralized, out_dir, as_json);
    if (*alloc) return cmd_allocate(scenario_path, flags, method, as_json);
    if (*pipe) return cmd_pipeline(scenario_path, flags, out_dir, as_json);
    if (*val) return cmd_validate(scenario_path, flags, seed, as_json);
    if (*bench) return cmd_bench(n_range, horizon, repeats, bench_seed, bench_out);
    if (*gen) return cmd_generate(gen_seed, gen_n, gen_t, complementarity, gen_out);
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InfeasibleParameters& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kSolver;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPropertyFailure;
  } catch (const std::exception& e) {
    std::cerr << "unexpected failure: " << e.what() << "\n";
    return kSolver;
  }
  return kUsage;
}
