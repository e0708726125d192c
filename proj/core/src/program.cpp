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


#include <vppmig/program.hpp>

#include <vppmig/errors.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

namespace vppmig::program {

LinearExpr& LinearExpr::operator+=(const LinearExpr& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  constant_ += other.constant_;
  return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& other) {
  for (const auto& [v, c] : other.terms_) terms_.emplace_back(v, -c);
  constant_ -= other.constant_;
  return *this;
}

LinearExpr& LinearExpr::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    constant_ = 0.0;
    return *this;
  }
  for (auto& term : terms_) term.second *= s;
  constant_ *= s;
  return *this;
}

double LinearExpr::evaluate(std::span<const double> x) const {
  double v = constant_;
  for (const auto& [i, c] : terms_) v += c * x[i];
  return v;
}

LinearExpr LinearExpr::canonical() const {
  std::map<std::size_t, double> merged;
  for (const auto& [i, c] : terms_) merged[i] += c;
  LinearExpr out(constant_);
  for (const auto& [i, c] : merged) {
    if (c != 0.0) out.terms_.emplace_back(i, c);
  }
  return out;
}

namespace {

bool same_expr(const LinearExpr& a, const LinearExpr& b) {
  return a.terms() == b.terms() && a.constant() == b.constant();
}

}  // namespace

VarId ConicProgram::add_variable(std::string name, double lower, double upper, VarKind kind) {
  if (lower > upper) {
    throw InvalidArgument("variable '" + name + "' has crossing bounds");
  }
  variables_.push_back({std::move(name), lower, upper, kind});
  return VarId{variables_.size() - 1};
}

void ConicProgram::add_equal(LinearExpr lhs, const LinearExpr& rhs, std::string label) {
  lhs -= rhs;
  linear_.push_back({std::move(label), std::move(lhs), Relation::equal});
}

void ConicProgram::add_less_equal(LinearExpr lhs, const LinearExpr& rhs, std::string label) {
  lhs -= rhs;
  linear_.push_back({std::move(label), std::move(lhs), Relation::less_equal});
}

void ConicProgram::add_greater_equal(const LinearExpr& lhs, LinearExpr rhs, std::string label) {
  rhs -= lhs;
  linear_.push_back({std::move(label), std::move(rhs), Relation::less_equal});
}

void ConicProgram::add_cone(std::vector<LinearExpr> args, LinearExpr bound, std::string label) {
  cones_.push_back({std::move(label), std::move(args), std::move(bound)});
}

void ConicProgram::add_rotated_cone(const std::vector<LinearExpr>& args, const LinearExpr& x,
                                    const LinearExpr& y, std::string label) {
  std::vector<LinearExpr> scaled;
  scaled.reserve(args.size() + 1);
  for (const LinearExpr& a : args) scaled.push_back(2.0 * a);
  scaled.push_back(x - y);
  add_cone(std::move(scaled), x + y, std::move(label));
}

void ConicProgram::set_bounds(VarId v, double lower, double upper) {
  Variable& var = variables_.at(v.index);
  if (lower > upper) throw InvalidArgument("variable '" + var.name + "' has crossing bounds");
  var.lower = lower;
  var.upper = upper;
}

std::optional<VarId> ConicProgram::find_variable(const std::string& name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return VarId{i};
  }
  return std::nullopt;
}

void ConicProgram::validate() const {
  const std::size_t n = variables_.size();
  auto check = [n](const LinearExpr& e, const std::string& where) {
    for (const auto& [i, c] : e.terms()) {
      if (i >= n) throw InvalidArgument(where + " references undeclared variable #" + std::to_string(i));
      if (!std::isfinite(c)) throw InvalidArgument(where + " has a non-finite coefficient");
    }
    if (!std::isfinite(e.constant())) throw InvalidArgument(where + " has a non-finite constant");
  };
  for (const Variable& v : variables_) {
    if (v.lower > v.upper) throw InvalidArgument("variable '" + v.name + "' has crossing bounds");
  }
  check(objective_, "objective");
  for (const LinearConstraint& c : linear_) check(c.expr, "constraint '" + c.label + "'");
  for (const ConeConstraint& c : cones_) {
    if (c.args.empty()) throw InvalidArgument("cone '" + c.label + "' has dimension < 2");
    for (const LinearExpr& a : c.args) check(a, "cone '" + c.label + "'");
    check(c.bound, "cone '" + c.label + "'");
  }
}

bool operator==(const ConicProgram& a, const ConicProgram& b) {
  if (a.variables_.size() != b.variables_.size() || a.linear_.size() != b.linear_.size() ||
      a.cones_.size() != b.cones_.size() || !same_expr(a.objective_, b.objective_)) {
    return false;
  }
  for (std::size_t i = 0; i < a.variables_.size(); ++i) {
    const Variable& x = a.variables_[i];
    const Variable& y = b.variables_[i];
    if (x.name != y.name || x.lower != y.lower || x.upper != y.upper || x.kind != y.kind) return false;
  }
  for (std::size_t i = 0; i < a.linear_.size(); ++i) {
    const LinearConstraint& x = a.linear_[i];
    const LinearConstraint& y = b.linear_[i];
    if (x.label != y.label || x.relation != y.relation || !same_expr(x.expr, y.expr)) return false;
  }
  for (std::size_t i = 0; i < a.cones_.size(); ++i) {
    const ConeConstraint& x = a.cones_[i];
    const ConeConstraint& y = b.cones_[i];
    if (x.label != y.label || x.args.size() != y.args.size() || !same_expr(x.bound, y.bound)) return false;
    for (std::size_t k = 0; k < x.args.size(); ++k) {
      if (!same_expr(x.args[k], y.args[k])) return false;
    }
  }
  return true;
}

const char* to_string(SolveStatus status) noexcept {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::iteration_limit: return "iteration-limit";
    case SolveStatus::numerical_failure: return "numerical-failure";
  }
  return "unknown";
}

SolveOutcome solve(const ConicProgram& program, double tolerance) {
  ClarabelSolver solver;
  SolverSettings settings;
  settings.tolerance = tolerance;
  return solver.solve(program, settings);
}

double check_feasibility(const ConicProgram& program, std::span<const double> x) {
  if (x.size() != program.num_variables()) {
    throw InvalidArgument("assignment has " + std::to_string(x.size()) + " values for " +
                          std::to_string(program.num_variables()) + " variables");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Variable& v = program.variables()[i];
    worst = std::max({worst, v.lower - x[i], x[i] - v.upper});
  }
  for (const LinearConstraint& c : program.linear_constraints()) {
    const double lhs = c.expr.evaluate(x);
    worst = std::max(worst, c.relation == Relation::equal ? std::abs(lhs) : lhs);
  }
  for (const ConeConstraint& c : program.cone_constraints()) {
    double sq = 0.0;
    for (const LinearExpr& a : c.args) {
      const double v = a.evaluate(x);
      sq += v * v;
    }
    worst = std::max(worst, std::sqrt(sq) - c.bound.evaluate(x));
  }
  return worst;
}

namespace {

void write_expr(std::ostream& os, const LinearExpr& e) {
  const LinearExpr c = e.canonical();
  bool first = true;
  for (const auto& [i, coeff] : c.terms()) {
    os << (first ? "" : " ") << (coeff < 0 ? "- " : (first ? "" : "+ ")) << std::abs(coeff) << " x" << i;
    first = false;
  }
  if (c.constant() != 0.0 || first) {
    os << (first ? "" : " ") << (c.constant() < 0 ? "- " : (first ? "" : "+ ")) << std::abs(c.constant());
  }
}

}  // namespace

std::string dump_text(const ConicProgram& program) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "minimize ";
  write_expr(os, program.objective());
  os << '\n';
  for (std::size_t i = 0; i < program.num_variables(); ++i) {
    const Variable& v = program.variables()[i];
    os << "var x" << i << ' ' << v.name << " [" << v.lower << ", " << v.upper << ']'
       << (v.kind == VarKind::relaxed_integer ? " int-relaxed" : "") << '\n';
  }
  for (const LinearConstraint& c : program.linear_constraints()) {
    os << "lin " << c.label << ": ";
    write_expr(os, c.expr);
    os << (c.relation == Relation::equal ? " == 0" : " <= 0") << '\n';
  }
  for (const ConeConstraint& c : program.cone_constraints()) {
    os << "soc " << c.label << ": ||";
    for (std::size_t k = 0; k < c.args.size(); ++k) {
      os << (k ? ", " : "(");
      write_expr(os, c.args[k]);
    }
    os << ")|| <= ";
    write_expr(os, c.bound);
    os << '\n';
  }
  return os.str();
}

namespace {

using nlohmann::json;

json bound_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double bound_from(const json& j, double missing) { return j.is_null() ? missing : j.get<double>(); }

json expr_json(const LinearExpr& e) {
  json terms = json::array();
  for (const auto& [i, c] : e.terms()) terms.push_back(json::array({i, c}));
  return {{"terms", terms}, {"constant", e.constant()}};
}

LinearExpr expr_from(const json& j) {
  LinearExpr e(j.at("constant").get<double>());
  for (const json& t : j.at("terms")) e.add(VarId{t.at(0).get<std::size_t>()}, t.at(1).get<double>());
  return e;
}

}  // namespace

nlohmann::json to_json(const ConicProgram& program) {
  json vars = json::array();
  for (const Variable& v : program.variables()) {
    vars.push_back({{"name", v.name},
                    {"lower", bound_json(v.lower)},
                    {"upper", bound_json(v.upper)},
                    {"integer", v.kind == VarKind::relaxed_integer}});
  }
  json lin = json::array();
  for (const LinearConstraint& c : program.linear_constraints()) {
    lin.push_back({{"label", c.label},
                   {"relation", c.relation == Relation::equal ? "eq" : "le"},
                   {"expr", expr_json(c.expr)}});
  }
  json cones = json::array();
  for (const ConeConstraint& c : program.cone_constraints()) {
    json args = json::array();
    for (const LinearExpr& a : c.args) args.push_back(expr_json(a));
    cones.push_back({{"label", c.label}, {"args", args}, {"bound", expr_json(c.bound)}});
  }
  return {{"variables", vars}, {"linear", lin}, {"cones", cones}, {"objective", expr_json(program.objective())}};
}

ConicProgram program_from_json(const nlohmann::json& doc) {
  try {
    ConicProgram p;
    for (const json& v : doc.at("variables")) {
      p.add_variable(v.at("name").get<std::string>(), bound_from(v.at("lower"), -kInf),
                     bound_from(v.at("upper"), kInf),
                     v.at("integer").get<bool>() ? VarKind::relaxed_integer : VarKind::continuous);
    }
    for (const json& c : doc.at("linear")) {
      const std::string rel = c.at("relation").get<std::string>();
      if (rel != "eq" && rel != "le") throw SchemaError("/linear", "unknown relation '" + rel + "'");
      LinearExpr e = expr_from(c.at("expr"));
      if (rel == "eq") {
        p.add_equal(std::move(e), LinearExpr{}, c.at("label").get<std::string>());
      } else {
        p.add_less_equal(std::move(e), LinearExpr{}, c.at("label").get<std::string>());
      }
    }
    for (const json& c : doc.at("cones")) {
      std::vector<LinearExpr> args;
      for (const json& a : c.at("args")) args.push_back(expr_from(a));
      p.add_cone(std::move(args), expr_from(c.at("bound")), c.at("label").get<std::string>());
    }
    p.minimize(expr_from(doc.at("objective")));
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw SchemaError("/", e.what());
  }
}

}  // namespace vppmig::program
