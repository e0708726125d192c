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
 * \file vppmig/program.hpp
 *
 * \brief Solver-agnostic conic program representation and the solver
 *  adapter contract.
 *
 * A ConicProgram minimizes a linear objective over bounded variables subject
 * to linear equalities, linear inequalities, and second-order cones
 * ||A x + b||_2 <= c'x + d. Integer variables are only tagged; rounding is
 * the caller's business.
 */

#ifndef VPPMIG_PROGRAM_HPP
#define VPPMIG_PROGRAM_HPP

#include <json.hpp>

#include <compare>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vppmig::program {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct VarId {
  std::size_t index = 0;
  friend auto operator<=>(const VarId&, const VarId&) = default;
};

enum class VarKind { continuous, relaxed_integer };

struct Variable {
  std::string name;
  double lower = -kInf;
  double upper = kInf;
  VarKind kind = VarKind::continuous;
};

/// Sparse affine form sum_k coeff_k x_k + constant. Terms may repeat; they
/// are merged when the program is lowered.
class LinearExpr {
 public:
  LinearExpr() = default;
  explicit LinearExpr(double constant) : constant_(constant) {}
  LinearExpr(VarId v, double coeff = 1.0) { add(v, coeff); }  // NOLINT(google-explicit-constructor)

  LinearExpr& add(VarId v, double coeff) {
    if (coeff != 0.0) terms_.emplace_back(v.index, coeff);
    return *this;
  }
  LinearExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }

  LinearExpr& operator+=(const LinearExpr& other);
  LinearExpr& operator-=(const LinearExpr& other);
  LinearExpr& operator*=(double s);

  friend LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
  friend LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
  friend LinearExpr operator*(LinearExpr a, double s) { return a *= s; }
  friend LinearExpr operator*(double s, LinearExpr a) { return a *= s; }

  const std::vector<std::pair<std::size_t, double>>& terms() const noexcept { return terms_; }
  double constant() const noexcept { return constant_; }

  double evaluate(std::span<const double> x) const;
  /// Terms merged by variable index, zero coefficients dropped, sorted.
  LinearExpr canonical() const;

 private:
  std::vector<std::pair<std::size_t, double>> terms_;
  double constant_ = 0.0;
};

enum class Relation { equal, less_equal };

/// `expr == 0` or `expr <= 0`.
struct LinearConstraint {
  std::string label;
  LinearExpr expr;
  Relation relation = Relation::less_equal;
};

/// ||args||_2 <= bound.
struct ConeConstraint {
  std::string label;
  std::vector<LinearExpr> args;
  LinearExpr bound;
};

class ConicProgram {
 public:
  VarId add_variable(std::string name, double lower = -kInf, double upper = kInf,
                     VarKind kind = VarKind::continuous);

  void add_equal(LinearExpr lhs, const LinearExpr& rhs, std::string label = {});
  void add_less_equal(LinearExpr lhs, const LinearExpr& rhs, std::string label = {});
  void add_greater_equal(const LinearExpr& lhs, LinearExpr rhs, std::string label = {});
  void add_cone(std::vector<LinearExpr> args, LinearExpr bound, std::string label = {});
  /// ||args||^2 <= x * y with x, y >= 0, written as the equivalent
  /// ||(2 args, x - y)||_2 <= x + y.
  void add_rotated_cone(const std::vector<LinearExpr>& args, const LinearExpr& x,
                        const LinearExpr& y, std::string label = {});

  void minimize(LinearExpr objective) { objective_ = std::move(objective); }

  void set_bounds(VarId v, double lower, double upper);
  void fix(VarId v, double value) { set_bounds(v, value, value); }

  std::size_t num_variables() const noexcept { return variables_.size(); }
  const std::vector<Variable>& variables() const noexcept { return variables_; }
  const Variable& variable(VarId v) const { return variables_.at(v.index); }
  std::optional<VarId> find_variable(const std::string& name) const;
  const std::vector<LinearConstraint>& linear_constraints() const noexcept { return linear_; }
  const std::vector<ConeConstraint>& cone_constraints() const noexcept { return cones_; }
  const LinearExpr& objective() const noexcept { return objective_; }

  /// Throws InvalidArgument if a constraint references an undeclared
  /// variable, a cone has fewer than two dimensions, or bounds cross.
  void validate() const;

  friend bool operator==(const ConicProgram& a, const ConicProgram& b);

 private:
  std::vector<Variable> variables_;
  std::vector<LinearConstraint> linear_;
  std::vector<ConeConstraint> cones_;
  LinearExpr objective_;
};

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit, numerical_failure };

const char* to_string(SolveStatus status) noexcept;

struct SolverStats {
  int iterations = 0;
  double runtime_seconds = 0.0;
  bool reduced_accuracy = false;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::numerical_failure;
  std::optional<std::vector<double>> primal;  ///< present iff status == optimal
  double objective_value = 0.0;
  SolverStats stats;

  bool optimal() const noexcept { return status == SolveStatus::optimal; }
};

struct SolverSettings {
  double tolerance = 1e-8;
  int max_iterations = 200;
};

/// Adapter contract. Implementations must be deterministic for identical
/// inputs and settings and report non-optimal outcomes through the status.
class ConicSolver {
 public:
  virtual ~ConicSolver() = default;
  virtual SolveOutcome solve(const ConicProgram& program, const SolverSettings& settings) = 0;
  /// Whether one instance may run concurrent solves.
  virtual bool reentrant() const noexcept = 0;
  virtual std::string name() const = 0;
};

/// Interior-point backend (Clarabel).
class ClarabelSolver final : public ConicSolver {
 public:
  SolveOutcome solve(const ConicProgram& program, const SolverSettings& settings) override;
  bool reentrant() const noexcept override { return false; }
  std::string name() const override { return "clarabel"; }
};

/// Solves with a fresh default backend.
SolveOutcome solve(const ConicProgram& program, double tolerance = 1e-8);

/// Largest violation over variable bounds, linear rows, and cones.
double check_feasibility(const ConicProgram& program, std::span<const double> assignment);

/// Human-diffable dump: one variable or constraint per line, canonical
/// term ordering.
std::string dump_text(const ConicProgram& program);

nlohmann::json to_json(const ConicProgram& program);
ConicProgram program_from_json(const nlohmann::json& doc);

}  // namespace vppmig::program

#endif  // VPPMIG_PROGRAM_HPP
