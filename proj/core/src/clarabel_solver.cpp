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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>

extern "C" {

struct VppmigConicProblem {
  std::size_t n;
  std::size_t m;
  const std::size_t* a_colptr;
  const std::size_t* a_rowval;
  const double* a_nzval;
  const double* q;
  const double* b;
  std::size_t n_zero;
  std::size_t n_nonneg;
  const std::size_t* soc_dims;
  std::size_t n_soc;
  double tol_gap_abs;
  double tol_gap_rel;
  double tol_feas;
  std::uint32_t max_iter;
  double time_limit;
};

struct VppmigConicResult {
  std::int32_t status;
  double obj_val;
  std::uint32_t iterations;
  double solve_time;
  double r_prim;
  double r_dual;
};

std::int32_t vppmig_clarabel_solve(const VppmigConicProblem* problem, double* x_out,
                                   VppmigConicResult* out);
}

namespace vppmig::program {

namespace {

// Standard form A x + s = b, s in K with K = zero x nonneg x SOC...
class StandardForm {
 public:
  explicit StandardForm(std::size_t n) : columns_(n) {}

  // Appends the row `coeffs . x + s = rhs`.
  void add_row(const LinearExpr& coeffs, double rhs) {
    std::map<std::size_t, double> merged;
    for (const auto& [i, c] : coeffs.terms()) merged[i] += c;
    for (const auto& [i, c] : merged) {
      if (c != 0.0) columns_[i].emplace_back(rows_, c);
    }
    b_.push_back(rhs);
    ++rows_;
  }
  void add_unit_row(std::size_t var, double coeff, double rhs) {
    columns_[var].emplace_back(rows_, coeff);
    b_.push_back(rhs);
    ++rows_;
  }

  std::size_t rows() const { return rows_; }

  void to_csc(std::vector<std::size_t>& colptr, std::vector<std::size_t>& rowval,
              std::vector<double>& nzval) const {
    colptr.assign(1, 0);
    for (const auto& col : columns_) {
      for (const auto& [r, v] : col) {
        rowval.push_back(r);
        nzval.push_back(v);
      }
      colptr.push_back(rowval.size());
    }
  }

  const std::vector<double>& rhs() const { return b_; }

 private:
  std::vector<std::vector<std::pair<std::size_t, double>>> columns_;
  std::vector<double> b_;
  std::size_t rows_ = 0;
};

SolveStatus map_status(std::int32_t code) {
  switch (code) {
    case 0:
    case 1: return SolveStatus::optimal;
    case 2: return SolveStatus::infeasible;
    case 3: return SolveStatus::unbounded;
    case 4: return SolveStatus::iteration_limit;
    default: return SolveStatus::numerical_failure;
  }
}

}  // namespace

SolveOutcome ClarabelSolver::solve(const ConicProgram& program, const SolverSettings& settings) {
  program.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = program.num_variables();
  StandardForm form(n);

  // Zero cone: equalities and fixed variables.
  for (const LinearConstraint& c : program.linear_constraints()) {
    if (c.relation == Relation::equal) form.add_row(c.expr, -c.expr.constant());
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Variable& v = program.variables()[i];
    if (v.lower == v.upper) form.add_unit_row(i, 1.0, v.lower);
  }
  const std::size_t n_zero = form.rows();

  // Nonnegative cone: inequalities and finite bounds.
  for (const LinearConstraint& c : program.linear_constraints()) {
    if (c.relation == Relation::less_equal) form.add_row(c.expr, -c.expr.constant());
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Variable& v = program.variables()[i];
    if (v.lower == v.upper) continue;
    if (std::isfinite(v.lower)) form.add_unit_row(i, -1.0, -v.lower);
    if (std::isfinite(v.upper)) form.add_unit_row(i, 1.0, v.upper);
  }
  const std::size_t n_nonneg = form.rows() - n_zero;

  // Second-order cones: s = (bound, args) = b - A x.
  std::vector<std::size_t> soc_dims;
  for (const ConeConstraint& c : program.cone_constraints()) {
    form.add_row(-1.0 * c.bound, c.bound.constant());
    for (const LinearExpr& a : c.args) form.add_row(-1.0 * a, a.constant());
    soc_dims.push_back(c.args.size() + 1);
  }

  std::vector<std::size_t> colptr;
  std::vector<std::size_t> rowval;
  std::vector<double> nzval;
  form.to_csc(colptr, rowval, nzval);

  std::vector<double> q(n, 0.0);
  for (const auto& [i, c] : program.objective().terms()) q[i] += c;

  VppmigConicProblem problem{};
  problem.n = n;
  problem.m = form.rows();
  problem.a_colptr = colptr.data();
  problem.a_rowval = rowval.data();
  problem.a_nzval = nzval.data();
  problem.q = q.data();
  problem.b = form.rhs().data();
  problem.n_zero = n_zero;
  problem.n_nonneg = n_nonneg;
  problem.soc_dims = soc_dims.data();
  problem.n_soc = soc_dims.size();
  problem.tol_gap_abs = settings.tolerance;
  problem.tol_gap_rel = settings.tolerance;
  problem.tol_feas = settings.tolerance;
  problem.max_iter = static_cast<std::uint32_t>(std::max(settings.max_iterations, 1));
  problem.time_limit = std::numeric_limits<double>::infinity();

  std::vector<double> x(n, 0.0);
  VppmigConicResult result{};
  const std::int32_t code = vppmig_clarabel_solve(&problem, x.data(), &result);

  SolveOutcome out;
  out.status = map_status(code);
  out.stats.iterations = static_cast<int>(result.iterations);
  out.stats.reduced_accuracy = code == 1;
  out.stats.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (out.status == SolveStatus::optimal) {
    out.objective_value = program.objective().evaluate(x);
    out.primal = std::move(x);
  }
  return out;
}

}  // namespace vppmig::program
