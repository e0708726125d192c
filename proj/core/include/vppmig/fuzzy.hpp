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
 * \file vppmig/fuzzy.hpp
 *
 * \brief Triangular/trapezoidal fuzzy variables, the credibility measure, and
 *  the crisp-equivalent rewriter for linear fuzzy chance constraints.
 *
 * A chance constraint Cr{ sum_k h_k * xi_k + h_0 <= 0 } >= beta, with crisp
 * coefficients h_k and trapezoidal fuzzy variables xi_k, holds for
 * beta >= 1/2 exactly when
 *
 *   h_0 + (2 - 2 beta) sum_k [r_k3 h_k^+ - r_k2 h_k^-]
 *       + (2 beta - 1) sum_k [r_k4 h_k^+ - r_k1 h_k^-] <= 0,
 *
 * where h^+ = max(h, 0) and h^- = max(-h, 0).
 */

#ifndef VPPMIG_FUZZY_HPP
#define VPPMIG_FUZZY_HPP

#include <span>
#include <vector>

namespace vppmig::fuzzy {

/// Absolute tolerance for equalities in fuzzy arithmetic.
inline constexpr double kTolerance = 1e-9;

/// Triangular fuzzy number (a, b, c): support [a, c], modal value b.
struct FuzzyTriple {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  static constexpr FuzzyTriple crisp(double value) noexcept { return {value, value, value}; }

  bool is_valid() const noexcept { return a <= b && b <= c; }
  /// Throws InvalidArgument unless a <= b <= c.
  void validate() const;

  friend bool operator==(const FuzzyTriple&, const FuzzyTriple&) = default;
};

/// Trapezoid (r1, r2, r3, r4): membership rises on [r1, r2], is 1 on
/// [r2, r3] and falls on [r3, r4].
struct TrapezoidParams {
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  double r4 = 0.0;

  static constexpr TrapezoidParams from_triple(const FuzzyTriple& t) noexcept {
    return {t.a, t.b, t.b, t.c};
  }

  bool is_valid() const noexcept { return r1 <= r2 && r2 <= r3 && r3 <= r4; }
  void validate() const;
};

/// Membership function mu(x). Degenerate ramps (r1 == r2 or r3 == r4) take
/// the plateau value 1 at the shared point.
double membership(const TrapezoidParams& params, double x);

/// Cr{xi <= r} = (Pos{xi <= r} + Nec{xi <= r}) / 2, in closed form.
double credibility_leq(const TrapezoidParams& params, double r);
double credibility_leq(const FuzzyTriple& triple, double r);

struct FuzzyTerm {
  double coefficient = 0.0;
  FuzzyTriple value;
};

/// Cr{ sum_k coefficient_k * value_k + offset <= 0 } >= confidence.
struct LinearFuzzyConstraint {
  std::vector<FuzzyTerm> terms;
  double offset = 0.0;
  double confidence = 0.5;
};

/// Distribution of sum_k h_k * xi_k + offset under the extension principle.
/// Requires at least one term.
FuzzyTriple linear_combination(std::span<const FuzzyTerm> terms, double offset);

/// Deterministic inequality `offset + fuzzy_shift <= 0`. `fuzzy_shift` is the
/// contribution of the fuzzy terms at the requested confidence; builders that
/// keep h_0 symbolic add it to their own crisp part.
struct CrispInequality {
  double offset = 0.0;
  double fuzzy_shift = 0.0;

  double lhs() const noexcept { return offset + fuzzy_shift; }
  bool satisfied(double tolerance = kTolerance) const noexcept { return lhs() <= tolerance; }
};

/// Throws InvalidArgument when confidence < 1/2 or > 1, or a triple is invalid.
CrispInequality crisp_equivalent(const LinearFuzzyConstraint& constraint);

/// (2 - 2 beta) b + (2 beta - 1) c: the value a positively weighted fuzzy
/// quantity takes in a crisp equivalent at confidence beta.
double upper_equivalent(const FuzzyTriple& t, double beta);
/// (2 - 2 beta) b + (2 beta - 1) a: same for a negatively weighted quantity.
double lower_equivalent(const FuzzyTriple& t, double beta);

}  // namespace vppmig::fuzzy

#endif  // VPPMIG_FUZZY_HPP
