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


#include <vppmig/fuzzy.hpp>

#include <vppmig/errors.hpp>

#include <algorithm>
#include <sstream>

namespace vppmig::fuzzy {

namespace {

std::string describe(const FuzzyTriple& t) {
  std::ostringstream os;
  os << '(' << t.a << ", " << t.b << ", " << t.c << ')';
  return os.str();
}

}  // namespace

void FuzzyTriple::validate() const {
  if (!is_valid()) throw InvalidArgument("fuzzy triple must satisfy a <= b <= c, got " + describe(*this));
}

void TrapezoidParams::validate() const {
  if (!is_valid()) {
    std::ostringstream os;
    os << "trapezoid must satisfy r1 <= r2 <= r3 <= r4, got (" << r1 << ", " << r2 << ", " << r3
       << ", " << r4 << ')';
    throw InvalidArgument(os.str());
  }
}

double membership(const TrapezoidParams& p, double x) {
  p.validate();
  if (x >= p.r2 && x <= p.r3) return 1.0;
  if (x < p.r1 || x > p.r4) return 0.0;
  if (x < p.r2) return (x - p.r1) / (p.r2 - p.r1);
  return (x - p.r4) / (p.r3 - p.r4);
}

// Pos{xi <= r} = sup_{x <= r} mu(x); Nec{xi <= r} = 1 - sup_{x > r} mu(x).
// Averaging the two gives four linear pieces.
double credibility_leq(const TrapezoidParams& p, double r) {
  p.validate();
  if (r < p.r1) return 0.0;
  if (r >= p.r4) return 1.0;
  if (r < p.r2) return (r - p.r1) / (2.0 * (p.r2 - p.r1));
  if (r < p.r3) return 0.5;
  return (r + p.r4 - 2.0 * p.r3) / (2.0 * (p.r4 - p.r3));
}

double credibility_leq(const FuzzyTriple& t, double r) {
  return credibility_leq(TrapezoidParams::from_triple(t), r);
}

FuzzyTriple linear_combination(std::span<const FuzzyTerm> terms, double offset) {
  if (terms.empty()) throw InvalidArgument("linear_combination needs at least one term");
  FuzzyTriple out = FuzzyTriple::crisp(offset);
  for (const FuzzyTerm& term : terms) {
    term.value.validate();
    const double h = term.coefficient;
    if (h >= 0.0) {
      out.a += h * term.value.a;
      out.b += h * term.value.b;
      out.c += h * term.value.c;
    } else {
      out.a += h * term.value.c;
      out.b += h * term.value.b;
      out.c += h * term.value.a;
    }
  }
  return out;
}

CrispInequality crisp_equivalent(const LinearFuzzyConstraint& constraint) {
  const double beta = constraint.confidence;
  if (!(beta >= 0.5 && beta <= 1.0)) {
    std::ostringstream os;
    os << "confidence must lie in [0.5, 1], got " << beta;
    throw InvalidArgument(os.str());
  }
  const double w_inner = 2.0 - 2.0 * beta;
  const double w_outer = 2.0 * beta - 1.0;
  double shift = 0.0;
  for (const FuzzyTerm& term : constraint.terms) {
    term.value.validate();
    const TrapezoidParams p = TrapezoidParams::from_triple(term.value);
    const double hp = std::max(term.coefficient, 0.0);
    const double hm = std::max(-term.coefficient, 0.0);
    shift += w_inner * (p.r3 * hp - p.r2 * hm) + w_outer * (p.r4 * hp - p.r1 * hm);
  }
  return {constraint.offset, shift};
}

double upper_equivalent(const FuzzyTriple& t, double beta) {
  return crisp_equivalent({{{1.0, t}}, 0.0, beta}).fuzzy_shift;
}

double lower_equivalent(const FuzzyTriple& t, double beta) {
  return -crisp_equivalent({{{-1.0, t}}, 0.0, beta}).fuzzy_shift;
}

}  // namespace vppmig::fuzzy
