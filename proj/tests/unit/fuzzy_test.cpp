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
#include <vppmig/fuzzy.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "toys.hpp"

namespace vppmig::fuzzy {
namespace {

// Oracle membership, written out separately from the library.
double oracle_mu(double r1, double r2, double r3, double r4, double x) {
  if (x < r1 || x > r4) return 0.0;
  if (x < r2) return r2 > r1 ? (x - r1) / (r2 - r1) : 1.0;
  if (x <= r3) return 1.0;
  return r4 > r3 ? (r4 - x) / (r4 - r3) : 1.0;
}

// Cr{xi <= r} = (sup_{x <= r} mu + 1 - sup_{x > r} mu) / 2 over a dense grid.
double oracle_credibility(const TrapezoidParams& p, double r, int points = 200001) {
  const double lo = p.r1 - 1.0;
  const double hi = p.r4 + 1.0;
  double pos = 0.0;
  double above = 0.0;
  for (int k = 0; k < points; ++k) {
    const double x = lo + (hi - lo) * k / (points - 1);
    const double mu = oracle_mu(p.r1, p.r2, p.r3, p.r4, x);
    if (x <= r) pos = std::max(pos, mu);
    else above = std::max(above, mu);
  }
  pos = std::max(pos, oracle_mu(p.r1, p.r2, p.r3, p.r4, std::min(r, hi)));
  // Geometric refinement on both sides of r for steep ramps.
  for (double h = 1e-12; h < hi - lo; h *= 1.5) {
    pos = std::max(pos, oracle_mu(p.r1, p.r2, p.r3, p.r4, r - h));
    above = std::max(above, oracle_mu(p.r1, p.r2, p.r3, p.r4, r + h));
  }
  return 0.5 * (pos + 1.0 - above);
}

TEST(Membership, PlateauAndRamps) {
  const TrapezoidParams p{0.0, 1.0, 2.0, 4.0};
  EXPECT_DOUBLE_EQ(membership(p, -0.5), 0.0);
  EXPECT_DOUBLE_EQ(membership(p, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(membership(p, 1.5), 1.0);
  EXPECT_DOUBLE_EQ(membership(p, 3.0), 0.5);
  EXPECT_DOUBLE_EQ(membership(p, 4.5), 0.0);
}

TEST(Membership, DegenerateRampTakesPlateauValue) {
  EXPECT_DOUBLE_EQ(membership(TrapezoidParams{1.0, 1.0, 2.0, 3.0}, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(membership(TrapezoidParams{1.0, 2.0, 3.0, 3.0}, 3.0), 1.0);
}

TEST(Membership, RejectsUnorderedParameters) {
  EXPECT_THROW(membership(TrapezoidParams{0.0, 2.0, 1.0, 3.0}, 0.5), InvalidArgument);
  EXPECT_THROW(FuzzyTriple({2.0, 1.0, 3.0}).validate(), InvalidArgument);
}

TEST(Credibility, TriangleHandValues) {
  const FuzzyTriple t{0.0, 1.0, 2.0};
  EXPECT_DOUBLE_EQ(credibility_leq(t, -1.0), 0.0);
  EXPECT_DOUBLE_EQ(credibility_leq(t, 0.5), 0.25);
  EXPECT_DOUBLE_EQ(credibility_leq(t, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(credibility_leq(t, 1.5), 0.75);
  EXPECT_DOUBLE_EQ(credibility_leq(t, 2.0), 1.0);
}

TEST(Credibility, CrispValueIsAStep) {
  const FuzzyTriple t = FuzzyTriple::crisp(3.0);
  EXPECT_DOUBLE_EQ(credibility_leq(t, 2.999), 0.0);
  EXPECT_DOUBLE_EQ(credibility_leq(t, 3.0), 1.0);
}

TEST(Credibility, MatchesGridSupremumOracle) {
  testing::Rng rng(101);
  for (int trial = 0; trial < 40; ++trial) {
    const double r1 = rng.uniform(-5.0, 5.0);
    const double r2 = r1 + rng.uniform(0.1, 3.0);
    const double r3 = r2 + rng.uniform(0.0, 2.0);
    const double r4 = r3 + rng.uniform(0.1, 3.0);
    const TrapezoidParams p{r1, r2, r3, r4};
    for (int q = 0; q < 6; ++q) {
      const double r = rng.uniform(r1 - 0.5, r4 + 0.5);
      // Grid spacing is below 1e-4, ramps are at least 0.1 wide.
      EXPECT_NEAR(credibility_leq(p, r), oracle_credibility(p, r), 1e-3) << "r = " << r;
    }
  }
}

TEST(Credibility, SelfDuality) {
  testing::Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const FuzzyTriple t = rng.triple(-3.0, 3.0, 2.0);
    if (t.b - t.a < 1e-6 || t.c - t.b < 1e-6) continue;
    const double r = rng.uniform(t.a - 1.0, t.c + 1.0);
    // Cr{xi <= r} + Cr{-xi <= -r} = 1 away from atoms.
    const double mirrored = credibility_leq(FuzzyTriple{-t.c, -t.b, -t.a}, -r);
    EXPECT_NEAR(credibility_leq(t, r) + mirrored, 1.0, 1e-12);
  }
}

TEST(Credibility, NondecreasingInThreshold) {
  testing::Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const FuzzyTriple t = rng.triple(-3.0, 3.0, 2.0);
    double prev = 0.0;
    for (int k = 0; k <= 100; ++k) {
      const double r = t.a - 1.0 + (t.c - t.a + 2.0) * k / 100.0;
      const double v = credibility_leq(t, r);
      EXPECT_GE(v, prev - 1e-15);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      prev = v;
    }
  }
}

// mu_Z(z) = sup over h1 x + h2 y + h0 = z of min(mu1(x), mu2(y)), with x on a grid.
double zadeh_membership(const FuzzyTerm& u, const FuzzyTerm& v, double offset, double z) {
  const FuzzyTriple& p = u.value;
  const FuzzyTriple& q = v.value;
  double best = 0.0;
  const int points = 20001;
  for (int k = 0; k < points; ++k) {
    const double x = p.a + (p.c - p.a) * k / (points - 1);
    const double y = (z - offset - u.coefficient * x) / v.coefficient;
    best = std::max(best, std::min(oracle_mu(p.a, p.b, p.b, p.c, x), oracle_mu(q.a, q.b, q.b, q.c, y)));
  }
  return best;
}

TEST(LinearCombination, MatchesZadehExtensionOnGrid) {
  testing::Rng rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    const FuzzyTerm u{rng.sign() * rng.uniform(0.5, 2.0), rng.triple(-2.0, 2.0, 1.5)};
    const FuzzyTerm v{rng.sign() * rng.uniform(0.5, 2.0), rng.triple(-2.0, 2.0, 1.5)};
    if (u.value.b - u.value.a < 0.2 || u.value.c - u.value.b < 0.2) continue;
    const double offset = rng.uniform(-1.0, 1.0);
    const std::vector<FuzzyTerm> terms{u, v};
    const FuzzyTriple z = linear_combination(terms, offset);
    const TrapezoidParams zp = TrapezoidParams::from_triple(z);
    for (int q = 0; q <= 8; ++q) {
      const double x = z.a - 0.2 + (z.c - z.a + 0.4) * q / 8.0;
      EXPECT_NEAR(membership(zp, x), zadeh_membership(u, v, offset, x), 5e-3) << "trial " << trial;
    }
  }
}

TEST(LinearCombination, NegativeCoefficientSwapsEnds) {
  const std::vector<FuzzyTerm> terms{{-2.0, {1.0, 2.0, 4.0}}};
  const FuzzyTriple z = linear_combination(terms, 1.0);
  EXPECT_DOUBLE_EQ(z.a, -7.0);
  EXPECT_DOUBLE_EQ(z.b, -3.0);
  EXPECT_DOUBLE_EQ(z.c, -1.0);
  EXPECT_THROW(linear_combination({}, 0.0), InvalidArgument);
}

TEST(CrispEquivalent, BetaHalfUsesModalValues) {
  const LinearFuzzyConstraint c{{{1.0, {1.0, 2.0, 5.0}}, {-1.0, {0.0, 3.0, 4.0}}}, 0.5, 0.5};
  const CrispInequality eq = crisp_equivalent(c);
  EXPECT_DOUBLE_EQ(eq.fuzzy_shift, 2.0 - 3.0);
  EXPECT_DOUBLE_EQ(eq.lhs(), 0.5 - 1.0);
  EXPECT_TRUE(eq.satisfied());
}

TEST(CrispEquivalent, BetaOneUsesSupportEnds) {
  const LinearFuzzyConstraint c{{{1.0, {1.0, 2.0, 5.0}}, {-1.0, {0.0, 3.0, 4.0}}}, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(crisp_equivalent(c).fuzzy_shift, 5.0 - 0.0);
}

TEST(CrispEquivalent, RejectsLowConfidence) {
  const LinearFuzzyConstraint c{{{1.0, {1.0, 2.0, 3.0}}}, 0.0, 0.4};
  EXPECT_THROW(crisp_equivalent(c), InvalidArgument);
  EXPECT_THROW(upper_equivalent({1.0, 2.0, 3.0}, 1.2), InvalidArgument);
}

TEST(CrispEquivalent, UpperAndLowerEquivalents) {
  const FuzzyTriple t{10.0, 20.0, 40.0};
  EXPECT_DOUBLE_EQ(upper_equivalent(t, 0.75), 0.5 * 20.0 + 0.5 * 40.0);
  EXPECT_DOUBLE_EQ(lower_equivalent(t, 0.75), 0.5 * 20.0 + 0.5 * 10.0);
}

// Property: at equality the chance constraint holds with credibility exactly beta.
TEST(CrispEquivalent, BoundaryHasCredibilityBeta) {
  testing::Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    LinearFuzzyConstraint c;
    const int terms = rng.integer(1, 4);
    for (int k = 0; k < terms; ++k) {
      c.terms.push_back({rng.sign() * rng.uniform(0.1, 3.0), rng.triple(-10.0, 10.0, 5.0)});
    }
    c.confidence = rng.uniform(0.5, 1.0);
    c.offset = 0.0;
    c.offset = -crisp_equivalent(c).fuzzy_shift;
    const FuzzyTriple z = linear_combination(c.terms, c.offset);
    if (z.c - z.a < 1e-9) continue;
    EXPECT_NEAR(oracle_credibility(TrapezoidParams::from_triple(z), 0.0, 400001), c.confidence, 2e-3);
  }
}

// Property: tightening the offset below the boundary raises credibility above beta.
TEST(CrispEquivalent, SatisfiedImpliesChanceConstraint) {
  testing::Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    LinearFuzzyConstraint c;
    const int terms = rng.integer(1, 3);
    for (int k = 0; k < terms; ++k) {
      c.terms.push_back({rng.sign() * rng.uniform(0.1, 3.0), rng.triple(-10.0, 10.0, 5.0)});
    }
    c.confidence = rng.uniform(0.5, 1.0);
    c.offset = rng.uniform(-20.0, 20.0);
    const bool crisp_ok = crisp_equivalent(c).lhs() <= 0.0;
    const FuzzyTriple z = linear_combination(c.terms, c.offset);
    const bool chance_ok = credibility_leq(z, 0.0) >= c.confidence - 1e-12;
    EXPECT_EQ(crisp_ok, chance_ok) << "trial " << trial;
  }
}

}  // namespace
}  // namespace vppmig::fuzzy
