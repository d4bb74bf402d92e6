#include <gtest/gtest.h>

#include <cmath>

#include "seqrate/cumulative_function.hpp"
#include "seqrate/error.hpp"
#include "support/random_instances.hpp"

namespace seqrate {
namespace {

using testing::Rng;

CumulativeFunction worked_g1() { return CumulativeFunction({{0, 0, 0}, {0.5, 1, 2}, {1, 2, 2}}); }
CumulativeFunction worked_g2() { return CumulativeFunction({{0, 0, 0}, {0.5, 0, 2}, {1, 2, 2}}); }
CumulativeFunction worked_g3() { return CumulativeFunction({{0, 0, 0}, {0.5, 2, 2}, {1, 2, 2}}); }
CumulativeFunction worked_leakage() {
  return CumulativeFunction({{0, 0, 0}, {0.2, 1, 1}, {1, 1, 1}}, Role::leakage);
}

// Reference for clip-and-shift at one point.
double clipped(const CumulativeFunction& f, double alpha, Side side, double c) {
  return std::max(0.0, f.evaluate(alpha, side) - c);
}

// Supremum of G - L by dense sampling plus both knot sides.
double sampled_sup(const CumulativeFunction& g, const CumulativeFunction& l) {
  double best = -kInf;
  auto consider = [&](double a, Side s) {
    const double lv = l.evaluate(a, s);
    if (std::isinf(lv)) return;
    best = std::max(best, g.evaluate(a, s) - lv);
  };
  for (int i = 0; i <= 2000; ++i) consider(i / 2000.0, Side::right);
  for (const auto* f : {&g, &l})
    for (const auto& k : f->knots()) {
      consider(k.alpha, Side::right);
      if (k.alpha > 0) consider(k.alpha, Side::left);
    }
  return best;
}

void expect_same_knots(const CumulativeFunction& actual, const std::vector<Knot>& expected,
                       double tol = 1e-12) {
  ASSERT_EQ(actual.knots().size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(actual.knots()[i].alpha, expected[i].alpha, tol) << "knot " << i;
    EXPECT_NEAR(actual.knots()[i].pre, expected[i].pre, tol) << "knot " << i;
    EXPECT_NEAR(actual.knots()[i].post, expected[i].post, tol) << "knot " << i;
  }
}

TEST(Validate, AcceptsIdentityLine) {
  const std::vector<Knot> knots{{0, 0, 0}, {1, 1, 1}};
  EXPECT_TRUE(validate_regular(knots).valid());
}

TEST(Validate, RejectsJumpAtOrigin) {
  const std::vector<Knot> knots{{0, 0, 0.5}, {1, 0.5, 0.5}};
  const auto report = validate_regular(knots);
  EXPECT_FALSE(report.valid());
  EXPECT_TRUE(report.has(Property::zero_initial_value));
}

TEST(Validate, AcceptsStepAtHalf) {
  const std::vector<Knot> knots{{0, 0, 0}, {0.5, 0, 1}, {1, 1, 1}};
  EXPECT_TRUE(validate_regular(knots).valid());
}

TEST(Validate, ReportsEachViolatedProperty) {
  const std::vector<Knot> decreasing{{0, 0, 0}, {0.5, 1, 0.5}, {1, 0.5, 0.5}};
  EXPECT_TRUE(validate_regular(decreasing).has(Property::right_continuity));
  const std::vector<Knot> falling{{0, 0, 0}, {0.5, 1, 1}, {1, 0.8, 0.8}};
  EXPECT_TRUE(validate_regular(falling).has(Property::cumulation));
  const std::vector<Knot> short_domain{{0, 0, 0}, {0.9, 1, 1}};
  EXPECT_TRUE(validate_regular(short_domain).has(Property::domain_coverage));
  const std::vector<Knot> crowded{{0, 0, 0}, {0.5, 0, 0}, {0.5 + 1e-13, 0, 0}, {1, 0, 0}};
  EXPECT_TRUE(validate_regular(crowded).has(Property::domain_coverage));
  const std::vector<Knot> infinite_rate{{0, 0, 0}, {0.5, 0, kInf}, {1, kInf, kInf}};
  EXPECT_FALSE(validate_regular(infinite_rate, Role::rate).valid());
  EXPECT_TRUE(validate_regular(infinite_rate, Role::leakage).valid());
  const std::vector<Knot> empty;
  EXPECT_FALSE(validate_regular(empty).valid());
}

TEST(Validate, ConstructorThrowsOnInvalidKnots) {
  EXPECT_THROW(CumulativeFunction({{0, 0, 0.5}, {1, 0.5, 0.5}}), InvalidInput);
}

TEST(Evaluate, StepAndLine) {
  const auto step = CumulativeFunction::step(0.5, 1.0);
  EXPECT_EQ(step.evaluate(0.5, Side::right), 1.0);
  EXPECT_EQ(step.evaluate(0.5, Side::left), 0.0);
  EXPECT_DOUBLE_EQ(CumulativeFunction::line(1.0).evaluate(0.3, Side::right), 0.3);
}

TEST(Evaluate, RejectsOutOfDomainAndLeftLimitAtOrigin) {
  const auto f = CumulativeFunction::line(1.0);
  EXPECT_THROW(f.evaluate(-0.1, Side::right), InvalidInput);
  EXPECT_THROW(f.evaluate(1.1, Side::right), InvalidInput);
  EXPECT_THROW(f.evaluate(0.0, Side::left), InvalidInput);
}

TEST(Evaluate, StepAtEndOfDomain) {
  const auto f = CumulativeFunction::step(1.0, 0.6);
  EXPECT_EQ(f(1.0), 0.6);
  EXPECT_EQ(f.evaluate(1.0, Side::left), 0.0);
  EXPECT_EQ(f(0.99), 0.0);
}

TEST(ClipShift, LineCrossingOffset) {
  const auto out = clip_shift(CumulativeFunction::line(2.0), 1.0);
  expect_same_knots(out, {{0, 0, 0}, {0.5, 0, 0}, {1, 1, 1}});
}

TEST(ClipShift, ZeroOffsetIsIdentity) {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const auto f = testing::random_rate_function(rng);
    EXPECT_EQ(clip_shift(f, 0.0), f);
  }
}

TEST(ClipShift, StepHeightReduced) {
  expect_same_knots(clip_shift(CumulativeFunction::step(0.5, 2.0), 1.0),
                    {{0, 0, 0}, {0.5, 0, 1}, {1, 1, 1}});
}

TEST(ClipShift, MatchesPointwiseDefinitionAndComposes) {
  Rng rng(12);
  for (int t = 0; t < 300; ++t) {
    const auto f = testing::random_rate_function(rng);
    const double c1 = testing::uniform(rng, 0.0, 1.5);
    const double c2 = testing::uniform(rng, 0.0, 1.5);
    const auto once = clip_shift(f, c1 + c2);
    EXPECT_TRUE(validate_regular(once.knots()).valid());
    EXPECT_TRUE(equivalent(once, clip_shift(clip_shift(f, c1), c2), 1e-12));
    for (int i = 0; i <= 200; ++i) {
      const double a = i / 200.0;
      EXPECT_NEAR(once(a), clipped(f, a, Side::right, c1 + c2), 1e-12);
      if (a > 0) {
        EXPECT_NEAR(once.evaluate(a, Side::left), clipped(f, a, Side::left, c1 + c2), 1e-12);
      }
    }
  }
}

TEST(Effective, WorkedExampleFirstTwoRateFunctions) {
  const std::vector<Knot> expected{{0, 0, 0}, {0.5, 0, 1}, {1, 1, 1}};
  expect_same_knots(effective_crdf(worked_g1(), worked_leakage()), expected);
  expect_same_knots(effective_crdf(worked_g2(), worked_leakage()), expected);
}

TEST(Effective, WorkedExampleThirdRateFunction) {
  const auto eff = effective_crdf_detail(worked_g3(), worked_leakage());
  expect_same_knots(eff.function, {{0, 0, 0}, {0.25, 0, 0}, {0.5, 1, 1}, {1, 1, 1}});
  EXPECT_DOUBLE_EQ(eff.shift, 1.0);
  EXPECT_DOUBLE_EQ(eff.function(0.375), 4 * 0.375 - 1);
}

TEST(Effective, UnconstrainedLeakageLeavesRateUnchanged) {
  Rng rng(13);
  for (int t = 0; t < 50; ++t) {
    const auto g = testing::random_rate_function(rng);
    EXPECT_EQ(effective_crdf(g, CumulativeFunction::unconstrained()), g);
  }
}

TEST(Effective, LosslessModeWithholdsSurplusOverEntropy) {
  const auto eff = effective_crdf(CumulativeFunction::line(2.0), CumulativeFunction::unconstrained(),
                                  LosslessMode{1.5});
  EXPECT_DOUBLE_EQ(eff(1.0), 1.5);
  EXPECT_DOUBLE_EQ(eff(0.25), 0.0);
  EXPECT_DOUBLE_EQ(eff(0.5), 0.5);
}

TEST(Effective, TieBreakPrefersSmallestAlphaLeftSideFirst) {
  // G - L equals 1 on both sides of 0.5 and again at 1.
  const CumulativeFunction g({{0, 0, 0}, {0.5, 1, 1.5}, {1, 2, 2}});
  const CumulativeFunction l({{0, 0, 0}, {0.5, 0, 0.5}, {1, 1, 1}}, Role::leakage);
  const auto sup = sup_difference(g, l);
  EXPECT_DOUBLE_EQ(sup.value, 1.0);
  EXPECT_EQ(sup.alpha, 0.5);
  EXPECT_EQ(sup.side, Side::left);
}

TEST(Effective, InfiniteMinusInfiniteIsRejected) {
  EXPECT_THROW(sup_difference(CumulativeFunction::unconstrained(), CumulativeFunction::unconstrained()),
               InvalidInput);
}

TEST(Effective, RandomInstancesAgainstSampledReference) {
  Rng rng(14);
  for (int t = 0; t < 300; ++t) {
    const auto g = testing::random_rate_function(rng);
    const auto l = testing::random_leakage_function(rng);
    const auto eff = effective_crdf(g, l);
    const double c = std::max(0.0, sampled_sup(g, l));
    EXPECT_TRUE(validate_regular(eff.knots()).valid());
    for (int i = 0; i <= 400; ++i) {
      const double a = i / 400.0;
      EXPECT_NEAR(eff(a), clipped(g, a, Side::right, c), 1e-12);
    }
    // Bounded by both G and L, on both sides of every knot.
    for (double a : merged_alphas(g, l)) {
      for (Side s : {Side::left, Side::right}) {
        if (a == 0.0 && s == Side::left) continue;
        EXPECT_LE(eff.evaluate(a, s), g.evaluate(a, s) + 1e-12);
        EXPECT_LE(eff.evaluate(a, s), l.evaluate(a, s) + 1e-12);
      }
    }
    EXPECT_TRUE(equivalent(effective_crdf(eff, l), eff, 1e-12)) << "idempotence, trial " << t;
  }
}

TEST(SampleGrid, Examples) {
  // Piecewise-linear interpolant of alpha^2; exact on the quarter grid.
  const CumulativeFunction square(
      {{0, 0, 0}, {0.25, 0.0625, 0.0625}, {0.5, 0.25, 0.25}, {0.75, 0.5625, 0.5625}, {1, 1, 1}});
  const auto sq = sample_grid(square, 2);
  EXPECT_EQ(std::vector<double>(sq.levels().begin(), sq.levels().end()),
            (std::vector<double>{0, 0.25, 1}));
  const auto line = sample_grid(CumulativeFunction::line(1.0), 4);
  EXPECT_EQ(std::vector<double>(line.levels().begin(), line.levels().end()),
            (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
  const auto step = sample_grid(CumulativeFunction::step(0.5, 1.0), 2);
  EXPECT_EQ(std::vector<double>(step.levels().begin(), step.levels().end()),
            (std::vector<double>{0, 1, 1}));
  EXPECT_THROW(sample_grid(CumulativeFunction::line(1.0), 0), InvalidInput);
}

TEST(SampleGrid, LevelsMatchAndStayBelowFunction) {
  Rng rng(15);
  for (int t = 0; t < 100; ++t) {
    const auto f = testing::random_rate_function(rng);
    const std::size_t k = testing::pick(rng, 1, 12);
    const auto s = sample_grid(f, k);
    const auto as_function = s.to_cumulative();
    EXPECT_TRUE(validate_regular(as_function.knots()).valid());
    for (std::size_t j = 0; j <= k; ++j) {
      const double a = static_cast<double>(j) / static_cast<double>(k);
      EXPECT_EQ(s.levels()[j], f(a));
      EXPECT_EQ(as_function(a), f(a));
    }
    for (int i = 0; i <= 100; ++i) EXPECT_LE(s(i / 100.0), f(i / 100.0));
  }
}

TEST(StepFunction, RejectsMalformedLevels) {
  EXPECT_THROW(StepFunction(0, {0}), InvalidInput);
  EXPECT_THROW(StepFunction(2, {0, 1}), InvalidInput);
  EXPECT_THROW(StepFunction(2, {0.1, 1, 1}), InvalidInput);
  EXPECT_THROW(StepFunction(2, {0, 1, 0.5}), InvalidInput);
}

}  // namespace
}  // namespace seqrate
