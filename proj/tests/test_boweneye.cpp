#include <gtest/gtest.h>

#include <cmath>

#include "ergolab/boweneye.hpp"
#include "ergolab/error.hpp"

using namespace ergolab;

TEST(BowenEye, ParamsValidation) {
  const EyeParams p{2.0, 6.0, 3.0, 1.0};
  EXPECT_DOUBLE_EQ(p.lambda(), 2.0);
  EXPECT_DOUBLE_EQ(p.sigma(), 0.5);
  EXPECT_THROW(p.validate(), Error);
  EXPECT_NO_THROW(EyeParams::from_ratios(2.0, 2.0));
  EXPECT_THROW(EyeParams::from_ratios(1.0, 1.0), Error);
  EXPECT_THROW(EyeParams::from_ratios(-2.0, 2.0), Error);
  EXPECT_THROW(EyeParams::from_ratios(NAN, 2.0), Error);
}

TEST(BowenEye, SojournDurationsGrowGeometrically) {
  const auto trace = sojourn_sequence(EyeParams::from_ratios(2.0, 2.0), 1.0, 5);
  ASSERT_EQ(trace.entries.size(), 10u);
  EXPECT_EQ(trace.cycles(), 5u);
  double expected = 1.0;
  double clock = 0.0;
  for (std::size_t i = 0; i < trace.entries.size(); ++i) {
    const auto& s = trace.entries[i];
    EXPECT_EQ(s.saddle, i % 2 == 0 ? Saddle::kA : Saddle::kB);
    EXPECT_EQ(s.cycle, i / 2 + 1);
    EXPECT_DOUBLE_EQ(s.duration, expected);
    EXPECT_DOUBLE_EQ(s.start, clock);
    clock += expected;
    expected *= 2.0;
  }
  EXPECT_DOUBLE_EQ(trace.total_time(), 1023.0);
  EXPECT_EQ(saddle_name(Saddle::kB), 'B');
}

TEST(BowenEye, SojournErrors) {
  const auto p = EyeParams::from_ratios(2.0, 2.0);
  EXPECT_THROW(sojourn_sequence(p, 0.0, 3), Error);
  EXPECT_THROW(sojourn_sequence(p, 1.0, 0), Error);
  EXPECT_THROW(sojourn_sequence(p, 1.0, 3, -1.0), Error);
  EXPECT_THROW(sojourn_sequence(EyeParams::from_ratios(1e6, 1e6), 1.0, 100), Error);
  const auto trace = sojourn_sequence(p, 1.0, 3);
  try {
    time_average_weights(trace, trace.total_time() + 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kOutOfRange);
  }
  EXPECT_THROW(time_average_weights(trace, 0.0), Error);
}

TEST(BowenEye, WeightsSumToOneWithoutTransit) {
  const auto trace = sojourn_sequence(EyeParams::from_ratios(3.0, 1.5), 0.7, 6);
  for (double t = 0.05; t < trace.total_time(); t *= 1.37) {
    const Weights w = time_average_weights(trace, t);
    EXPECT_NEAR(w.a + w.b, 1.0, 1e-12);
  }
  EXPECT_DOUBLE_EQ(time_average_weights(trace, 0.5).a, 1.0);
}

TEST(BowenEye, TransitTimeIsExcluded) {
  const auto trace = sojourn_sequence(EyeParams::from_ratios(2.0, 2.0), 1.0, 4, 0.5);
  // A1 = [0, 1], B1 = [1.5, 3.5], A2 = [4, 8].
  const Weights w = time_average_weights(trace, 5.0);
  EXPECT_DOUBLE_EQ(w.a, 2.0 / 5.0);
  EXPECT_DOUBLE_EQ(w.b, 2.0 / 5.0);
  const Weights mid = time_average_weights(trace, 1.25);
  EXPECT_DOUBLE_EQ(mid.a, 1.0 / 1.25);
  EXPECT_DOUBLE_EQ(mid.b, 0.0);
}

TEST(BowenEye, Endpoints) {
  const auto sym = accumulation_endpoints(EyeParams::from_ratios(2.0, 2.0));
  EXPECT_DOUBLE_EQ(sym.mu1.a, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(sym.mu2.a, 1.0 / 3.0);
  const auto skew = accumulation_endpoints(EyeParams::from_ratios(3.0, 0.5));
  EXPECT_DOUBLE_EQ(skew.mu1.a, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(skew.mu2.a, 0.25);
  EXPECT_DOUBLE_EQ(skew.mu1.a + skew.mu1.b, 1.0);
}

TEST(BowenEye, CycleExtremesConverge) {
  const auto trace = sojourn_sequence(EyeParams::from_ratios(2.0, 2.0), 1.0, 20);
  const auto ext = cycle_extremes(trace);
  ASSERT_EQ(ext.size(), 20u);
  EXPECT_NEAR(ext.back().max_a, 0.666666666667273, 1e-12);
  EXPECT_NEAR(ext.back().min_a, 1.0 / 3.0, 1e-15);
  for (std::size_t k = 1; k < ext.size(); ++k) {
    EXPECT_LE(std::abs(ext[k].max_a - 2.0 / 3.0), std::abs(ext[k - 1].max_a - 2.0 / 3.0) + 1e-15);
  }
}

TEST(BowenEye, SweepIsMonotoneWithinSojourns) {
  const auto trace = sojourn_sequence(EyeParams::from_ratios(2.5, 1.8), 1.0, 8);
  for (const auto& s : trace.entries) {
    double prev = time_average_weights(trace, s.start + s.duration / 64.0).a;
    for (int j = 2; j <= 64; ++j) {
      const double cur = time_average_weights(trace, s.start + s.duration * j / 64.0).a;
      if (s.saddle == Saddle::kA) {
        EXPECT_GE(cur, prev - 1e-15);
      } else {
        EXPECT_LE(cur, prev + 1e-15);
      }
      prev = cur;
    }
  }
}

TEST(BowenEye, CoverageOfSegment) {
  const auto p = EyeParams::from_ratios(2.0, 2.0);
  const auto report = segment_coverage_check(p, 1.0, 20);
  EXPECT_TRUE(report.all_pass);
  ASSERT_EQ(report.targets.size(), 50u);
  EXPECT_DOUBLE_EQ(report.targets.front().c, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(report.targets.back().c, 2.0 / 3.0);
  EXPECT_EQ(report.samples, 4u * 256u);

  CoverageOptions single;
  single.grid = 1;
  const auto one = segment_coverage_check(p, 1.0, 20, single);
  ASSERT_EQ(one.targets.size(), 1u);
  EXPECT_DOUBLE_EQ(one.targets[0].c, 2.0 / 3.0);
  EXPECT_TRUE(one.all_pass);

  CoverageOptions coarse;
  coarse.samples_per_sojourn = 1;
  coarse.eps = 1e-3;
  EXPECT_FALSE(segment_coverage_check(p, 1.0, 20, coarse).all_pass);

  CoverageOptions bad;
  bad.grid = 0;
  EXPECT_THROW(segment_coverage_check(p, 1.0, 20, bad), Error);
}

TEST(BowenEye, SingleCycleAndFirstSojourn) {
  const auto trace = sojourn_sequence(EyeParams::from_ratios(3.0, 0.5), 2.0, 1);
  ASSERT_EQ(trace.entries.size(), 2u);
  EXPECT_EQ(trace.entries[0].saddle, Saddle::kA);
  EXPECT_DOUBLE_EQ(trace.entries[0].duration, 2.0);
  EXPECT_DOUBLE_EQ(trace.entries[1].duration, 6.0);
  EXPECT_DOUBLE_EQ(time_average_weights(trace, 2.0).a, 1.0);
}

TEST(BowenEye, EndpointSymmetryAndLimits) {
  const auto e = accumulation_endpoints(EyeParams::from_ratios(1.7, 1.7));
  EXPECT_DOUBLE_EQ(e.mu1.a, e.mu2.b);
  EXPECT_DOUBLE_EQ(e.mu1.b, e.mu2.a);
  EXPECT_NEAR(accumulation_endpoints(EyeParams::from_ratios(2.0, 1e12)).mu1.a, 1.0, 1e-11);
}

TEST(BowenEye, ExtremesApproachEndpointsGeometrically) {
  const double lambda = 2.0, sigma = 2.0;
  const auto trace = sojourn_sequence(EyeParams::from_ratios(lambda, sigma), 1.0, 20);
  const auto ext = cycle_extremes(trace);
  const auto ends = accumulation_endpoints(EyeParams::from_ratios(lambda, sigma));
  const auto err = [&](std::size_t k) {
    return std::max(std::abs(ext[k - 1].max_a - ends.mu1.a), std::abs(ext[k - 1].min_a - ends.mu2.a));
  };
  const double c = err(5) * std::pow(lambda * sigma, 5.0);
  for (std::size_t k = 5; k <= 20; ++k) EXPECT_LE(err(k), 1.01 * c * std::pow(lambda * sigma, -double(k))) << k;
}

TEST(BowenEye, ZeroToleranceMissesGenerically) {
  CoverageOptions exact;
  exact.eps = 0.0;
  exact.grid = 7;
  EXPECT_FALSE(segment_coverage_check(EyeParams::from_ratios(2.0, 2.0), 1.0, 20, exact).all_pass);
}
