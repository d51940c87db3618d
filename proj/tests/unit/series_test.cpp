#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "relsha/series.hpp"
#include "support/expect_error.hpp"
#include "support/oracles.hpp"

using namespace relsha;

namespace {

WaterLevelSeries from_function(std::vector<double> times, const std::function<double(double)>& f) {
  std::vector<double> h;
  for (double t : times) h.push_back(f(t));
  return WaterLevelSeries(std::move(times), std::move(h));
}

}  // namespace

TEST(Series, RejectsNonIncreasingTimes) {
  EXPECT_RELSHA_ERROR(WaterLevelSeries({0.0, 1.0, 1.0}, {1, 2, 3}), Errc::invalid_value);
  EXPECT_RELSHA_ERROR(WaterLevelSeries({0.0, 2.0, 1.0}, {1, 2, 3}), Errc::invalid_value);
}

TEST(Series, RejectsLengthMismatchAndNonFinite) {
  EXPECT_RELSHA_ERROR(WaterLevelSeries({0.0, 1.0}, {1.0}), Errc::dimension_mismatch);
  EXPECT_RELSHA_ERROR(WaterLevelSeries({0.0, 1.0}, {1.0, NAN}), Errc::invalid_value);
}

TEST(Series, NativeSpacingIsMedianGap) {
  const WaterLevelSeries s({0.0, 0.1, 0.2, 5.0, 5.1}, {0, 0, 0, 0, 0});
  EXPECT_NEAR(s.native_spacing(), 0.1, 1e-12);
}

TEST(Detrend, ConstantSeries) {
  const auto s = from_function(oracle::regular_times(0.0, 1.0, 50), [](double) { return 1.5; });
  const auto d = detrend(s);
  EXPECT_NEAR(d.mean, 1.5, 1e-14);
  EXPECT_NEAR(d.trend, 0.0, 1e-15);
  for (double r : d.residual.heights()) EXPECT_NEAR(r, 0.0, 1e-14);
}

// The reported mean is the intercept at t = 0, the convention of the model
// h = m + a t + ...; the sample average of the data is mean + trend * mean(t).
TEST(Detrend, NoiselessLine) {
  const auto s = from_function(oracle::regular_times(0.0, 1.0, 101), [](double t) { return 2.0 + 0.001 * t; });
  const auto d = detrend(s);
  EXPECT_NEAR(d.trend, 0.001, 1e-14);
  EXPECT_NEAR(d.mean, 2.0, 1e-12);
  EXPECT_NEAR(d.mean + d.trend * 50.0, 2.0 + 0.001 * 50.0, 1e-12);
  const double sample_mean = std::accumulate(s.heights().begin(), s.heights().end(), 0.0) / 101.0;
  EXPECT_NEAR(sample_mean, 2.0 + 0.001 * 50.0, 1e-12);
  for (double r : d.residual.heights()) EXPECT_NEAR(r, 0.0, 1e-12);
}

// Cosine sampled at the midpoints of N equal bins over whole periods: the sum
// of cos and of (t - tbar) cos both vanish exactly.
TEST(Detrend, WholePeriodSinusoidHasNoMeanOrTrend) {
  const double period = 12.0;
  const int periods = 5;
  const int per_period = 48;
  const double dt = period / per_period;
  const auto times = oracle::regular_times(0.5 * dt, dt, periods * per_period);
  const auto s = from_function(times, [&](double t) { return std::cos(2.0 * std::numbers::pi * t / period); });
  const auto d = detrend(s);
  EXPECT_NEAR(d.mean, 0.0, 1e-10);
  EXPECT_NEAR(d.trend, 0.0, 1e-10);
}

TEST(Detrend, TooFewSamples) {
  EXPECT_RELSHA_ERROR(detrend(WaterLevelSeries({0.0}, {1.0})), Errc::insufficient_data);
}

TEST(Synthesize, ZeroAmplitudesGiveMean) {
  const auto& catalog = oracle::standard_catalog();
  auto s = HarmonicSolution::zeros(catalog.size());
  s.mean = 1.0;
  for (double h : synthesize(s, oracle::regular_times(0.0, 0.7, 30), catalog)) EXPECT_DOUBLE_EQ(h, 1.0);
}

TEST(Synthesize, SingleConstituentAtOrigin) {
  const ConstituentCatalog catalog({{"M2", 0.5058680493}});
  auto s = HarmonicSolution::zeros(1);
  s.mean = 0.3;
  s.trend = 0.01;
  s.amplitudes[0] = 1.0;
  const auto h = synthesize(s, std::vector<double>{0.0, 2.0}, catalog);
  EXPECT_DOUBLE_EQ(h[0], 1.3);
  EXPECT_NEAR(h[1], 0.3 + 0.02 + std::cos(0.5058680493 * 2.0), 1e-15);
}

TEST(Synthesize, TwoConstituentsQuarterPhase) {
  const ConstituentCatalog catalog({{"A", 0.5}, {"B", 0.7}});
  auto s = HarmonicSolution::zeros(2);
  s.mean = 0.4;
  s.amplitudes << 1.0, 0.5;
  s.phases << 0.0, std::numbers::pi / 2.0;
  const auto h = synthesize(s, std::vector<double>{0.0}, catalog);
  EXPECT_NEAR(h[0], 0.4 + 1.0, 1e-15);
}

TEST(Synthesize, NodalCorrectionsScaleAndShift) {
  const ConstituentCatalog catalog({{"A", 0.5, 1.2, 0.3}});
  auto s = HarmonicSolution::zeros(1);
  s.amplitudes[0] = 0.8;
  s.phases[0] = 0.3;
  const auto h = synthesize(s, std::vector<double>{1.5}, catalog);
  EXPECT_NEAR(h[0], 0.8 * 1.2 * std::cos(0.5 * 1.5 + 0.3), 1e-15);
}

TEST(Synthesize, LengthMismatch) {
  const auto& catalog = oracle::standard_catalog();
  EXPECT_RELSHA_ERROR(synthesize(HarmonicSolution::zeros(3), std::vector<double>{0.0}, catalog),
                      Errc::dimension_mismatch);
}

TEST(Resample, TwelveMinutesFromSixKeepsEveryOther) {
  const auto base = from_function(oracle::regular_times(0.0, 0.1, 200), [](double t) { return std::sin(t); });
  // Record as long as the data: no room for a random offset.
  const auto out = resample(base, SamplingPlan{0.2, base.span_hours(), 9});
  ASSERT_EQ(out.size(), 100u);
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_NEAR(out.times()[i], base.times()[2 * i], 1e-12);
    EXPECT_EQ(out.heights()[i], base.heights()[2 * i]);
  }
}

TEST(Resample, JasonRevisitOverOneYear) {
  const double year = 365.25 * 24.0;
  const auto base = from_function(oracle::regular_times(0.0, 0.1, static_cast<std::size_t>(year / 0.1) + 1),
                                  [](double) { return 0.0; });
  const auto out = resample(base, SamplingPlan{9.9 * 24.0, year, 1});
  EXPECT_EQ(out.size(), static_cast<std::size_t>(std::floor(365.25 / 9.9)) + 1);
  EXPECT_NEAR(out.size(), 37.0, 1.0);
}

TEST(Resample, SameSeedSameOutput) {
  const auto base = from_function(oracle::regular_times(0.0, 0.1, 5000), [](double t) { return std::cos(t); });
  const SamplingPlan plan{3.0, 200.0, 42};
  const auto a = resample(base, plan);
  const auto b = resample(base, plan);
  EXPECT_EQ(a.times(), b.times());
  EXPECT_EQ(a.heights(), b.heights());
  const auto c = resample(base, SamplingPlan{3.0, 200.0, 43});
  EXPECT_NE(a.times().front(), c.times().front());
}

TEST(Resample, OutputWithinOneRecord) {
  const auto base = from_function(oracle::regular_times(0.0, 0.1, 5000), [](double) { return 0.0; });
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto out = resample(base, SamplingPlan{2.5, 100.0, seed});
    EXPECT_LE(out.span_hours(), 100.0 + 1e-9);
    EXPECT_GE(out.times().front(), 0.0);
    EXPECT_LE(out.times().back(), base.times().back());
  }
}

TEST(Resample, SkipsTargetsInGaps) {
  std::vector<double> t = oracle::regular_times(0.0, 0.1, 101);
  const auto tail = oracle::regular_times(50.0, 0.1, 101);
  t.insert(t.end(), tail.begin(), tail.end());
  const auto base = from_function(t, [](double) { return 1.0; });
  const auto out = resample(base, SamplingPlan{1.0, base.span_hours(), 0});
  EXPECT_EQ(out.size(), 11u + 11u);
}

TEST(Resample, IntervalBelowNativeSpacingRejected) {
  const auto base = from_function(oracle::regular_times(0.0, 1.0, 10), [](double) { return 0.0; });
  EXPECT_RELSHA_ERROR(resample(base, SamplingPlan{0.5, 5.0, 0}), Errc::invalid_value);
}

TEST(Resample, EmptySelection) {
  EXPECT_RELSHA_ERROR(resample(WaterLevelSeries(), SamplingPlan{1.0, 1.0, 0}), Errc::empty_selection);
  // Two short bursts 100 h apart: a window starting inside the gap sees nothing.
  const WaterLevelSeries bursts({0.0, 0.1, 0.2, 100.0, 100.1, 100.2}, {0, 0, 0, 0, 0, 0});
  int misses = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    try {
      const auto out = resample(bursts, SamplingPlan{20.0, 20.0, seed});
      EXPECT_GE(out.size(), 1u);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::empty_selection);
      ++misses;
    }
  }
  EXPECT_GT(misses, 0);
}

TEST(Noise, ZeroSigmaIsIdentity) {
  const auto base = from_function(oracle::regular_times(0.0, 0.5, 100), [](double t) { return std::sin(t); });
  const auto out = apply_noise(base, 0.0, 3);
  EXPECT_EQ(out.heights(), base.heights());
}

TEST(Noise, SampleStandardDeviation) {
  const auto base = from_function(oracle::regular_times(0.0, 0.1, 20000), [](double) { return 0.0; });
  const auto out = apply_noise(base, 0.02, 3);
  double sum = 0.0, sum2 = 0.0;
  for (double h : out.heights()) {
    sum += h;
    sum2 += h * h;
  }
  const double n = static_cast<double>(out.size());
  const double sd = std::sqrt((sum2 - sum * sum / n) / (n - 1.0));
  EXPECT_NEAR(sd, 0.02, 0.002);
}

TEST(Noise, SeedsDiffer) {
  const auto base = from_function(oracle::regular_times(0.0, 0.1, 100), [](double) { return 0.0; });
  EXPECT_NE(apply_noise(base, 0.02, 1).heights(), apply_noise(base, 0.02, 2).heights());
  EXPECT_EQ(apply_noise(base, 0.02, 1).heights(), apply_noise(base, 0.02, 1).heights());
}

TEST(Noise, NegativeSigmaRejected) {
  const auto base = from_function(oracle::regular_times(0.0, 0.1, 10), [](double) { return 0.0; });
  EXPECT_RELSHA_ERROR(apply_noise(base, -0.1, 1), Errc::invalid_value);
}

TEST(Plan, Validation) {
  EXPECT_RELSHA_ERROR((SamplingPlan{0.0, 10.0, 0}.validate()), Errc::invalid_value);
  EXPECT_RELSHA_ERROR((SamplingPlan{1.0, -1.0, 0}.validate()), Errc::invalid_value);
  EXPECT_NO_THROW((SamplingPlan{1.0, 10.0, 0}.validate()));
}

TEST(Solution, ValidateChecksShapeAndSign) {
  auto s = HarmonicSolution::zeros(3);
  EXPECT_NO_THROW(s.validate(3));
  EXPECT_RELSHA_ERROR(s.validate(4), Errc::dimension_mismatch);
  s.amplitudes[1] = -0.1;
  EXPECT_RELSHA_ERROR(s.validate(3), Errc::invalid_value);
}

TEST(Uniform, UnitInterval) {
  EXPECT_EQ(uniform_unit(0), 0.0);
  EXPECT_LT(uniform_unit(~std::uint64_t{0}), 1.0);
}
