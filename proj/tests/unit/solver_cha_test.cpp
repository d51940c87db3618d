#include <gtest/gtest.h>

#include <numbers>

#include "relsha/angles.hpp"
#include "relsha/evaluation.hpp"
#include "relsha/solver_cha.hpp"
#include "support/expect_error.hpp"
#include "support/oracles.hpp"

using namespace relsha;

namespace {

struct Fixture {
  const ConstituentCatalog& catalog = oracle::standard_catalog();
  GaugeHarmonics a = load_gauge_harmonics(oracle::data_path("reference_a.csv"), catalog);
  GaugeHarmonics b = load_gauge_harmonics(oracle::data_path("reference_b.csv"), catalog);
  std::vector<double> times = oracle::regular_times(0.0, 1.0, 24 * 60);

  WaterLevelSeries series_at(double w) const {
    auto s = interpolate_harmonics(a.harmonics, b.harmonics, w);
    s.mean = 0.4;
    s.trend = -2e-5;
    return oracle::synthesize_series(s, catalog, times);
  }
};

}  // namespace

TEST(ChaInterpolate, LinearAmplitudesShortArcPhases) {
  auto a = HarmonicSolution::zeros(2);
  auto b = HarmonicSolution::zeros(2);
  a.amplitudes << 1.0, 2.0;
  b.amplitudes << 3.0, 0.0;
  a.phases << deg_to_rad(350.0), deg_to_rad(10.0);
  b.phases << deg_to_rad(20.0), deg_to_rad(300.0);
  const auto mid = interpolate_harmonics(a, b, 0.5);
  EXPECT_NEAR(mid.amplitudes[0], 2.0, 1e-15);
  EXPECT_NEAR(mid.amplitudes[1], 1.0, 1e-15);
  EXPECT_NEAR(mid.phases[0], deg_to_rad(5.0), 1e-12);
  EXPECT_NEAR(mid.phases[1], deg_to_rad(335.0), 1e-12);
  EXPECT_EQ(mid.mean, 0.0);
}

TEST(ChaInterpolate, HalfTurnGoesTowardIncreasingAngle) {
  auto a = HarmonicSolution::zeros(1);
  auto b = HarmonicSolution::zeros(1);
  a.amplitudes << 1.0;
  b.amplitudes << 1.0;
  a.phases << deg_to_rad(90.0);
  b.phases << deg_to_rad(270.0);
  EXPECT_NEAR(interpolate_harmonics(a, b, 0.5).phases[0], std::numbers::pi, 1e-12);
  EXPECT_NEAR(interpolate_harmonics(b, a, 0.5).phases[0], 0.0, 1e-12);
}

TEST(Cha, FirstGaugeEndpoint) {
  const Fixture f;
  const auto fit = cha_fit(f.series_at(0.0), f.a, f.b, f.catalog);
  EXPECT_EQ(fit.weight, 0.0);
  EXPECT_LT((fit.solution.amplitudes - f.a.harmonics.amplitudes).lpNorm<Eigen::Infinity>(), 1e-12);
  EXPECT_NEAR(fit.solution.mean, 0.4, 1e-9);
  EXPECT_NEAR(fit.solution.trend, -2e-5, 1e-12);
  EXPECT_TRUE(fit.identifiable);
}

TEST(Cha, SecondGaugeEndpoint) {
  const Fixture f;
  const auto fit = cha_fit(f.series_at(1.0), f.a, f.b, f.catalog);
  EXPECT_EQ(fit.weight, 1.0);
}

TEST(Cha, Midpoint) {
  const Fixture f;
  const auto fit = cha_fit(f.series_at(0.5), f.a, f.b, f.catalog);
  EXPECT_NEAR(fit.weight, 0.5, 0.002);
}

TEST(Cha, OffGridWeightIsRefined) {
  const Fixture f;
  const auto fit = cha_fit(f.series_at(0.3137), f.a, f.b, f.catalog);
  EXPECT_NEAR(fit.weight, 0.3137, 2e-4);
}

TEST(Cha, ObjectiveNoWorseThanEndpoints) {
  const Fixture f;
  auto series = f.series_at(0.62);
  const auto noisy = apply_noise(series, 0.05, 4);
  const auto fit = cha_fit(noisy, f.a, f.b, f.catalog);
  ChaOptions coarse;
  coarse.grid_step = 1.0;
  const auto endpoints = cha_fit(noisy, f.a, f.b, f.catalog, coarse);
  EXPECT_LE(fit.objective, endpoints.objective);
}

TEST(Cha, SwapMirrorsWeight) {
  const Fixture f;
  const auto series = apply_noise(f.series_at(0.27), 0.02, 9);
  const auto ab = cha_fit(series, f.a, f.b, f.catalog);
  const auto ba = cha_fit(series, f.b, f.a, f.catalog);
  EXPECT_NEAR(ab.weight, 1.0 - ba.weight, 0.001);
  EXPECT_LT((ab.solution.amplitudes - ba.solution.amplitudes).lpNorm<Eigen::Infinity>(), 1e-3);
}

TEST(Cha, IdenticalReferencesAreNotIdentifiable) {
  const Fixture f;
  const auto fit = cha_fit(f.series_at(0.0), f.a, f.a, f.catalog);
  EXPECT_FALSE(fit.identifiable);
  EXPECT_LT((fit.solution.amplitudes - f.a.harmonics.amplitudes).lpNorm<Eigen::Infinity>(), 1e-15);
}

TEST(Cha, MisalignedReferences) {
  const Fixture f;
  GaugeHarmonics short_ref{"short", HarmonicSolution::zeros(5)};
  EXPECT_RELSHA_ERROR(cha_fit(f.series_at(0.0), f.a, short_ref, f.catalog), Errc::alignment_error);
}
