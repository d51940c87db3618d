#include "relsha/series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "relsha/angles.hpp"
#include "relsha/error.hpp"

namespace relsha {

WaterLevelSeries::WaterLevelSeries(std::vector<double> times, std::vector<double> heights, Timestamp epoch)
    : times_(std::move(times)), heights_(std::move(heights)), epoch_(epoch) {
  if (times_.size() != heights_.size())
    throw Error(Errc::dimension_mismatch, "series times and heights differ in length");
  if (times_.empty()) throw Error(Errc::insufficient_data, "series must contain at least one sample");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !std::isfinite(heights_[i]))
      throw Error(Errc::invalid_value, "series sample " + std::to_string(i) + " is not finite");
    if (i > 0 && !(times_[i] > times_[i - 1]))
      throw Error(Errc::invalid_value, "series times must be strictly increasing (sample " + std::to_string(i) + ")");
  }
}

double WaterLevelSeries::native_spacing() const {
  if (times_.size() < 2) return 0.0;
  std::vector<double> gaps(times_.size() - 1);
  for (std::size_t i = 1; i < times_.size(); ++i) gaps[i - 1] = times_[i] - times_[i - 1];
  const auto mid = gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2);
  std::nth_element(gaps.begin(), mid, gaps.end());
  return *mid;
}

Eigen::Map<const Eigen::VectorXd> WaterLevelSeries::times_vector() const {
  return {times_.data(), static_cast<Eigen::Index>(times_.size())};
}

Eigen::Map<const Eigen::VectorXd> WaterLevelSeries::heights_vector() const {
  return {heights_.data(), static_cast<Eigen::Index>(heights_.size())};
}

HarmonicSolution HarmonicSolution::zeros(std::size_t n) {
  HarmonicSolution s;
  s.amplitudes = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  s.phases = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  return s;
}

void HarmonicSolution::validate(std::size_t n) const {
  if (static_cast<std::size_t>(amplitudes.size()) != n || static_cast<std::size_t>(phases.size()) != n)
    throw Error(Errc::dimension_mismatch, "harmonic solution has " + std::to_string(amplitudes.size()) +
                                              " amplitudes / " + std::to_string(phases.size()) +
                                              " phases, catalog has " + std::to_string(n));
  for (Eigen::Index k = 0; k < amplitudes.size(); ++k) {
    if (!std::isfinite(amplitudes[k]) || amplitudes[k] < 0.0)
      throw Error(Errc::invalid_value, "amplitude " + std::to_string(k) + " must be finite and non-negative");
    if (!std::isfinite(phases[k])) throw Error(Errc::invalid_value, "phase " + std::to_string(k) + " is not finite");
  }
  if (!std::isfinite(mean) || !std::isfinite(trend)) throw Error(Errc::invalid_value, "mean/trend must be finite");
}

void SamplingPlan::validate() const {
  if (!(interval > 0.0) || !std::isfinite(interval))
    throw Error(Errc::invalid_value, "sampling interval must be positive");
  if (!(record_length >= interval) || !std::isfinite(record_length))
    throw Error(Errc::invalid_value, "record length must be at least one sampling interval");
}

LineFit fit_line(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size()) throw Error(Errc::dimension_mismatch, "line fit inputs differ in length");
  if (times.size() < 2) throw Error(Errc::insufficient_data, "line fit needs at least 2 samples");
  const auto m = static_cast<double>(times.size());
  double t_mean = 0.0;
  double v_mean = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    t_mean += times[i];
    v_mean += values[i];
  }
  t_mean /= m;
  v_mean /= m;
  double stt = 0.0;
  double stv = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double dt = times[i] - t_mean;
    stt += dt * dt;
    stv += dt * (values[i] - v_mean);
  }
  if (!(stt > 0.0)) throw Error(Errc::insufficient_data, "line fit needs at least two distinct times");
  LineFit fit;
  fit.slope = stv / stt;
  fit.intercept = v_mean - fit.slope * t_mean;
  return fit;
}

DetrendResult detrend(const WaterLevelSeries& series) {
  if (series.size() < 2) throw Error(Errc::insufficient_data, "detrend needs at least 2 samples");
  const auto& t = series.times();
  const auto& h = series.heights();
  const LineFit line = fit_line(t, h);

  // Residuals about the centred line keep the cancellation small when the
  // intercept is far from the data.
  const double t_mean = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
  const double h_mean = std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(h.size());
  std::vector<double> residual(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) residual[i] = (h[i] - h_mean) - line.slope * (t[i] - t_mean);

  return {WaterLevelSeries(t, std::move(residual), series.epoch()), line.intercept, line.slope};
}

std::vector<double> synthesize(const HarmonicSolution& solution, std::span<const double> times,
                               const ConstituentCatalog& catalog) {
  solution.validate(catalog.size());
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    double h = solution.mean + solution.trend * t;
    for (std::size_t k = 0; k < catalog.size(); ++k) {
      const auto ki = static_cast<Eigen::Index>(k);
      const double a = solution.amplitudes[ki];
      if (a == 0.0) continue;
      h += a * catalog[k].nodal_factor * std::cos(catalog[k].speed * t + solution.phases[ki]);
    }
    out[i] = h;
  }
  return out;
}

double uniform_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

WaterLevelSeries resample(const WaterLevelSeries& series, const SamplingPlan& plan) {
  plan.validate();
  if (series.empty()) throw Error(Errc::empty_selection, "cannot resample an empty series");

  const auto& t = series.times();
  const double native = series.native_spacing();
  if (native > 0.0 && plan.interval < native * (1.0 - 1e-9))
    throw Error(Errc::invalid_value, "sampling interval is shorter than the native spacing");

  std::mt19937_64 rng(plan.seed);
  const double window = series.span_hours() - plan.record_length;
  const double start = t.front() + (window > 0.0 ? uniform_unit(rng()) * window : 0.0);

  const double tolerance = 0.5 * native * (1.0 + 1e-9);
  const auto steps = static_cast<std::size_t>(std::floor(plan.record_length / plan.interval + 1e-9));

  std::vector<double> times;
  std::vector<double> heights;
  std::size_t last_pick = t.size();
  for (std::size_t j = 0; j <= steps; ++j) {
    const double target = start + static_cast<double>(j) * plan.interval;
    const auto upper = std::lower_bound(t.begin(), t.end(), target);
    std::size_t best = t.size();
    double best_gap = 0.0;
    if (upper != t.end()) {
      best = static_cast<std::size_t>(upper - t.begin());
      best_gap = *upper - target;
    }
    if (upper != t.begin()) {
      const auto lower = static_cast<std::size_t>(upper - t.begin()) - 1;
      const double gap = target - t[lower];
      // Ties go to the earlier sample.
      if (best == t.size() || gap <= best_gap) {
        best = lower;
        best_gap = gap;
      }
    }
    if (best == t.size() || best_gap > tolerance || best == last_pick) continue;
    last_pick = best;
    times.push_back(t[best]);
    heights.push_back(series.heights()[best]);
  }
  if (times.empty()) throw Error(Errc::empty_selection, "resampling window selected no samples");
  return {std::move(times), std::move(heights), series.epoch()};
}

WaterLevelSeries apply_noise(const WaterLevelSeries& series, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error(Errc::invalid_value, "noise sigma must be >= 0");
  if (sigma == 0.0) return series;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<double> heights = series.heights();
  for (auto& h : heights) h += noise(rng);
  return {series.times(), std::move(heights), series.epoch()};
}

}  // namespace relsha
