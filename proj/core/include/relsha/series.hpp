#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "relsha/constituents.hpp"

namespace relsha {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// Water-level samples at (possibly irregular) times, in hours since `epoch`.
/// Times are strictly increasing and heights finite; construction enforces it.
class WaterLevelSeries {
 public:
  WaterLevelSeries() = default;
  WaterLevelSeries(std::vector<double> times, std::vector<double> heights, Timestamp epoch = {});

  [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
  [[nodiscard]] bool empty() const noexcept { return times_.empty(); }
  [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }
  [[nodiscard]] const std::vector<double>& heights() const noexcept { return heights_; }
  [[nodiscard]] Timestamp epoch() const noexcept { return epoch_; }

  [[nodiscard]] double span_hours() const noexcept { return empty() ? 0.0 : times_.back() - times_.front(); }

  // Median spacing between consecutive samples; 0 for a single sample.
  [[nodiscard]] double native_spacing() const;

  [[nodiscard]] Eigen::Map<const Eigen::VectorXd> times_vector() const;
  [[nodiscard]] Eigen::Map<const Eigen::VectorXd> heights_vector() const;

 private:
  std::vector<double> times_;
  std::vector<double> heights_;
  Timestamp epoch_{};
};

/// Mean, linear trend and per-constituent amplitude/phase. Phases are the
/// combined angle phi_k + u_k in radians, wrapped to [0, 2pi).
struct HarmonicSolution {
  double mean = 0.0;   // m
  double trend = 0.0;  // a, m/h
  Eigen::VectorXd amplitudes;
  Eigen::VectorXd phases;

  static HarmonicSolution zeros(std::size_t n);

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(amplitudes.size()); }

  // Throws dimension_mismatch / invalid_value when the invariants do not hold
  // for a catalog of n constituents.
  void validate(std::size_t n) const;
};

struct SamplingPlan {
  double interval = 0.0;       // hours between samples
  double record_length = 0.0;  // hours
  std::uint64_t seed = 0;

  void validate() const;
};

struct DetrendResult {
  WaterLevelSeries residual;
  double mean = 0.0;   // intercept at t = 0
  double trend = 0.0;  // slope, m/h
};

// Least-squares line fit h ~ mean + trend * t over the samples.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
};
LineFit fit_line(std::span<const double> times, std::span<const double> values);

DetrendResult detrend(const WaterLevelSeries& series);

// h(t) = m + a t + sum_k A_k f_k cos(omega_k t + theta_k).
std::vector<double> synthesize(const HarmonicSolution& solution, std::span<const double> times,
                               const ConstituentCatalog& catalog);

// Picks the nearest existing sample (within half the native spacing) to each
// target start + j * interval, j = 0..floor(record_length / interval). The
// start is drawn uniformly from the window that fits the whole record, or is
// the first sample when the record is longer than the data.
WaterLevelSeries resample(const WaterLevelSeries& series, const SamplingPlan& plan);

WaterLevelSeries apply_noise(const WaterLevelSeries& series, double sigma, std::uint64_t seed);

// Uniform real in [0, 1) from the top 53 bits; stable across standard libraries.
double uniform_unit(std::uint64_t bits) noexcept;

}  // namespace relsha
