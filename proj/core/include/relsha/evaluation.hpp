#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "relsha/constituents.hpp"
#include "relsha/design.hpp"
#include "relsha/series.hpp"
#include "relsha/solver_cha.hpp"
#include "relsha/solver_relsha.hpp"

namespace relsha {

/// Relative RMS amplitude error in percent:
///   sqrt(mean_k (A_k - A_k,true)^2) / sum_k A_k,true * 100.
/// The denominator is taken over the truth so every method is measured
/// against the same yardstick.
double rrmse(const Eigen::VectorXd& estimated, const Eigen::VectorXd& truth);

enum class Method { ha, cha, relsha };

std::string_view to_string(Method method) noexcept;
std::optional<Method> parse_method(std::string_view text) noexcept;

/// Water levels to resample plus the amplitudes they are scored against.
struct TruthSource {
  WaterLevelSeries base;
  Eigen::VectorXd truth_amplitudes;
};

// Synthesises `truth` on a regular grid (default 6 min) covering span_hours.
TruthSource synthetic_truth(const HarmonicSolution& truth, const ConstituentCatalog& catalog, double span_hours,
                            double spacing_hours = 0.1);

struct GridReferences {
  std::optional<GaugeHarmonics> cha_first;
  std::optional<GaugeHarmonics> cha_second;
  std::optional<Eigen::VectorXd> relsha_amplitudes;
};

struct GridSpec {
  std::vector<double> intervals;  // hours
  std::vector<double> lengths;    // hours
  std::vector<Method> methods;
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;  // meters, added after resampling
  unsigned threads = 0;      // 0: hardware concurrency
  RelshaConfig relsha;
  ChaOptions cha;
  TrendHandling ha_trend = TrendHandling::joint;
};

// Log-spaced 12 min .. 11 d (40 points) plus 6 min, 9.9 d and 11 d, sorted.
std::vector<double> default_intervals();
// 30 .. 366 days, 20 points, in hours.
std::vector<double> default_lengths();

inline constexpr double kSixMinutes = 0.1;
inline constexpr double kJasonRevisit = 9.9 * 24.0;
inline constexpr double kSwotRevisit = 11.0 * 24.0;

// Fixed mixing of (base seed, interval index, length index).
std::uint64_t cell_seed(std::uint64_t base, std::size_t interval_index, std::size_t length_index) noexcept;

struct GridCell {
  std::size_t interval_index = 0;
  std::size_t length_index = 0;
  Method method = Method::ha;
  std::size_t sample_count = 0;
  Regime regime = Regime::underdetermined;
  std::optional<double> rrmse;  // empty when the cell failed
  std::string error;
  bool converged = true;  // ReLSHA only
};

struct ErrorGrid {
  std::vector<double> intervals;
  std::vector<double> lengths;
  std::vector<Method> methods;
  // Ordered by interval, then length, then method (in `methods` order).
  std::vector<GridCell> cells;

  [[nodiscard]] const GridCell* find(std::size_t interval_index, std::size_t length_index, Method method) const;
  [[nodiscard]] std::size_t missing_count() const;
};

// Evaluates one (interval, length) lattice point for every requested method.
std::vector<GridCell> evaluate_cell(const TruthSource& source, const GridSpec& spec, const GridReferences& refs,
                                    const ConstituentCatalog& catalog, std::size_t interval_index,
                                    std::size_t length_index);

// Cells are evaluated concurrently; the result does not depend on thread count
// or evaluation order.
ErrorGrid run_grid(const TruthSource& source, const GridSpec& spec, const GridReferences& refs,
                   const ConstituentCatalog& catalog);

struct ErrorCurve {
  Method method = Method::ha;
  double interval = 0.0;
  std::vector<double> lengths;
  std::vector<std::size_t> sample_counts;
  std::vector<Regime> regimes;
  std::vector<std::optional<double>> rrmse;
};

// One curve per method along the length axis at a fixed interval. Intervals
// match within a relative 1e-9; throws not_found otherwise.
std::vector<ErrorCurve> interval_slice(const ErrorGrid& grid, double interval);

// Columns: interval_hours, length_hours, method, sample_count, regime, rrmse_percent.
void write_grid(std::ostream& out, const ErrorGrid& grid);
void write_curves(std::ostream& out, const std::vector<ErrorCurve>& curves);

}  // namespace relsha
