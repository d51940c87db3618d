#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "relsha/constituents.hpp"
#include "relsha/series.hpp"
#include "relsha/solver_cha.hpp"

namespace relsha {

// ISO-8601 UTC: `YYYY-MM-DD[T| ]hh:mm[:ss[.fff]][Z|+hh:mm|-hh:mm]`.
Timestamp parse_timestamp(std::string_view text);
// `YYYY-MM-DDThh:mm:ss[.fff]Z`; milliseconds only when non-zero.
std::string format_timestamp(Timestamp t);

double hours_between(Timestamp from, Timestamp to) noexcept;
Timestamp add_hours(Timestamp t, double hours) noexcept;

struct LoadReport {
  std::size_t rows = 0;  // data rows seen
  std::size_t kept = 0;
  std::vector<std::string> warnings;
};

// `timestamp_iso8601, height_m` with a header row. Rows with an empty or
// non-finite height are dropped with a warning; rows are sorted by time and a
// repeated timestamp keeps its first occurrence. Times are hours since the
// first kept sample, which becomes the epoch.
WaterLevelSeries parse_water_levels(std::istream& in, LoadReport* report = nullptr);
WaterLevelSeries load_water_levels(const std::filesystem::path& path, LoadReport* report = nullptr);
void write_water_levels(std::ostream& out, const WaterLevelSeries& series);

struct AltimetrySample {
  long long cycle = 0;
  Timestamp time{};
  double ssh = 0.0;  // m
  int flag = 0;      // 0 = good
};

struct AltimetrySeries {
  std::string pass_id;
  std::vector<AltimetrySample> samples;  // file order, times non-decreasing
};

enum class CycleReduction { median, mean, nearest_midpoint };

// `cycle, timestamp_iso8601, ssh_m, flag` with a header row.
AltimetrySeries parse_altimetry(std::istream& in, std::string pass_id = {}, LoadReport* report = nullptr);
AltimetrySeries load_altimetry(const std::filesystem::path& path, LoadReport* report = nullptr);

// One sample per cycle with at least one good-flag sample: height reduced by
// `reduction`, time the mean of the cycle's good sample times. Cycles without
// good samples are absent.
WaterLevelSeries to_series(const AltimetrySeries& altimetry, CycleReduction reduction = CycleReduction::median);

/// Harmonics/solution file contents: rows `constituent_name, amplitude_m[, phase_deg]`
/// plus `# key: value` metadata lines.
struct HarmonicsFile {
  HarmonicSolution solution;  // phases in radians
  bool has_phases = false;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> warnings;

  [[nodiscard]] const std::string* find_metadata(std::string_view key) const;
};

// Constituents absent from the file get amplitude 0 and phase 0 with a
// warning; names not in the catalog are rejected. `mean_m` and
// `trend_m_per_hour` metadata populate the solution's mean and trend.
HarmonicsFile parse_harmonics(std::istream& in, const ConstituentCatalog& catalog);
HarmonicsFile load_harmonics(const std::filesystem::path& path, const ConstituentCatalog& catalog);
GaugeHarmonics load_gauge_harmonics(const std::filesystem::path& path, const ConstituentCatalog& catalog);

// Metadata lines first (mean_m and trend_m_per_hour are always written), then
// the header and one row per catalog constituent. 9 significant digits.
void write_solution(std::ostream& out, const HarmonicSolution& solution, const ConstituentCatalog& catalog,
                    const std::vector<std::pair<std::string, std::string>>& metadata = {});

}  // namespace relsha
