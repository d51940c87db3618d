#include "relsha/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

#include "relsha/error.hpp"
#include "relsha/format.hpp"
#include "relsha/solver_ha.hpp"

namespace relsha {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kNoiseStream = 0x6E6F697365ULL;

bool same_interval(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

void validate_spec(const GridSpec& spec, const GridReferences& refs, const ConstituentCatalog& catalog,
                   const TruthSource& source) {
  if (spec.intervals.empty() || spec.lengths.empty()) throw Error(Errc::invalid_value, "grid needs intervals and lengths");
  for (double v : spec.intervals)
    if (!(v > 0.0)) throw Error(Errc::invalid_value, "grid intervals must be positive");
  for (double v : spec.lengths)
    if (!(v > 0.0)) throw Error(Errc::invalid_value, "grid lengths must be positive");
  if (static_cast<std::size_t>(source.truth_amplitudes.size()) != catalog.size())
    throw Error(Errc::alignment_error, "truth amplitudes do not match the catalog");
  for (Method m : spec.methods) {
    if (m == Method::cha && (!refs.cha_first || !refs.cha_second))
      throw Error(Errc::missing_prior, "CHA needs two reference gauges");
    if (m == Method::relsha && !refs.relsha_amplitudes)
      throw Error(Errc::missing_prior, "ReLSHA needs reference amplitudes");
  }
  spec.relsha.validate();
}

}  // namespace

double rrmse(const Eigen::VectorXd& estimated, const Eigen::VectorXd& truth) {
  if (estimated.size() != truth.size()) throw Error(Errc::dimension_mismatch, "rrmse inputs differ in length");
  if (truth.size() == 0) throw Error(Errc::insufficient_data, "rrmse needs at least one constituent");
  const double denominator = truth.sum();
  if (!(denominator > 0.0)) throw Error(Errc::undefined_metric, "rrmse is undefined when the truth amplitudes sum to 0");
  const double rms = std::sqrt((estimated - truth).squaredNorm() / static_cast<double>(truth.size()));
  return rms / denominator * 100.0;
}

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::ha: return "HA";
    case Method::cha: return "CHA";
    case Method::relsha: return "ReLSHA";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view text) noexcept {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "ha") return Method::ha;
  if (lower == "cha") return Method::cha;
  if (lower == "relsha") return Method::relsha;
  return std::nullopt;
}

TruthSource synthetic_truth(const HarmonicSolution& truth, const ConstituentCatalog& catalog, double span_hours,
                            double spacing_hours) {
  if (!(spacing_hours > 0.0) || !(span_hours >= 0.0)) throw Error(Errc::invalid_value, "invalid synthetic span");
  const auto count = static_cast<std::size_t>(std::floor(span_hours / spacing_hours + 1e-9)) + 1;
  std::vector<double> times(count);
  for (std::size_t i = 0; i < count; ++i) times[i] = static_cast<double>(i) * spacing_hours;
  std::vector<double> heights = synthesize(truth, times, catalog);
  return {WaterLevelSeries(std::move(times), std::move(heights)), truth.amplitudes};
}

std::vector<double> default_intervals() {
  std::vector<double> out;
  constexpr int kPoints = 40;
  const double lo = 0.2;
  const double hi = 264.0;
  for (int i = 0; i < kPoints; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (kPoints - 1)));
  out.back() = hi;
  for (double mark : {kSixMinutes, kJasonRevisit, kSwotRevisit})
    if (std::none_of(out.begin(), out.end(), [&](double v) { return same_interval(v, mark); })) out.push_back(mark);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> default_lengths() {
  std::vector<double> out;
  constexpr int kPoints = 20;
  for (int i = 0; i < kPoints; ++i) out.push_back(24.0 * (30.0 + (366.0 - 30.0) * i / (kPoints - 1)));
  return out;
}

std::uint64_t cell_seed(std::uint64_t base, std::size_t interval_index, std::size_t length_index) noexcept {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ (static_cast<std::uint64_t>(interval_index) + 0x1000193ULL));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(length_index) * 0x100000001B3ULL + 7));
  return h;
}

const GridCell* ErrorGrid::find(std::size_t interval_index, std::size_t length_index, Method method) const {
  for (const auto& c : cells)
    if (c.interval_index == interval_index && c.length_index == length_index && c.method == method) return &c;
  return nullptr;
}

std::size_t ErrorGrid::missing_count() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const GridCell& c) { return !c.rrmse; }));
}

std::vector<GridCell> evaluate_cell(const TruthSource& source, const GridSpec& spec, const GridReferences& refs,
                                    const ConstituentCatalog& catalog, std::size_t interval_index,
                                    std::size_t length_index) {
  const std::uint64_t seed = cell_seed(spec.seed, interval_index, length_index);
  std::vector<GridCell> cells;
  for (Method m : spec.methods) {
    GridCell cell;
    cell.interval_index = interval_index;
    cell.length_index = length_index;
    cell.method = m;
    cells.push_back(cell);
  }

  WaterLevelSeries sampled;
  try {
    SamplingPlan plan{spec.intervals.at(interval_index), spec.lengths.at(length_index), seed};
    sampled = resample(source.base, plan);
    sampled = apply_noise(sampled, spec.noise_sigma, splitmix64(seed ^ kNoiseStream));
  } catch (const Error& e) {
    for (auto& c : cells) c.error = e.what();
    return cells;
  }

  for (auto& cell : cells) {
    cell.sample_count = sampled.size();
    cell.regime = classify_regime(sampled.size(), catalog.size());
    try {
      switch (cell.method) {
        case Method::ha: {
          HaOptions options;
          options.trend = spec.ha_trend;
          cell.rrmse = rrmse(ha_fit(sampled, catalog, options).solution.amplitudes, source.truth_amplitudes);
          break;
        }
        case Method::cha: {
          const ChaResult fit = cha_fit(sampled, *refs.cha_first, *refs.cha_second, catalog, spec.cha);
          cell.rrmse = rrmse(fit.solution.amplitudes, source.truth_amplitudes);
          break;
        }
        case Method::relsha: {
          const RelshaResult fit = relsha_fit(sampled, *refs.relsha_amplitudes, catalog, spec.relsha);
          cell.converged = fit.diagnostics.converged;
          cell.rrmse = rrmse(fit.solution.amplitudes, source.truth_amplitudes);
          break;
        }
      }
    } catch (const Error& e) {
      cell.error = e.what();
    }
  }
  return cells;
}

ErrorGrid run_grid(const TruthSource& source, const GridSpec& spec, const GridReferences& refs,
                   const ConstituentCatalog& catalog) {
  validate_spec(spec, refs, catalog, source);
  const std::size_t points = spec.intervals.size() * spec.lengths.size();
  std::vector<std::vector<GridCell>> results(points);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t p = next++; p < points; p = next++) {
      results[p] = evaluate_cell(source, spec, refs, catalog, p / spec.lengths.size(), p % spec.lengths.size());
    }
  };
  unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, points));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }

  ErrorGrid grid{spec.intervals, spec.lengths, spec.methods, {}};
  grid.cells.reserve(points * spec.methods.size());
  for (auto& r : results)
    for (auto& c : r) grid.cells.push_back(std::move(c));
  return grid;
}

std::vector<ErrorCurve> interval_slice(const ErrorGrid& grid, double interval) {
  const auto it = std::find_if(grid.intervals.begin(), grid.intervals.end(),
                               [&](double v) { return same_interval(v, interval); });
  if (it == grid.intervals.end())
    throw Error(Errc::not_found, "interval " + format_number(interval) + " h is not in the grid");
  const auto i = static_cast<std::size_t>(it - grid.intervals.begin());

  std::vector<ErrorCurve> curves;
  for (Method m : grid.methods) {
    ErrorCurve curve;
    curve.method = m;
    curve.interval = grid.intervals[i];
    for (std::size_t j = 0; j < grid.lengths.size(); ++j) {
      const GridCell* cell = grid.find(i, j, m);
      if (!cell) continue;
      curve.lengths.push_back(grid.lengths[j]);
      curve.sample_counts.push_back(cell->sample_count);
      curve.regimes.push_back(cell->regime);
      curve.rrmse.push_back(cell->rrmse);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

namespace {

void write_row(std::ostream& out, double interval, double length, Method method, std::size_t samples, Regime regime,
               const std::optional<double>& value) {
  out << format_number(interval) << ',' << format_number(length) << ',' << to_string(method) << ',' << samples << ','
      << to_string(regime) << ',' << (value ? format_number(*value) : std::string("NA")) << '\n';
}

constexpr const char* kHeader = "interval_hours,length_hours,method,sample_count,regime,rrmse_percent\n";

}  // namespace

void write_grid(std::ostream& out, const ErrorGrid& grid) {
  out << kHeader;
  for (const auto& c : grid.cells)
    write_row(out, grid.intervals[c.interval_index], grid.lengths[c.length_index], c.method, c.sample_count, c.regime,
              c.rrmse);
}

void write_curves(std::ostream& out, const std::vector<ErrorCurve>& curves) {
  out << kHeader;
  for (const auto& curve : curves)
    for (std::size_t j = 0; j < curve.lengths.size(); ++j)
      write_row(out, curve.interval, curve.lengths[j], curve.method, curve.sample_counts[j], curve.regimes[j],
                curve.rrmse[j]);
}

}  // namespace relsha
