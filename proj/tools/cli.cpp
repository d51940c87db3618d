#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "relsha/constituents.hpp"
#include "relsha/error.hpp"
#include "relsha/evaluation.hpp"
#include "relsha/format.hpp"
#include "relsha/ingest.hpp"
#include "relsha/series.hpp"
#include "relsha/solver_cha.hpp"
#include "relsha/solver_ha.hpp"
#include "relsha/solver_relsha.hpp"

#ifndef RELSHA_DEFAULT_DATA_DIR
#define RELSHA_DEFAULT_DATA_DIR "data"
#endif
#ifndef RELSHA_INSTALL_DATA_DIR
#define RELSHA_INSTALL_DATA_DIR RELSHA_DEFAULT_DATA_DIR
#endif

namespace relsha::cli {

namespace {

namespace fs = std::filesystem;
using Metadata = std::vector<std::pair<std::string, std::string>>;

fs::path data_dir() {
  if (const char* env = std::getenv("RELSHA_DATA_DIR"); env && *env) return env;
  // Source tree while developing, the installed share directory otherwise.
  if (std::error_code ec; fs::exists(fs::path(RELSHA_DEFAULT_DATA_DIR) / "noaa37.csv", ec)) return RELSHA_DEFAULT_DATA_DIR;
  return RELSHA_INSTALL_DATA_DIR;
}

// --catalog, then $RELSHA_CATALOG, then the bundled 37-constituent list.
fs::path resolve_catalog(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("RELSHA_CATALOG"); env && *env) return env;
  return data_dir() / "noaa37.csv";
}

fs::path or_bundled(const std::string& flag, const char* file) { return flag.empty() ? data_dir() / file : fs::path(flag); }

// Writes through a sibling temporary file renamed into place on success, so a
// failed run never leaves a partial output behind. "-" or empty means `out`.
void emit(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& writer) {
  if (path.empty() || path == "-") {
    writer(out);
    return;
  }
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".partial";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(Errc::io_error, "cannot write " + tmp.string());
    try {
      writer(file);
      file.flush();
      if (!file) throw Error(Errc::io_error, "write failed for " + tmp.string());
    } catch (...) {
      file.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw;
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::io_error, "cannot move output into place: " + target.string());
  }
}

void report_warnings(std::ostream& err, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

WaterLevelSeries load_input(const std::string& input, const std::string& altimetry, const std::string& reduction,
                            std::ostream& err) {
  LoadReport report;
  if (!altimetry.empty()) {
    CycleReduction r = CycleReduction::median;
    if (reduction == "mean") r = CycleReduction::mean;
    if (reduction == "nearest") r = CycleReduction::nearest_midpoint;
    auto series = to_series(load_altimetry(altimetry, &report), r);
    report_warnings(err, report.warnings);
    return series;
  }
  auto series = load_water_levels(input, &report);
  report_warnings(err, report.warnings);
  return series;
}

HarmonicsFile load_harmonics_reporting(const fs::path& path, const ConstituentCatalog& catalog, std::ostream& err) {
  HarmonicsFile file = load_harmonics(path, catalog);
  for (const auto& w : file.warnings) err << "warning: " << path.string() << ": " << w << '\n';
  return file;
}

GaugeHarmonics load_gauge_reporting(const fs::path& path, const ConstituentCatalog& catalog, std::ostream& err) {
  HarmonicsFile file = load_harmonics_reporting(path, catalog, err);
  const auto* station = file.find_metadata("station");
  return {station ? *station : path.stem().string(), std::move(file.solution)};
}

std::string yes_no(bool v) { return v ? "true" : "false"; }

TrendHandling parse_trend(const std::string& s) {
  return s == "data_only" ? TrendHandling::data_only : TrendHandling::joint;
}

// ---- fit -------------------------------------------------------------------

struct FitArgs {
  std::string method;
  std::string input;
  std::string altimetry;
  std::string reduction = "median";
  std::string catalog;
  std::string reference;
  std::string reference_a;
  std::string reference_b;
  double lambda = 0.5;
  bool normalize_terms = false;
  std::string init = "min_norm_ls_rescaled";
  int max_iterations = 2000;
  double gradient_tolerance = 0.0;
  std::string trend = "joint";
  std::string output = "-";
  bool strict = false;
};

int run_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  const ConstituentCatalog catalog = load_catalog(resolve_catalog(a.catalog));
  const WaterLevelSeries series = load_input(a.input, a.altimetry, a.reduction, err);
  const TrendHandling trend = parse_trend(a.trend);

  Metadata meta{{"method", a.method}, {"samples", std::to_string(series.size())}};
  HarmonicSolution solution;
  bool converged = true;

  if (a.method == "ha") {
    HaOptions options;
    options.trend = trend;
    const HaResult fit = ha_fit(series, catalog, options);
    solution = fit.solution;
    meta.emplace_back("regime", std::string(to_string(fit.regime)));
    meta.emplace_back("rank", std::to_string(fit.rank));
    if (fit.regime == Regime::underdetermined)
      err << "warning: " << series.size() << " samples < " << 2 * catalog.size()
          << " unknowns; returning the minimum-norm solution\n";
  } else if (a.method == "cha") {
    ChaOptions options;
    options.trend = trend;
    const GaugeHarmonics ref_a = load_gauge_reporting(a.reference_a, catalog, err);
    const GaugeHarmonics ref_b = load_gauge_reporting(a.reference_b, catalog, err);
    const ChaResult fit = cha_fit(series, ref_a, ref_b, catalog, options);
    solution = fit.solution;
    meta.emplace_back("regime", std::string(to_string(fit.regime)));
    meta.emplace_back("weight", format_number(fit.weight));
    meta.emplace_back("objective", format_number(fit.objective));
    meta.emplace_back("identifiable", yes_no(fit.identifiable));
    if (!fit.identifiable) err << "warning: reference gauges coincide; the weight is not identifiable\n";
  } else {
    RelshaConfig config;
    config.lambda = a.lambda;
    config.max_iterations = a.max_iterations;
    if (a.gradient_tolerance > 0.0) config.gradient_tolerance = a.gradient_tolerance;
    config.normalize_terms = a.normalize_terms;
    config.init = *parse_init_strategy(a.init);
    config.trend = trend;
    const HarmonicsFile reference = load_harmonics_reporting(a.reference, catalog, err);
    const RelshaResult fit = relsha_fit(series, reference.solution.amplitudes, catalog, config);
    const auto& d = fit.diagnostics;
    solution = fit.solution;
    converged = d.converged;
    meta.emplace_back("regime", std::string(to_string(d.regime)));
    meta.emplace_back("lambda", format_number(config.lambda));
    meta.emplace_back("normalize_terms", yes_no(config.normalize_terms));
    meta.emplace_back("initial_objective", format_number(d.initial_objective));
    meta.emplace_back("objective", format_number(d.objective));
    meta.emplace_back("iterations", std::to_string(d.iterations));
    meta.emplace_back("gradient_norm", format_number(d.gradient_norm));
    meta.emplace_back("gradient_tolerance", format_number(d.gradient_tolerance));
    meta.emplace_back("converged", yes_no(d.converged));
    meta.emplace_back("status", to_string(d.status));
    if (!d.converged)
      err << "warning: ReLSHA did not converge (" << to_string(d.status) << ", |grad| = " << format_number(d.gradient_norm)
          << ")\n";
  }

  emit(a.output, out, [&](std::ostream& os) { write_solution(os, solution, catalog, meta); });
  if (!converged && a.strict) return kNotConverged;
  return kOk;
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string solution;
  std::string catalog;
  double interval = 0.1;
  double length = 0.0;
  std::string start = "2021-01-01T00:00:00Z";
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string output = "-";
};

int run_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
  const ConstituentCatalog catalog = load_catalog(resolve_catalog(a.catalog));
  const HarmonicSolution solution = load_harmonics_reporting(a.solution, catalog, err).solution;
  SamplingPlan plan{a.interval, a.length, a.seed};
  plan.validate();
  const auto steps = static_cast<std::size_t>(std::floor(plan.record_length / plan.interval + 1e-9));
  std::vector<double> times(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) times[j] = static_cast<double>(j) * plan.interval;
  std::vector<double> heights = synthesize(solution, times, catalog);
  WaterLevelSeries series(std::move(times), std::move(heights), parse_timestamp(a.start));
  series = apply_noise(series, a.noise, a.seed);
  emit(a.output, out, [&](std::ostream& os) { write_water_levels(os, series); });
  return kOk;
}

// ---- rrmse -----------------------------------------------------------------

struct RrmseArgs {
  std::string estimated;
  std::string truth;
  std::string catalog;
};

int run_rrmse(const RrmseArgs& a, std::ostream& out, std::ostream& err) {
  const ConstituentCatalog catalog = load_catalog(resolve_catalog(a.catalog));
  const auto estimated = load_harmonics_reporting(a.estimated, catalog, err).solution.amplitudes;
  const auto truth = load_harmonics_reporting(a.truth, catalog, err).solution.amplitudes;
  out << format_number(rrmse(estimated, truth)) << '\n';
  return kOk;
}

// ---- resample --------------------------------------------------------------

struct ResampleArgs {
  std::string input;
  double interval = 0.0;
  double length = 0.0;
  std::uint64_t seed = 0;
  double noise = 0.0;
  std::string output = "-";
};

int run_resample(const ResampleArgs& a, std::ostream& out, std::ostream& err) {
  LoadReport report;
  const WaterLevelSeries series = load_water_levels(a.input, &report);
  report_warnings(err, report.warnings);
  WaterLevelSeries sampled = resample(series, SamplingPlan{a.interval, a.length, a.seed});
  sampled = apply_noise(sampled, a.noise, a.seed);
  emit(a.output, out, [&](std::ostream& os) { write_water_levels(os, sampled); });
  return kOk;
}

// ---- experiment ------------------------------------------------------------

struct ExperimentArgs {
  std::string truth;
  std::string gauge;
  std::string catalog;
  std::string reference;
  std::string reference_a;
  std::string reference_b;
  std::vector<std::string> methods{"ha", "cha", "relsha"};
  std::vector<double> intervals;
  std::vector<double> lengths;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  double lambda = 0.5;
  bool normalize_terms = false;
  double noise = 0.0;
  double span = 0.0;
  bool lambda_sweep = false;
  std::string output;
};

constexpr double kSweepLambdas[] = {0.1, 0.3, 0.5, 0.7, 0.9};

void write_lambda_sweep(std::ostream& os, const std::vector<std::pair<double, ErrorGrid>>& grids) {
  os << "lambda,interval_hours,length_hours,sample_count,regime,rrmse_percent\n";
  for (const auto& [lambda, grid] : grids)
    for (const auto& c : grid.cells)
      os << format_number(lambda) << ',' << format_number(grid.intervals[c.interval_index]) << ','
         << format_number(grid.lengths[c.length_index]) << ',' << c.sample_count << ',' << to_string(c.regime) << ','
         << (c.rrmse ? format_number(*c.rrmse) : std::string("NA")) << '\n';
}

std::string slice_suffix(double interval) {
  if (interval == kSixMinutes) return "6min";
  if (interval == kJasonRevisit) return "9.9d";
  if (interval == kSwotRevisit) return "11d";
  return format_number(interval) + "h";
}

int run_experiment(const ExperimentArgs& a, std::ostream& out, std::ostream& err) {
  const ConstituentCatalog catalog = load_catalog(resolve_catalog(a.catalog));

  GridSpec spec;
  spec.intervals = a.intervals.empty() ? default_intervals() : a.intervals;
  spec.lengths = a.lengths.empty() ? default_lengths() : a.lengths;
  for (const auto& m : a.methods) spec.methods.push_back(*parse_method(m));
  spec.seed = a.seed;
  spec.threads = a.threads;
  spec.noise_sigma = a.noise;
  spec.relsha.lambda = a.lambda;
  spec.relsha.normalize_terms = a.normalize_terms;

  const HarmonicsFile truth = load_harmonics_reporting(or_bundled(a.truth, "synthetic_truth.csv"), catalog, err);
  TruthSource source;
  if (!a.gauge.empty()) {
    LoadReport report;
    source.base = load_water_levels(a.gauge, &report);
    report_warnings(err, report.warnings);
    source.truth_amplitudes = truth.solution.amplitudes;
  } else {
    const double longest = *std::max_element(spec.lengths.begin(), spec.lengths.end());
    const double span = a.span > 0.0 ? a.span : longest + 60.0 * 24.0;
    source = synthetic_truth(truth.solution, catalog, span);
  }

  GridReferences refs;
  const auto wants = [&](Method m) { return std::find(spec.methods.begin(), spec.methods.end(), m) != spec.methods.end(); };
  if (wants(Method::cha)) {
    refs.cha_first = load_gauge_reporting(or_bundled(a.reference_a, "reference_a.csv"), catalog, err);
    refs.cha_second = load_gauge_reporting(or_bundled(a.reference_b, "reference_b.csv"), catalog, err);
  }
  if (wants(Method::relsha))
    refs.relsha_amplitudes = load_harmonics_reporting(or_bundled(a.reference, "reference.csv"), catalog, err)
                                 .solution.amplitudes;

  const ErrorGrid grid = run_grid(source, spec, refs, catalog);
  emit(a.output, out, [&](std::ostream& os) { write_grid(os, grid); });

  if (!a.output.empty() && a.output != "-") {
    const fs::path base(a.output);
    for (double interval : {kSixMinutes, kJasonRevisit, kSwotRevisit}) {
      std::vector<ErrorCurve> curves;
      try {
        curves = interval_slice(grid, interval);
      } catch (const Error&) {
        continue;  // interval not on this lattice
      }
      fs::path slice = base.parent_path() / (base.stem().string() + "_slice_" + slice_suffix(interval) + ".csv");
      emit(slice.string(), out, [&](std::ostream& os) { write_curves(os, curves); });
    }
  }

  if (a.lambda_sweep && wants(Method::relsha) && !a.output.empty() && a.output != "-") {
    std::vector<std::pair<double, ErrorGrid>> sweep;
    GridSpec relsha_only = spec;
    relsha_only.methods = {Method::relsha};
    for (double lambda : kSweepLambdas) {
      relsha_only.relsha.lambda = lambda;
      sweep.emplace_back(lambda, run_grid(source, relsha_only, refs, catalog));
    }
    const fs::path base(a.output);
    const fs::path file = base.parent_path() / (base.stem().string() + "_lambda_sweep.csv");
    emit(file.string(), out, [&](std::ostream& os) { write_lambda_sweep(os, sweep); });
  }

  std::size_t not_converged = 0;
  for (const auto& c : grid.cells) not_converged += c.rrmse && !c.converged;
  if (const auto missing = grid.missing_count(); missing > 0) {
    err << missing << " of " << grid.cells.size() << " cells missing:\n";
    for (const auto& c : grid.cells)
      if (!c.rrmse)
        err << "  interval " << format_number(grid.intervals[c.interval_index]) << " h, length "
            << format_number(grid.lengths[c.length_index]) << " h, " << to_string(c.method) << ": " << c.error << '\n';
  }
  if (not_converged > 0) err << not_converged << " ReLSHA cells stopped before reaching the gradient tolerance\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tidal harmonic analysis with amplitude-regularised least squares", "relsha"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Configuration file (TOML/INI); flags override it");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit constituent amplitudes and phases to a water-level series");
  fit_cmd->add_option("--method", fit.method, "ha, cha or relsha")
      ->required()
      ->check(CLI::IsMember({"ha", "cha", "relsha"}));
  auto* input_opt = fit_cmd->add_option("--input", fit.input, "Water-level file (timestamp,height_m)");
  auto* alt_opt = fit_cmd->add_option("--altimetry", fit.altimetry, "Altimetry file (cycle,timestamp,ssh_m,flag)");
  input_opt->excludes(alt_opt);
  fit_cmd->add_option("--reduction", fit.reduction, "Per-cycle altimetry reduction")
      ->check(CLI::IsMember({"median", "mean", "nearest"}))
      ->capture_default_str();
  fit_cmd->add_option("--catalog", fit.catalog, "Constituent catalog (default: $RELSHA_CATALOG or bundled NOAA 37)");
  auto* ref_opt = fit_cmd->add_option("--reference", fit.reference, "Reference amplitudes (relsha)");
  auto* ref_a_opt = fit_cmd->add_option("--reference-a", fit.reference_a, "First reference gauge harmonics (cha)");
  auto* ref_b_opt = fit_cmd->add_option("--reference-b", fit.reference_b, "Second reference gauge harmonics (cha)");
  fit_cmd->add_option("--lambda", fit.lambda, "Regularisation weight in [0, 1]")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  fit_cmd->add_flag("--normalize-terms", fit.normalize_terms, "Scale the data term by 1/m and the penalty by 1/n");
  fit_cmd->add_option("--init", fit.init, "ReLSHA starting point")
      ->check(CLI::IsMember({"min_norm_ls_rescaled", "reference_zero_phase"}))
      ->capture_default_str();
  fit_cmd->add_option("--max-iterations", fit.max_iterations)->check(CLI::NonNegativeNumber)->capture_default_str();
  fit_cmd->add_option("--gradient-tolerance", fit.gradient_tolerance, "Absolute tolerance on |grad J|_inf")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--trend", fit.trend, "joint or data_only")
      ->check(CLI::IsMember({"joint", "data_only"}))
      ->capture_default_str();
  fit_cmd->add_option("--output,-o", fit.output, "Solution file ('-' for stdout)")->capture_default_str();
  fit_cmd->add_flag("--strict", fit.strict, "Exit with status 3 when ReLSHA does not converge");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Synthesise a water-level series from a solution file");
  synth_cmd->add_option("--solution", synth.solution, "Solution/harmonics file")->required();
  synth_cmd->add_option("--catalog", synth.catalog);
  synth_cmd->add_option("--interval", synth.interval, "Sampling interval, hours")->capture_default_str();
  synth_cmd->add_option("--length", synth.length, "Record length, hours")->required();
  synth_cmd->add_option("--start", synth.start, "Timestamp of the first sample")->capture_default_str();
  synth_cmd->add_option("--noise", synth.noise, "Gaussian noise sigma, m")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--output,-o", synth.output)->capture_default_str();

  RrmseArgs rr;
  auto* rrmse_cmd = app.add_subcommand("rrmse", "Relative RMS amplitude error between two harmonics files");
  rrmse_cmd->add_option("--estimated", rr.estimated)->required();
  rrmse_cmd->add_option("--truth", rr.truth)->required();
  rrmse_cmd->add_option("--catalog", rr.catalog);

  ResampleArgs rs;
  auto* resample_cmd = app.add_subcommand("resample", "Resample a water-level series at a coarser interval");
  resample_cmd->add_option("--input", rs.input)->required();
  resample_cmd->add_option("--interval", rs.interval, "Hours")->required();
  resample_cmd->add_option("--length", rs.length, "Record length, hours")->required();
  resample_cmd->add_option("--seed", rs.seed);
  resample_cmd->add_option("--noise", rs.noise)->check(CLI::NonNegativeNumber);
  resample_cmd->add_option("--output,-o", rs.output)->capture_default_str();

  ExperimentArgs ex;
  auto* ex_cmd = app.add_subcommand("experiment", "Run the interval x length error grid");
  ex_cmd->add_option("--truth", ex.truth, "Truth harmonics (default: bundled synthetic truth)");
  ex_cmd->add_option("--gauge", ex.gauge, "Resample this water-level file instead of synthesising the truth");
  ex_cmd->add_option("--catalog", ex.catalog);
  ex_cmd->add_option("--reference", ex.reference, "ReLSHA reference amplitudes");
  ex_cmd->add_option("--reference-a", ex.reference_a, "CHA first gauge");
  ex_cmd->add_option("--reference-b", ex.reference_b, "CHA second gauge");
  ex_cmd->add_option("--methods", ex.methods)->delimiter(',')->check(CLI::IsMember({"ha", "cha", "relsha"}));
  ex_cmd->add_option("--intervals", ex.intervals, "Sampling intervals, hours")->delimiter(',');
  ex_cmd->add_option("--lengths", ex.lengths, "Record lengths, hours")->delimiter(',');
  ex_cmd->add_option("--seed", ex.seed)->capture_default_str();
  ex_cmd->add_option("--threads", ex.threads, "Worker threads (0: hardware)")->capture_default_str();
  ex_cmd->add_option("--lambda", ex.lambda)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  ex_cmd->add_flag("--normalize-terms", ex.normalize_terms);
  ex_cmd->add_option("--noise", ex.noise, "Gaussian noise sigma added per cell, m")->check(CLI::NonNegativeNumber);
  ex_cmd->add_option("--span", ex.span, "Length of the synthetic base series, hours");
  ex_cmd->add_flag("--lambda-sweep", ex.lambda_sweep, "Also run ReLSHA at lambda = 0.1, 0.3, 0.5, 0.7, 0.9");
  ex_cmd->add_option("--output,-o", ex.output, "Grid file; slices are written next to it")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*fit_cmd) {
      if (fit.input.empty() && fit.altimetry.empty()) {
        err << "fit: one of --input or --altimetry is required\n";
        return kUsage;
      }
      if (fit.method == "cha" && (ref_a_opt->count() == 0 || ref_b_opt->count() == 0) &&
          (fit.reference_a.empty() || fit.reference_b.empty())) {
        err << "fit --method cha: --reference-a and --reference-b are required\n";
        return kUsage;
      }
      if (fit.method == "relsha" && ref_opt->count() == 0 && fit.reference.empty()) {
        err << "fit --method relsha: --reference is required\n";
        return kUsage;
      }
      return run_fit(fit, out, err);
    }
    if (*synth_cmd) return run_synth(synth, out, err);
    if (*rrmse_cmd) return run_rrmse(rr, out, err);
    if (*resample_cmd) return run_resample(rs, out, err);
    if (*ex_cmd) return run_experiment(ex, out, err);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace relsha::cli
