#include "relsha/solver_cha.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "relsha/angles.hpp"
#include "relsha/error.hpp"
#include "relsha/least_squares.hpp"

namespace relsha {

namespace {

void check_aligned(const GaugeHarmonics& ref, const ConstituentCatalog& catalog) {
  try {
    ref.harmonics.validate(catalog.size());
  } catch (const Error& e) {
    throw Error(Errc::alignment_error, "reference " + ref.station + " is not aligned to the catalog: " + e.what());
  }
}

bool same_harmonics(const HarmonicSolution& a, const HarmonicSolution& b) {
  for (Eigen::Index k = 0; k < a.amplitudes.size(); ++k) {
    if (a.amplitudes[k] != b.amplitudes[k]) return false;
    if (a.amplitudes[k] != 0.0 && wrap_two_pi(a.phases[k]) != wrap_two_pi(b.phases[k])) return false;
  }
  return true;
}

}  // namespace

HarmonicSolution interpolate_harmonics(const HarmonicSolution& a, const HarmonicSolution& b, double weight) {
  if (a.size() != b.size()) throw Error(Errc::alignment_error, "reference harmonics differ in length");
  HarmonicSolution out = HarmonicSolution::zeros(a.size());
  for (Eigen::Index k = 0; k < a.amplitudes.size(); ++k) {
    out.amplitudes[k] = (1.0 - weight) * a.amplitudes[k] + weight * b.amplitudes[k];
    const double from = wrap_two_pi(a.phases[k]);
    double arc = wrap_two_pi(b.phases[k] - from);
    if (arc > std::numbers::pi) arc -= kTwoPi;
    out.phases[k] = wrap_two_pi(from + weight * arc);
  }
  return out;
}

ChaResult cha_fit(const WaterLevelSeries& series, const GaugeHarmonics& ref_a, const GaugeHarmonics& ref_b,
                  const ConstituentCatalog& catalog, const ChaOptions& options) {
  check_aligned(ref_a, catalog);
  check_aligned(ref_b, catalog);
  if (!(options.grid_step > 0.0) || options.grid_step > 1.0)
    throw Error(Errc::invalid_value, "CHA grid step must be in (0, 1]");
  if (series.size() < 2) throw Error(Errc::insufficient_data, "CHA needs at least 2 samples");

  // The interpolant's harmonic sum is H x(w), so the misfit reduces to a
  // compressed quadratic in x(w).
  const PreparedProblem problem = prepare_problem(series, catalog, options.trend);
  const CompressedLeastSquares ls = compress_least_squares(problem.design, problem.observations);
  auto objective = [&](double w) {
    return ls.value(pack_solution(interpolate_harmonics(ref_a.harmonics, ref_b.harmonics, w), catalog));
  };

  const auto steps = static_cast<std::size_t>(std::llround(1.0 / options.grid_step));
  auto grid_weight = [steps](std::size_t i) { return static_cast<double>(i) / static_cast<double>(steps); };
  std::vector<double> values(steps + 1);
  std::size_t best = 0;
  for (std::size_t i = 0; i <= steps; ++i) {
    values[i] = objective(grid_weight(i));
    if (values[i] < values[best]) best = i;
  }

  double weight = grid_weight(best);
  double value = values[best];
  if (best > 0 && best < steps) {
    const double lo = values[best - 1];
    const double mid = values[best];
    const double hi = values[best + 1];
    const double curvature = lo - 2.0 * mid + hi;
    if (curvature > 0.0) {
      const double h = grid_weight(best + 1) - grid_weight(best);
      const double candidate = weight + 0.5 * h * (lo - hi) / curvature;
      if (candidate > grid_weight(best - 1) && candidate < grid_weight(best + 1)) {
        const double refined = objective(candidate);
        if (refined <= value) {
          weight = candidate;
          value = refined;
        }
      }
    }
  }

  ChaResult result;
  result.weight = weight;
  result.objective = value;
  result.identifiable = !same_harmonics(ref_a.harmonics, ref_b.harmonics);
  result.samples = series.size();
  result.regime = classify_regime(series.size(), catalog.size());
  result.solution = interpolate_harmonics(ref_a.harmonics, ref_b.harmonics, weight);
  const LineFit line = recover_trend(series, catalog, pack_solution(result.solution, catalog), options.trend);
  result.solution.mean = line.intercept;
  result.solution.trend = line.slope;
  return result;
}

}  // namespace relsha
