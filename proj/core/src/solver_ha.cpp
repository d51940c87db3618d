#include "relsha/solver_ha.hpp"

#include "relsha/error.hpp"

namespace relsha {

HaResult ha_fit(const WaterLevelSeries& series, const ConstituentCatalog& catalog, const HaOptions& options) {
  if (series.size() < 2) throw Error(Errc::insufficient_data, "harmonic analysis needs at least 2 samples");

  const PreparedProblem problem = prepare_problem(series, catalog, options.trend);
  const MinNormSolution ls = min_norm_solve(problem.design, problem.observations, options.rank_tolerance);

  HaResult result;
  result.state = ls.x;
  result.rank = ls.rank;
  result.samples = series.size();
  result.regime = classify_regime(series.size(), catalog.size());

  auto [amplitudes, phases] = unpack_state(ls.x, catalog);
  const LineFit line = recover_trend(series, catalog, ls.x, options.trend);
  result.solution.mean = line.intercept;
  result.solution.trend = line.slope;
  result.solution.amplitudes = std::move(amplitudes);
  result.solution.phases = std::move(phases);
  return result;
}

}  // namespace relsha
