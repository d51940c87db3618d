#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "relsha/constituents.hpp"
#include "relsha/design.hpp"
#include "relsha/least_squares.hpp"
#include "relsha/series.hpp"

namespace relsha {

struct HaOptions {
  TrendHandling trend = TrendHandling::joint;
  double rank_tolerance = kRankTolerance;
};

struct HaResult {
  HarmonicSolution solution;
  Eigen::VectorXd state;  // fitted x, 2n
  Regime regime = Regime::overdetermined;
  Eigen::Index rank = 0;
  std::size_t samples = 0;
};

// Classical harmonic analysis: detrend, then the minimum-norm least-squares
// fit of the 2n cos/sin coefficients. Underdetermined inputs are solved, not
// rejected; the regime field says which case applied.
HaResult ha_fit(const WaterLevelSeries& series, const ConstituentCatalog& catalog, const HaOptions& options = {});

}  // namespace relsha
