#pragma once

#include <cstddef>
#include <string>

#include "relsha/constituents.hpp"
#include "relsha/design.hpp"
#include "relsha/series.hpp"

namespace relsha {

/// Published harmonics of a reference gauge, aligned to the analysis catalog.
struct GaugeHarmonics {
  std::string station;
  HarmonicSolution harmonics;
};

struct ChaOptions {
  double grid_step = 0.001;
  TrendHandling trend = TrendHandling::joint;
};

struct ChaResult {
  double weight = 0.0;  // w*, 0 -> first gauge, 1 -> second
  HarmonicSolution solution;
  double objective = 0.0;  // sum of squared residuals at w*
  bool identifiable = true;  // false when both references coincide
  Regime regime = Regime::overdetermined;
  std::size_t samples = 0;
};

// Amplitudes interpolate linearly; phases move along the shorter arc from a
// to b (a half-turn difference goes toward increasing angle). Mean and trend
// are left at zero.
HarmonicSolution interpolate_harmonics(const HarmonicSolution& a, const HarmonicSolution& b, double weight);

ChaResult cha_fit(const WaterLevelSeries& series, const GaugeHarmonics& ref_a, const GaugeHarmonics& ref_b,
                  const ConstituentCatalog& catalog, const ChaOptions& options = {});

}  // namespace relsha
