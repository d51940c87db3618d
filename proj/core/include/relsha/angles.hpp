#pragma once

#include <cmath>
#include <numbers>

namespace relsha {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double deg_to_rad(double deg) noexcept { return deg * (std::numbers::pi / 180.0); }
inline double rad_to_deg(double rad) noexcept { return rad * (180.0 / std::numbers::pi); }

// Wraps into [0, 2pi). fmod can land exactly on 2pi after the shift for tiny
// negative inputs, so that case folds back to 0.
inline double wrap_two_pi(double angle) noexcept {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

}  // namespace relsha
