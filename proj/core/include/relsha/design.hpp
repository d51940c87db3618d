#pragma once

// Linear-algebra objects shared by the harmonic solvers: the design matrix of
// cos/sin columns, the pairing operator K, the 2n state vector layout and the
// reference vector q.

#include <cstddef>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "relsha/constituents.hpp"
#include "relsha/series.hpp"

namespace relsha {

// Row i: [cos(w_1 t_i) .. cos(w_n t_i), sin(w_1 t_i) .. sin(w_n t_i)].
Eigen::MatrixXd build_design_matrix(std::span<const double> times, const ConstituentCatalog& catalog);

// Dense n x 2n pairing matrix with ones at (k, k) and (k, n + k). The solvers
// use pair_sum / pair_power instead; this exists for tests and inspection.
Eigen::MatrixXd build_K(std::size_t n);

// K v for a length-2n vector: v_k + v_{n+k}.
Eigen::VectorXd pair_sum(const Eigen::VectorXd& v);

// K (x .* x): squared magnitude of every (cos, sin) pair.
Eigen::VectorXd pair_power(const Eigen::VectorXd& x);

// q_k = A_{0,k}^2.
Eigen::VectorXd build_reference_vector(const Eigen::VectorXd& reference_amplitudes);

// State layout: x_k = A_k f_k cos(theta_k), x_{n+k} = -A_k f_k sin(theta_k).
// The minus sign makes H x equal the harmonic sum m + a t + sum A f cos(w t + theta)
// without its mean and trend.
Eigen::VectorXd pack_solution(const HarmonicSolution& solution, const ConstituentCatalog& catalog);

struct AmplitudesPhases {
  Eigen::VectorXd amplitudes;
  Eigen::VectorXd phases;
};

// A_k = sqrt(x_k^2 + x_{n+k}^2) / f_k; theta_k = atan2(-x_{n+k}, x_k) wrapped to
// [0, 2pi), and 0 when A_k = 0.
AmplitudesPhases unpack_state(const Eigen::VectorXd& x, std::span<const double> nodal_factors);
AmplitudesPhases unpack_state(const Eigen::VectorXd& x, const ConstituentCatalog& catalog);

enum class Regime { overdetermined, underdetermined };

std::string_view to_string(Regime regime) noexcept;

// Underdetermined iff the sample count is below the 2n harmonic unknowns.
Regime classify_regime(std::size_t samples, std::size_t constituents) noexcept;

// How the mean and linear trend are separated from the harmonic fit.
//  data_only: subtract the line fitted to the heights, then fit H.
//  joint:     additionally project the line out of every design column, which
//             is equivalent to fitting [1, t, H] jointly. Long-period
//             constituents (Sa, Ssa) are not orthogonal to t over a finite
//             record, so data_only biases them.
enum class TrendHandling { joint, data_only };

// Removes the span of {1, t} from vectors sampled at fixed times.
class TrendProjector {
 public:
  explicit TrendProjector(std::span<const double> times);

  [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  void apply_in_place(Eigen::MatrixXd& columns) const;

 private:
  Eigen::VectorXd unit_constant_;
  Eigen::VectorXd unit_ramp_;  // empty when all times coincide
};

/// Detrended observations and the design they are fitted against.
struct PreparedProblem {
  Eigen::MatrixXd design;        // m x 2n, projected when handling == joint
  Eigen::VectorXd observations;  // detrended heights
  TrendHandling handling = TrendHandling::joint;
};

PreparedProblem prepare_problem(const WaterLevelSeries& series, const ConstituentCatalog& catalog,
                                TrendHandling handling);

// Mean and trend reported alongside a fitted state x. For joint handling this
// is the line through h - H x; for data_only it is the line through h.
LineFit recover_trend(const WaterLevelSeries& series, const ConstituentCatalog& catalog, const Eigen::VectorXd& x,
                      TrendHandling handling);

}  // namespace relsha
