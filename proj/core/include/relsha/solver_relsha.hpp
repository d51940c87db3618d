#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "relsha/constituents.hpp"
#include "relsha/design.hpp"
#include "relsha/optimizer.hpp"
#include "relsha/series.hpp"

namespace relsha {

enum class InitStrategy {
  min_norm_ls_rescaled,  // phases from the min-norm LS fit, magnitudes from the prior
  reference_zero_phase,  // x_k = A_0k, x_{n+k} = 0
};

std::string_view to_string(InitStrategy init) noexcept;
std::optional<InitStrategy> parse_init_strategy(std::string_view text) noexcept;

struct RelshaConfig {
  double lambda = 0.5;
  int max_iterations = 2000;
  // Absolute tolerance on ||grad J||_inf. Unset: 1e-8 * (1 + |J0|) with J0 the
  // objective at the starting point.
  std::optional<double> gradient_tolerance;
  // Divide the data term by the sample count and the regulariser by n.
  bool normalize_terms = false;
  InitStrategy init = InitStrategy::min_norm_ls_rescaled;
  TrendHandling trend = TrendHandling::joint;

  void validate() const;
};

/// Multipliers applied on top of (1 - lambda) and lambda.
struct TermScaling {
  double data = 1.0;
  double regularizer = 1.0;
};

// J(x) = (1 - lambda) |H x - h|^2 + lambda |K(x .* x) - q|^2
double relsha_objective(const Eigen::VectorXd& x, const Eigen::MatrixXd& H, const Eigen::VectorXd& h,
                        const Eigen::VectorXd& q, double lambda, TermScaling scaling = {});

// dJ/dx = 2 (1 - lambda) H^T (H x - h) + 4 lambda Diag(x) K^T [K(x .* x) - q]
Eigen::VectorXd relsha_gradient(const Eigen::VectorXd& x, const Eigen::MatrixXd& H, const Eigen::VectorXd& h,
                                const Eigen::VectorXd& q, double lambda, TermScaling scaling = {});

struct RelshaDiagnostics {
  double initial_objective = 0.0;
  double objective = 0.0;
  int iterations = 0;
  int evaluations = 0;
  double gradient_norm = 0.0;  // ||grad J||_inf at the returned point
  double gradient_tolerance = 0.0;
  bool converged = false;
  BfgsStatus status = BfgsStatus::iteration_limit;
  Regime regime = Regime::overdetermined;
  std::size_t samples = 0;
};

struct RelshaResult {
  HarmonicSolution solution;
  Eigen::VectorXd state;
  RelshaDiagnostics diagnostics;
};

// Regularised fit against reference amplitudes A_0 (one per catalog entry).
// Non-convergence is reported through diagnostics, never thrown.
RelshaResult relsha_fit(const WaterLevelSeries& series, const Eigen::VectorXd& reference_amplitudes,
                        const ConstituentCatalog& catalog, const RelshaConfig& config = {});

}  // namespace relsha
