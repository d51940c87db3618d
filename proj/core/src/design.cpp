#include "relsha/design.hpp"

#include <cmath>

#include "relsha/angles.hpp"
#include "relsha/error.hpp"

namespace relsha {

namespace {

Eigen::Index as_index(std::size_t v) { return static_cast<Eigen::Index>(v); }

void require_even(const Eigen::VectorXd& v, const char* what) {
  if (v.size() % 2 != 0) throw Error(Errc::dimension_mismatch, std::string(what) + " must have even length");
}

}  // namespace

Eigen::MatrixXd build_design_matrix(std::span<const double> times, const ConstituentCatalog& catalog) {
  if (catalog.empty()) throw Error(Errc::dimension_mismatch, "design matrix needs a non-empty catalog");
  if (times.empty()) throw Error(Errc::insufficient_data, "design matrix needs at least one sample time");
  const auto m = as_index(times.size());
  const auto n = as_index(catalog.size());
  Eigen::MatrixXd H(m, 2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double w = catalog[static_cast<std::size_t>(k)].speed;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double arg = w * times[static_cast<std::size_t>(i)];
      H(i, k) = std::cos(arg);
      H(i, n + k) = std::sin(arg);
    }
  }
  return H;
}

Eigen::MatrixXd build_K(std::size_t n) {
  if (n == 0) throw Error(Errc::dimension_mismatch, "K needs n >= 1");
  const auto ni = as_index(n);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(ni, 2 * ni);
  for (Eigen::Index k = 0; k < ni; ++k) {
    K(k, k) = 1.0;
    K(k, ni + k) = 1.0;
  }
  return K;
}

Eigen::VectorXd pair_sum(const Eigen::VectorXd& v) {
  require_even(v, "pair_sum input");
  const auto n = v.size() / 2;
  return v.head(n) + v.tail(n);
}

Eigen::VectorXd pair_power(const Eigen::VectorXd& x) {
  require_even(x, "state vector");
  const auto n = x.size() / 2;
  return x.head(n).cwiseAbs2() + x.tail(n).cwiseAbs2();
}

Eigen::VectorXd build_reference_vector(const Eigen::VectorXd& reference_amplitudes) {
  for (Eigen::Index k = 0; k < reference_amplitudes.size(); ++k)
    if (!(reference_amplitudes[k] >= 0.0) || !std::isfinite(reference_amplitudes[k]))
      throw Error(Errc::invalid_value, "reference amplitudes must be finite and non-negative");
  return reference_amplitudes.cwiseAbs2();
}

Eigen::VectorXd pack_solution(const HarmonicSolution& solution, const ConstituentCatalog& catalog) {
  solution.validate(catalog.size());
  const auto n = as_index(catalog.size());
  Eigen::VectorXd x(2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double af = solution.amplitudes[k] * catalog[static_cast<std::size_t>(k)].nodal_factor;
    x[k] = af * std::cos(solution.phases[k]);
    x[n + k] = -af * std::sin(solution.phases[k]);
  }
  return x;
}

AmplitudesPhases unpack_state(const Eigen::VectorXd& x, std::span<const double> nodal_factors) {
  require_even(x, "state vector");
  const auto n = x.size() / 2;
  if (as_index(nodal_factors.size()) != n)
    throw Error(Errc::dimension_mismatch, "state vector and nodal factors disagree on n");
  AmplitudesPhases out{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const double f = nodal_factors[static_cast<std::size_t>(k)];
    if (!(f != 0.0) || !std::isfinite(f)) throw Error(Errc::invalid_nodal_factor, "nodal factor must be non-zero");
    const double c = x[k];
    const double s = -x[n + k];
    const double magnitude = std::hypot(c, s);
    out.amplitudes[k] = magnitude / std::abs(f);
    out.phases[k] = magnitude == 0.0 ? 0.0 : wrap_two_pi(std::atan2(s, c));
  }
  return out;
}

AmplitudesPhases unpack_state(const Eigen::VectorXd& x, const ConstituentCatalog& catalog) {
  std::vector<double> f;
  f.reserve(catalog.size());
  for (const auto& c : catalog) f.push_back(c.nodal_factor);
  return unpack_state(x, f);
}

std::string_view to_string(Regime regime) noexcept {
  return regime == Regime::overdetermined ? "overdetermined" : "underdetermined";
}

Regime classify_regime(std::size_t samples, std::size_t constituents) noexcept {
  return samples < 2 * constituents ? Regime::underdetermined : Regime::overdetermined;
}

TrendProjector::TrendProjector(std::span<const double> times) {
  if (times.empty()) throw Error(Errc::insufficient_data, "trend projector needs sample times");
  const auto m = as_index(times.size());
  unit_constant_ = Eigen::VectorXd::Constant(m, 1.0 / std::sqrt(static_cast<double>(m)));
  Eigen::VectorXd ramp = Eigen::Map<const Eigen::VectorXd>(times.data(), m);
  ramp.array() -= ramp.mean();
  const double norm = ramp.norm();
  if (norm > 0.0) unit_ramp_ = ramp / norm;
}

Eigen::VectorXd TrendProjector::apply(const Eigen::VectorXd& v) const {
  if (v.size() != unit_constant_.size()) throw Error(Errc::dimension_mismatch, "projector length mismatch");
  Eigen::VectorXd out = v - unit_constant_ * unit_constant_.dot(v);
  if (unit_ramp_.size() > 0) out -= unit_ramp_ * unit_ramp_.dot(out);
  return out;
}

void TrendProjector::apply_in_place(Eigen::MatrixXd& columns) const {
  if (columns.rows() != unit_constant_.size()) throw Error(Errc::dimension_mismatch, "projector row mismatch");
  const Eigen::RowVectorXd c = unit_constant_.transpose() * columns;
  columns.noalias() -= unit_constant_ * c;
  if (unit_ramp_.size() > 0) {
    const Eigen::RowVectorXd r = unit_ramp_.transpose() * columns;
    columns.noalias() -= unit_ramp_ * r;
  }
}

PreparedProblem prepare_problem(const WaterLevelSeries& series, const ConstituentCatalog& catalog,
                                TrendHandling handling) {
  const DetrendResult detrended = detrend(series);
  PreparedProblem problem;
  problem.handling = handling;
  problem.design = build_design_matrix(series.times(), catalog);
  problem.observations = detrended.residual.heights_vector();
  if (handling == TrendHandling::joint) TrendProjector(series.times()).apply_in_place(problem.design);
  return problem;
}

LineFit recover_trend(const WaterLevelSeries& series, const ConstituentCatalog& catalog, const Eigen::VectorXd& x,
                      TrendHandling handling) {
  if (handling == TrendHandling::data_only) return fit_line(series.times(), series.heights());
  const Eigen::MatrixXd H = build_design_matrix(series.times(), catalog);
  const Eigen::VectorXd residual = series.heights_vector() - H * x;
  return fit_line(series.times(), std::span<const double>(residual.data(), static_cast<std::size_t>(residual.size())));
}

}  // namespace relsha
