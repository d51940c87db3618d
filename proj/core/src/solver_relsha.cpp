#include "relsha/solver_relsha.hpp"

#include <cmath>

#include "relsha/error.hpp"
#include "relsha/least_squares.hpp"

namespace relsha {

namespace {

void check_dimensions(const Eigen::VectorXd& x, const Eigen::MatrixXd& H, const Eigen::VectorXd& h,
                      const Eigen::VectorXd& q) {
  if (x.size() != 2 * q.size() || H.cols() != x.size() || H.rows() != h.size())
    throw Error(Errc::dimension_mismatch, "objective expects H: m x 2n, h: m, q: n, x: 2n");
}

// Regulariser and its gradient share K(x .* x) - q.
double regularizer_value(const Eigen::VectorXd& x, const Eigen::VectorXd& q) {
  return (pair_power(x) - q).squaredNorm();
}

Eigen::VectorXd regularizer_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& q) {
  const Eigen::VectorXd mismatch = pair_power(x) - q;
  const auto n = q.size();
  Eigen::VectorXd g(2 * n);
  g.head(n) = 4.0 * x.head(n).cwiseProduct(mismatch);
  g.tail(n) = 4.0 * x.tail(n).cwiseProduct(mismatch);
  return g;
}

// Objective minus the constant data offset, accumulated in extended precision.
class CompressedObjective {
 public:
  CompressedObjective(const CompressedLeastSquares& ls, const Eigen::VectorXd& q, double data_weight,
                      double reg_weight)
      : ls_(ls), q_(q), data_weight_(data_weight), reg_weight_(reg_weight) {}

  double operator()(const Eigen::VectorXd& x, Eigen::VectorXd* gradient) const {
    const Eigen::Index rows = ls_.R.rows();
    const Eigen::Index n = q_.size();
    Eigen::VectorXd residual(rows);
    long double data = 0.0L;
    for (Eigen::Index i = 0; i < rows; ++i) {
      long double r = -static_cast<long double>(ls_.z[i]);
      for (Eigen::Index j = 0; j < x.size(); ++j) r += static_cast<long double>(ls_.R(i, j)) * x[j];
      residual[i] = static_cast<double>(r);
      data += r * r;
    }
    Eigen::VectorXd mismatch(n);
    long double reg = 0.0L;
    for (Eigen::Index k = 0; k < n; ++k) {
      const long double c = x[k], s = x[n + k];
      const long double d = c * c + s * s - static_cast<long double>(q_[k]);
      mismatch[k] = static_cast<double>(d);
      reg += d * d;
    }
    if (gradient) {
      *gradient = (2.0 * data_weight_) * (ls_.R.transpose() * residual);
      gradient->head(n) += (4.0 * reg_weight_) * x.head(n).cwiseProduct(mismatch);
      gradient->tail(n) += (4.0 * reg_weight_) * x.tail(n).cwiseProduct(mismatch);
    }
    return static_cast<double>(static_cast<long double>(data_weight_) * data +
                               static_cast<long double>(reg_weight_) * reg);
  }

  // Constant dropped from the value: the part of |h|^2 outside range(H).
  [[nodiscard]] double offset() const { return data_weight_ * ls_.offset; }

 private:
  const CompressedLeastSquares& ls_;
  const Eigen::VectorXd& q_;
  double data_weight_;
  double reg_weight_;
};

Eigen::VectorXd initial_state(const Eigen::VectorXd& least_squares, const Eigen::VectorXd& q, InitStrategy init) {
  const auto n = q.size();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double target = std::sqrt(q[k]);
    const double c = least_squares.size() ? least_squares[k] : 0.0;
    const double s = least_squares.size() ? least_squares[n + k] : 0.0;
    const double magnitude = std::hypot(c, s);
    if (init == InitStrategy::min_norm_ls_rescaled && magnitude > 0.0) {
      x[k] = c * (target / magnitude);
      x[n + k] = s * (target / magnitude);
    } else {
      x[k] = target;
    }
  }
  return x;
}

}  // namespace

std::string_view to_string(InitStrategy init) noexcept {
  return init == InitStrategy::min_norm_ls_rescaled ? "min_norm_ls_rescaled" : "reference_zero_phase";
}

std::optional<InitStrategy> parse_init_strategy(std::string_view text) noexcept {
  if (text == "min_norm_ls_rescaled") return InitStrategy::min_norm_ls_rescaled;
  if (text == "reference_zero_phase") return InitStrategy::reference_zero_phase;
  return std::nullopt;
}

void RelshaConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(Errc::invalid_value, "lambda must lie in [0, 1]");
  if (max_iterations < 0) throw Error(Errc::invalid_value, "max_iterations must be non-negative");
  if (gradient_tolerance && !(*gradient_tolerance > 0.0))
    throw Error(Errc::invalid_value, "gradient tolerance must be positive");
}

double relsha_objective(const Eigen::VectorXd& x, const Eigen::MatrixXd& H, const Eigen::VectorXd& h,
                        const Eigen::VectorXd& q, double lambda, TermScaling scaling) {
  check_dimensions(x, H, h, q);
  return (1.0 - lambda) * scaling.data * (H * x - h).squaredNorm() +
         lambda * scaling.regularizer * regularizer_value(x, q);
}

Eigen::VectorXd relsha_gradient(const Eigen::VectorXd& x, const Eigen::MatrixXd& H, const Eigen::VectorXd& h,
                                const Eigen::VectorXd& q, double lambda, TermScaling scaling) {
  check_dimensions(x, H, h, q);
  Eigen::VectorXd g = (2.0 * (1.0 - lambda) * scaling.data) * (H.transpose() * (H * x - h));
  g += (lambda * scaling.regularizer) * regularizer_gradient(x, q);
  return g;
}

RelshaResult relsha_fit(const WaterLevelSeries& series, const Eigen::VectorXd& reference_amplitudes,
                        const ConstituentCatalog& catalog, const RelshaConfig& config) {
  config.validate();
  if (reference_amplitudes.size() == 0) throw Error(Errc::missing_prior, "ReLSHA needs reference amplitudes");
  if (static_cast<std::size_t>(reference_amplitudes.size()) != catalog.size())
    throw Error(Errc::alignment_error, "reference amplitudes do not match the catalog size");
  if (series.size() < 2) throw Error(Errc::insufficient_data, "ReLSHA needs at least 2 samples");

  const Eigen::VectorXd q = build_reference_vector(reference_amplitudes);
  const PreparedProblem problem = prepare_problem(series, catalog, config.trend);

  // The data term only enters through ||R x - z||^2 + offset, which equals
  // ||H x - h||^2 exactly; R is at most 2n x 2n.
  const CompressedLeastSquares ls = compress_least_squares(problem.design, problem.observations);
  TermScaling scaling;
  if (config.normalize_terms) {
    scaling.data = 1.0 / static_cast<double>(series.size());
    scaling.regularizer = 1.0 / static_cast<double>(catalog.size());
  }
  const double data_weight = (1.0 - config.lambda) * scaling.data;
  const double reg_weight = config.lambda * scaling.regularizer;

  const CompressedObjective objective(ls, q, data_weight, reg_weight);

  Eigen::VectorXd least_squares;
  if (config.init == InitStrategy::min_norm_ls_rescaled) least_squares = min_norm_solve(ls).x;
  const Eigen::VectorXd x0 = initial_state(least_squares, q, config.init);

  RelshaDiagnostics diag;
  diag.initial_objective = objective(x0, nullptr) + objective.offset();
  diag.gradient_tolerance = config.gradient_tolerance.value_or(1e-8 * (1.0 + std::abs(diag.initial_objective)));

  BfgsOptions options;
  options.max_iterations = config.max_iterations;
  options.gradient_tolerance = diag.gradient_tolerance;
  const BfgsResult run = minimize_bfgs(objective, x0, options);

  diag.objective = run.value + objective.offset();
  diag.iterations = run.iterations;
  diag.evaluations = run.evaluations;
  diag.gradient_norm = run.gradient_inf_norm();
  diag.status = run.status;
  diag.converged = run.converged();
  diag.samples = series.size();
  diag.regime = classify_regime(series.size(), catalog.size());

  RelshaResult result;
  result.state = run.x;
  auto [amplitudes, phases] = unpack_state(run.x, catalog);
  const LineFit line = recover_trend(series, catalog, run.x, config.trend);
  result.solution.mean = line.intercept;
  result.solution.trend = line.slope;
  result.solution.amplitudes = std::move(amplitudes);
  result.solution.phases = std::move(phases);
  result.diagnostics = diag;
  return result;
}

}  // namespace relsha
