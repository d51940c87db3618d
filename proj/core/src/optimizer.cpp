#include "relsha/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "relsha/error.hpp"

namespace relsha {

namespace {

struct LinePoint {
  double step = 0.0;
  double value = 0.0;
  double slope = 0.0;  // directional derivative
  Eigen::VectorXd x;
  Eigen::VectorXd gradient;
};

class LineSearch {
 public:
  LineSearch(const DifferentiableFunction& f, const BfgsOptions& options, int& evaluations)
      : f_(f), options_(options), evaluations_(evaluations) {}

  // Strong Wolfe search along `direction` (bracketing phase followed by zoom),
  // as in Nocedal & Wright, Algorithms 3.5/3.6. Returns false when no point
  // with sufficient decrease was found.
  bool run(const LinePoint& origin, const Eigen::VectorXd& direction, double initial_step, LinePoint& out) {
    origin_ = &origin;
    direction_ = &direction;
    LinePoint previous = origin;
    previous.step = 0.0;
    double step = initial_step;
    for (int i = 0; i < options_.max_line_search_steps; ++i) {
      LinePoint current = evaluate(step);
      if (!std::isfinite(current.value) || violates_armijo(current) || (i > 0 && current.value >= previous.value))
        return zoom(previous, current, out);
      if (std::abs(current.slope) <= -options_.curvature * origin.slope) {
        out = std::move(current);
        return true;
      }
      if (current.slope >= 0.0) return zoom(current, previous, out);
      previous = std::move(current);
      step *= 2.0;
    }
    out = std::move(previous);
    return out.step > 0.0;
  }

 private:
  LinePoint evaluate(double step) {
    LinePoint p;
    p.step = step;
    p.x = origin_->x + step * *direction_;
    p.gradient.resize(p.x.size());
    p.value = f_(p.x, &p.gradient);
    ++evaluations_;
    p.slope = std::isfinite(p.value) ? p.gradient.dot(*direction_) : std::numeric_limits<double>::quiet_NaN();
    return p;
  }

  // Sufficient decrease, or its derivative form (Hager & Zhang's approximate
  // Wolfe condition) once the predicted decrease is below the rounding level
  // of f. Either way f may not increase.
  bool violates_armijo(const LinePoint& p) const {
    const double predicted = options_.sufficient_decrease * p.step * origin_->slope;
    if (p.value <= origin_->value + predicted) return false;
    const double noise = 16.0 * std::numeric_limits<double>::epsilon() * std::abs(origin_->value);
    const bool unresolvable = -predicted <= noise;
    return !(unresolvable && p.value <= origin_->value &&
             p.slope <= (2.0 * options_.sufficient_decrease - 1.0) * origin_->slope);
  }

  bool zoom(LinePoint lo, LinePoint hi, LinePoint& out) {
    for (int i = 0; i < options_.max_line_search_steps; ++i) {
      const double trial = interpolate(lo, hi);
      LinePoint mid = evaluate(trial);
      if (!std::isfinite(mid.value) || violates_armijo(mid) || mid.value >= lo.value) {
        hi = std::move(mid);
      } else {
        if (std::abs(mid.slope) <= -options_.curvature * origin_->slope) {
          out = std::move(mid);
          return true;
        }
        if (mid.slope * (hi.step - lo.step) >= 0.0) hi = lo;
        lo = std::move(mid);
      }
      if (std::abs(hi.step - lo.step) <= 1e-16 * std::max(1.0, std::abs(lo.step))) break;
    }
    // The interval collapsed without meeting the curvature condition; lo
    // still satisfies sufficient decrease if it moved.
    if (lo.step > 0.0 && lo.value < origin_->value) {
      out = std::move(lo);
      return true;
    }
    return false;
  }

  // Minimiser of the cubic through both end points, kept inside the middle
  // 80% of the bracket; bisection when the cubic is unusable.
  static double interpolate(const LinePoint& a, const LinePoint& b) {
    const double lo = std::min(a.step, b.step);
    const double hi = std::max(a.step, b.step);
    const double width = hi - lo;
    double trial = 0.5 * (lo + hi);
    if (std::isfinite(a.value) && std::isfinite(b.value) && std::isfinite(a.slope) && std::isfinite(b.slope)) {
      const double d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.step - b.step);
      const double disc = d1 * d1 - a.slope * b.slope;
      if (disc >= 0.0) {
        const double d2 = std::copysign(std::sqrt(disc), b.step - a.step);
        const double denom = b.slope - a.slope + 2.0 * d2;
        if (denom != 0.0) {
          const double cubic = b.step - (b.step - a.step) * (b.slope + d2 - d1) / denom;
          if (std::isfinite(cubic)) trial = cubic;
        }
      }
    }
    return std::clamp(trial, lo + 0.1 * width, hi - 0.1 * width);
  }

  const DifferentiableFunction& f_;
  const BfgsOptions& options_;
  int& evaluations_;
  const LinePoint* origin_ = nullptr;
  const Eigen::VectorXd* direction_ = nullptr;
};

}  // namespace

std::string to_string(BfgsStatus status) {
  switch (status) {
    case BfgsStatus::converged: return "converged";
    case BfgsStatus::iteration_limit: return "iteration-limit";
    case BfgsStatus::line_search_failed: return "line-search-failed";
  }
  return "unknown";
}

BfgsResult minimize_bfgs(const DifferentiableFunction& f, Eigen::VectorXd x0, const BfgsOptions& options) {
  if (!(options.gradient_tolerance > 0.0)) throw Error(Errc::invalid_value, "gradient tolerance must be positive");
  if (options.max_iterations < 0) throw Error(Errc::invalid_value, "iteration cap must be non-negative");

  const auto n = x0.size();
  BfgsResult result;
  LinePoint current;
  current.x = std::move(x0);
  current.gradient.resize(n);
  current.value = f(current.x, &current.gradient);
  result.evaluations = 1;
  if (!std::isfinite(current.value)) throw Error(Errc::invalid_value, "objective is not finite at the start point");
  result.history.push_back(current.value);

  Eigen::MatrixXd inverse_hessian = Eigen::MatrixXd::Identity(n, n);
  bool scaled = false;
  LineSearch search(f, options, result.evaluations);

  auto finish = [&](BfgsStatus status) {
    result.x = std::move(current.x);
    result.value = current.value;
    result.gradient = std::move(current.gradient);
    result.status = status;
    return result;
  };

  for (int iter = 0;; ++iter) {
    if (current.gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) return finish(BfgsStatus::converged);
    if (iter >= options.max_iterations) return finish(BfgsStatus::iteration_limit);

    Eigen::VectorXd direction = -(inverse_hessian * current.gradient);
    current.slope = current.gradient.dot(direction);
    if (!(current.slope < 0.0)) {
      inverse_hessian.setIdentity();
      scaled = false;
      direction = -current.gradient;
      current.slope = -current.gradient.squaredNorm();
    }
    // Before any curvature information the unit step is meaningless; start
    // from a step of unit length instead.
    const double initial_step = scaled ? 1.0 : 1.0 / std::max(1.0, direction.norm());

    LinePoint next;
    if (!search.run(current, direction, initial_step, next)) {
      if (!scaled) return finish(BfgsStatus::line_search_failed);
      // Retry once from a steepest-descent restart.
      inverse_hessian.setIdentity();
      scaled = false;
      continue;
    }

    const Eigen::VectorXd s = next.x - current.x;
    const Eigen::VectorXd y = next.gradient - current.gradient;
    const double sy = s.dot(y);
    if (sy > std::numeric_limits<double>::epsilon() * s.norm() * y.norm()) {
      if (!scaled) {
        inverse_hessian *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = inverse_hessian * y;
      const double yhy = y.dot(hy);
      inverse_hessian.noalias() -= rho * (s * hy.transpose() + hy * s.transpose());
      inverse_hessian.noalias() += (rho * rho * yhy + rho) * (s * s.transpose());
    }
    current = std::move(next);
    result.history.push_back(current.value);
    result.iterations = iter + 1;
  }
}

}  // namespace relsha
