#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace relsha {

/// Objective callback: returns f(x) and, when `gradient` is non-null, writes
/// the gradient into it.
using DifferentiableFunction = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* gradient)>;

struct BfgsOptions {
  int max_iterations = 2000;
  double gradient_tolerance = 1e-8;  // on ||g||_inf
  double sufficient_decrease = 1e-4;  // Armijo c1
  double curvature = 0.9;             // strong Wolfe c2
  int max_line_search_steps = 60;
};

enum class BfgsStatus { converged, iteration_limit, line_search_failed };

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  int evaluations = 0;
  BfgsStatus status = BfgsStatus::iteration_limit;
  std::vector<double> history;  // objective at the start and after every accepted step

  [[nodiscard]] bool converged() const noexcept { return status == BfgsStatus::converged; }
  [[nodiscard]] double gradient_inf_norm() const { return gradient.size() ? gradient.lpNorm<Eigen::Infinity>() : 0.0; }
};

std::string to_string(BfgsStatus status);

// Dense inverse-Hessian BFGS. Every accepted step satisfies the Armijo
// condition, so the history is non-increasing.
BfgsResult minimize_bfgs(const DifferentiableFunction& f, Eigen::VectorXd x0, const BfgsOptions& options = {});

}  // namespace relsha
