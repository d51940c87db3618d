#pragma once

#include <Eigen/Dense>

namespace relsha {

/// A least-squares term reduced to at most p rows:
///   ||A x - b||^2 == ||R x - z||^2 + offset   for every x.
/// For tall A (m > p) R is the triangular factor of a Householder QR and
/// offset is the part of ||b||^2 outside range(A); otherwise R = A, z = b.
struct CompressedLeastSquares {
  Eigen::MatrixXd R;
  Eigen::VectorXd z;
  double offset = 0.0;
  Eigen::Index original_rows = 0;

  [[nodiscard]] double value(const Eigen::VectorXd& x) const { return (R * x - z).squaredNorm() + offset; }
};

CompressedLeastSquares compress_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

struct MinNormSolution {
  Eigen::VectorXd x;
  Eigen::Index rank = 0;
  double largest_singular_value = 0.0;
};

/// Default relative cutoff: singular values below sigma_max * 1e-10 are zero.
inline constexpr double kRankTolerance = 1e-10;

/// Minimum-norm minimiser of ||A x - b|| through an SVD with the relative
/// singular value cutoff `rcond`.
MinNormSolution min_norm_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double rcond = kRankTolerance);

MinNormSolution min_norm_solve(const CompressedLeastSquares& ls, double rcond = kRankTolerance);

}  // namespace relsha
