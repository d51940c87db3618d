#include "relsha/least_squares.hpp"

#include <string>

#include "relsha/error.hpp"

namespace relsha {

CompressedLeastSquares compress_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  if (A.rows() != b.size()) throw Error(Errc::dimension_mismatch, "least-squares rows and rhs differ");
  CompressedLeastSquares out;
  out.original_rows = A.rows();
  const auto p = A.cols();
  if (A.rows() <= p) {
    out.R = A;
    out.z = b;
    return out;
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::VectorXd qtb = b;
  qtb.applyOnTheLeft(qr.householderQ().adjoint());
  out.R = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  out.z = qtb.head(p);
  out.offset = qtb.tail(A.rows() - p).squaredNorm();
  return out;
}

MinNormSolution min_norm_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double rcond) {
  if (A.rows() != b.size()) throw Error(Errc::dimension_mismatch, "least-squares rows and rhs differ");
  if (A.rows() > A.cols()) return min_norm_solve(compress_least_squares(A, b), rcond);

  MinNormSolution out;
  out.x = Eigen::VectorXd::Zero(A.cols());
  if (A.size() == 0) return out;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  out.largest_singular_value = sigma.size() > 0 ? sigma[0] : 0.0;
  if (!(out.largest_singular_value > 0.0)) return out;
  const double cutoff = out.largest_singular_value * rcond;
  Eigen::VectorXd coeff = svd.matrixU().transpose() * b;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > cutoff) {
      coeff[i] /= sigma[i];
      ++out.rank;
    } else {
      coeff[i] = 0.0;
    }
  }
  out.x = svd.matrixV() * coeff;
  return out;
}

MinNormSolution min_norm_solve(const CompressedLeastSquares& ls, double rcond) {
  if (ls.R.rows() > ls.R.cols()) throw Error(Errc::dimension_mismatch, "compressed system is not reduced");
  return min_norm_solve(ls.R, ls.z, rcond);
}

}  // namespace relsha
