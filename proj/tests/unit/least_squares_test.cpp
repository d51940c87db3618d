#include <gtest/gtest.h>

#include <random>

#include "relsha/least_squares.hpp"

using namespace relsha;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(rows, cols);
  for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = g(rng);
  return A;
}

}  // namespace

TEST(Compress, PreservesObjectiveEverywhere) {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd A = random_matrix(80, 6, rng);
  const Eigen::VectorXd b = random_matrix(80, 1, rng);
  const auto ls = compress_least_squares(A, b);
  EXPECT_EQ(ls.R.rows(), 6);
  EXPECT_EQ(ls.original_rows, 80);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd x = random_matrix(6, 1, rng);
    const double direct = (A * x - b).squaredNorm();
    EXPECT_NEAR(ls.value(x), direct, 1e-10 * direct);
  }
}

TEST(Compress, WideInputIsKeptAsIs) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd A = random_matrix(3, 8, rng);
  const Eigen::VectorXd b = random_matrix(3, 1, rng);
  const auto ls = compress_least_squares(A, b);
  EXPECT_EQ(ls.R, A);
  EXPECT_EQ(ls.z, b);
  EXPECT_EQ(ls.offset, 0.0);
}

TEST(MinNorm, OverdeterminedMatchesNormalEquations) {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd A = random_matrix(50, 7, rng);
  const Eigen::VectorXd b = random_matrix(50, 1, rng);
  const Eigen::VectorXd oracle = (A.transpose() * A).ldlt().solve(A.transpose() * b);
  const auto sol = min_norm_solve(A, b);
  EXPECT_EQ(sol.rank, 7);
  EXPECT_LT((sol.x - oracle).norm(), 1e-10);
  EXPECT_LT((min_norm_solve(compress_least_squares(A, b)).x - oracle).norm(), 1e-10);
}

TEST(MinNorm, UnderdeterminedInterpolatesWithSmallestNorm) {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd A = random_matrix(5, 12, rng);
  const Eigen::VectorXd b = random_matrix(5, 1, rng);
  const auto sol = min_norm_solve(A, b);
  EXPECT_EQ(sol.rank, 5);
  EXPECT_LT((A * sol.x - b).norm(), 1e-10);
  // x = A^T (A A^T)^{-1} b is the minimum-norm interpolant.
  const Eigen::VectorXd oracle = A.transpose() * (A * A.transpose()).ldlt().solve(b);
  EXPECT_LT((sol.x - oracle).norm(), 1e-10);
}

TEST(MinNorm, RankDeficientColumnsShareWeight) {
  Eigen::MatrixXd A(4, 2);
  A << 1, 1, 2, 2, 3, 3, 4, 4;
  const Eigen::VectorXd b = (Eigen::VectorXd(4) << 2, 4, 6, 8).finished();
  const auto sol = min_norm_solve(A, b);
  EXPECT_EQ(sol.rank, 1);
  EXPECT_NEAR(sol.x[0], 1.0, 1e-12);
  EXPECT_NEAR(sol.x[1], 1.0, 1e-12);
}

TEST(MinNorm, ZeroMatrixGivesZero) {
  const auto sol = min_norm_solve(Eigen::MatrixXd::Zero(3, 4), Eigen::VectorXd::Ones(3));
  EXPECT_EQ(sol.rank, 0);
  EXPECT_EQ(sol.x, Eigen::VectorXd::Zero(4));
}
