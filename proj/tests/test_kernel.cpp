#include <gtest/gtest.h>

#include <random>

#include "mbfpca/errors.hpp"
#include "mbfpca/kernel.hpp"
#include "oracles.hpp"

namespace mbfpca {
namespace {

using testing::brute_median_distance;
using testing::finite_difference;
using testing::gaussian_matrix;
using testing::naive_mmd2;
using testing::random_orthonormal;
using testing::relative_error;

KernelConfig sigma(double s) { return KernelConfig{s, BandwidthSelection::Manual}; }

TEST(RbfKernel, Values) {
  Eigen::VectorXd x(3);
  x << 0.3, -1.0, 2.0;
  EXPECT_EQ(rbf_kernel(x, x, sigma(0.7)), 1.0);

  const double s = 1.3;
  Eigen::VectorXd a(1), b(1);
  a << 0.0;
  b << s * std::sqrt(2.0);
  EXPECT_NEAR(rbf_kernel(a, b, sigma(s)), std::exp(-1.0), 1e-15);

  Eigen::VectorXd u(2), v(2);
  u << 1, 2;
  v << 3, 1;
  // Scalar oracle: (1-3)^2 + (2-1)^2 = 5, exponent -5 / (2 * 2^2).
  const double d2 = (1.0 - 3.0) * (1.0 - 3.0) + (2.0 - 1.0) * (2.0 - 1.0);
  EXPECT_DOUBLE_EQ(rbf_kernel(u, v, sigma(2.0)), std::exp(-d2 / 8.0));
  EXPECT_DOUBLE_EQ(rbf_kernel(u, v, sigma(2.0)), std::exp(-5.0 / 8.0));
}

TEST(RbfKernel, SymmetricAndBounded) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const Eigen::VectorXd x = gaussian_matrix(rng, 4, 1, 3.0);
    const Eigen::VectorXd y = gaussian_matrix(rng, 4, 1, 3.0);
    const double k = rbf_kernel(x, y, sigma(1.5));
    EXPECT_EQ(k, rbf_kernel(y, x, sigma(1.5)));
    EXPECT_GT(k, 0.0);
    EXPECT_LE(k, 1.0);
  }
}

TEST(RbfKernel, Errors) {
  Eigen::VectorXd x(2), y(2);
  x << 0, std::numeric_limits<double>::infinity();
  y << 0, 0;
  EXPECT_THROW(rbf_kernel(x, y, sigma(1.0)), InvalidArgument);
  EXPECT_THROW(rbf_kernel(y, y, sigma(0.0)), InvalidArgument);
  EXPECT_THROW(rbf_kernel(y, y, sigma(-1.0)), InvalidArgument);
  EXPECT_THROW(rbf_kernel(y, y, sigma(std::nan(""))), InvalidArgument);
}

TEST(MedianHeuristic, HandValues) {
  Eigen::MatrixXd two(2, 2);
  two << 0, 0, 3, 0;
  EXPECT_DOUBLE_EQ(median_heuristic(two), 3.0);

  Eigen::MatrixXd three(3, 1);
  three << 0, 1, 3;
  EXPECT_DOUBLE_EQ(median_heuristic(three), 2.0);

  // Four collinear points: distances {1,1,1,2,2,3}; lower middle is 1.
  Eigen::MatrixXd four(4, 1);
  four << 0, 1, 2, 3;
  EXPECT_DOUBLE_EQ(median_heuristic(four), 1.0);
}

TEST(MedianHeuristic, MatchesSortAllPairsOracle) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 5; ++t) {
    const Eigen::MatrixXd s = gaussian_matrix(rng, 10, 4);
    EXPECT_EQ(median_heuristic(s), brute_median_distance(s));
  }
}

TEST(MedianHeuristic, Errors) {
  EXPECT_THROW(median_heuristic(Eigen::MatrixXd::Zero(1, 3)), InvalidArgument);
  EXPECT_THROW(median_heuristic(Eigen::MatrixXd::Ones(5, 3)), DegenerateData);
}

TEST(MmdSquared, IdenticalSetsAreZero) {
  std::mt19937_64 rng(13);
  const Eigen::MatrixXd x = gaussian_matrix(rng, 9, 3);
  EXPECT_LE(mmd_squared({x, x}, sigma(1.0)), 1e-12);
}

TEST(MmdSquared, Singletons) {
  Eigen::MatrixXd x(1, 2), y(1, 2);
  x << 0.5, -1.0;
  y << 2.0, 0.25;
  const double s = 0.9;
  const double d2 = (x - y).squaredNorm();
  EXPECT_NEAR(mmd_squared({x, y}, sigma(s)), 2.0 - 2.0 * std::exp(-d2 / (2 * s * s)), 1e-15);
}

TEST(MmdSquared, MatchesDoubleLoopOracle) {
  std::mt19937_64 rng(14);
  const Eigen::MatrixXd x = gaussian_matrix(rng, 5, 3);
  const Eigen::MatrixXd y = gaussian_matrix(rng, 7, 3, 1.5);
  EXPECT_NEAR(mmd_squared({x, y}, sigma(1.2)), naive_mmd2(x, y, 1.2), 1e-12);
}

TEST(MmdSquared, PropertiesUnderSwapAndPermutation) {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 30; ++t) {
    const int m = std::uniform_int_distribution<int>(1, 12)(rng);
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    const Eigen::MatrixXd x = gaussian_matrix(rng, m, 2);
    const Eigen::MatrixXd y = gaussian_matrix(rng, n, 2, 2.0);
    const KernelConfig cfg = sigma(0.8);
    const double v = mmd_squared({x, y}, cfg);
    EXPECT_GE(v, 0.0);
    EXPECT_NEAR(v, mmd_squared({y, x}, cfg), 1e-14);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(m);
    perm.setIdentity();
    std::shuffle(perm.indices().data(), perm.indices().data() + m, rng);
    EXPECT_NEAR(v, mmd_squared({perm * x, y}, cfg), 1e-14);
  }
}

TEST(MmdSquared, RejectsInvalidGroups) {
  EXPECT_THROW(mmd_squared({Eigen::MatrixXd(0, 2), Eigen::MatrixXd::Ones(2, 2)}, sigma(1)),
               InvalidArgument);
  EXPECT_THROW(mmd_squared({Eigen::MatrixXd::Ones(2, 3), Eigen::MatrixXd::Ones(2, 2)}, sigma(1)),
               InvalidArgument);
}

TEST(MmdGradient, IdenticalDataGivesZero) {
  std::mt19937_64 rng(16);
  const Eigen::MatrixXd data = gaussian_matrix(rng, 8, 6);
  const StiefelPoint v(random_orthonormal(rng, 6, 2));
  EXPECT_LE(mmd_squared_gradient(v, data, data, sigma(1.0)).norm(), 1e-14);
}

TEST(MmdGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(17);
  const Eigen::MatrixXd x = gaussian_matrix(rng, 8, 6);
  const Eigen::MatrixXd y = gaussian_matrix(rng, 8, 6, 1.4);
  const StiefelPoint v(random_orthonormal(rng, 6, 2));
  const KernelConfig cfg = sigma(1.7);
  const Eigen::MatrixXd g = mmd_squared_gradient(v, x, y, cfg);
  const Eigen::MatrixXd fd = finite_difference(
      [&](const Eigen::MatrixXd& w) { return naive_mmd2(x * w, y * w, cfg.sigma); }, v.matrix(),
      1e-5);
  EXPECT_LE(relative_error(g, fd), 1e-5);
}

TEST(MmdGradient, RotationEquivariant) {
  std::mt19937_64 rng(18);
  const Eigen::MatrixXd x = gaussian_matrix(rng, 7, 5);
  const Eigen::MatrixXd y = gaussian_matrix(rng, 9, 5, 1.3);
  const StiefelPoint v(random_orthonormal(rng, 5, 2));
  const Eigen::MatrixXd r = random_orthonormal(rng, 5, 5);
  const KernelConfig cfg = sigma(1.1);
  // Rotated data rows x R^T, loadings R V: projections are unchanged.
  const Eigen::MatrixXd g = mmd_squared_gradient(v, x, y, cfg);
  const Eigen::MatrixXd gr =
      mmd_squared_gradient(StiefelPoint(r * v.matrix()), x * r.transpose(), y * r.transpose(), cfg);
  EXPECT_LE((gr - r * g).norm(), 1e-12 * std::max(1.0, g.norm()));
}

TEST(MmdGradient, DimensionMismatch) {
  const StiefelPoint v = StiefelPoint::identity(4, 2);
  EXPECT_THROW(mmd_squared_gradient(v, Eigen::MatrixXd::Ones(3, 3), Eigen::MatrixXd::Ones(3, 4),
                                    sigma(1)),
               InvalidArgument);
}

TEST(MmdGradient, RandomizedFiniteDifferenceProperty) {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 20; ++t) {
    const int p = std::uniform_int_distribution<int>(2, 10)(rng);
    const int d = std::uniform_int_distribution<int>(1, std::min(3, p - 1))(rng);
    const int m = std::uniform_int_distribution<int>(1, 20)(rng);
    const int n = std::uniform_int_distribution<int>(1, 20)(rng);
    const Eigen::MatrixXd x = gaussian_matrix(rng, m, p);
    Eigen::MatrixXd y = gaussian_matrix(rng, n, p, 1.5);
    y.array() += 0.5;
    const StiefelPoint v(random_orthonormal(rng, p, d));
    const KernelConfig cfg = sigma(std::uniform_real_distribution<double>(0.8, 3.0)(rng));
    const Eigen::MatrixXd g = mmd_squared_gradient(v, x, y, cfg);
    const Eigen::MatrixXd fd = finite_difference(
        [&](const Eigen::MatrixXd& w) { return naive_mmd2(x * w, y * w, cfg.sigma); }, v.matrix(),
        1e-5);
    EXPECT_LE(relative_error(g, fd), 1e-5) << "trial " << t;
  }
}

}  // namespace
}  // namespace mbfpca
