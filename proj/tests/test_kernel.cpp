#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "locmac/error.hpp"
#include "locmac/kernel.hpp"

using namespace locmac;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

VectorXd at_angle(double norm, double angle) { return vec({norm * std::cos(angle), norm * std::sin(angle)}); }

const KernelParams kUnit{1.0, 1.0, 1.0};

}  // namespace

TEST(KernelParams, RejectsNonPositive) {
  EXPECT_NO_THROW(kUnit.validate());
  EXPECT_THROW((KernelParams{0.0, 1.0, 1.0}).validate(), InputError);
  EXPECT_THROW((KernelParams{1.0, -1.0, 1.0}).validate(), InputError);
  EXPECT_THROW((KernelParams{1.0, 1.0, 0.0}).validate(), InputError);
  EXPECT_THROW((KernelParams{NAN, 1.0, 1.0}).validate(), InputError);
}

TEST(GaussianKernel, IdentityAndClosedForm) {
  const VectorXd x = vec({0.3, -1.2, 4.0});
  EXPECT_DOUBLE_EQ(gaussian_kernel(x, x, kUnit), 1.0);
  EXPECT_NEAR(gaussian_kernel(vec({0.0}), vec({std::sqrt(2.0)}), kUnit), 0.36787944117144233, 1e-15);
  EXPECT_THROW(gaussian_kernel(vec({0.0}), vec({1.0, 2.0}), kUnit), InputError);
}

TEST(GaussianKernel, ShiftInvariantAndSymmetric) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  const KernelParams p{0.7, 2.5, 0.1};
  for (int t = 0; t < 50; ++t) {
    VectorXd x(3), y(3), delta(3);
    for (int k = 0; k < 3; ++k) {
      x[k] = nd(rng);
      y[k] = nd(rng);
      delta[k] = 5.0 * nd(rng);
    }
    const double k = gaussian_kernel(x, y, p);
    EXPECT_NEAR(gaussian_kernel(x + delta, y + delta, p), k, 1e-13);
    EXPECT_DOUBLE_EQ(gaussian_kernel(y, x, p), k);
    EXPECT_GT(k, 0.0);
    EXPECT_LE(k, p.kernel_variance);
  }
}

TEST(TruncatedMaclaurin, DegreeZeroAndOrthogonal) {
  const KernelParams p{0.5, 2.0, 1.0};
  const VectorXd x = vec({0.4, 0.1});
  const VectorXd y = vec({-0.3, 0.7});
  const double xs2 = x.squaredNorm() / 0.25, ys2 = y.squaredNorm() / 0.25;
  EXPECT_NEAR(truncated_maclaurin_kernel(x, y, p, 0), 2.0 * std::exp(-0.5 * (xs2 + ys2)), 1e-15);

  const VectorXd a = vec({1.3, 0.0});
  const VectorXd b = vec({0.0, -2.1});
  for (int deg : {0, 1, 3, 9}) {
    EXPECT_NEAR(truncated_maclaurin_kernel(a, b, p, deg), gaussian_kernel(a, b, p), 1e-15);
  }
  EXPECT_THROW(truncated_maclaurin_kernel(a, b, p, -1), InputError);
}

TEST(TruncatedMaclaurin, ParallelNormThree) {
  // exp(-9) (1 + 9 + 81/2 + 729/6)
  const VectorXd x = vec({3.0, 0.0});
  const double expected = std::exp(-9.0) * (1.0 + 9.0 + 40.5 + 121.5);
  EXPECT_NEAR(truncated_maclaurin_kernel(x, x, kUnit, 3), expected, 1e-15);
  EXPECT_NEAR(expected, 2.122e-2, 1e-5);
}

TEST(TruncatedMaclaurin, VanishesAlongParallelRays) {
  const VectorXd u = vec({1.0, 0.0});
  double prev = truncated_maclaurin_kernel(2.0 * u, 2.0 * u, kUnit, 3);
  for (double t = 3.0; t <= 8.0; t += 1.0) {
    const double v = truncated_maclaurin_kernel(t * u, t * u, kUnit, 3);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(truncated_maclaurin_kernel(5.0 * u, 5.0 * u, kUnit, 3), 1e-6);
}

TEST(TruncatedMaclaurin, ErrorLargestWhenParallelZeroWhenOrthogonal) {
  const double pi = std::acos(-1.0);
  for (double nx : {0.5, 1.5, 2.5}) {
    for (double ny : {0.7, 2.0}) {
      double prev = INFINITY;
      for (int s = 0; s <= 20; ++s) {
        const double angle = 0.5 * pi * s / 20.0;
        const VectorXd x = at_angle(nx, 0.0), y = at_angle(ny, angle);
        const double err = std::abs(gaussian_kernel(x, y, kUnit) - truncated_maclaurin_kernel(x, y, kUnit, 3));
        EXPECT_LE(err, prev + 1e-15);
        prev = err;
      }
      EXPECT_LT(prev, 1e-14);
    }
  }
}

TEST(TruncatedMaclaurin, UpperBoundChain) {
  // sum_{n<=p} (|x||y|)^n / n! <= exp((|x|^2 + |y|^2) / 2)
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 6.0);
  for (int t = 0; t < 500; ++t) {
    const double a = u(rng), b = u(rng);
    for (int p = 0; p <= 10; ++p) {
      double term = 1.0, sum = 1.0;
      for (int n = 1; n <= p; ++n) {
        term *= a * b / n;
        sum += term;
      }
      EXPECT_LE(sum, std::exp(0.5 * (a * a + b * b)) * (1.0 + 1e-14));
    }
  }
}

TEST(TruncatedMaclaurin, ConvergesWithDegree) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    VectorXd x(2), y(2);
    for (int k = 0; k < 2; ++k) {
      x[k] = u(rng);
      y[k] = u(rng);
    }
    x *= 2.0 / std::max(1.0, x.norm() / 1.0) / std::sqrt(2.0);
    y *= 2.0 / std::max(1.0, y.norm() / 1.0) / std::sqrt(2.0);
    ASSERT_LE(x.norm(), 2.0);
    EXPECT_LT(std::abs(gaussian_kernel(x, y, kUnit) - truncated_maclaurin_kernel(x, y, kUnit, 20)), 1e-8);
  }
}

TEST(LocalizedKernel, ExactAtCenterAndZeroShift) {
  const KernelParams p{0.3, 1.7, 0.1};
  const VectorXd c = vec({0.5, -0.2});
  const VectorXd y = vec({1.4, 0.9});
  for (int deg : {0, 2, 6}) {
    EXPECT_NEAR(localized_truncated_kernel(c, y, c, p, deg), gaussian_kernel(c, y, p), 1e-15);
    EXPECT_NEAR(localized_truncated_kernel(y, c, c, p, deg), gaussian_kernel(c, y, p), 1e-15);
  }
  const VectorXd zero = VectorXd::Zero(2);
  EXPECT_DOUBLE_EQ(localized_truncated_kernel(c, y, zero, p, 4), truncated_maclaurin_kernel(c, y, p, 4));
  EXPECT_THROW(localized_truncated_kernel(c, y, vec({1.0}), p, 4), InputError);
}

TEST(LocalizedKernel, MoreAccurateNearCenter) {
  // Short length scale: compare mean error over grid points near and far from c.
  const KernelParams p{0.2, 1.0, 0.1};
  const VectorXd c = vec({0.0, 0.0});
  double near = 0.0, far = 0.0;
  int count = 0;
  for (int i = -3; i <= 3; ++i) {
    for (int j = -3; j <= 3; ++j) {
      const VectorXd d = vec({0.05 * i, 0.05 * j});
      const VectorXd xn = d, yn = vec({0.1, 0.0}) + d;
      const VectorXd xf = vec({1.5, 1.5}) + d, yf = vec({1.6, 1.5}) + d;
      near += std::abs(localized_truncated_kernel(xn, yn, c, p, 6) - gaussian_kernel(xn, yn, p));
      far += std::abs(localized_truncated_kernel(xf, yf, c, p, 6) - gaussian_kernel(xf, yf, p));
      ++count;
    }
  }
  EXPECT_LT(near / count, 1e-3);
  EXPECT_GT(far / count, 0.5);
}

TEST(KernelMatrix, MatchesLoopAndIsSymmetric) {
  MatrixXd X(3, 2);
  X << 0.1, 0.2, -0.7, 1.1, 2.0, -0.4;
  const KernelParams p{0.9, 1.3, 0.1};
  const MatrixXd K = gaussian_kernel_matrix(X, X, p);
  const MatrixXd G = kernel_matrix(X, X, [&](const VectorXd& a, const VectorXd& b) { return gaussian_kernel(a, b, p); });
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) {
      const double naive = 1.3 * std::exp(-((X(i, 0) - X(j, 0)) * (X(i, 0) - X(j, 0)) +
                                            (X(i, 1) - X(j, 1)) * (X(i, 1) - X(j, 1))) / (2 * 0.81));
      EXPECT_NEAR(K(i, j), naive, 1e-15);
      EXPECT_NEAR(G(i, j), naive, 1e-15);
      EXPECT_EQ(K(i, j), K(j, i));
    }
  }
  const MatrixXd single = gaussian_kernel_matrix(X.topRows(1), X.topRows(1), p);
  EXPECT_EQ(single.rows(), 1);
  EXPECT_DOUBLE_EQ(single(0, 0), 1.3);
  EXPECT_THROW(gaussian_kernel_matrix(X, MatrixXd::Zero(2, 3), p), InputError);
  // PSD for the exact kernel
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<MatrixXd>(K).eigenvalues().minCoeff(), -1e-12);
}

TEST(MedianHeuristic, SmallCases) {
  MatrixXd two(2, 1);
  two << 0.0, 1.0;
  EXPECT_DOUBLE_EQ(median_heuristic(two).value, 1.0);
  MatrixXd three(3, 1);
  three << 0.0, 1.0, 3.0;
  EXPECT_DOUBLE_EQ(median_heuristic(three).value, 2.0);
  MatrixXd four(4, 1);  // distances 1,3,6,2,5,3 -> sorted 1,2,3,3,5,6 -> 3
  four << 0.0, 1.0, 3.0, 6.0;
  EXPECT_DOUBLE_EQ(median_heuristic(four).value, 3.0);
  MatrixXd five(5, 1);  // 10 distances; middle pair averages
  five << 0.0, 1.0, 2.0, 4.0, 8.0;  // 1,2,4,8,1,3,7,2,6,4 -> sorted 1,1,2,2,3,4,4,6,7,8 -> 3.5
  EXPECT_DOUBLE_EQ(median_heuristic(five).value, 3.5);
}

TEST(MedianHeuristic, DegenerateAndErrors) {
  const MatrixXd same = MatrixXd::Constant(4, 2, 1.5);
  const auto m = median_heuristic(same);
  EXPECT_EQ(m.value, 0.0);
  EXPECT_TRUE(m.degenerate);
  EXPECT_THROW(median_heuristic(MatrixXd::Zero(1, 2)), InputError);
}

TEST(MedianHeuristic, SubsamplesLargeInputsDeterministically) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MatrixXd X(600, 1);
  for (Index i = 0; i < X.rows(); ++i) X(i, 0) = u(rng);
  const auto a = median_heuristic(X, 200, 9);
  const auto b = median_heuristic(X, 200, 9);
  const auto full = median_heuristic(X);
  EXPECT_EQ(a.value, b.value);
  // |U1 - U2| has median 1 - 1/sqrt(2)
  EXPECT_NEAR(full.value, 1.0 - 1.0 / std::sqrt(2.0), 0.03);
  EXPECT_NEAR(a.value, full.value, 0.05);
}
