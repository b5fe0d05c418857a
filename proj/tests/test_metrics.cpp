#include <gtest/gtest.h>

#include <cmath>

#include "locmac/error.hpp"
#include "locmac/metrics.hpp"

using namespace locmac;

TEST(KlGaussian, ClosedFormValues) {
  EXPECT_EQ(kl_gaussian(0.3, 2.0, 0.3, 2.0), 0.0);
  EXPECT_DOUBLE_EQ(kl_gaussian(0.0, 1.0, 1.0, 1.0), 0.5);
  EXPECT_NEAR(kl_gaussian(0.0, 1.0, 0.0, std::exp(1.0)), 0.5 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(kl_gaussian(0.0, 1.0, 0.0, std::exp(1.0)), 0.18393972058572117, 1e-15);
  EXPECT_THROW(kl_gaussian(0.0, 0.0, 0.0, 1.0), InputError);
  EXPECT_THROW(kl_gaussian(0.0, 1.0, 0.0, -1.0), InputError);
}

TEST(KlGaussian, MatchesNumericalIntegration) {
  const double pm = 0.4, pv = 0.7, qm = -0.2, qv = 1.9;
  auto logpdf = [](double x, double m, double v) {
    return -0.5 * std::log(2 * std::acos(-1.0) * v) - 0.5 * (x - m) * (x - m) / v;
  };
  double total = 0.0;
  const double h = 1e-3;
  for (double x = -15.0; x <= 15.0; x += h) {
    const double lp = logpdf(x, pm, pv);
    total += std::exp(lp) * (lp - logpdf(x, qm, qv)) * h;
  }
  EXPECT_NEAR(kl_gaussian(pm, pv, qm, qv), total, 1e-8);
}

TEST(KlGaussian, NonNegativeAndAsymmetric) {
  for (double a : {0.1, 1.0, 5.0}) {
    for (double b : {0.2, 1.0, 3.0}) {
      EXPECT_GE(kl_gaussian(0.0, a, 1.0, b), 0.0);
    }
  }
  EXPECT_NE(kl_gaussian(0.0, 1.0, 0.0, 4.0), kl_gaussian(0.0, 4.0, 0.0, 1.0));
}

TEST(Rmse, Examples) {
  const VectorXd t = (VectorXd(3) << 1.0, -2.0, 0.5).finished();
  EXPECT_EQ(rmse(t, t), 0.0);
  EXPECT_DOUBLE_EQ(rmse(t.array() + 1.0, t), 1.0);
  EXPECT_NEAR(rmse(VectorXd::Zero(2), (VectorXd(2) << 3.0, 4.0).finished()), std::sqrt(12.5), 1e-15);
  EXPECT_THROW(rmse(VectorXd(0), VectorXd(0)), InputError);
  EXPECT_THROW(rmse(t, VectorXd::Zero(2)), InputError);
}

TEST(Spearman, RanksAndTies) {
  EXPECT_NEAR(spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0, 1e-15);
  EXPECT_NEAR(spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0, 1e-15);
  EXPECT_NEAR(spearman({1, 2, 3, 4}, {1, 100, 1000, 1e6}), 1.0, 1e-15);
  // Ties use average ranks: x ranks (1, 2.5, 2.5, 4), y ranks (1, 2, 3, 4).
  const double r = spearman({1, 2, 2, 3}, {1, 2, 3, 4});
  EXPECT_NEAR(r, 4.5 / std::sqrt(4.5 * 5.0), 1e-14);
  EXPECT_THROW(spearman({1}, {1}), InputError);
  EXPECT_THROW(spearman({1, 2}, {1, 2, 3}), InputError);
}

TEST(Evaluate, SelfComparisonAndDirection) {
  PredictiveGaussian ref{(VectorXd(2) << 0.0, 1.0).finished(), (VectorXd(2) << 1.0, 2.0).finished()};
  PredictiveGaussian approx{(VectorXd(2) << 1.0, 1.0).finished(), (VectorXd(2) << 1.0, 4.0).finished()};
  const VectorXd targets = (VectorXd(2) << 0.0, 2.0).finished();
  const auto self = evaluate(ref, ref, targets);
  EXPECT_EQ(self.mean_kl, 0.0);
  EXPECT_DOUBLE_EQ(self.rmse, rmse(ref.mean, targets));

  const auto fwd = evaluate(ref, approx, targets);
  ASSERT_EQ(fwd.per_point_kl.size(), 2u);
  EXPECT_DOUBLE_EQ(fwd.per_point_kl[0], 0.5);
  EXPECT_DOUBLE_EQ(fwd.per_point_kl[1], kl_gaussian(1.0, 2.0, 1.0, 4.0));
  EXPECT_DOUBLE_EQ(fwd.sum_kl, fwd.per_point_kl[0] + fwd.per_point_kl[1]);
  EXPECT_DOUBLE_EQ(fwd.mean_kl, fwd.sum_kl / 2.0);
  const auto back = evaluate(ref, approx, targets, KlDirection::ApproxToReference);
  EXPECT_DOUBLE_EQ(back.per_point_kl[1], kl_gaussian(1.0, 4.0, 1.0, 2.0));

  const auto json = to_json(fwd);
  EXPECT_DOUBLE_EQ(json.at("mean_kl").get<double>(), fwd.mean_kl);
  EXPECT_EQ(json.at("per_point_kl").size(), 2u);

  PredictiveGaussian short_pred{VectorXd::Zero(1), VectorXd::Ones(1)};
  EXPECT_THROW(evaluate(ref, short_pred, targets), InputError);
}
