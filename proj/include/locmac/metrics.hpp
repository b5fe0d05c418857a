#ifndef LOCMAC_METRICS_HPP
#define LOCMAC_METRICS_HPP

#include <vector>

#include "json.hpp"

#include "locmac/gpr.hpp"

namespace locmac {

enum class KlDirection {
  ReferenceToApprox,  // KL(reference || approximation)
  ApproxToReference,
};

/// KL(p || q) for univariate Gaussians p = N(p_mean, p_var), q = N(q_mean, q_var):
///   1/2 [log(q_var / p_var) + (p_var + (p_mean - q_mean)^2) / q_var - 1].
/// Throws InputError unless both variances are > 0.
double kl_gaussian(double p_mean, double p_var, double q_mean, double q_var);

double rmse(const VecRef& predictions, const VecRef& targets);

/// Spearman rank correlation (average ranks on ties).
double spearman(const std::vector<double>& a, const std::vector<double>& b);

struct EvalReport {
  double mean_kl = 0.0;
  double sum_kl = 0.0;
  double rmse = 0.0;
  std::vector<double> per_point_kl;
  nlohmann::json config_echo;
};

/// Per-point KL between the reference and approximate predictive distributions
/// plus the RMSE of the approximate mean against `targets` (skipped when empty).
EvalReport evaluate(const PredictiveGaussian& reference, const PredictiveGaussian& approx,
                    const VecRef& targets, KlDirection direction = KlDirection::ReferenceToApprox);

nlohmann::json to_json(const EvalReport& report);

}  // namespace locmac

#endif  // LOCMAC_METRICS_HPP
