#include "locmac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "locmac/error.hpp"

namespace locmac {

double kl_gaussian(double p_mean, double p_var, double q_mean, double q_var) {
  if (!(p_var > 0.0) || !(q_var > 0.0)) throw InputError("kl_gaussian: variances must be > 0");
  const double diff = p_mean - q_mean;
  const double kl = 0.5 * (std::log(q_var / p_var) + (p_var + diff * diff) / q_var - 1.0);
  return std::max(kl, 0.0);
}

double rmse(const VecRef& predictions, const VecRef& targets) {
  check_same_dim(predictions.size(), targets.size(), "rmse");
  if (predictions.size() == 0) throw InputError("rmse: empty input");
  return std::sqrt((predictions - targets).squaredNorm() / static_cast<double>(targets.size()));
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw InputError("spearman: need two equally long series with at least two entries");
  }
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

EvalReport evaluate(const PredictiveGaussian& reference, const PredictiveGaussian& approx,
                    const VecRef& targets, KlDirection direction) {
  const Index m = reference.mean.size();
  check_same_dim(approx.mean.size(), m, "evaluate");
  check_same_dim(reference.variance.size(), m, "evaluate");
  check_same_dim(approx.variance.size(), m, "evaluate");
  EvalReport report;
  report.per_point_kl.reserve(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    const double kl =
        direction == KlDirection::ReferenceToApprox
            ? kl_gaussian(reference.mean[i], reference.variance[i], approx.mean[i], approx.variance[i])
            : kl_gaussian(approx.mean[i], approx.variance[i], reference.mean[i], reference.variance[i]);
    report.per_point_kl.push_back(kl);
    report.sum_kl += kl;
  }
  report.mean_kl = m > 0 ? report.sum_kl / static_cast<double>(m) : 0.0;
  if (targets.size() > 0) report.rmse = rmse(approx.mean, targets);
  return report;
}

nlohmann::json to_json(const EvalReport& report) {
  return {{"mean_kl", report.mean_kl},
          {"sum_kl", report.sum_kl},
          {"rmse", report.rmse},
          {"per_point_kl", report.per_point_kl},
          {"config_echo", report.config_echo}};
}

}  // namespace locmac
