#include "locmac/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "locmac/error.hpp"
#include "locmac/random.hpp"

namespace locmac {

void KernelParams::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!ok(lengthscale) || !ok(kernel_variance) || !ok(noise_variance)) {
    throw InputError("KernelParams: lengthscale, kernel_variance and noise_variance must be finite and > 0");
  }
}

void check_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    throw InputError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                     std::to_string(b) + ")");
  }
}

double gaussian_kernel(const VecRef& x, const VecRef& y, const KernelParams& params) {
  check_same_dim(x.size(), y.size(), "gaussian_kernel");
  const double l2 = params.lengthscale * params.lengthscale;
  return params.kernel_variance * std::exp(-(x - y).squaredNorm() / (2.0 * l2));
}

double truncated_maclaurin_kernel(const VecRef& x, const VecRef& y, const KernelParams& params,
                                  int degree) {
  check_same_dim(x.size(), y.size(), "truncated_maclaurin_kernel");
  if (degree < 0) throw InputError("truncated_maclaurin_kernel: degree must be >= 0");
  const double l2 = params.lengthscale * params.lengthscale;
  const double xx = x.squaredNorm() / l2;
  const double yy = y.squaredNorm() / l2;
  const double xy = x.dot(y) / l2;
  double term = 1.0;
  double series = 1.0;
  for (int n = 1; n <= degree; ++n) {
    term *= xy / n;
    series += term;
  }
  return params.kernel_variance * std::exp(-0.5 * (xx + yy)) * series;
}

double localized_truncated_kernel(const VecRef& x, const VecRef& y, const VecRef& center,
                                  const KernelParams& params, int degree) {
  check_same_dim(x.size(), center.size(), "localized_truncated_kernel");
  check_same_dim(y.size(), center.size(), "localized_truncated_kernel");
  const VectorXd xs = x - center;
  const VectorXd ys = y - center;
  return truncated_maclaurin_kernel(xs, ys, params, degree);
}

MatrixXd gaussian_kernel_matrix(const MatRef& X, const MatRef& Y, const KernelParams& params) {
  check_same_dim(X.cols(), Y.cols(), "gaussian_kernel_matrix");
  const double scale = -0.5 / (params.lengthscale * params.lengthscale);
  MatrixXd K(X.rows(), Y.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index j = 0; j < Y.rows(); ++j) {
      K(i, j) = params.kernel_variance * std::exp(scale * (X.row(i) - Y.row(j)).squaredNorm());
    }
  }
  return K;
}

MedianHeuristic median_heuristic(const MatRef& X, Index max_points, std::uint64_t seed) {
  if (X.rows() < 2) throw InputError("median_heuristic: need at least two points");
  std::vector<Index> rows(static_cast<std::size_t>(X.rows()));
  std::iota(rows.begin(), rows.end(), Index{0});
  if (max_points >= 2 && X.rows() > max_points) {
    Rng rng = child_rng(seed, {0x6d6564ULL});
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(static_cast<std::size_t>(max_points));
    std::sort(rows.begin(), rows.end());
  }

  std::vector<double> dist;
  dist.reserve(rows.size() * (rows.size() - 1) / 2);
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = a + 1; b < rows.size(); ++b) {
      dist.push_back((X.row(rows[a]) - X.row(rows[b])).norm());
    }
  }
  const std::size_t m = dist.size();
  const std::size_t mid = m / 2;
  std::nth_element(dist.begin(), dist.begin() + mid, dist.end());
  double median = dist[mid];
  if (m % 2 == 0) {
    const double lower = *std::max_element(dist.begin(), dist.begin() + mid);
    median = 0.5 * (lower + median);
  }
  return {median, median == 0.0};
}

}  // namespace locmac
