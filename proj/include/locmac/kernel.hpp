#ifndef LOCMAC_KERNEL_HPP
#define LOCMAC_KERNEL_HPP

#include <cstdint>

#include <Eigen/Dense>

namespace locmac {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using VecRef = Eigen::Ref<const VectorXd>;
using MatRef = Eigen::Ref<const MatrixXd>;

/// Gaussian kernel hyperparameters plus observation noise.
/// All three are strictly positive; variances are in target units squared.
struct KernelParams {
  double lengthscale = 1.0;
  double kernel_variance = 1.0;
  double noise_variance = 1.0;

  /// Throws InputError unless every field is finite and > 0.
  void validate() const;
};

/// sigma^2 exp(-|x - y|^2 / (2 l^2)).
double gaussian_kernel(const VecRef& x, const VecRef& y, const KernelParams& params);

/// Degree-p truncation of the Maclaurin series of the Gaussian kernel:
///   sigma^2 exp(-(|x~|^2 + |y~|^2) / 2) sum_{n=0}^{p} (x~^T y~)^n / n!
/// with x~ = x / l. Equal to the exact kernel whenever x~^T y~ = 0.
double truncated_maclaurin_kernel(const VecRef& x, const VecRef& y, const KernelParams& params,
                                  int degree);

/// The truncated kernel re-centred at `center`: k_p(x - c, y - c).
/// Exact whenever x == c or y == c.
double localized_truncated_kernel(const VecRef& x, const VecRef& y, const VecRef& center,
                                  const KernelParams& params, int degree);

/// Dense N x M matrix with entry (i, j) = kernel(X.row(i), Y.row(j)).
/// Rows of X and Y are points.
template <class Kernel>
MatrixXd kernel_matrix(const MatRef& X, const MatRef& Y, Kernel&& kernel);

/// Gaussian-kernel specialisation; exactly symmetric when X and Y alias the same data.
MatrixXd gaussian_kernel_matrix(const MatRef& X, const MatRef& Y, const KernelParams& params);

struct MedianHeuristic {
  double value = 0.0;
  bool degenerate = false;  // every pair distance was zero
};

/// Median pairwise Euclidean distance between the rows of X (mean of the two
/// middle values for an even pair count). Above `max_points` rows a uniform
/// subsample of that size, drawn from `seed`, is used.
MedianHeuristic median_heuristic(const MatRef& X, Index max_points = 5000,
                                 std::uint64_t seed = 0);

// ---------------------------------------------------------------------------

void check_same_dim(Index a, Index b, const char* what);

template <class Kernel>
MatrixXd kernel_matrix(const MatRef& X, const MatRef& Y, Kernel&& kernel) {
  check_same_dim(X.cols(), Y.cols(), "kernel_matrix");
  MatrixXd K(X.rows(), Y.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index j = 0; j < Y.rows(); ++j) {
      K(i, j) = kernel(X.row(i).transpose(), Y.row(j).transpose());
    }
  }
  return K;
}

}  // namespace locmac

#endif  // LOCMAC_KERNEL_HPP
