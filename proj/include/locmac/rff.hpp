#ifndef LOCMAC_RFF_HPP
#define LOCMAC_RFF_HPP

#include <cstdint>

#include "locmac/kernel.hpp"

namespace locmac {

/// Random Fourier features for the Gaussian kernel.
/// Phi(x) = sigma sqrt(2/D) (cos w_1^T x, sin w_1^T x, ..., cos w_{D/2}^T x, sin w_{D/2}^T x),
/// so Phi(x)^T Phi(x) = sigma^2 for every draw.
struct FourierFeatureMap {
  MatrixXd frequencies;  // (D/2) x d, already divided by the length scale
  double kernel_variance = 1.0;
  bool structured = false;

  Index feature_dim() const { return 2 * frequencies.rows(); }
  Index input_dim() const { return frequencies.cols(); }
};

/// Unstructured: i.i.d. N(0, I/l^2) rows. Structured (orthogonal random
/// features): each d x d block is the Q factor of a Gaussian matrix with rows
/// rescaled by independent chi(d) draws, then divided by l; the last block is
/// truncated to fill D/2 rows.
FourierFeatureMap sample_rff(Index input_dim, Index feature_dim, const KernelParams& params,
                             bool structured, std::uint64_t seed);

VectorXd apply_rff(const FourierFeatureMap& map, const VecRef& x);
MatrixXd apply_rff_rows(const FourierFeatureMap& map, const MatRef& X);

}  // namespace locmac

#endif  // LOCMAC_RFF_HPP
