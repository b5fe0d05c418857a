#include "locmac/rff.hpp"

#include <cmath>
#include <random>

#include "locmac/error.hpp"
#include "locmac/random.hpp"

namespace locmac {

FourierFeatureMap sample_rff(Index input_dim, Index feature_dim, const KernelParams& params,
                             bool structured, std::uint64_t seed) {
  params.validate();
  if (input_dim < 1) throw InputError("sample_rff: input_dim must be >= 1");
  if (feature_dim < 2 || feature_dim % 2 != 0) {
    throw InputError("sample_rff: feature count must be even and >= 2");
  }
  const Index rows = feature_dim / 2;
  FourierFeatureMap map;
  map.kernel_variance = params.kernel_variance;
  map.structured = structured;
  map.frequencies.resize(rows, input_dim);

  std::normal_distribution<double> normal(0.0, 1.0);
  if (!structured) {
    Rng rng = child_rng(seed, {0x726666ULL});
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < input_dim; ++j) map.frequencies(i, j) = normal(rng);
  } else {
    const Index d = input_dim;
    for (Index start = 0, block = 0; start < rows; start += d, ++block) {
      Rng rng = child_rng(seed, {0x6f7266ULL, static_cast<std::uint64_t>(block)});
      MatrixXd G(d, d);
      for (Index j = 0; j < d; ++j)
        for (Index i = 0; i < d; ++i) G(i, j) = normal(rng);
      const MatrixXd Q = G.householderQr().householderQ();
      const Index take = std::min(d, rows - start);
      for (Index r = 0; r < take; ++r) {
        double chi2 = 0.0;
        for (Index k = 0; k < d; ++k) {
          const double z = normal(rng);
          chi2 += z * z;
        }
        map.frequencies.row(start + r) = std::sqrt(chi2) * Q.col(r).transpose();
      }
    }
  }
  map.frequencies /= params.lengthscale;
  return map;
}

VectorXd apply_rff(const FourierFeatureMap& map, const VecRef& x) {
  return apply_rff_rows(map, x.transpose()).row(0).transpose();
}

MatrixXd apply_rff_rows(const FourierFeatureMap& map, const MatRef& X) {
  check_same_dim(X.cols(), map.input_dim(), "apply_rff");
  const MatrixXd proj = X * map.frequencies.transpose();
  const double scale =
      std::sqrt(map.kernel_variance) * std::sqrt(2.0 / static_cast<double>(map.feature_dim()));
  MatrixXd out(X.rows(), map.feature_dim());
  for (Index k = 0; k < proj.cols(); ++k) {
    out.col(2 * k) = scale * proj.col(k).array().cos().matrix();
    out.col(2 * k + 1) = scale * proj.col(k).array().sin().matrix();
  }
  return out;
}

}  // namespace locmac
