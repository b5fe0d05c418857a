#include "locmac/maclaurin.hpp"

#include <cmath>
#include <string>

#include "locmac/error.hpp"
#include "locmac/random.hpp"

namespace locmac {

namespace {

double inv_sqrt_factorial(int n) { return std::exp(-0.5 * std::lgamma(n + 1.0)); }

Index explicit_dim(Index d, int degree) {
  Index total = 1;
  Index power = 1;
  for (int n = 1; n <= degree; ++n) {
    if (power > kMaxExplicitDim / std::max<Index>(d, 1)) {
      return kMaxExplicitDim + 1;
    }
    power *= d;
    total += power;
    if (total > kMaxExplicitDim) return total;
  }
  return total;
}

// Writes (x~^(1)/sqrt(1!), ..., x~^(p)/sqrt(p!)) into out, starting at offset 1.
void explicit_tail(const VecRef& xs, int degree, double* out) {
  VectorXd power(1);
  power[0] = 1.0;
  Index offset = 1;
  for (int n = 1; n <= degree; ++n) {
    VectorXd next(power.size() * xs.size());
    for (Index a = 0; a < power.size(); ++a) {
      next.segment(a * xs.size(), xs.size()) = power[a] * xs;
    }
    power = std::move(next);
    const double c = inv_sqrt_factorial(n);
    for (Index k = 0; k < power.size(); ++k) out[offset + k] = c * power[k];
    offset += power.size();
  }
}

}  // namespace

MaclaurinFeatureMap build_explicit_map(const KernelParams& params, int degree, Index input_dim) {
  params.validate();
  if (degree < 0) throw InputError("build_explicit_map: degree must be >= 0");
  if (input_dim < 1) throw InputError("build_explicit_map: input_dim must be >= 1");
  const Index total = explicit_dim(input_dim, degree);
  if (total > kMaxExplicitDim) {
    throw CapacityError("build_explicit_map: 1 + d + ... + d^p exceeds " +
                        std::to_string(kMaxExplicitDim) + " features (d=" +
                        std::to_string(input_dim) + ", p=" + std::to_string(degree) + ")");
  }
  MaclaurinFeatureMap map;
  map.params = params;
  map.variant = MapVariant::Explicit;
  map.degree_cap = degree;
  map.input_dim = input_dim;
  map.total_dim = total;
  return map;
}

MaclaurinFeatureMap build_random_map(const KernelParams& params, std::vector<Index> allocation,
                                     SketchKind kind, Index input_dim, std::uint64_t seed) {
  params.validate();
  if (input_dim < 1) throw InputError("build_random_map: input_dim must be >= 1");
  MaclaurinFeatureMap map;
  map.params = params;
  map.variant = MapVariant::Randomized;
  map.degree_cap = static_cast<int>(allocation.size());
  map.input_dim = input_dim;
  map.kind = kind;
  map.seed = seed;
  map.total_dim = 1;
  map.sketches.resize(allocation.size());
  for (std::size_t i = 0; i < allocation.size(); ++i) {
    if (allocation[i] < 0) throw InputError("build_random_map: allocation entries must be >= 0");
    if (allocation[i] == 0) continue;
    const int n = static_cast<int>(i) + 1;
    map.sketches[i] = sample_sketch(kind, n, input_dim, allocation[i],
                                    derive_seed(seed, {static_cast<std::uint64_t>(n)}));
    map.total_dim += allocation[i];
  }
  map.allocation = std::move(allocation);
  return map;
}

VectorXd MaclaurinFeatureMap::features(const VecRef& x) const {
  MatrixXd row = featurize(*this, x.transpose());
  return row.row(0).transpose();
}

MatrixXd featurize(const MaclaurinFeatureMap& map, const MatRef& X,
                   const std::optional<VectorXd>& center) {
  check_same_dim(X.cols(), map.input_dim, "featurize");
  if (center) check_same_dim(center->size(), map.input_dim, "featurize (center)");

  const double inv_l = 1.0 / map.params.lengthscale;
  MatrixXd Xs = X;
  if (center) Xs.rowwise() -= center->transpose();
  Xs *= inv_l;

  MatrixXd out(X.rows(), map.total_dim);
  out.col(0).setOnes();
  if (map.variant == MapVariant::Explicit) {
    for (Index r = 0; r < Xs.rows(); ++r) {
      VectorXd tail(map.total_dim);
      explicit_tail(Xs.row(r).transpose(), map.degree_cap, tail.data());
      out.row(r).tail(map.total_dim - 1) = tail.tail(map.total_dim - 1).transpose();
    }
  } else {
    Index offset = 1;
    for (std::size_t i = 0; i < map.sketches.size(); ++i) {
      if (!map.sketches[i]) continue;
      const auto& sketch = *map.sketches[i];
      out.middleCols(offset, sketch.feature_dim) =
          inv_sqrt_factorial(static_cast<int>(i) + 1) * apply_sketch_rows(sketch, Xs);
      offset += sketch.feature_dim;
    }
  }

  const double sigma = std::sqrt(map.params.kernel_variance);
  for (Index r = 0; r < Xs.rows(); ++r) {
    out.row(r) *= sigma * std::exp(-0.5 * Xs.row(r).squaredNorm());
  }
  return out;
}

double randomized_kernel_variance(const MaclaurinFeatureMap& map, const VecRef& x,
                                  const VecRef& y) {
  check_same_dim(x.size(), map.input_dim, "randomized_kernel_variance");
  check_same_dim(y.size(), map.input_dim, "randomized_kernel_variance");
  if (map.variant == MapVariant::Explicit) return 0.0;
  const VectorXd xs = x / map.params.lengthscale;
  const VectorXd ys = y / map.params.lengthscale;
  double total = 0.0;
  for (std::size_t i = 0; i < map.allocation.size(); ++i) {
    if (map.allocation[i] == 0) continue;
    const int n = static_cast<int>(i) + 1;
    const double w = std::exp(-std::lgamma(n + 1.0));  // (1/n!)
    total += w * w * sketch_variance(map.kind, xs, ys, n, map.allocation[i]);
  }
  const double pref =
      map.params.kernel_variance * std::exp(-0.5 * (xs.squaredNorm() + ys.squaredNorm()));
  return pref * pref * total;
}

}  // namespace locmac
