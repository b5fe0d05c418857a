#ifndef LOCMAC_LOCALIZED_HPP
#define LOCMAC_LOCALIZED_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "locmac/gpr.hpp"
#include "locmac/maclaurin.hpp"

namespace locmac {

/// How the Maclaurin feature map is chosen for a data set.
/// d = 1: explicit map of degree total_features - 1.
/// d > 1: randomized map; the budget total_features - 1 is allocated over
/// degrees 1..max_degree on mean-centred pairs unless `allocation` is given.
struct FeatureConfig {
  KernelParams params;
  Index total_features = 10;
  int max_degree = 15;
  SketchKind kind = SketchKind::Rademacher;
  std::uint64_t seed = 0;
  Index allocation_pairs = 100;
  std::optional<std::vector<Index>> allocation;
};

struct FeatureMapChoice {
  MaclaurinFeatureMap map;
  std::optional<AllocationResult> allocation;  // set when the optimizer ran
};

FeatureMapChoice choose_feature_map(const MatRef& X, const FeatureConfig& config);

struct CentroidSet {
  MatrixXd centroids;  // one centroid per row; row 0 is the training mean
  double threshold = std::numeric_limits<double>::infinity();

  Index size() const { return centroids.rows(); }
};

/// Farthest-point clustering seeded with the training mean. Adds the training
/// point with the largest distance to its nearest centroid (lowest index on
/// ties) until every point is closer than `threshold`. threshold may be +inf.
CentroidSet farthest_point_clustering(const MatRef& X, double threshold);

/// Index of the nearest centroid (lowest index on ties) and its distance.
std::pair<Index, double> nearest_centroid(const CentroidSet& set, const VecRef& x);

/// What to do with a test point that lies at distance >= threshold from every
/// centroid, i.e. outside the region the training points cover.
enum class OutOfCoverage {
  NearestCentroid,      // use the nearest centroid's model anyway
  LocalizeAtTestPoint,  // fit a model centred at the test point itself
};

struct LocalizedModel {
  CentroidSet centroid_set;
  MaclaurinFeatureMap map;  // shared by every local model
  std::optional<AllocationResult> allocation;
  std::vector<FeatureGPModel> local_models;  // one per centroid, fit on Phi(X - c)
  Dataset train;                             // kept for test-point localization
};

LocalizedModel fit_localized(const Dataset& train, const FeatureConfig& config, double threshold);
LocalizedModel fit_localized(const Dataset& train, const FeatureMapChoice& choice,
                             double threshold);

PredictiveGaussian predict_localized(const LocalizedModel& model, const MatRef& test_inputs,
                                     OutOfCoverage policy = OutOfCoverage::LocalizeAtTestPoint);

/// Reference mode: one feature-space model per test point, centred at that
/// point. Costs O(M N D^2).
PredictiveGaussian predict_pointwise_localized(const Dataset& train, const MaclaurinFeatureMap& map,
                                               const MatRef& test_inputs);

}  // namespace locmac

#endif  // LOCMAC_LOCALIZED_HPP
