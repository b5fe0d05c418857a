#include "locmac/localized.hpp"

#include <cmath>
#include <string>

#include "locmac/error.hpp"

namespace locmac {

FeatureMapChoice choose_feature_map(const MatRef& X, const FeatureConfig& config) {
  config.params.validate();
  if (config.total_features < 1) throw InputError("feature config: total_features must be >= 1");
  const Index d = X.cols();
  if (d == 1 && !config.allocation) {
    return {build_explicit_map(config.params, static_cast<int>(config.total_features - 1), 1),
            std::nullopt};
  }
  if (config.allocation) {
    return {build_random_map(config.params, *config.allocation, config.kind, d, config.seed),
            std::nullopt};
  }
  if (config.total_features == 1) {
    return {build_random_map(config.params, {}, config.kind, d, config.seed), std::nullopt};
  }
  const auto pairs = sample_centered_pairs(X, config.allocation_pairs, config.seed);
  AllocationResult alloc = optimize_allocation(pairs, config.total_features - 1,
                                               config.max_degree, config.kind, config.params);
  MaclaurinFeatureMap map =
      build_random_map(config.params, alloc.allocation, config.kind, d, config.seed);
  return {std::move(map), std::move(alloc)};
}

CentroidSet farthest_point_clustering(const MatRef& X, double threshold) {
  if (X.rows() < 1) throw InputError("farthest_point_clustering: no points");
  if (!(threshold > 0.0)) throw InputError("farthest_point_clustering: threshold must be > 0");

  std::vector<VectorXd> centroids{X.colwise().mean().transpose()};
  VectorXd nearest = (X.rowwise() - centroids[0].transpose()).rowwise().norm();
  while (true) {
    Index far = 0;
    const double max_dist = nearest.maxCoeff(&far);  // first maximum on ties
    if (max_dist < threshold) break;
    centroids.push_back(X.row(far).transpose());
    nearest = nearest.cwiseMin((X.rowwise() - X.row(far)).rowwise().norm());
  }

  CentroidSet set;
  set.threshold = threshold;
  set.centroids.resize(static_cast<Index>(centroids.size()), X.cols());
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    set.centroids.row(static_cast<Index>(i)) = centroids[i].transpose();
  }
  return set;
}

std::pair<Index, double> nearest_centroid(const CentroidSet& set, const VecRef& x) {
  check_same_dim(x.size(), set.centroids.cols(), "nearest_centroid");
  Index best = 0;
  const double dist =
      std::sqrt((set.centroids.rowwise() - x.transpose()).rowwise().squaredNorm().minCoeff(&best));
  return {best, dist};
}

LocalizedModel fit_localized(const Dataset& train, const FeatureConfig& config, double threshold) {
  train.validate();
  return fit_localized(train, choose_feature_map(train.inputs, config), threshold);
}

LocalizedModel fit_localized(const Dataset& train, const FeatureMapChoice& choice,
                             double threshold) {
  train.validate();
  check_same_dim(train.dim(), choice.map.input_dim, "fit_localized");
  LocalizedModel model;
  model.centroid_set = farthest_point_clustering(train.inputs, threshold);
  model.map = choice.map;
  model.allocation = choice.allocation;
  model.train = train;
  model.local_models.reserve(static_cast<std::size_t>(model.centroid_set.size()));
  for (Index c = 0; c < model.centroid_set.size(); ++c) {
    const VectorXd center = model.centroid_set.centroids.row(c).transpose();
    try {
      model.local_models.push_back(feature_gpr_fit(featurize(model.map, train.inputs, center),
                                                   train.targets,
                                                   model.map.params.noise_variance));
    } catch (const NumericalError& e) {
      throw NumericalError("centroid " + std::to_string(c) + ": " + e.what());
    }
  }
  return model;
}

namespace {

void predict_one_pointwise(const Dataset& train, const MaclaurinFeatureMap& map, const VecRef& x,
                           double& mean, double& variance) {
  const VectorXd center = x;
  const FeatureGPModel local = feature_gpr_fit(featurize(map, train.inputs, center), train.targets,
                                               map.params.noise_variance);
  const PredictiveGaussian p = feature_gpr_predict(local, featurize(map, x.transpose(), center));
  mean = p.mean[0];
  variance = p.variance[0];
}

}  // namespace

PredictiveGaussian predict_localized(const LocalizedModel& model, const MatRef& test_inputs,
                                     OutOfCoverage policy) {
  check_same_dim(test_inputs.cols(), model.map.input_dim, "predict_localized");
  const Index m = test_inputs.rows();
  PredictiveGaussian out{VectorXd(m), VectorXd(m)};

  // Group test points by centroid so each local model predicts one block.
  std::vector<std::vector<Index>> groups(static_cast<std::size_t>(model.centroid_set.size()));
  for (Index i = 0; i < m; ++i) {
    const auto [c, dist] = nearest_centroid(model.centroid_set, test_inputs.row(i).transpose());
    if (policy == OutOfCoverage::LocalizeAtTestPoint && dist >= model.centroid_set.threshold) {
      predict_one_pointwise(model.train, model.map, test_inputs.row(i).transpose(), out.mean[i],
                            out.variance[i]);
      continue;
    }
    groups[static_cast<std::size_t>(c)].push_back(i);
  }
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (groups[c].empty()) continue;
    const VectorXd center = model.centroid_set.centroids.row(static_cast<Index>(c)).transpose();
    const MatrixXd block = test_inputs(groups[c], Eigen::all);
    const PredictiveGaussian p =
        feature_gpr_predict(model.local_models[c], featurize(model.map, block, center));
    for (std::size_t k = 0; k < groups[c].size(); ++k) {
      out.mean[groups[c][k]] = p.mean[static_cast<Index>(k)];
      out.variance[groups[c][k]] = p.variance[static_cast<Index>(k)];
    }
  }
  return out;
}

PredictiveGaussian predict_pointwise_localized(const Dataset& train, const MaclaurinFeatureMap& map,
                                               const MatRef& test_inputs) {
  train.validate();
  check_same_dim(test_inputs.cols(), map.input_dim, "predict_pointwise_localized");
  const Index m = test_inputs.rows();
  PredictiveGaussian out{VectorXd(m), VectorXd(m)};
  for (Index i = 0; i < m; ++i) {
    predict_one_pointwise(train, map, test_inputs.row(i).transpose(), out.mean[i], out.variance[i]);
  }
  return out;
}

}  // namespace locmac
