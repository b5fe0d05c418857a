#ifndef LOCMAC_EXPERIMENT_HPP
#define LOCMAC_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "locmac/data.hpp"
#include "locmac/gpr.hpp"
#include "locmac/metrics.hpp"
#include "locmac/sketch.hpp"

namespace locmac {

inline constexpr const char* kVersion = "0.3.0";

enum class Method {
  Exact,
  Rff,
  RffOrthogonal,
  MaclaurinExplicit,   // explicit map, no re-centring
  MaclaurinVanilla,    // one cluster at the training mean
  MaclaurinLocalized,  // farthest-point clusters or per-test-point centring
};

std::string to_string(Method method);
Method parse_method(const std::string& name);

enum class Localization { Clusters, Pointwise };

/// Flat run configuration; mirrors the JSON config file one key per field.
struct RunConfig {
  // data
  std::string data = "sinc";  // "sinc", "ridges", "smooth" or a CSV path
  std::string target_column = "y";  // CSV only; a decimal string selects by index
  bool standardize = false;
  Index n_points = 50;              // generators
  double data_noise_variance = 0.01;
  SincConvention sinc_convention = SincConvention::Normalized;
  std::uint64_t data_seed = 0;
  double train_fraction = 0.8;      // all sources except sinc
  std::uint64_t split_seed = 0;
  Index test_grid_points = 301;     // sinc: evaluation grid on [test_low, test_high]
  double test_low = -3.0;
  double test_high = 3.0;

  // model
  Method method = Method::MaclaurinLocalized;
  Index features = 10;  // D, including the constant Maclaurin coordinate
  int degree = -1;      // explicit map degree; -1 means features - 1
  int max_degree = 15;
  SketchKind sketch = SketchKind::Rademacher;
  Index allocation_pairs = 100;
  Localization localization = Localization::Clusters;
  double theta = 2.0;   // cluster threshold in units of the length scale; may be +inf
  std::vector<double> sweep_thetas{4.0, 3.5, 3.0, 2.5, 2.0, 1.5, 1.0};
  std::optional<KernelParams> hyperparameters;  // nullopt: fit by marginal likelihood
  bool fit_noise = true;

  // evaluation
  Index seeds = 1;
  std::uint64_t seed = 0;
  KlDirection kl_direction = KlDirection::ReferenceToApprox;
  bool observation_variance = false;  // add the noise variance to both predictive variances
  double variance_floor = 1e-12;
  std::string out_dir = "out";
};

/// Parses a flat JSON object; unknown keys and ill-typed values throw InputError.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);
RunConfig load_config(const std::string& path);

/// Data, hyperparameters and the exact reference predictor shared by every
/// approximation evaluated on the same configuration.
struct ExperimentContext {
  Dataset train;
  MatrixXd test_inputs;
  VectorXd test_targets;  // noise-free function values on the sinc grid
  KernelParams params;
  std::optional<FitResult> fit;
  MedianHeuristic median;
  PredictiveGaussian reference;
  double reference_rmse = 0.0;
};

ExperimentContext prepare_experiment(const RunConfig& config);

struct SeedRun {
  std::uint64_t seed = 0;
  EvalReport report;
  PredictiveGaussian prediction;  // as evaluated (floored, optionally with noise)
  Index clusters = 0;             // Maclaurin methods
  std::vector<Index> allocation;  // randomized Maclaurin maps
};

struct Quantiles {
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};
Quantiles quantiles(std::vector<double> values);

struct RunResult {
  RunConfig config;
  std::vector<SeedRun> runs;
  Quantiles mean_kl;
  Quantiles rmse;
  PredictiveGaussian reference;  // as evaluated
  double reference_rmse = 0.0;
};

/// Runs the configured method for seeds seed, seed + 1, ..., seed + seeds - 1.
RunResult run_method(const ExperimentContext& context, const RunConfig& config);
RunResult run_experiment(const RunConfig& config);

/// Writes report.json, predictions.csv (first seed), manifest.json, and
/// seed_<s>/predictions.csv for further seeds, into `dir`.
void write_run_outputs(const RunResult& result, const ExperimentContext& context,
                       const std::string& dir);

struct SweepPoint {
  double theta = 0.0;  // in length scales
  double median_clusters = 0.0;
  double median_mean_kl = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double spearman_clusters_vs_kl = 0.0;
};

/// Localized runs over config.sweep_thetas, sharing one reference fit.
SweepResult run_sweep(const ExperimentContext& context, const RunConfig& config,
                      std::vector<RunResult>* runs = nullptr);

nlohmann::json to_json(const SweepResult& sweep);

}  // namespace locmac

#endif  // LOCMAC_EXPERIMENT_HPP
