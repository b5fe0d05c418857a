#include "locmac/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include "locmac/error.hpp"
#include "locmac/localized.hpp"
#include "locmac/rff.hpp"

namespace locmac {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::pair<Method, std::string>>& method_names() {
  static const std::vector<std::pair<Method, std::string>> names{
      {Method::Exact, "exact"},
      {Method::Rff, "rff"},
      {Method::RffOrthogonal, "rff-orthogonal"},
      {Method::MaclaurinExplicit, "maclaurin-explicit"},
      {Method::MaclaurinVanilla, "maclaurin-vanilla"},
      {Method::MaclaurinLocalized, "maclaurin-localized"},
  };
  return names;
}

json threshold_to_json(double t) { return std::isinf(t) ? json("inf") : json(t); }

double threshold_from_json(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_null() || (v.is_string() && v.get<std::string>() == "inf")) return kInf;
  throw InputError("config: '" + key + "' must be a number or \"inf\"");
}

template <class T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw InputError("config: key '" + key + "' has the wrong type");
  }
}

}  // namespace

std::string to_string(Method method) {
  for (const auto& [m, name] : method_names())
    if (m == method) return name;
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (const auto& [m, n] : method_names())
    if (n == name) return m;
  throw InputError("unknown method '" + name + "'");
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InputError("config: expected a JSON object");
  RunConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "data") c.data = get_as<std::string>(v, key);
    else if (key == "target_column") {
      c.target_column = v.is_number_integer() ? std::to_string(v.get<long long>())
                                              : get_as<std::string>(v, key);
    }
    else if (key == "standardize") c.standardize = get_as<bool>(v, key);
    else if (key == "n_points") c.n_points = get_as<Index>(v, key);
    else if (key == "data_noise_variance") c.data_noise_variance = get_as<double>(v, key);
    else if (key == "sinc_convention") {
      const auto s = get_as<std::string>(v, key);
      if (s == "normalized") c.sinc_convention = SincConvention::Normalized;
      else if (s == "unnormalized") c.sinc_convention = SincConvention::Unnormalized;
      else throw InputError("config: sinc_convention must be normalized or unnormalized");
    }
    else if (key == "data_seed") c.data_seed = get_as<std::uint64_t>(v, key);
    else if (key == "train_fraction") c.train_fraction = get_as<double>(v, key);
    else if (key == "split_seed") c.split_seed = get_as<std::uint64_t>(v, key);
    else if (key == "test_grid_points") c.test_grid_points = get_as<Index>(v, key);
    else if (key == "test_low") c.test_low = get_as<double>(v, key);
    else if (key == "test_high") c.test_high = get_as<double>(v, key);
    else if (key == "method") c.method = parse_method(get_as<std::string>(v, key));
    else if (key == "features") c.features = get_as<Index>(v, key);
    else if (key == "degree") c.degree = get_as<int>(v, key);
    else if (key == "max_degree") c.max_degree = get_as<int>(v, key);
    else if (key == "sketch") c.sketch = parse_sketch_kind(get_as<std::string>(v, key));
    else if (key == "allocation_pairs") c.allocation_pairs = get_as<Index>(v, key);
    else if (key == "localization") {
      const auto s = get_as<std::string>(v, key);
      if (s == "clusters") c.localization = Localization::Clusters;
      else if (s == "pointwise") c.localization = Localization::Pointwise;
      else throw InputError("config: localization must be clusters or pointwise");
    }
    else if (key == "theta") c.theta = threshold_from_json(v, key);
    else if (key == "sweep_thetas") {
      if (!v.is_array()) throw InputError("config: sweep_thetas must be an array");
      c.sweep_thetas.clear();
      for (const auto& t : v) c.sweep_thetas.push_back(threshold_from_json(t, key));
    }
    else if (key == "hyperparameters") {
      if (v.is_string() && v.get<std::string>() == "fit") {
        c.hyperparameters.reset();
      } else if (v.is_object()) {
        KernelParams p;
        for (const auto& [hk, hv] : v.items()) {
          if (hk == "lengthscale") p.lengthscale = get_as<double>(hv, hk);
          else if (hk == "kernel_variance") p.kernel_variance = get_as<double>(hv, hk);
          else if (hk == "noise_variance") p.noise_variance = get_as<double>(hv, hk);
          else throw InputError("config: unknown hyperparameter key '" + hk + "'");
        }
        p.validate();
        c.hyperparameters = p;
      } else {
        throw InputError("config: hyperparameters must be \"fit\" or an object");
      }
    }
    else if (key == "fit_noise") c.fit_noise = get_as<bool>(v, key);
    else if (key == "seeds") c.seeds = get_as<Index>(v, key);
    else if (key == "seed") c.seed = get_as<std::uint64_t>(v, key);
    else if (key == "kl_direction") {
      const auto s = get_as<std::string>(v, key);
      if (s == "reference_to_approx") c.kl_direction = KlDirection::ReferenceToApprox;
      else if (s == "approx_to_reference") c.kl_direction = KlDirection::ApproxToReference;
      else throw InputError("config: kl_direction must be reference_to_approx or approx_to_reference");
    }
    else if (key == "observation_variance") c.observation_variance = get_as<bool>(v, key);
    else if (key == "variance_floor") c.variance_floor = get_as<double>(v, key);
    else if (key == "out_dir") c.out_dir = get_as<std::string>(v, key);
    else throw InputError("config: unknown key '" + key + "'");
  }

  if (c.features < 1) throw InputError("config: features must be >= 1");
  if (c.seeds < 1) throw InputError("config: seeds must be >= 1");
  if (c.max_degree < 1) throw InputError("config: max_degree must be >= 1");
  if (!(c.theta > 0.0)) throw InputError("config: theta must be > 0");
  if (!(c.variance_floor > 0.0)) throw InputError("config: variance_floor must be > 0");
  if ((c.method == Method::Rff || c.method == Method::RffOrthogonal) && c.features % 2 != 0) {
    throw InputError("config: random Fourier features need an even feature count");
  }
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["data"] = c.data;
  j["target_column"] = c.target_column;
  j["standardize"] = c.standardize;
  j["n_points"] = c.n_points;
  j["data_noise_variance"] = c.data_noise_variance;
  j["sinc_convention"] =
      c.sinc_convention == SincConvention::Normalized ? "normalized" : "unnormalized";
  j["data_seed"] = c.data_seed;
  j["train_fraction"] = c.train_fraction;
  j["split_seed"] = c.split_seed;
  j["test_grid_points"] = c.test_grid_points;
  j["test_low"] = c.test_low;
  j["test_high"] = c.test_high;
  j["method"] = to_string(c.method);
  j["features"] = c.features;
  j["degree"] = c.degree;
  j["max_degree"] = c.max_degree;
  j["sketch"] = to_string(c.sketch);
  j["allocation_pairs"] = c.allocation_pairs;
  j["localization"] = c.localization == Localization::Clusters ? "clusters" : "pointwise";
  j["theta"] = threshold_to_json(c.theta);
  j["sweep_thetas"] = json::array();
  for (double t : c.sweep_thetas) j["sweep_thetas"].push_back(threshold_to_json(t));
  if (c.hyperparameters) {
    j["hyperparameters"] = {{"lengthscale", c.hyperparameters->lengthscale},
                            {"kernel_variance", c.hyperparameters->kernel_variance},
                            {"noise_variance", c.hyperparameters->noise_variance}};
  } else {
    j["hyperparameters"] = "fit";
  }
  j["fit_noise"] = c.fit_noise;
  j["seeds"] = c.seeds;
  j["seed"] = c.seed;
  j["kl_direction"] = c.kl_direction == KlDirection::ReferenceToApprox ? "reference_to_approx"
                                                                       : "approx_to_reference";
  j["observation_variance"] = c.observation_variance;
  j["variance_floor"] = c.variance_floor;
  j["out_dir"] = c.out_dir;
  return j;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

ExperimentContext prepare_experiment(const RunConfig& config) {
  ExperimentContext ctx;
  if (config.data == "sinc") {
    SincSpec spec;
    spec.n_points = config.n_points;
    spec.noise_variance = config.data_noise_variance;
    spec.convention = config.sinc_convention;
    ctx.train = generate_sinc(spec, config.data_seed);
    if (config.test_grid_points < 2 || !(config.test_high > config.test_low)) {
      throw InputError("config: sinc test grid needs >= 2 points on a nonempty interval");
    }
    ctx.test_inputs = VectorXd::LinSpaced(config.test_grid_points, config.test_low, config.test_high);
    ctx.test_targets.resize(config.test_grid_points);
    for (Index i = 0; i < config.test_grid_points; ++i) {
      ctx.test_targets[i] = sinc(spec.frequency * ctx.test_inputs(i, 0), spec.convention);
    }
  } else {
    Dataset all;
    if (config.data == "ridges" || config.data == "smooth") {
      all = generate_surface(config.data, config.n_points, config.data_noise_variance,
                             config.data_seed);
    } else {
      const bool by_index = !config.target_column.empty() &&
                            std::all_of(config.target_column.begin(), config.target_column.end(),
                                        [](unsigned char ch) { return std::isdigit(ch); });
      std::variant<std::string, Index> target = config.target_column;
      if (by_index) target = static_cast<Index>(std::stoll(config.target_column));
      all = load_csv(config.data, target, config.standardize).data;
    }
    auto [train, test] = split_dataset(all, config.train_fraction, config.split_seed);
    ctx.train = std::move(train);
    ctx.test_inputs = std::move(test.inputs);
    ctx.test_targets = std::move(test.targets);
  }
  ctx.train.validate();
  ctx.median = median_heuristic(ctx.train.inputs, 5000, config.data_seed);

  if (config.hyperparameters) {
    ctx.params = *config.hyperparameters;
  } else {
    const VectorXd& y = ctx.train.targets;
    const double yvar = std::max((y.array() - y.mean()).square().mean(), 1e-12);
    KernelParams init;
    init.lengthscale = ctx.median.degenerate ? 1.0 : ctx.median.value;
    init.kernel_variance = yvar;
    init.noise_variance = config.data_noise_variance > 0.0 ? config.data_noise_variance : 0.1 * yvar;
    FitOptions options;
    options.fit_noise = config.fit_noise;
    options.seed = config.data_seed;
    ctx.fit = fit_hyperparameters(ctx.train, init, options);
    ctx.params = ctx.fit->params;
  }
  ctx.reference = exact_gpr_predict(ctx.train, ctx.test_inputs, ctx.params);
  ctx.reference_rmse = rmse(ctx.reference.mean, ctx.test_targets);
  return ctx;
}

Quantiles quantiles(std::vector<double> v) {
  if (v.empty()) return {};
  std::sort(v.begin(), v.end());
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return {at(0.5), at(0.25), at(0.75)};
}

namespace {

PredictiveGaussian finish_variance(PredictiveGaussian p, const RunConfig& config, double noise) {
  if (config.observation_variance) p.variance.array() += noise;
  p.variance = p.variance.cwiseMax(config.variance_floor);
  return p;
}

SeedRun run_one(const ExperimentContext& ctx, const RunConfig& config, std::uint64_t seed) {
  const KernelParams& params = ctx.params;
  const Dataset& train = ctx.train;
  SeedRun run;
  run.seed = seed;
  PredictiveGaussian approx;

  auto feature_config = [&]() {
    FeatureConfig fc;
    fc.params = params;
    fc.total_features = config.features;
    fc.max_degree = config.max_degree;
    fc.kind = config.sketch;
    fc.seed = seed;
    fc.allocation_pairs = config.allocation_pairs;
    return fc;
  };

  switch (config.method) {
    case Method::Exact:
      approx = ctx.reference;
      break;
    case Method::Rff:
    case Method::RffOrthogonal: {
      const auto map = sample_rff(train.dim(), config.features, params,
                                  config.method == Method::RffOrthogonal, seed);
      const auto model = feature_gpr_fit(apply_rff_rows(map, train.inputs), train.targets,
                                         params.noise_variance);
      approx = feature_gpr_predict(model, apply_rff_rows(map, ctx.test_inputs));
      break;
    }
    case Method::MaclaurinExplicit: {
      int degree = config.degree;
      if (degree < 0) {
        // Largest degree whose explicit map fits in the feature budget.
        degree = 0;
        Index total = 1, power = 1;
        while (true) {
          power *= train.dim();
          if (total + power > config.features) break;
          total += power;
          ++degree;
        }
      }
      const auto map = build_explicit_map(params, degree, train.dim());
      const auto model =
          feature_gpr_fit(featurize(map, train.inputs), train.targets, params.noise_variance);
      approx = feature_gpr_predict(model, featurize(map, ctx.test_inputs));
      run.clusters = 1;
      break;
    }
    case Method::MaclaurinVanilla:
    case Method::MaclaurinLocalized: {
      const FeatureMapChoice choice = choose_feature_map(train.inputs, feature_config());
      if (choice.allocation) run.allocation = choice.allocation->allocation;
      if (config.method == Method::MaclaurinLocalized &&
          config.localization == Localization::Pointwise) {
        approx = predict_pointwise_localized(train, choice.map, ctx.test_inputs);
        run.clusters = ctx.test_inputs.rows();
      } else {
        const double threshold =
            config.method == Method::MaclaurinVanilla ? kInf : config.theta * params.lengthscale;
        const LocalizedModel model = fit_localized(train, choice, threshold);
        approx = predict_localized(model, ctx.test_inputs);
        run.clusters = model.centroid_set.size();
      }
      break;
    }
  }

  if (!approx.mean.allFinite() || !approx.variance.allFinite()) {
    throw NumericalError(to_string(config.method) + ": non-finite predictions for seed " +
                         std::to_string(seed));
  }
  run.prediction = finish_variance(std::move(approx), config, params.noise_variance);
  const PredictiveGaussian ref = finish_variance(ctx.reference, config, params.noise_variance);
  run.report = evaluate(ref, run.prediction, ctx.test_targets, config.kl_direction);
  run.report.config_echo = to_json(config);
  run.report.config_echo["seed"] = seed;
  return run;
}

}  // namespace

RunResult run_method(const ExperimentContext& context, const RunConfig& config) {
  RunResult result;
  result.config = config;
  result.reference = finish_variance(context.reference, config, context.params.noise_variance);
  result.reference_rmse = context.reference_rmse;
  std::vector<double> kls, rmses;
  for (Index k = 0; k < config.seeds; ++k) {
    result.runs.push_back(run_one(context, config, config.seed + static_cast<std::uint64_t>(k)));
    kls.push_back(result.runs.back().report.mean_kl);
    rmses.push_back(result.runs.back().report.rmse);
  }
  result.mean_kl = quantiles(kls);
  result.rmse = quantiles(rmses);
  return result;
}

RunResult run_experiment(const RunConfig& config) {
  return run_method(prepare_experiment(config), config);
}

namespace {

json params_json(const KernelParams& p) {
  return {{"lengthscale", p.lengthscale},
          {"kernel_variance", p.kernel_variance},
          {"noise_variance", p.noise_variance}};
}

json quantiles_json(const Quantiles& q) {
  return {{"median", q.median}, {"q25", q.q25}, {"q75", q.q75}};
}

void write_predictions(const std::string& path, const MatrixXd& inputs,
                       const PredictiveGaussian& ref, const PredictiveGaussian& approx) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out.precision(17);
  for (Index k = 0; k < inputs.cols(); ++k) out << 'x' << k << ',';
  out << "ref_mean,ref_var,approx_mean,approx_var\n";
  for (Index i = 0; i < inputs.rows(); ++i) {
    for (Index k = 0; k < inputs.cols(); ++k) out << inputs(i, k) << ',';
    out << ref.mean[i] << ',' << ref.variance[i] << ',' << approx.mean[i] << ','
        << approx.variance[i] << '\n';
  }
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace

void write_run_outputs(const RunResult& result, const ExperimentContext& context,
                       const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  json runs = json::array();
  for (const auto& r : result.runs) {
    json jr = to_json(r.report);
    jr["seed"] = r.seed;
    jr["clusters"] = r.clusters;
    if (!r.allocation.empty()) jr["allocation"] = r.allocation;
    runs.push_back(std::move(jr));
  }
  json report = {
      {"method", to_string(result.config.method)},
      {"summary", {{"mean_kl", quantiles_json(result.mean_kl)}, {"rmse", quantiles_json(result.rmse)}}},
      {"reference", {{"rmse", result.reference_rmse}, {"params", params_json(context.params)}}},
      {"runs", std::move(runs)},
  };
  write_json((fs::path(dir) / "report.json").string(), report);

  for (std::size_t k = 0; k < result.runs.size(); ++k) {
    const auto& r = result.runs[k];
    fs::path path = fs::path(dir);
    if (k > 0) {
      path /= "seed_" + std::to_string(r.seed);
      fs::create_directories(path);
    }
    write_predictions((path / "predictions.csv").string(), context.test_inputs, result.reference,
                      r.prediction);
  }

  json manifest = {
      {"version", kVersion},
      {"config", to_json(result.config)},
      {"seeds", json::array()},
      {"data", {{"n_train", context.train.size()},
                {"n_test", context.test_inputs.rows()},
                {"input_dim", context.train.dim()}}},
      {"params", params_json(context.params)},
      {"median_heuristic", context.median.value},
  };
  for (const auto& r : result.runs) manifest["seeds"].push_back(r.seed);
  if (context.fit) {
    manifest["fit"] = {{"log_likelihood", context.fit->log_likelihood},
                       {"converged", context.fit->converged}};
  }
  write_json((fs::path(dir) / "manifest.json").string(), manifest);
}

SweepResult run_sweep(const ExperimentContext& context, const RunConfig& config,
                      std::vector<RunResult>* runs) {
  if (config.sweep_thetas.size() < 2) throw InputError("sweep: need at least two thresholds");
  SweepResult sweep;
  std::vector<double> clusters, kls;
  for (double theta : config.sweep_thetas) {
    RunConfig c = config;
    c.method = Method::MaclaurinLocalized;
    c.localization = Localization::Clusters;
    c.theta = theta;
    RunResult r = run_method(context, c);
    std::vector<double> counts;
    for (const auto& s : r.runs) counts.push_back(static_cast<double>(s.clusters));
    SweepPoint point{theta, quantiles(counts).median, r.mean_kl.median};
    sweep.points.push_back(point);
    clusters.push_back(point.median_clusters);
    kls.push_back(point.median_mean_kl);
    if (runs) runs->push_back(std::move(r));
  }
  sweep.spearman_clusters_vs_kl = spearman(clusters, kls);
  return sweep;
}

json to_json(const SweepResult& sweep) {
  json points = json::array();
  for (const auto& p : sweep.points) {
    points.push_back({{"theta", threshold_to_json(p.theta)},
                      {"clusters", p.median_clusters},
                      {"mean_kl", p.median_mean_kl}});
  }
  return {{"points", std::move(points)}, {"spearman_clusters_vs_kl", sweep.spearman_clusters_vs_kl}};
}

}  // namespace locmac
