// locmac: command-line front end for the experiment harness.
//
//   locmac gen-sinc [--config c.json] [--seed S] --out data.csv
//   locmac fit-ref  --config c.json [--seed S] [--out dir]
//   locmac run      --config c.json [--seed S] [--out dir]
//   locmac sweep    --config c.json [--seed S] [--out dir]
//   locmac report   --out dir
//
// On failure a JSON error object is printed to stderr and the exit code is
// 2 (input error), 3 (numerical error) or 1 (anything else).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "locmac/data.hpp"
#include "locmac/error.hpp"
#include "locmac/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace locmac;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

RunConfig resolve(const Overrides& o, bool require_config) {
  RunConfig c;
  if (!o.config_path.empty()) {
    c = load_config(o.config_path);
  } else if (require_config) {
    throw InputError("--config is required");
  }
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.out_dir = *o.out;
  return c;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return json::parse(in);
}

int cmd_gen_sinc(const Overrides& o) {
  const RunConfig c = resolve(o, false);
  SincSpec spec;
  spec.n_points = c.n_points;
  spec.noise_variance = c.data_noise_variance;
  spec.convention = c.sinc_convention;
  const std::uint64_t seed = o.seed ? *o.seed : c.data_seed;
  const std::string path = o.out ? *o.out : "sinc.csv";
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  write_csv(path, generate_sinc(spec, seed), {"x"}, "y");
  std::cout << "wrote " << spec.n_points << " points to " << path << '\n';
  return 0;
}

int cmd_fit_ref(const Overrides& o) {
  const RunConfig c = resolve(o, true);
  const ExperimentContext ctx = prepare_experiment(c);
  fs::create_directories(c.out_dir);
  json j = {{"params", {{"lengthscale", ctx.params.lengthscale},
                        {"kernel_variance", ctx.params.kernel_variance},
                        {"noise_variance", ctx.params.noise_variance}}},
            {"median_heuristic", ctx.median.value},
            {"reference_rmse", ctx.reference_rmse},
            {"n_train", ctx.train.size()},
            {"n_test", ctx.test_inputs.rows()}};
  if (ctx.fit) {
    j["log_likelihood"] = ctx.fit->log_likelihood;
    j["converged"] = ctx.fit->converged;
  }
  write_json(fs::path(c.out_dir) / "reference.json", j);
  std::cout << "lengthscale " << ctx.params.lengthscale << "  kernel_variance "
            << ctx.params.kernel_variance << "  noise_variance " << ctx.params.noise_variance
            << "  median heuristic " << ctx.median.value << '\n';
  return 0;
}

int cmd_run(const Overrides& o) {
  const RunConfig c = resolve(o, true);
  const ExperimentContext ctx = prepare_experiment(c);
  const RunResult r = run_method(ctx, c);
  write_run_outputs(r, ctx, c.out_dir);
  std::cout << to_string(c.method) << ": mean KL median " << r.mean_kl.median << " [IQR "
            << r.mean_kl.q25 << ", " << r.mean_kl.q75 << "], RMSE median " << r.rmse.median
            << " (reference " << r.reference_rmse << ")\n";
  return 0;
}

int cmd_sweep(const Overrides& o) {
  const RunConfig c = resolve(o, true);
  const ExperimentContext ctx = prepare_experiment(c);
  std::vector<RunResult> runs;
  const SweepResult sweep = run_sweep(ctx, c, &runs);
  fs::create_directories(c.out_dir);
  for (std::size_t k = 0; k < runs.size(); ++k) {
    write_run_outputs(runs[k], ctx, (fs::path(c.out_dir) / ("theta_" + std::to_string(k))).string());
  }
  json j = to_json(sweep);
  j["config"] = to_json(c);
  j["lengthscale"] = ctx.params.lengthscale;
  write_json(fs::path(c.out_dir) / "sweep.json", j);
  for (const auto& p : sweep.points) {
    std::cout << "theta " << p.theta << " l: clusters " << p.median_clusters << ", mean KL "
              << p.median_mean_kl << '\n';
  }
  std::cout << "spearman(clusters, KL) = " << sweep.spearman_clusters_vs_kl << '\n';
  return 0;
}

int cmd_report(const Overrides& o) {
  if (!o.out) throw InputError("report: --out <dir> is required");
  const fs::path dir(*o.out);
  if (fs::exists(dir / "sweep.json")) {
    const json j = read_json(dir / "sweep.json");
    std::cout << "theta\tclusters\tmean_kl\n";
    for (const auto& p : j.at("points")) {
      std::cout << p.at("theta").dump() << '\t' << p.at("clusters").get<double>() << '\t'
                << p.at("mean_kl").get<double>() << '\n';
    }
    std::cout << "spearman " << j.at("spearman_clusters_vs_kl").get<double>() << '\n';
    return 0;
  }
  const json j = read_json(dir / "report.json");
  const auto& s = j.at("summary");
  std::cout << "method      " << j.at("method").get<std::string>() << '\n'
            << "mean KL     " << s.at("mean_kl").at("median").get<double>() << " (IQR "
            << s.at("mean_kl").at("q25").get<double>() << " - "
            << s.at("mean_kl").at("q75").get<double>() << ")\n"
            << "RMSE        " << s.at("rmse").at("median").get<double>() << '\n'
            << "ref RMSE    " << j.at("reference").at("rmse").get<double>() << '\n'
            << "seeds       " << j.at("runs").size() << '\n';
  return 0;
}

int fail(const char* type, const std::string& message, int code) {
  std::cerr << json{{"error", {{"type", type}, {"message", message}}}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian process regression with localized Maclaurin random features"};
  app.require_subcommand(1);

  Overrides o;
  auto add_common = [&](CLI::App* sub, bool with_config) {
    if (with_config) sub->add_option("--config", o.config_path, "JSON run configuration");
    sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) { o.seed = s; },
                                            "Override the seed");
    sub->add_option_function<std::string>("--out", [&](const std::string& s) { o.out = s; },
                                          "Output directory (or file for gen-sinc)");
  };

  auto* gen = app.add_subcommand("gen-sinc", "Generate the noisy sinc training set as CSV");
  add_common(gen, true);
  auto* fit = app.add_subcommand("fit-ref", "Fit the reference GP and write reference.json");
  add_common(fit, true);
  auto* run = app.add_subcommand("run", "Run one approximation method against the reference GP");
  add_common(run, true);
  auto* sweep = app.add_subcommand("sweep", "Sweep the cluster threshold of the localized method");
  add_common(sweep, true);
  auto* report = app.add_subcommand("report", "Summarize report.json or sweep.json in a directory");
  add_common(report, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what(), 2);
  }

  try {
    if (*gen) return cmd_gen_sinc(o);
    if (*fit) return cmd_fit_ref(o);
    if (*run) return cmd_run(o);
    if (*sweep) return cmd_sweep(o);
    if (*report) return cmd_report(o);
  } catch (const InputError& e) {
    return fail("input", e.what(), 2);
  } catch (const NumericalError& e) {
    return fail("numerical", e.what(), 3);
  } catch (const CapacityError& e) {
    return fail("capacity", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 1;
}
