#include "locmac/gpr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "locmac/error.hpp"
#include "locmac/random.hpp"

namespace locmac {

void Dataset::validate() const {
  if (inputs.rows() < 1) throw InputError("Dataset: no rows");
  if (inputs.rows() != targets.size()) {
    throw InputError("Dataset: " + std::to_string(inputs.rows()) + " input rows but " +
                     std::to_string(targets.size()) + " targets");
  }
  if (!inputs.allFinite() || !targets.allFinite()) {
    throw InputError("Dataset: non-finite entries");
  }
}

SpdFactor factorize_spd(const MatRef& A, const char* context) {
  SpdFactor f;
  f.llt.compute(A);
  if (f.llt.info() == Eigen::Success) return f;

  const double scale = std::max(A.diagonal().mean(), std::numeric_limits<double>::min());
  MatrixXd B = A;
  for (double rel = 1e-10; rel <= 1e-6 * (1.0 + 1e-9); rel *= 10.0) {
    const double jitter = rel * scale;
    B.diagonal() = A.diagonal().array() + jitter;
    f.llt.compute(B);
    if (f.llt.info() == Eigen::Success) {
      f.jitter = jitter;
      return f;
    }
  }

  std::ostringstream msg;
  msg << context << ": matrix is not positive definite after jitter up to 1e-6 * mean diagonal";
  if (A.rows() <= 2000) {
    const VectorXd ev = Eigen::SelfAdjointEigenSolver<MatrixXd>(A, Eigen::EigenvaluesOnly).eigenvalues();
    msg << " (eigenvalues in [" << ev.minCoeff() << ", " << ev.maxCoeff() << "]";
    if (ev.minCoeff() > 0) msg << ", condition " << ev.maxCoeff() / ev.minCoeff();
    msg << ")";
  }
  throw NumericalError(msg.str());
}

PredictiveGaussian gpr_predict_from_kernels(const MatRef& K_ff, const MatRef& K_fs,
                                            const VecRef& k_ss, const VecRef& targets,
                                            double noise_variance) {
  const Index n = K_ff.rows();
  check_same_dim(K_ff.cols(), n, "gpr_predict (K_ff)");
  check_same_dim(K_fs.rows(), n, "gpr_predict (K_fs)");
  check_same_dim(targets.size(), n, "gpr_predict (targets)");
  check_same_dim(k_ss.size(), K_fs.cols(), "gpr_predict (k_ss)");
  if (!(noise_variance > 0.0)) throw InputError("gpr_predict: noise variance must be > 0");

  MatrixXd Ky = K_ff;
  Ky.diagonal().array() += noise_variance;
  const SpdFactor f = factorize_spd(Ky, "exact GPR");
  const VectorXd alpha = f.llt.solve(targets);
  const MatrixXd V = f.llt.matrixL().solve(K_fs);

  PredictiveGaussian out;
  out.mean = K_fs.transpose() * alpha;
  out.variance = (k_ss - V.colwise().squaredNorm().transpose()).cwiseMax(0.0);
  return out;
}

PredictiveGaussian exact_gpr_predict(const Dataset& train, const MatRef& test_inputs,
                                     const KernelParams& params) {
  params.validate();
  train.validate();
  check_same_dim(test_inputs.cols(), train.dim(), "exact_gpr_predict");
  const MatrixXd K_ff = gaussian_kernel_matrix(train.inputs, train.inputs, params);
  const MatrixXd K_fs = gaussian_kernel_matrix(train.inputs, test_inputs, params);
  const VectorXd k_ss = VectorXd::Constant(test_inputs.rows(), params.kernel_variance);
  return gpr_predict_from_kernels(K_ff, K_fs, k_ss, train.targets, params.noise_variance);
}

FeatureGPModel feature_gpr_fit(const MatRef& features, const VecRef& targets,
                               double noise_variance) {
  check_same_dim(features.rows(), targets.size(), "feature_gpr_fit");
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) {
    throw InputError("feature_gpr_fit: noise variance must be finite and > 0");
  }
  if (!features.allFinite() || !targets.allFinite()) {
    throw InputError("feature_gpr_fit: non-finite features or targets");
  }
  const Index D = features.cols();
  MatrixXd A = MatrixXd::Identity(D, D);
  A.selfadjointView<Eigen::Lower>().rankUpdate(features.transpose(), 1.0 / noise_variance);
  A.triangularView<Eigen::StrictlyUpper>() = A.transpose();

  FeatureGPModel model;
  model.noise_variance = noise_variance;
  model.system = factorize_spd(A, "feature GPR system");
  model.projected_targets = features.transpose() * targets;
  model.weights = model.system.llt.solve(model.projected_targets) / noise_variance;
  return model;
}

PredictiveGaussian feature_gpr_predict(const FeatureGPModel& model, const MatRef& test_features) {
  check_same_dim(test_features.cols(), model.feature_dim(), "feature_gpr_predict");
  PredictiveGaussian out;
  out.mean = test_features * model.weights;
  const MatrixXd V = model.system.llt.matrixL().solve(test_features.transpose());
  out.variance = V.colwise().squaredNorm().transpose();
  return out;
}

LogMarginalLikelihood log_marginal_likelihood(const Dataset& train, const KernelParams& params) {
  params.validate();
  train.validate();
  const Index n = train.size();
  const double l2 = params.lengthscale * params.lengthscale;

  MatrixXd sqdist(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) sqdist(i, j) = (train.inputs.row(i) - train.inputs.row(j)).squaredNorm();
  const MatrixXd K = params.kernel_variance * (-0.5 / l2 * sqdist.array()).exp().matrix();
  MatrixXd Ky = K;
  Ky.diagonal().array() += params.noise_variance;

  const SpdFactor f = factorize_spd(Ky, "log marginal likelihood");
  const VectorXd alpha = f.llt.solve(train.targets);
  const auto L = f.llt.matrixL();
  double logdet_half = 0.0;
  for (Index i = 0; i < n; ++i) logdet_half += std::log(f.llt.matrixLLT()(i, i));

  LogMarginalLikelihood out;
  out.value = -0.5 * train.targets.dot(alpha) - logdet_half -
              0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

  // d/d theta_j = 1/2 tr((alpha alpha^T - Ky^{-1}) dK/d theta_j)
  MatrixXd Kinv = MatrixXd::Identity(n, n);
  L.solveInPlace(Kinv);
  L.transpose().solveInPlace(Kinv);
  const MatrixXd Q = alpha * alpha.transpose() - Kinv;
  out.gradient[0] = 0.5 * (Q.array() * K.array() * sqdist.array()).sum() / l2;
  out.gradient[1] = 0.5 * (Q.array() * K.array()).sum();
  out.gradient[2] = 0.5 * params.noise_variance * Q.trace();
  return out;
}

namespace {

KernelParams from_log(const Eigen::Vector3d& t) {
  return {std::exp(t[0]), std::exp(t[1]), std::exp(t[2])};
}

struct Box {
  Eigen::Vector3d lo, hi;
  Eigen::Vector3d clamp(const Eigen::Vector3d& t) const { return t.cwiseMax(lo).cwiseMin(hi); }
};

}  // namespace

FitResult fit_hyperparameters(const Dataset& train_in, const KernelParams& init,
                              const FitOptions& options) {
  train_in.validate();
  init.validate();
  if (train_in.size() < 2) throw InputError("fit_hyperparameters: need at least two points");

  Dataset train = train_in;
  if (options.max_points >= 2 && train_in.size() > options.max_points) {
    std::vector<Index> rows(static_cast<std::size_t>(train_in.size()));
    std::iota(rows.begin(), rows.end(), Index{0});
    Rng rng = child_rng(options.seed, {0x666974ULL});
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(static_cast<std::size_t>(options.max_points));
    std::sort(rows.begin(), rows.end());
    train.inputs = train_in.inputs(rows, Eigen::all);
    train.targets = train_in.targets(rows);
  }

  const MedianHeuristic med = median_heuristic(train.inputs, 5000, options.seed);
  const double base_l = med.degenerate ? init.lengthscale : med.value;
  const double yvar = std::max((train.targets.array() - train.targets.mean()).square().mean(), 1e-12);
  Box box;
  box.lo << std::log(base_l * 1e-3), std::log(yvar * 1e-6), std::log(yvar * 1e-8);
  box.hi << std::log(base_l * 1e3), std::log(yvar * 1e6), std::log(yvar * 1e2);
  if (!options.fit_noise) box.lo[2] = box.hi[2] = std::log(init.noise_variance);

  FitResult best;
  best.log_likelihood = -std::numeric_limits<double>::infinity();
  bool any = false;

  for (double mult : options.lengthscale_multipliers) {
    Eigen::Vector3d t(std::log(base_l * mult), std::log(init.kernel_variance),
                      std::log(init.noise_variance));
    t = box.clamp(t);
    auto evaluate = [&](const Eigen::Vector3d& theta, LogMarginalLikelihood& out) {
      try {
        out = log_marginal_likelihood(train, from_log(theta));
        if (!options.fit_noise) out.gradient[2] = 0.0;
        return std::isfinite(out.value);
      } catch (const NumericalError&) {
        return false;
      }
    };

    LogMarginalLikelihood cur;
    if (!evaluate(t, cur)) continue;
    best.initial_log_likelihoods.push_back(cur.value);
    double step = 1e-2;
    bool converged = false;
    for (int it = 0; it < options.iterations; ++it) {
      // Project the gradient onto the feasible directions of the box.
      Eigen::Vector3d g = cur.gradient;
      for (int k = 0; k < 3; ++k) {
        if ((t[k] <= box.lo[k] && g[k] < 0) || (t[k] >= box.hi[k] && g[k] > 0)) g[k] = 0.0;
      }
      const double gnorm = g.norm();
      if (gnorm < 1e-6 * (1.0 + std::abs(cur.value))) {
        converged = true;
        break;
      }
      step = std::min(step * 2.0, 10.0 / gnorm);
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        const Eigen::Vector3d cand = box.clamp(t + step * g);
        LogMarginalLikelihood next;
        if (evaluate(cand, next) && next.value >= cur.value + 1e-4 * g.dot(cand - t)) {
          const double gain = next.value - cur.value;
          t = cand;
          cur = next;
          accepted = true;
          if (gain < 1e-10 * (1.0 + std::abs(cur.value))) converged = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted || converged) {
        converged = true;
        break;
      }
    }
    best.restart_log_likelihoods.push_back(cur.value);
    if (!any || cur.value > best.log_likelihood) {
      any = true;
      best.log_likelihood = cur.value;
      best.params = from_log(t);
      best.converged = converged;
    }
  }
  if (!any) throw NumericalError("fit_hyperparameters: no restart produced a finite likelihood");
  return best;
}

}  // namespace locmac
