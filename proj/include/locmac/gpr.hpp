#ifndef LOCMAC_GPR_HPP
#define LOCMAC_GPR_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Cholesky>

#include "locmac/kernel.hpp"

namespace locmac {

/// Training or test data: one row of `inputs` per target.
struct Dataset {
  MatrixXd inputs;  // N x d
  VectorXd targets; // N

  Index size() const { return inputs.rows(); }
  Index dim() const { return inputs.cols(); }
  /// Throws InputError on N = 0, row/target mismatch or non-finite entries.
  void validate() const;
};

/// Per-point Gaussian predictive distribution of the latent function value.
struct PredictiveGaussian {
  VectorXd mean;
  VectorXd variance;
};

/// Cholesky factor of a symmetric positive definite matrix. On failure a
/// jitter of 1e-10 * mean(diag) is added to the diagonal and escalated by
/// factors of ten up to 1e-6 * mean(diag); after that NumericalError is thrown.
struct SpdFactor {
  Eigen::LLT<MatrixXd> llt;
  double jitter = 0.0;
};
SpdFactor factorize_spd(const MatRef& A, const char* context);

/// GPR prediction from precomputed kernel blocks:
///   K_ff (N x N), K_fs (N x M), k_ss (M, diagonal of the test block).
PredictiveGaussian gpr_predict_from_kernels(const MatRef& K_ff, const MatRef& K_fs,
                                            const VecRef& k_ss, const VecRef& targets,
                                            double noise_variance);

/// Exact GPR with the Gaussian kernel.
PredictiveGaussian exact_gpr_predict(const Dataset& train, const MatRef& test_inputs,
                                     const KernelParams& params);

/// Weight-space GPR state: A = Phi^T Phi / noise + I in factored form.
struct FeatureGPModel {
  SpdFactor system;            // factor of A (D x D)
  VectorXd projected_targets;  // Phi^T y
  VectorXd weights;            // A^{-1} Phi^T y / noise
  double noise_variance = 1.0;

  Index feature_dim() const { return projected_targets.size(); }
  MatrixXd factor() const { return system.llt.matrixL(); }
};

FeatureGPModel feature_gpr_fit(const MatRef& features, const VecRef& targets,
                               double noise_variance);

/// mu = phi^T A^{-1} Phi^T y / noise, var = phi^T A^{-1} phi for each test row.
PredictiveGaussian feature_gpr_predict(const FeatureGPModel& model, const MatRef& test_features);

struct LogMarginalLikelihood {
  double value = 0.0;
  /// d value / d (log l, log sigma^2, log sigma_noise^2)
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
};

LogMarginalLikelihood log_marginal_likelihood(const Dataset& train, const KernelParams& params);

struct FitOptions {
  int iterations = 300;
  /// Restarts use median-heuristic length scale times each multiplier.
  std::vector<double> lengthscale_multipliers{0.1, 0.3, 1.0, 3.0, 10.0};
  bool fit_noise = true;
  /// Above this many points a uniform subsample is used for fitting.
  Index max_points = 10000;
  std::uint64_t seed = 0;
};

struct FitResult {
  KernelParams params;
  double log_likelihood = 0.0;
  bool converged = false;  // false: best iterate returned after hitting the iteration cap
  std::vector<double> restart_log_likelihoods;  // at each restart's final iterate
  std::vector<double> initial_log_likelihoods;  // at each restart's initial point
};

/// Projected gradient ascent on the log marginal likelihood in log-parameter
/// space with backtracking line search, multi-started over length scales.
FitResult fit_hyperparameters(const Dataset& train, const KernelParams& init,
                              const FitOptions& options = {});

}  // namespace locmac

#endif  // LOCMAC_GPR_HPP
