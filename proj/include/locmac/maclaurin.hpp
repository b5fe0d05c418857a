#ifndef LOCMAC_MACLAURIN_HPP
#define LOCMAC_MACLAURIN_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "locmac/kernel.hpp"
#include "locmac/sketch.hpp"

namespace locmac {

enum class MapVariant { Explicit, Randomized };

/// Feature map for the (truncated) Maclaurin expansion of the Gaussian kernel,
///   Phi(x) = sigma exp(-|x~|^2 / 2) (1, f_1(x~)/sqrt(1!), ..., f_p(x~)/sqrt(p!)),
/// where f_n is the n-th tensor power (Explicit) or a degree-n polynomial
/// sketch (Randomized). The constant coordinate is always present.
struct MaclaurinFeatureMap {
  KernelParams params;
  MapVariant variant = MapVariant::Explicit;
  int degree_cap = 0;  // p
  Index input_dim = 0;
  Index total_dim = 1;
  SketchKind kind = SketchKind::Rademacher;  // Randomized only
  std::uint64_t seed = 0;                    // Randomized only
  std::vector<Index> allocation;             // D_1..D_p, Randomized only
  std::vector<std::optional<PolynomialSketch>> sketches;  // index n-1; empty when D_n = 0

  /// Feature vector of a single point (already shifted by any centre).
  VectorXd features(const VecRef& x) const;
};

/// Upper bound on total_dim for the explicit map.
inline constexpr Index kMaxExplicitDim = 1'000'000;

/// Explicit map with tensor-power features, total_dim = 1 + d + ... + d^p.
/// Throws CapacityError when that exceeds kMaxExplicitDim.
MaclaurinFeatureMap build_explicit_map(const KernelParams& params, int degree, Index input_dim);

/// Randomized map; allocation[n-1] features go to degree n. Each degree draws
/// from the child stream derive_seed(seed, {n}).
MaclaurinFeatureMap build_random_map(const KernelParams& params, std::vector<Index> allocation,
                                     SketchKind kind, Index input_dim, std::uint64_t seed);

/// Row i of the result is Phi(X.row(i) - center). Inner products of the rows
/// realize the localized kernel estimate centred at `center`.
MatrixXd featurize(const MaclaurinFeatureMap& map, const MatRef& X,
                   const std::optional<VectorXd>& center = std::nullopt);

/// Exact variance of Phi(x)^T Phi(y) over the sketch distribution (degrees are
/// sampled independently). Zero for explicit maps.
double randomized_kernel_variance(const MaclaurinFeatureMap& map, const VecRef& x,
                                  const VecRef& y);

// ----- feature allocation ---------------------------------------------------

struct PointPair {
  VectorXd x;
  VectorXd y;
};

struct AllocationResult {
  int optimal_degree = 0;               // p*: largest degree with D_n > 0
  std::vector<Index> allocation;        // D_1..D_{p*}
  std::vector<double> objective_trace;  // objective after each accepted step
};

/// Mean over pairs of squared bias plus variance of the randomized kernel
/// estimate with the given per-degree allocation (degree n gets allocation[n-1]
/// features, zero drops the degree). Pairs are in input units; they are scaled
/// by the length scale inside.
double allocation_objective(const std::vector<PointPair>& pairs,
                            const std::vector<Index>& allocation, SketchKind kind,
                            const KernelParams& params);

/// Greedy allocation of `budget` features over degrees 1..max_degree.
/// Local search over the set of active degrees, restarted from each single
/// degree: each step applies the add, swap or drop move that lowers the
/// objective most, with the budget re-split exactly over the active degrees
/// (each gets at least one feature). A restart stops when no move helps; the
/// best end point is returned with its own trace. Ties favour lower degrees.
AllocationResult optimize_allocation(const std::vector<PointPair>& pairs, Index budget,
                                     int max_degree, SketchKind kind, const KernelParams& params);

/// `count` random pairs of distinct rows of X after subtracting the column mean.
std::vector<PointPair> sample_centered_pairs(const MatRef& X, Index count, std::uint64_t seed);

}  // namespace locmac

#endif  // LOCMAC_MACLAURIN_HPP
