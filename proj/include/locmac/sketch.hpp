#ifndef LOCMAC_SKETCH_HPP
#define LOCMAC_SKETCH_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "locmac/kernel.hpp"

namespace locmac {

enum class SketchKind { Gaussian, Rademacher, TensorSRHT };

std::string to_string(SketchKind kind);
/// Accepts "gaussian", "rademacher", "tensorsrht" (case-insensitive, '-'/'_' ignored).
SketchKind parse_sketch_kind(std::string_view name);

/// Implicit weights of a TensorSRHT sketch. Block b, factor i uses
/// signs[b * degree + i] and perms[b * degree + i].
struct SrhtState {
  Index padded_dim = 0;  // next power of two >= input_dim
  Index blocks = 0;      // ceil(feature_dim / padded_dim)
  std::vector<VectorXd> signs;
  std::vector<std::vector<Index>> perms;  // output j of the factor reads H(d . x)[perms[j]]
};

/// Randomized feature map phi_n with E[phi_n(x)^T phi_n(y)] = (x^T y)^n:
///   phi_n(x) = (W_1 x . ... . W_n x) / sqrt(D).
/// Gaussian and Rademacher sketches hold n dense D x d matrices; TensorSRHT
/// holds sign vectors and permutations applied through the FWHT.
struct PolynomialSketch {
  SketchKind kind = SketchKind::Rademacher;
  int degree = 1;
  Index input_dim = 0;
  Index feature_dim = 0;
  std::vector<MatrixXd> dense_weights;
  std::optional<SrhtState> srht;
};

/// Draws a sketch. Deterministic in `seed`; each weight matrix, sign vector
/// and permutation comes from its own child stream (see random.hpp).
PolynomialSketch sample_sketch(SketchKind kind, int degree, Index input_dim, Index feature_dim,
                               std::uint64_t seed);

VectorXd apply_sketch(const PolynomialSketch& sketch, const VecRef& x);

/// Row-wise apply_sketch: X is N x d, result is N x D.
MatrixXd apply_sketch_rows(const PolynomialSketch& sketch, const MatRef& X);

/// In-place unnormalized fast Walsh-Hadamard transform, v <- H v.
/// Length must be a power of two.
void fwht_inplace(std::span<double> v);
VectorXd fwht(const VecRef& v);

bool is_power_of_two(Index n);
Index next_power_of_two(Index n);

/// c(D, d) = floor(D/d) d (d-1) + (D mod d)(D mod d - 1): ordered pairs of
/// features that share an orthogonal block.
double srht_pair_count(Index feature_dim, Index block_dim);

/// Closed-form variance of phi_n(x)^T phi_n(y) for a D-feature sketch.
/// For TensorSRHT, `srht_block_dim` selects the d used by the correction
/// term; 0 means the padded block size, next_power_of_two(d).
double sketch_variance(SketchKind kind, const VecRef& x, const VecRef& y, int degree,
                       Index feature_dim, Index srht_block_dim = 0);

}  // namespace locmac

#endif  // LOCMAC_SKETCH_HPP
