#include "locmac/sketch.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>

#include "locmac/error.hpp"
#include "locmac/random.hpp"

namespace locmac {

namespace {

// Child stream tags.
constexpr std::uint64_t kDenseTag = 1;
constexpr std::uint64_t kSignTag = 2;
constexpr std::uint64_t kPermTag = 3;

MatrixXd sample_dense(SketchKind kind, Index rows, Index cols, Rng rng) {
  MatrixXd W(rows, cols);
  if (kind == SketchKind::Gaussian) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) W(i, j) = normal(rng);
  } else {
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) W(i, j) = (rng() >> 63) ? 1.0 : -1.0;
  }
  return W;
}

}  // namespace

std::string to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::Gaussian:
      return "gaussian";
    case SketchKind::Rademacher:
      return "rademacher";
    case SketchKind::TensorSRHT:
      return "tensorsrht";
  }
  return "unknown";
}

SketchKind parse_sketch_kind(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (c == '-' || c == '_') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "gaussian") return SketchKind::Gaussian;
  if (key == "rademacher") return SketchKind::Rademacher;
  if (key == "tensorsrht" || key == "srht") return SketchKind::TensorSRHT;
  throw InputError("unknown sketch kind '" + std::string(name) + "'");
}

bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

Index next_power_of_two(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fwht_inplace(std::span<double> v) {
  const auto n = static_cast<Index>(v.size());
  if (!is_power_of_two(n)) throw InputError("fwht: length must be a power of two");
  for (Index h = 1; h < n; h <<= 1) {
    for (Index i = 0; i < n; i += 2 * h) {
      for (Index j = i; j < i + h; ++j) {
        const double a = v[j];
        const double b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

VectorXd fwht(const VecRef& v) {
  VectorXd out = v;
  fwht_inplace(std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

PolynomialSketch sample_sketch(SketchKind kind, int degree, Index input_dim, Index feature_dim,
                               std::uint64_t seed) {
  if (degree < 1 || input_dim < 1 || feature_dim < 1) {
    throw InputError("sample_sketch: degree, input_dim and feature_dim must be >= 1");
  }
  PolynomialSketch s;
  s.kind = kind;
  s.degree = degree;
  s.input_dim = input_dim;
  s.feature_dim = feature_dim;

  if (kind != SketchKind::TensorSRHT) {
    s.dense_weights.reserve(static_cast<std::size_t>(degree));
    for (int i = 0; i < degree; ++i) {
      s.dense_weights.push_back(sample_dense(kind, feature_dim, input_dim,
                                             child_rng(seed, {kDenseTag, std::uint64_t(i)})));
    }
    return s;
  }

  SrhtState st;
  st.padded_dim = next_power_of_two(input_dim);
  st.blocks = (feature_dim + st.padded_dim - 1) / st.padded_dim;
  const auto count = static_cast<std::size_t>(st.blocks * degree);
  st.signs.reserve(count);
  st.perms.reserve(count);
  for (Index b = 0; b < st.blocks; ++b) {
    for (int i = 0; i < degree; ++i) {
      const std::uint64_t b64 = static_cast<std::uint64_t>(b);
      const std::uint64_t i64 = static_cast<std::uint64_t>(i);
      Rng sign_rng = child_rng(seed, {kSignTag, b64, i64});
      VectorXd signs(st.padded_dim);
      for (Index k = 0; k < st.padded_dim; ++k) signs[k] = (sign_rng() >> 63) ? 1.0 : -1.0;
      st.signs.push_back(std::move(signs));

      Rng perm_rng = child_rng(seed, {kPermTag, b64, i64});
      std::vector<Index> perm(static_cast<std::size_t>(st.padded_dim));
      std::iota(perm.begin(), perm.end(), Index{0});
      std::shuffle(perm.begin(), perm.end(), perm_rng);
      st.perms.push_back(std::move(perm));
    }
  }
  s.srht = std::move(st);
  return s;
}

namespace {

void apply_srht(const PolynomialSketch& s, const VecRef& x, double* out) {
  const SrhtState& st = *s.srht;
  const double scale = 1.0 / std::sqrt(static_cast<double>(s.feature_dim));
  VectorXd z(st.padded_dim);
  VectorXd prod(st.padded_dim);
  for (Index b = 0; b < st.blocks; ++b) {
    prod.setConstant(scale);
    for (int i = 0; i < s.degree; ++i) {
      const auto idx = static_cast<std::size_t>(b * s.degree + i);
      z.setZero();
      z.head(s.input_dim) = x.cwiseProduct(st.signs[idx].head(s.input_dim));
      fwht_inplace(std::span<double>(z.data(), static_cast<std::size_t>(z.size())));
      const auto& perm = st.perms[idx];
      for (Index j = 0; j < st.padded_dim; ++j) prod[j] *= z[perm[static_cast<std::size_t>(j)]];
    }
    const Index start = b * st.padded_dim;
    const Index take = std::min(st.padded_dim, s.feature_dim - start);
    std::copy(prod.data(), prod.data() + take, out + start);
  }
}

}  // namespace

VectorXd apply_sketch(const PolynomialSketch& sketch, const VecRef& x) {
  check_same_dim(x.size(), sketch.input_dim, "apply_sketch");
  VectorXd out(sketch.feature_dim);
  if (sketch.srht) {
    apply_srht(sketch, x, out.data());
    return out;
  }
  out.setConstant(1.0 / std::sqrt(static_cast<double>(sketch.feature_dim)));
  for (const MatrixXd& W : sketch.dense_weights) out.array() *= (W * x).array();
  return out;
}

MatrixXd apply_sketch_rows(const PolynomialSketch& sketch, const MatRef& X) {
  check_same_dim(X.cols(), sketch.input_dim, "apply_sketch_rows");
  MatrixXd out(X.rows(), sketch.feature_dim);
  if (sketch.srht) {
    VectorXd row(sketch.feature_dim);
    for (Index r = 0; r < X.rows(); ++r) {
      apply_srht(sketch, X.row(r).transpose(), row.data());
      out.row(r) = row.transpose();
    }
    return out;
  }
  out.setConstant(1.0 / std::sqrt(static_cast<double>(sketch.feature_dim)));
  for (const MatrixXd& W : sketch.dense_weights) out.array() *= (X * W.transpose()).array();
  return out;
}

double srht_pair_count(Index feature_dim, Index block_dim) {
  const double full = static_cast<double>(feature_dim / block_dim);
  const double rest = static_cast<double>(feature_dim % block_dim);
  const double d = static_cast<double>(block_dim);
  return full * d * (d - 1.0) + rest * (rest - 1.0);
}

double sketch_variance(SketchKind kind, const VecRef& x, const VecRef& y, int degree,
                       Index feature_dim, Index srht_block_dim) {
  check_same_dim(x.size(), y.size(), "sketch_variance");
  if (degree < 1 || feature_dim < 1) {
    throw InputError("sketch_variance: degree and feature_dim must be >= 1");
  }
  const double xx = x.squaredNorm();
  const double yy = y.squaredNorm();
  const double xy = x.dot(y);
  const double diag = x.cwiseAbs2().dot(y.cwiseAbs2());  // sum_k x_k^2 y_k^2
  const double D = static_cast<double>(feature_dim);
  const double xy2n = std::pow(xy * xy, degree);

  if (kind == SketchKind::Gaussian) {
    return (std::pow(xx * yy + 2.0 * xy * xy, degree) - xy2n) / D;
  }
  const double rademacher = (std::pow(xx * yy + 2.0 * (xy * xy - diag), degree) - xy2n) / D;
  if (kind == SketchKind::Rademacher) return rademacher;

  const Index block = srht_block_dim > 0 ? srht_block_dim : next_power_of_two(x.size());
  if (block < 2) return rademacher;  // c(D, 1) = 0
  const double c = srht_pair_count(feature_dim, block);
  const double inner = xy * xy - (xx * yy + xy * xy - 2.0 * diag) / static_cast<double>(block - 1);
  return rademacher - c / (D * D) * (xy2n - std::pow(inner, degree));
}

}  // namespace locmac
