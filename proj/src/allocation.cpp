#include <algorithm>
#include <cmath>
#include <random>

#include "locmac/error.hpp"
#include "locmac/maclaurin.hpp"
#include "locmac/random.hpp"

namespace locmac {

namespace {

// Per-pair quantities that do not depend on the allocation. With these the
// objective of any allocation costs O(pairs * degrees).
struct PairTerms {
  double exact = 0.0;            // k(x, y)
  double pref = 0.0;             // sigma^2 exp(-(|x~|^2 + |y~|^2)/2)
  std::vector<double> series;    // (x~^T y~)^n / n!
  std::vector<double> var_unit;  // (1/n!)^2 * D * Var at D features, Gaussian/Rademacher part
  std::vector<double> srht_corr; // (1/n!)^2 * bracket of the TensorSRHT correction
  Index block = 0;  // SRHT block size (padded input dimension)
};

std::vector<PairTerms> precompute(const std::vector<PointPair>& pairs, int max_degree,
                                  SketchKind kind, const KernelParams& params) {
  std::vector<PairTerms> out;
  out.reserve(pairs.size());
  for (const auto& pair : pairs) {
    check_same_dim(pair.x.size(), pair.y.size(), "allocation pair");
    const VectorXd xs = pair.x / params.lengthscale;
    const VectorXd ys = pair.y / params.lengthscale;
    PairTerms t;
    t.block = next_power_of_two(xs.size());
    t.exact = gaussian_kernel(pair.x, pair.y, params);
    t.pref = params.kernel_variance * std::exp(-0.5 * (xs.squaredNorm() + ys.squaredNorm()));
    const double xy = xs.dot(ys);
    double term = 1.0;
    for (int n = 1; n <= max_degree; ++n) {
      term *= xy / n;
      t.series.push_back(term);
      const double w = std::exp(-2.0 * std::lgamma(n + 1.0));
      // Variance at D = 1 is the numerator of the Gaussian/Rademacher rows.
      const SketchKind base = kind == SketchKind::Gaussian ? SketchKind::Gaussian
                                                           : SketchKind::Rademacher;
      t.var_unit.push_back(w * sketch_variance(base, xs, ys, n, 1));
      double corr = 0.0;
      if (kind == SketchKind::TensorSRHT && t.block >= 2) {
        // Var(D) = R/D - c(D,d)/D^2 * bracket; recover the bracket from D = d.
        const Index d = t.block;
        const double c = srht_pair_count(d, d);
        const double vd = sketch_variance(SketchKind::TensorSRHT, xs, ys, n, d);
        const double rd = sketch_variance(SketchKind::Rademacher, xs, ys, n, d);
        corr = w * (rd - vd) * static_cast<double>(d * d) / c;
      }
      t.srht_corr.push_back(corr);
    }
    out.push_back(std::move(t));
  }
  return out;
}

// Variance of the degree-(i+1) term of one pair at D features, without pref^2.
double degree_variance(const PairTerms& t, std::size_t i, Index D, SketchKind kind) {
  const double Dd = static_cast<double>(D);
  double v = t.var_unit[i] / Dd;
  if (kind == SketchKind::TensorSRHT && t.block >= 2) {
    v -= srht_pair_count(D, t.block) / (Dd * Dd) * t.srht_corr[i];
  }
  return v;
}

double objective(const std::vector<PairTerms>& terms, const std::vector<Index>& alloc,
                 SketchKind kind) {
  double total = 0.0;
  for (const auto& t : terms) {
    double mean = 1.0;
    double var = 0.0;
    for (std::size_t i = 0; i < alloc.size(); ++i) {
      if (alloc[i] == 0) continue;
      mean += t.series[i];
      var += degree_variance(t, i, alloc[i], kind);
    }
    const double bias = t.exact - t.pref * mean;
    total += bias * bias + t.pref * t.pref * var;
  }
  return total / static_cast<double>(terms.size());
}

// Squared bias of the estimator with the given active degrees, averaged over pairs.
double support_bias(const std::vector<PairTerms>& terms, const std::vector<bool>& active) {
  double total = 0.0;
  for (const auto& t : terms) {
    double mean = 1.0;
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (active[i]) mean += t.series[i];
    }
    const double bias = t.exact - t.pref * mean;
    total += bias * bias;
  }
  return total / static_cast<double>(terms.size());
}

struct Split {
  double variance = INFINITY;
  std::vector<Index> alloc;  // one entry per degree, zero when inactive
};

// Best split of `budget` features over the active degrees, each getting at
// least one. curve[i][D] is the pair-averaged variance of degree i+1 at D
// features. The variance is separable across degrees, so a DP over degrees
// is exact even where it is not monotone in D (TensorSRHT).
Split best_split(const std::vector<std::vector<double>>& curve, const std::vector<bool>& active,
                 Index budget) {
  std::vector<std::size_t> degrees;
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (active[i]) degrees.push_back(i);
  }
  const auto B = static_cast<std::size_t>(budget);
  const std::size_t k = degrees.size();
  // cost[j][b]: best variance for the first j active degrees using b features.
  std::vector<std::vector<double>> cost(k + 1, std::vector<double>(B + 1, INFINITY));
  std::vector<std::vector<Index>> take(k + 1, std::vector<Index>(B + 1, 0));
  cost[0][0] = 0.0;
  for (std::size_t j = 1; j <= k; ++j) {
    const auto& g = curve[degrees[j - 1]];
    for (std::size_t b = j; b <= B; ++b) {
      for (std::size_t D = 1; D + (j - 1) <= b; ++D) {
        const double c = cost[j - 1][b - D] + g[D];
        if (c < cost[j][b]) {
          cost[j][b] = c;
          take[j][b] = static_cast<Index>(D);
        }
      }
    }
  }
  Split out;
  out.variance = cost[k][B];
  out.alloc.assign(active.size(), 0);
  std::size_t b = B;
  for (std::size_t j = k; j >= 1; --j) {
    out.alloc[degrees[j - 1]] = take[j][b];
    b -= static_cast<std::size_t>(take[j][b]);
  }
  return out;
}

}  // namespace

double allocation_objective(const std::vector<PointPair>& pairs,
                            const std::vector<Index>& allocation, SketchKind kind,
                            const KernelParams& params) {
  if (pairs.empty()) throw InputError("allocation_objective: no pairs");
  for (Index D : allocation) {
    if (D < 0) throw InputError("allocation_objective: negative allocation");
  }
  const auto terms = precompute(pairs, static_cast<int>(allocation.size()), kind, params);
  return objective(terms, allocation, kind);
}

AllocationResult optimize_allocation(const std::vector<PointPair>& pairs, Index budget,
                                     int max_degree, SketchKind kind, const KernelParams& params) {
  if (budget < 1) throw InputError("optimize_allocation: budget must be >= 1");
  if (max_degree < 1) throw InputError("optimize_allocation: max_degree must be >= 1");
  if (pairs.empty()) throw InputError("optimize_allocation: no pairs");
  params.validate();

  const auto terms = precompute(pairs, max_degree, kind, params);
  const auto degrees = static_cast<std::size_t>(max_degree);
  std::vector<std::vector<double>> curve(degrees, std::vector<double>(budget + 1, 0.0));
  for (std::size_t i = 0; i < degrees; ++i) {
    for (Index D = 1; D <= budget; ++D) {
      double total = 0.0;
      for (const auto& t : terms) total += t.pref * t.pref * degree_variance(t, i, D, kind);
      curve[i][static_cast<std::size_t>(D)] = total / static_cast<double>(terms.size());
    }
  }

  // Stepwise selection of active degrees, restarted from each single degree.
  // Each step applies the move (add, swap or drop one degree) that lowers the
  // objective most, with the budget re-split optimally over the active degrees.
  // A restart ends when no move improves; the best end point wins.
  const auto evaluate = [&](const std::vector<bool>& set, Split& split) {
    split = best_split(curve, set, budget);
    return support_bias(terms, set) + split.variance;
  };
  std::vector<Index> alloc;
  AllocationResult result;
  double best_final = INFINITY;
  for (std::size_t start = 0; start < degrees; ++start) {
    std::vector<bool> active(degrees, false);
    active[start] = true;
    Split split;
    double current = evaluate(active, split);
    std::vector<Index> run_alloc = std::move(split.alloc);
    std::vector<double> trace{current};
    for (;;) {
      std::vector<bool> best_active;
      double best_value = current;
      Split best_split_found;
      const auto consider = [&](const std::vector<bool>& candidate) {
        Split s;
        const double value = evaluate(candidate, s);
        if (value < best_value) {
          best_value = value;
          best_active = candidate;
          best_split_found = std::move(s);
        }
      };
      const auto count = static_cast<Index>(std::count(active.begin(), active.end(), true));
      for (std::size_t i = 0; i < degrees; ++i) {
        if (active[i]) continue;
        std::vector<bool> candidate = active;
        candidate[i] = true;
        if (count < budget) consider(candidate);
        for (std::size_t j = 0; j < degrees; ++j) {
          if (!active[j]) continue;
          candidate[j] = false;
          consider(candidate);
          candidate[j] = true;
        }
      }
      for (std::size_t j = 0; j < degrees && count > 1; ++j) {
        if (!active[j]) continue;
        std::vector<bool> candidate = active;
        candidate[j] = false;
        consider(candidate);
      }
      if (best_active.empty()) break;
      active = std::move(best_active);
      run_alloc = std::move(best_split_found.alloc);
      current = best_value;
      trace.push_back(current);
    }
    if (current < best_final) {
      best_final = current;
      alloc = std::move(run_alloc);
      result.objective_trace = std::move(trace);
    }
  }

  int p = max_degree;
  while (p > 0 && alloc[static_cast<std::size_t>(p - 1)] == 0) --p;
  result.optimal_degree = p;
  result.allocation.assign(alloc.begin(), alloc.begin() + p);
  return result;
}

std::vector<PointPair> sample_centered_pairs(const MatRef& X, Index count, std::uint64_t seed) {
  if (X.rows() < 1) throw InputError("sample_centered_pairs: empty data");
  if (count < 1) throw InputError("sample_centered_pairs: count must be >= 1");
  const VectorXd mean = X.colwise().mean().transpose();
  Rng rng = child_rng(seed, {0x70616972ULL});
  std::uniform_int_distribution<Index> pick(0, X.rows() - 1);
  std::vector<PointPair> pairs;
  pairs.reserve(static_cast<std::size_t>(count));
  for (Index k = 0; k < count; ++k) {
    const Index i = pick(rng);
    Index j = pick(rng);
    while (X.rows() > 1 && j == i) j = pick(rng);
    pairs.push_back({X.row(i).transpose() - mean, X.row(j).transpose() - mean});
  }
  return pairs;
}

}  // namespace locmac
