#ifndef LOCMAC_RANDOM_HPP
#define LOCMAC_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace locmac {

using Rng = std::mt19937_64;

// Seed splitting. Every random object (weight matrix, sign vector,
// permutation, frequency block, data split) draws from its own child stream
// whose seed is a SplitMix64 hash chain over the master seed and a path of
// integer tags, e.g. derive_seed(seed, {degree, block, factor}). Adding a new
// object therefore never shifts the draws of existing ones.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

inline Rng child_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(master, path));
}

}  // namespace locmac

#endif  // LOCMAC_RANDOM_HPP
