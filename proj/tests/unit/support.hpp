#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "hcent/chain_model.hpp"
#include "hcent/gaussian_state.hpp"

namespace hcent::test {

// Seeded generators for the property tests. Each property runs a fixed
// number of cases so failures reproduce.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t size(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  ChainSpec chain(std::size_t n_lo = 8, std::size_t n_hi = 96) {
    static const double couplings[] = {0.0, 0.3, 0.5, 0.9, 0.99, 1.0 - 1e-6};
    const std::size_t n = size(n_lo, n_hi);
    if (size(0, 2) == 0) return ChainSpec::from_coupling(n, real(0.0, 0.999));
    return ChainSpec::from_coupling(n, couplings[size(0, 5)]);
  }

  BlockPair pair(std::size_t n_sites, std::size_t max_len = 8) {
    const std::size_t len = size(1, std::min(max_len, n_sites / 2));
    const std::size_t sep = size(0, n_sites - 2 * len);
    return BlockPair::make(n_sites, len, sep, size(0, n_sites - 1));
  }

 private:
  std::mt19937_64 rng_;
};

inline constexpr int kCases = 60;

}  // namespace hcent::test
