#pragma once

#include "hcent/chain_model.hpp"
#include "hcent/gaussian_state.hpp"
#include "hcent/spectral.hpp"

namespace hcent {

/// Symplectic eigenvalues within this distance below 1/2 count as 1/2.
inline constexpr double kPurityClamp = 1e-9;

/// Von Neumann entropy in nats:
///   S = sum_j (l+1/2) ln(l+1/2) - (l-1/2) ln(l-1/2)
/// Requires a plain spectrum with every value >= 1/2 - kPurityClamp.
double entropy(const SymplecticSpectrum& spectrum);

/// Logarithmic negativity in bits, -sum_j log2(min(2 l_j, 1)), of a
/// partially transposed spectrum.
double log_negativity(const SymplecticSpectrum& spectrum);

/// Renyi-1/2 entropy in bits, 2 sum_j log2(sqrt(l+1/2) + sqrt(l-1/2)).
/// For a pure state cut in two this equals the negativity across the cut.
double renyi_half_entropy(const SymplecticSpectrum& spectrum);

/// Entropy of the vacuum restricted to `sites`.
double block_entropy(const CorrelationKernel& kernel, std::span<const std::size_t> sites);

/// E_LN between the two blocks of `pair`, time reversal applied to B.
double log_negativity(const CorrelationKernel& kernel, const BlockPair& pair);

/// I = S(A) + S(B) - S(AB) in nats.
double mutual_information(const CorrelationKernel& kernel, const BlockPair& pair);

struct MeasureRecord {
  double entropy_a = 0.0;           // nats
  double entropy_b = 0.0;           // nats
  double entropy_ab = 0.0;          // nats
  double mutual_information = 0.0;  // nats
  double log_negativity = 0.0;      // bits
  ChainSpec spec;
  BlockPair pair;
};

/// All measures of one pair in one call.
MeasureRecord measure_pair(const CorrelationKernel& kernel, const BlockPair& pair);

}  // namespace hcent
