#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hcent/chain_model.hpp"
#include "hcent/gaussian_state.hpp"
#include "hcent/spectral.hpp"

// Slow reference implementations used to cross-check the fast paths.

namespace hcent::oracle {

inline constexpr std::size_t kMaxDirectSites = 4096;
inline constexpr std::size_t kMaxGeneralizedModes = 256;

struct OracleReport {
  double max_abs_diff = 0.0;
  std::pair<std::size_t, std::size_t> location{0, 0};
  std::size_t n_compared = 0;

  void merge(const OracleReport& other);
};

/// Literal double sum over modes and lags, no transform. N <= kMaxDirectSites.
CorrelationKernel kernel_direct_sum(const ChainSpec& spec);

/// Square roots of the eigenvalues of the plain product G H from a
/// nonsymmetric eigensolver (G^-1 formed explicitly to find det(H - mu^2 G^-1) = 0).
/// M <= kMaxGeneralizedModes.
SymplecticSpectrum spectrum_via_generalized_eig(const ReducedGaussianState& state);

/// E_LN of a two-site state with site 2 time reversed, from the trace and
/// determinant of the 2x2 product G H~.
double negativity_two_modes_closed_form(const ReducedGaussianState& state);

OracleReport compare_kernels(const CorrelationKernel& fast, const CorrelationKernel& slow);

/// Per-value relative difference |a - b| / max(|b|, tiny); location = (index, 0).
OracleReport compare_spectra(const SymplecticSpectrum& fast, const SymplecticSpectrum& slow);

struct SelfCheckOptions {
  std::vector<std::size_t> sizes{8, 16, 64, 256};
  std::vector<double> couplings{0.0, 0.5, 0.9, 1.0 - 1e-6};
  std::size_t max_block_len = 8;
};

struct SelfCheckSummary {
  OracleReport kernel;     // absolute
  OracleReport spectrum;   // relative
  OracleReport two_mode;   // absolute, bits
  std::size_t instances = 0;
  bool passed = false;
};

/// Tolerances used by run_self_check.
inline constexpr double kKernelTolerance = 1e-10;
inline constexpr double kSpectrumTolerance = 1e-8;
inline constexpr double kTwoModeTolerance = 1e-10;

/// Full small-instance grid: every chain in sizes x couplings and every pair
/// with L <= max_block_len, 2L + D <= N.
SelfCheckSummary run_self_check(const SelfCheckOptions& options = {});

}  // namespace hcent::oracle
