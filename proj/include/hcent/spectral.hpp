#pragma once

#include <vector>

#include "hcent/gaussian_state.hpp"

namespace hcent {

enum class SpectrumSource { plain, partial_transpose };

struct SymplecticSpectrum {
  /// Ascending, all > 0.
  std::vector<double> values;
  SpectrumSource source = SpectrumSource::plain;
};

/// Eigenvalues below this (before the square root) are treated as invalid
/// rather than round-off.
inline constexpr double kNegativeEigenvalueTolerance = 1e-8;
inline constexpr double kEigenvalueFloor = 1e-30;

/// Positive branch of the spectrum of i G H.
///
/// With G = C C^T (Cholesky), G H is similar to the symmetric matrix C^T H C,
/// whose eigenvalues are the squared symplectic eigenvalues. Throws
/// NotPositiveDefinite if the Cholesky factorization fails, EigenSolverFailure
/// if the eigensolver does not converge and InvalidSpectrum if an eigenvalue
/// of C^T H C is below -kNegativeEigenvalueTolerance.
SymplecticSpectrum symplectic_spectrum(const ReducedGaussianState& state);

}  // namespace hcent
