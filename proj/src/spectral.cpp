#include "hcent/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hcent/errors.hpp"

namespace hcent {

SymplecticSpectrum symplectic_spectrum(const ReducedGaussianState& state) {
  const Eigen::MatrixXd& g = state.g_block();
  const Eigen::MatrixXd& h = state.h_block();

  const Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("Cholesky factorization of the position block failed (M=" +
                              std::to_string(state.size()) + ")");
  }

  // C^T H C with G = C C^T.
  const Eigen::MatrixXd hc = h * llt.matrixL();
  Eigen::MatrixXd sym = llt.matrixU() * hc;
  sym = 0.5 * (sym + sym.transpose()).eval();

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw EigenSolverFailure("symmetric eigensolver did not converge (M=" + std::to_string(state.size()) + ")");
  }

  SymplecticSpectrum out;
  out.source = state.is_transposed() ? SpectrumSource::partial_transpose : SpectrumSource::plain;
  out.values.reserve(state.size());
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double mu = solver.eigenvalues()(i);
    if (mu < -kNegativeEigenvalueTolerance) {
      throw InvalidSpectrum("C^T H C has eigenvalue " + std::to_string(mu) + "; the state is not physical");
    }
    out.values.push_back(std::sqrt(std::max(mu, kEigenvalueFloor)));
  }
  std::ranges::sort(out.values);
  return out;
}

}  // namespace hcent
