#include "hcent/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hcent/errors.hpp"
#include "hcent/measures.hpp"

namespace hcent::oracle {

void OracleReport::merge(const OracleReport& other) {
  if (other.max_abs_diff > max_abs_diff) {
    max_abs_diff = other.max_abs_diff;
    location = other.location;
  }
  n_compared += other.n_compared;
}

CorrelationKernel kernel_direct_sum(const ChainSpec& spec) {
  const std::size_t n = spec.n_sites();
  if (n > kMaxDirectSites) {
    throw ResourceError("direct-sum kernel limited to N <= " + std::to_string(kMaxDirectSites));
  }
  std::vector<double> nu(n);
  for (std::size_t k = 0; k < n; ++k) nu[k] = dispersion(k, spec);

  const double two_pi_over_n = 2.0 * std::numbers::pi / static_cast<double>(n);
  std::vector<double> g(n, 0.0);
  std::vector<double> h(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    double gs = 0.0;
    double hs = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double c = std::cos(two_pi_over_n * static_cast<double>((k * x) % n));
      gs += c / nu[k];
      hs += c * nu[k];
    }
    g[x] = gs / (2.0 * static_cast<double>(n));
    h[x] = hs / (2.0 * static_cast<double>(n));
  }
  return CorrelationKernel(spec, std::move(g), std::move(h));
}

SymplecticSpectrum spectrum_via_generalized_eig(const ReducedGaussianState& state) {
  const std::size_t m = state.size();
  if (m > kMaxGeneralizedModes) {
    throw ResourceError("generalized-eigenvalue oracle limited to M <= " + std::to_string(kMaxGeneralizedModes));
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(state.g_block());
  if (!lu.isInvertible()) throw NotPositiveDefinite("position block is singular");
  const Eigen::MatrixXd g_inv = lu.inverse();

  // H v = mu^2 G^-1 v
  const Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> solver(state.h_block(), g_inv, false);
  if (solver.info() != Eigen::Success) throw EigenSolverFailure("QZ iteration did not converge");

  SymplecticSpectrum out;
  out.source = state.is_transposed() ? SpectrumSource::partial_transpose : SpectrumSource::plain;
  const auto alphas = solver.alphas();
  const auto betas = solver.betas();
  for (Eigen::Index i = 0; i < alphas.size(); ++i) {
    const std::complex<double> mu2 = alphas(i) / betas(i);
    if (!(mu2.real() > 0.0)) throw InvalidSpectrum("nonpositive eigenvalue of G H in oracle");
    out.values.push_back(std::sqrt(mu2.real()));
  }
  std::ranges::sort(out.values);
  return out;
}

double negativity_two_modes_closed_form(const ReducedGaussianState& state) {
  if (state.size() != 2) throw DomainError("two-mode closed form needs exactly two sites");
  Eigen::Matrix2d h = state.h_block();
  if (!state.is_transposed()) {
    h(0, 1) = -h(0, 1);
    h(1, 0) = -h(1, 0);
  } else {
    const auto& mask = *state.transpose_mask();
    if (mask[0] == mask[1]) throw DomainError("two-mode closed form expects exactly one mode time reversed");
  }
  const Eigen::Matrix2d p = state.g_block() * h;
  const double tr = p.trace();
  const double det = p.determinant();
  const double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
  double e = 0.0;
  for (double mu2 : {0.5 * (tr - disc), 0.5 * (tr + disc)}) {
    const double lam = std::sqrt(std::max(mu2, 0.0));
    if (2.0 * lam < 1.0) e -= std::log2(2.0 * lam);
  }
  return e;
}

OracleReport compare_kernels(const CorrelationKernel& fast, const CorrelationKernel& slow) {
  if (fast.n_sites() != slow.n_sites()) throw DomainError("kernels have different sizes");
  OracleReport rep;
  for (std::size_t which = 0; which < 2; ++which) {
    const auto a = which == 0 ? fast.g() : fast.h();
    const auto b = which == 0 ? slow.g() : slow.h();
    for (std::size_t x = 0; x < a.size(); ++x) {
      const double diff = std::abs(a[x] - b[x]);
      if (diff > rep.max_abs_diff) {
        rep.max_abs_diff = diff;
        rep.location = {x, which};
      }
      ++rep.n_compared;
    }
  }
  return rep;
}

OracleReport compare_spectra(const SymplecticSpectrum& fast, const SymplecticSpectrum& slow) {
  if (fast.values.size() != slow.values.size()) throw DomainError("spectra have different sizes");
  OracleReport rep;
  for (std::size_t i = 0; i < fast.values.size(); ++i) {
    const double diff = std::abs(fast.values[i] - slow.values[i]) / std::max(std::abs(slow.values[i]), 1e-300);
    if (diff > rep.max_abs_diff) {
      rep.max_abs_diff = diff;
      rep.location = {i, 0};
    }
    ++rep.n_compared;
  }
  return rep;
}

SelfCheckSummary run_self_check(const SelfCheckOptions& options) {
  SelfCheckSummary s;
  for (std::size_t n : options.sizes) {
    for (double coupling : options.couplings) {
      const auto spec = ChainSpec::from_coupling(n, coupling);
      const auto fast = build_kernel(spec);
      s.kernel.merge(compare_kernels(fast, kernel_direct_sum(spec)));
      ++s.instances;

      for (std::size_t len = 1; len <= options.max_block_len && 2 * len <= n; ++len) {
        for (std::size_t sep = 0; 2 * len + sep <= n; ++sep) {
          const auto pair = BlockPair::make(n, len, sep);
          const auto state = union_state(fast, pair);
          const auto b = pair.sites_b();
          const auto pt = partial_transpose(state, b);
          s.spectrum.merge(compare_spectra(symplectic_spectrum(state), spectrum_via_generalized_eig(state)));
          s.spectrum.merge(compare_spectra(symplectic_spectrum(pt), spectrum_via_generalized_eig(pt)));
          if (len == 1) {
            OracleReport two;
            two.max_abs_diff = std::abs(negativity_two_modes_closed_form(pt) - log_negativity(symplectic_spectrum(pt)));
            two.location = {len, sep};
            two.n_compared = 1;
            s.two_mode.merge(two);
          }
          ++s.instances;
        }
      }
    }
  }
  s.passed = s.kernel.max_abs_diff <= kKernelTolerance && s.spectrum.max_abs_diff <= kSpectrumTolerance &&
             s.two_mode.max_abs_diff <= kTwoModeTolerance;
  return s;
}

}  // namespace hcent::oracle
