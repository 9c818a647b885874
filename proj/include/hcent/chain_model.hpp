#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hcent {

/// Coupling used for the near-massless ("critical") chain.
inline constexpr double kCriticalCoupling = 1.0 - 1e-12;
/// Desk-scale default ring size.
inline constexpr std::size_t kDeskSites = 8192;
/// Ring size used for the published large-N runs.
inline constexpr std::size_t kPaperSites = 20000;

/// Correlation length in lattice units for nearest-neighbour coupling `coupling`.
/// Throws DomainError unless 0 <= coupling < 1.
double xi(double coupling);

/// Inverse of xi(): the coupling giving correlation length `xi`.
double coupling_for_xi(double xi);

/// Periodic harmonic chain
///   H = 1/2 sum_n (q_n^2 + p_n^2 - coupling * q_n q_{n+1}),  q_{N+1} = q_1.
///
/// The coupling is the stored quantity; xi and mass are derived from it so
/// xi() == sqrt(1 / (2 (1 - coupling()))) holds exactly.
class ChainSpec {
 public:
  static ChainSpec from_coupling(std::size_t n_sites, double coupling);
  static ChainSpec from_xi(std::size_t n_sites, double xi);

  std::size_t n_sites() const noexcept { return n_sites_; }
  double coupling() const noexcept { return coupling_; }
  /// 1 - coupling, exact in floating point for coupling >= 1/2.
  double gap() const noexcept { return 1.0 - coupling_; }
  double xi() const;
  /// Continuum mass parameter N / xi.
  double mass() const;

  bool operator==(const ChainSpec&) const = default;

 private:
  ChainSpec(std::size_t n_sites, double coupling) : n_sites_(n_sites), coupling_(coupling) {}

  std::size_t n_sites_;
  double coupling_;
};

/// Near-massless chain with coupling kCriticalCoupling.
ChainSpec critical_preset(std::size_t n_sites = kDeskSites);

/// Normal-mode frequency nu_k = sqrt(1 - coupling cos(2 pi k / N)), 0 <= k < N.
/// Evaluated as sqrt(gap + 2 coupling sin^2(pi k / N)) so the zero mode keeps
/// full relative precision near criticality.
double dispersion(std::size_t k, const ChainSpec& spec);

enum class Correlator { position, momentum };

/// Vacuum two-point functions g(x) = <q_i q_{i+x}>, h(x) = <p_i p_{i+x}>
/// stored by lag x = 0..N-1. Immutable once built.
class CorrelationKernel {
 public:
  CorrelationKernel(ChainSpec spec, std::vector<double> g, std::vector<double> h);

  const ChainSpec& spec() const noexcept { return spec_; }
  std::size_t n_sites() const noexcept { return spec_.n_sites(); }
  std::span<const double> g() const noexcept { return g_; }
  std::span<const double> h() const noexcept { return h_; }
  std::span<const double> values(Correlator c) const noexcept {
    return c == Correlator::position ? g() : h();
  }

  /// Correlator between sites i and j using the ring lag.
  double g_between(std::size_t i, std::size_t j) const;
  double h_between(std::size_t i, std::size_t j) const;

 private:
  ChainSpec spec_;
  std::vector<double> g_;
  std::vector<double> h_;
};

struct KernelOptions {
  std::size_t max_sites = std::size_t{1} << 24;
};

/// Exact vacuum kernel
///   g(x) = 1/(2N) sum_k cos(theta_k x) / nu_k,   h(x) = 1/(2N) sum_k nu_k cos(theta_k x)
/// evaluated with a real-to-complex FFT (O(N log N)). Entries above N/2 are
/// mirrored, so g[x] == g[N-x] exactly. Throws ResourceError above
/// options.max_sites.
CorrelationKernel build_kernel(const ChainSpec& spec, const KernelOptions& options = {});

enum class Regime { critical, noncritical };

struct AsymptoticShape {
  double g;
  double h;
};

/// Large-distance shapes of the correlators with undetermined constants dropped:
///   critical:     g ~ -log x,                      h ~ -1/x^2
///   noncritical:  g ~ -exp(-x/decay_length)/sqrt(x), h ~ exp(-x/decay_length)/x^(3/2)
/// `decay_length` is in lattice units; the exact kernel decays with length ~xi.
/// Only meant for shape comparisons, never for computing measures.
AsymptoticShape asymptotic_correlators(double x, Regime regime, double decay_length = 0.0);

}  // namespace hcent
