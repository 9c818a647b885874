#include "hcent/chain_model.hpp"

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "hcent/errors.hpp"

namespace hcent {

namespace {

void check_coupling(double coupling) {
  if (!(coupling >= 0.0 && coupling < 1.0)) {
    throw DomainError("coupling must satisfy 0 <= coupling < 1, got " + std::to_string(coupling));
  }
}

// FFTW planning is not thread-safe; execution on a finished plan is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw ResourceError("fftw_malloc failed for " + std::to_string(n) + " elements");
  return FftwBuffer<T>(p);
}

class RealForwardPlan {
 public:
  RealForwardPlan(std::size_t n, double* in, fftw_complex* out) {
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
    if (plan_ == nullptr) throw ResourceError("FFTW could not plan a transform of size " + std::to_string(n));
  }
  ~RealForwardPlan() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  RealForwardPlan(const RealForwardPlan&) = delete;
  RealForwardPlan& operator=(const RealForwardPlan&) = delete;

  void execute(double* in, fftw_complex* out) const { fftw_execute_dft_r2c(plan_, in, out); }

 private:
  fftw_plan plan_ = nullptr;
};

}  // namespace

double xi(double coupling) {
  check_coupling(coupling);
  return std::sqrt(1.0 / (2.0 * (1.0 - coupling)));
}

double coupling_for_xi(double xi) {
  if (!(xi >= std::sqrt(0.5)) || !std::isfinite(xi)) {
    throw DomainError("xi must be finite and >= 1/sqrt(2), got " + std::to_string(xi));
  }
  return 1.0 - 1.0 / (2.0 * xi * xi);
}

ChainSpec ChainSpec::from_coupling(std::size_t n_sites, double coupling) {
  if (n_sites < 2) throw DomainError("a chain needs at least 2 sites");
  check_coupling(coupling);
  return ChainSpec(n_sites, coupling);
}

ChainSpec ChainSpec::from_xi(std::size_t n_sites, double xi) {
  return from_coupling(n_sites, coupling_for_xi(xi));
}

double ChainSpec::xi() const { return hcent::xi(coupling_); }

double ChainSpec::mass() const { return static_cast<double>(n_sites_) / xi(); }

ChainSpec critical_preset(std::size_t n_sites) { return ChainSpec::from_coupling(n_sites, kCriticalCoupling); }

double dispersion(std::size_t k, const ChainSpec& spec) {
  if (k >= spec.n_sites()) {
    throw DomainError("mode index " + std::to_string(k) + " out of range for N=" + std::to_string(spec.n_sites()));
  }
  const double half_theta = std::numbers::pi * static_cast<double>(k) / static_cast<double>(spec.n_sites());
  const double s = std::sin(half_theta);
  return std::sqrt(spec.gap() + 2.0 * spec.coupling() * s * s);
}

CorrelationKernel::CorrelationKernel(ChainSpec spec, std::vector<double> g, std::vector<double> h)
    : spec_(spec), g_(std::move(g)), h_(std::move(h)) {
  if (g_.size() != spec_.n_sites() || h_.size() != spec_.n_sites()) {
    throw DomainError("kernel arrays must have one entry per lag");
  }
}

double CorrelationKernel::g_between(std::size_t i, std::size_t j) const {
  const std::size_t n = n_sites();
  const std::size_t diff = i > j ? i - j : j - i;
  return g_[std::min(diff, n - diff)];
}

double CorrelationKernel::h_between(std::size_t i, std::size_t j) const {
  const std::size_t n = n_sites();
  const std::size_t diff = i > j ? i - j : j - i;
  return h_[std::min(diff, n - diff)];
}

CorrelationKernel build_kernel(const ChainSpec& spec, const KernelOptions& options) {
  const std::size_t n = spec.n_sites();
  if (n > options.max_sites) {
    throw ResourceError("N=" + std::to_string(n) + " exceeds the configured maximum of " +
                        std::to_string(options.max_sites) + " sites");
  }
  const std::size_t n_out = n / 2 + 1;

  auto in = fftw_buffer<double>(n);
  auto out = fftw_buffer<fftw_complex>(n_out);
  const RealForwardPlan plan(n, in.get(), out.get());

  std::vector<double> nu(n);
  for (std::size_t k = 0; k < n; ++k) nu[k] = dispersion(k, spec);

  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  auto transform = [&](auto weight) {
    for (std::size_t k = 0; k < n; ++k) in[k] = weight(nu[k]);
    plan.execute(in.get(), out.get());
    std::vector<double> c(n);
    for (std::size_t x = 0; x < n_out; ++x) c[x] = scale * out[x][0];
    for (std::size_t x = n_out; x < n; ++x) c[x] = c[n - x];
    return c;
  };

  auto g = transform([](double v) { return 1.0 / v; });
  auto h = transform([](double v) { return v; });
  return CorrelationKernel(spec, std::move(g), std::move(h));
}

AsymptoticShape asymptotic_correlators(double x, Regime regime, double decay_length) {
  if (!(x > 0.0)) throw DomainError("asymptotic correlators need x > 0");
  if (regime == Regime::critical) {
    return {-std::log(x), -1.0 / (x * x)};
  }
  if (!(decay_length > 0.0)) throw DomainError("noncritical asymptotics need a positive decay length");
  const double e = std::exp(-x / decay_length);
  return {-e / std::sqrt(x), e / (x * std::sqrt(x))};
}

}  // namespace hcent
