#include <cmath>

#include <doctest.h>

#include "hcent/chain_model.hpp"
#include "hcent/errors.hpp"
#include "hcent/oracle.hpp"
#include "support.hpp"

using namespace hcent;

TEST_CASE("xi and coupling are inverse maps") {
  CHECK(xi(0.0) == doctest::Approx(std::sqrt(0.5)));
  CHECK(xi(0.5) == doctest::Approx(1.0));
  CHECK(xi(1.0 - 1e-12) == doctest::Approx(std::sqrt(0.5e12)));
  for (double x : {0.8, 1.0, 16.0, 64.0}) CHECK(xi(coupling_for_xi(x)) == doctest::Approx(x).epsilon(1e-12));
  // The gap 1/(2 xi^2) is only resolved to ~1e-16 / gap relative.
  CHECK(xi(coupling_for_xi(1e5)) == doctest::Approx(1e5).epsilon(1e-5));
  CHECK_THROWS_AS(xi(1.0), DomainError);
  CHECK_THROWS_AS(xi(-0.1), DomainError);
  CHECK_THROWS_AS(coupling_for_xi(0.5), DomainError);
}

TEST_CASE("ChainSpec validates and derives") {
  const auto s = ChainSpec::from_xi(4096, 16.0);
  CHECK(s.n_sites() == 4096);
  CHECK(s.xi() == doctest::Approx(16.0));
  CHECK(s.mass() == doctest::Approx(256.0));
  CHECK(ChainSpec::from_coupling(16, 0.5) == ChainSpec::from_coupling(16, 0.5));
  CHECK_THROWS_AS(ChainSpec::from_coupling(1, 0.5), DomainError);
  CHECK_THROWS_AS(ChainSpec::from_coupling(16, 1.0), DomainError);
  CHECK_THROWS_AS(ChainSpec::from_coupling(16, std::nan("")), DomainError);
  CHECK(critical_preset().n_sites() == kDeskSites);
  CHECK(critical_preset().coupling() == kCriticalCoupling);
}

TEST_CASE("dispersion") {
  const auto s = ChainSpec::from_coupling(16, 0.5);
  CHECK(dispersion(0, s) == doctest::Approx(std::sqrt(0.5)));
  CHECK(dispersion(8, s) == doctest::Approx(std::sqrt(1.5)));
  CHECK(dispersion(4, s) == doctest::Approx(1.0));
  // The zero mode stays accurate where 1 - coupling*cos(0) would cancel.
  CHECK(dispersion(0, critical_preset()) == doctest::Approx(1e-6).epsilon(1e-6));
}

TEST_CASE("uncoupled chain has on-site vacuum correlators") {
  const auto k = build_kernel(ChainSpec::from_coupling(32, 0.0));
  CHECK(k.g()[0] == doctest::Approx(0.5));
  CHECK(k.h()[0] == doctest::Approx(0.5));
  for (std::size_t x = 1; x < 32; ++x) {
    CHECK(std::abs(k.g()[x]) < 1e-15);
    CHECK(std::abs(k.h()[x]) < 1e-15);
  }
}

// Reference values from an independent mode sum (numpy, float64).
TEST_CASE("kernel matches frozen mode sums") {
  struct Row {
    std::size_t n;
    double coupling, g0, g1, h0, h1;
  };
  const Row rows[] = {
      {16, 0.5, 0.5273243075217943, 0.07130596427437608, 0.49167132538460623, -0.06411872989034842},
      {64, 0.9, 0.6659107753823204, 0.2216680892058186, 0.4664094950970836, -0.12588386954609077},
      {32, 1.0 - 1e-6, 16.433305159221458, 15.983508801228862, 0.4498123415013982, -0.15039915930101416},
      {128, 0.99, 0.910871883451865, 0.4624730320096944, 0.45302358176226765, -0.14643004421509936},
  };
  for (const auto& r : rows) {
    CAPTURE(r.n);
    const auto k = build_kernel(ChainSpec::from_coupling(r.n, r.coupling));
    CHECK(k.g()[0] == doctest::Approx(r.g0).epsilon(1e-12));
    CHECK(k.g()[1] == doctest::Approx(r.g1).epsilon(1e-12));
    CHECK(k.h()[0] == doctest::Approx(r.h0).epsilon(1e-12));
    CHECK(k.h()[1] == doctest::Approx(r.h1).epsilon(1e-12));
  }
}

TEST_CASE("property: FFT kernel equals the direct mode sum") {
  test::Gen gen(0x5eed01);
  for (int i = 0; i < test::kCases; ++i) {
    const auto spec = gen.chain(2, 300);
    CAPTURE(spec.n_sites());
    CAPTURE(spec.coupling());
    const auto rep = oracle::compare_kernels(build_kernel(spec), oracle::kernel_direct_sum(spec));
    CHECK(rep.max_abs_diff < 1e-10 * std::max(1.0, build_kernel(spec).g()[0]));
  }
}

TEST_CASE("property: kernel is a mirrored ring function") {
  test::Gen gen(0x5eed02);
  for (int i = 0; i < test::kCases; ++i) {
    const auto spec = gen.chain(2, 2000);
    const auto k = build_kernel(spec);
    const std::size_t n = spec.n_sites();
    for (std::size_t x = 1; x < n; ++x) {
      REQUIRE(k.g()[x] == k.g()[n - x]);
      REQUIRE(k.h()[x] == k.h()[n - x]);
    }
    const std::size_t a = gen.size(0, n - 1), b = gen.size(0, n - 1);
    CHECK(k.g_between(a, b) == k.g()[ring_lag(a, b, n)]);
    CHECK(k.h_between(a, b) == k.h_between(b, a));
    // Uncertainty on a single site: g(0) h(0) >= 1/4.
    CHECK(k.g()[0] * k.h()[0] >= 0.25 - 1e-12);
  }
}

TEST_CASE("kernel size limit") {
  KernelOptions opts;
  opts.max_sites = 64;
  CHECK_THROWS_AS(build_kernel(ChainSpec::from_coupling(65, 0.5), opts), ResourceError);
  CHECK_NOTHROW(build_kernel(ChainSpec::from_coupling(64, 0.5), opts));
}

TEST_CASE("critical kernel follows the asymptotic shapes") {
  const auto k = build_kernel(critical_preset(8192));
  // Massless limit: nu_k ~ |k| / sqrt(2), so g(x) - g(y) ~ -(log x - log y) / (sqrt(2) pi).
  const double dg = k.g()[400] - k.g()[100];
  const double shape = asymptotic_correlators(400, Regime::critical).g - asymptotic_correlators(100, Regime::critical).g;
  CHECK(dg / shape == doctest::Approx(1.0 / (std::sqrt(2.0) * M_PI)).epsilon(0.01));
  const double hr = k.h()[200] / k.h()[100];
  CHECK(hr == doctest::Approx(asymptotic_correlators(200, Regime::critical).h /
                              asymptotic_correlators(100, Regime::critical).h)
                  .epsilon(0.01));
}

TEST_CASE("noncritical kernel decays with length xi") {
  const auto spec = ChainSpec::from_xi(4096, 16.0);
  const auto k = build_kernel(spec);
  const double ratio = k.g()[160] / k.g()[80];
  const auto shape = [&](double x) { return asymptotic_correlators(x, Regime::noncritical, spec.xi()).g; };
  CHECK(ratio == doctest::Approx(shape(160) / shape(80)).epsilon(0.05));
  CHECK_THROWS_AS(asymptotic_correlators(1.0, Regime::noncritical, 0.0), DomainError);
  CHECK_THROWS_AS(asymptotic_correlators(0.0, Regime::critical), DomainError);
}
