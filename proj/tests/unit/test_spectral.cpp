#include <cmath>

#include <doctest.h>

#include "hcent/errors.hpp"
#include "hcent/oracle.hpp"
#include "hcent/spectral.hpp"
#include "support.hpp"

using namespace hcent;

TEST_CASE("product state has all symplectic eigenvalues 1/2") {
  const auto k = build_kernel(ChainSpec::from_coupling(24, 0.0));
  const auto pair = BlockPair::make(24, 5, 3);
  const auto s = symplectic_spectrum(union_state(k, pair));
  REQUIRE(s.values.size() == 10);
  for (double v : s.values) CHECK(v == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s.source == SpectrumSource::plain);
}

TEST_CASE("single mode spectrum is sqrt(g h)") {
  Eigen::MatrixXd g(1, 1), h(1, 1);
  g << 2.0;
  h << 0.5;
  const auto s = symplectic_spectrum(ReducedGaussianState::from_blocks(g, h));
  CHECK(s.values.at(0) == doctest::Approx(1.0));
}

TEST_CASE("spectrum errors") {
  Eigen::MatrixXd g(2, 2), h = Eigen::MatrixXd::Identity(2, 2);
  g << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(symplectic_spectrum(ReducedGaussianState::from_blocks(g, h)), NotPositiveDefinite);
  Eigen::MatrixXd g2 = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd h2(2, 2);
  h2 << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(symplectic_spectrum(ReducedGaussianState::from_blocks(g2, h2)), InvalidSpectrum);
}

TEST_CASE("transposed spectra are tagged") {
  const auto k = build_kernel(ChainSpec::from_coupling(32, 0.99));
  const auto pair = BlockPair::make(32, 3, 0);
  const auto s = symplectic_spectrum(partial_transpose(union_state(k, pair), pair.sites_b()));
  CHECK(s.source == SpectrumSource::partial_transpose);
  CHECK(s.values.front() < 0.5);
}

TEST_CASE("property: Cholesky route agrees with the generalized eigensolver") {
  test::Gen gen(0x5eed21);
  for (int i = 0; i < test::kCases; ++i) {
    const auto spec = gen.chain();
    const auto k = build_kernel(spec);
    const auto pair = gen.pair(spec.n_sites());
    const auto st = union_state(k, pair);
    const auto pt = partial_transpose(st, pair.sites_b());
    CAPTURE(spec.n_sites());
    CAPTURE(spec.coupling());
    CHECK(oracle::compare_spectra(symplectic_spectrum(st), oracle::spectrum_via_generalized_eig(st)).max_abs_diff < 1e-8);
    CHECK(oracle::compare_spectra(symplectic_spectrum(pt), oracle::spectrum_via_generalized_eig(pt)).max_abs_diff < 1e-8);
  }
}

TEST_CASE("property: physical states satisfy the uncertainty bound") {
  test::Gen gen(0x5eed22);
  for (int i = 0; i < test::kCases; ++i) {
    const auto spec = gen.chain(8, 400);
    const auto k = build_kernel(spec);
    const auto pair = gen.pair(spec.n_sites(), 24);
    const auto s = symplectic_spectrum(union_state(k, pair));
    CHECK(s.values.size() == 2 * pair.block_len());
    CHECK(std::is_sorted(s.values.begin(), s.values.end()));
    CHECK(s.values.front() >= 0.5 - 1e-9);
  }
}

TEST_CASE("two-mode negativity agrees with the closed form") {
  test::Gen gen(0x5eed23);
  for (int i = 0; i < test::kCases; ++i) {
    const auto spec = gen.chain();
    const auto k = build_kernel(spec);
    const auto pair = BlockPair::make(spec.n_sites(), 1, gen.size(0, 3));
    const auto st = union_state(k, pair);
    const auto s = symplectic_spectrum(partial_transpose(st, pair.sites_b()));
    double e = 0.0;
    for (double v : s.values) e += std::max(0.0, -std::log2(2.0 * v));
    CHECK(e == doctest::Approx(oracle::negativity_two_modes_closed_form(st)).epsilon(1e-10));
  }
}
