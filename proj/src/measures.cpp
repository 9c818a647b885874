#include "hcent/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hcent/errors.hpp"

namespace hcent {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

void require_source(const SymplecticSpectrum& spectrum, SpectrumSource expected, const char* op) {
  if (spectrum.source != expected) {
    throw InvalidSpectrum(std::string(op) +
                          (expected == SpectrumSource::plain ? " needs an untransposed spectrum"
                                                             : " needs a partially transposed spectrum"));
  }
}

void require_physical(const SymplecticSpectrum& spectrum, const char* op) {
  for (double v : spectrum.values) {
    if (v < 0.5 - kPurityClamp) {
      throw InvalidSpectrum(std::string(op) + ": symplectic eigenvalue " + std::to_string(v) + " below 1/2");
    }
  }
}

}  // namespace

double entropy(const SymplecticSpectrum& spectrum) {
  require_source(spectrum, SpectrumSource::plain, "entropy");
  require_physical(spectrum, "entropy");
  double s = 0.0;
  for (double v : spectrum.values) s += xlogx(v + 0.5) - xlogx(v - 0.5);
  return std::max(s, 0.0);
}

double log_negativity(const SymplecticSpectrum& spectrum) {
  require_source(spectrum, SpectrumSource::partial_transpose, "log_negativity");
  double e = 0.0;
  for (double v : spectrum.values) {
    if (2.0 * v < 1.0) e -= std::log2(2.0 * v);
  }
  return e;
}

double renyi_half_entropy(const SymplecticSpectrum& spectrum) {
  require_source(spectrum, SpectrumSource::plain, "renyi_half_entropy");
  require_physical(spectrum, "renyi_half_entropy");
  double s = 0.0;
  for (double v : spectrum.values) s += std::log2(std::sqrt(v + 0.5) + std::sqrt(std::max(v - 0.5, 0.0)));
  return 2.0 * s;
}

double block_entropy(const CorrelationKernel& kernel, std::span<const std::size_t> sites) {
  return entropy(symplectic_spectrum(extract_block(kernel, sites)));
}

double log_negativity(const CorrelationKernel& kernel, const BlockPair& pair) {
  const auto state = union_state(kernel, pair);
  const auto b = pair.sites_b();
  return log_negativity(symplectic_spectrum(partial_transpose(state, b)));
}

double mutual_information(const CorrelationKernel& kernel, const BlockPair& pair) {
  const double sa = block_entropy(kernel, pair.sites_a());
  const double sb = block_entropy(kernel, pair.sites_b());
  const double sab = entropy(symplectic_spectrum(union_state(kernel, pair)));
  return sa + sb - sab;
}

MeasureRecord measure_pair(const CorrelationKernel& kernel, const BlockPair& pair) {
  const auto ab = union_state(kernel, pair);
  const auto b = pair.sites_b();
  const double sa = block_entropy(kernel, pair.sites_a());
  const double sb = block_entropy(kernel, b);
  const double sab = entropy(symplectic_spectrum(ab));
  const double eln = log_negativity(symplectic_spectrum(partial_transpose(ab, b)));
  return MeasureRecord{sa, sb, sab, sa + sb - sab, eln, kernel.spec(), pair};
}

}  // namespace hcent
