// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 1).
//
//   hcent_acceptance                 desk scale (N = 8192), gated
//   hcent_acceptance --profile paper N = 2e4 for the critical sweeps
//   hcent_acceptance --only 3,4      subset

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hcent/cli_io.hpp"
#include "hcent/errors.hpp"
#include "hcent/experiments.hpp"
#include "hcent/figures.hpp"
#include "hcent/measures.hpp"
#include "hcent/oracle.hpp"
#include "hcent/spectral.hpp"

using namespace hcent;

namespace {

constexpr double kBetaC = 2.8284271247461903;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

struct Context {
  bool paper = false;
  std::size_t critical_sites() const { return paper ? kPaperSites : kDeskSites; }

  // Shared between criteria 3, 4, 6 and 10.
  const CriticalRAnalysis& critical_r() {
    if (!critical_) {
      SweepConfig c{SweepKind::critical_r, critical_r_grid(critical_preset(critical_sites()), {}), "", {}};
      critical_ = analyse_critical_r(run_critical_r_sweep(c));
    }
    return *critical_;
  }

  const NoncriticalLAnalysis& noncritical_l() {
    if (!saturation_) {
      saturation_ = analyse_noncritical_l(run_noncritical_l_sweep(io::figure_configs("fig3", io::Profile::desk)[0]));
    }
    return *saturation_;
  }

 private:
  std::optional<CriticalRAnalysis> critical_;
  std::optional<NoncriticalLAnalysis> saturation_;
};

Outcome purity(Context&) {
  double worst_nu = 0.0, worst_s = 0.0;
  for (std::size_t n : {8, 64, 256, 512}) {
    for (double a : {0.0, 0.5, 0.9, 1.0 - 1e-6}) {
      const auto k = build_kernel(ChainSpec::from_coupling(n, a));
      std::vector<std::size_t> all(n);
      std::iota(all.begin(), all.end(), 0);
      for (double v : symplectic_spectrum(extract_block(k, all)).values) worst_nu = std::max(worst_nu, std::abs(v - 0.5));
      for (std::size_t len : {std::size_t{1}, n / 4, n / 2}) {
        const std::vector<std::size_t> a_sites(all.begin(), all.begin() + len);
        const std::vector<std::size_t> rest(all.begin() + len, all.end());
        worst_s = std::max(worst_s, std::abs(block_entropy(k, a_sites) - block_entropy(k, rest)));
      }
    }
  }
  return {worst_nu <= 1e-6 && worst_s <= 1e-6,
          fmt("max |nu - 1/2| = %.2e, max |S(A) - S(A^c)| = %.2e (tol 1e-6)", worst_nu, worst_s)};
}

Outcome oracles(Context&) {
  oracle::OracleReport kernel;
  for (std::size_t n : {8, 100, 512, 1024}) {
    for (double a : {0.0, 0.5, 0.9, 1.0 - 1e-6, kCriticalCoupling}) {
      const auto spec = ChainSpec::from_coupling(n, a);
      kernel.merge(oracle::compare_kernels(build_kernel(spec), oracle::kernel_direct_sum(spec)));
    }
  }
  oracle::SelfCheckOptions opts;
  const auto s = oracle::run_self_check(opts);
  // Larger blocks for the spectrum, up to M = 256.
  oracle::OracleReport spectrum = s.spectrum;
  const auto k = build_kernel(ChainSpec::from_coupling(1024, 1.0 - 1e-6));
  for (std::size_t len : {32, 64, 128}) {
    const auto pair = BlockPair::make(1024, len, len / 2);
    const auto st = union_state(k, pair);
    const auto pt = partial_transpose(st, pair.sites_b());
    spectrum.merge(oracle::compare_spectra(symplectic_spectrum(st), oracle::spectrum_via_generalized_eig(st)));
    spectrum.merge(oracle::compare_spectra(symplectic_spectrum(pt), oracle::spectrum_via_generalized_eig(pt)));
  }
  const bool ok = kernel.max_abs_diff <= 1e-10 && spectrum.max_abs_diff <= 1e-8 && s.two_mode.max_abs_diff <= 1e-10;
  return {ok, fmt("kernel %.2e (tol 1e-10), spectrum rel %.2e (tol 1e-8), two-mode %.2e (tol 1e-10)",
                  kernel.max_abs_diff, spectrum.max_abs_diff, s.two_mode.max_abs_diff)};
}

Outcome decay_constant(Context& ctx) {
  const double beta = ctx.critical_r().decay.coefficient("decay");
  const double tol = ctx.paper ? 0.02 : 0.05;
  return {rel(beta, kBetaC) <= tol,
          fmt("beta_c = %.4f vs 2 sqrt 2 = %.4f, rel.err %.1f%% (tol %.0f%%), N=%zu L=512 r in [0.5, 2.5]", beta, kBetaC,
              100 * rel(beta, kBetaC), 100 * tol, ctx.critical_sites())};
}

Outcome short_distance(Context& ctx) {
  const double alpha = -ctx.critical_r().short_distance.coefficient("exponent");
  return {rel(alpha, 1.0 / 3.0) <= 0.10,
          fmt("residual exponent = %.4f vs -1/3, rel.err %.1f%% (tol 10%%), r < 0.25", -alpha,
              100 * rel(alpha, 1.0 / 3.0))};
}

Outcome saddle(Context& ctx) {
  BlockSizeGrid g;
  g.separations = {100};
  SweepConfig c{SweepKind::block_size_at_fixed_D, block_size_grid(critical_preset(ctx.critical_sites()), g), "", {}};
  const auto s = analyse_block_size(run_block_size_sweep(c)).at(0);
  const double target = std::sqrt(2.0) * 100.0;
  const double at = s.saddle.value_or(std::nan(""));
  const bool ok = s.saddle && rel(at, target) <= 0.10 && rel(s.final_slope, 1.0 / 3.0) <= 0.20;
  return {ok, fmt("slope crosses 2 at L = %.1f vs %.1f (rel.err %.1f%%, tol 10%%); slope at L/D0 = %.1f is %.3f vs 1/3 "
                  "(rel.err %.0f%%, tol 20%%)",
                  at, target, 100 * rel(at, target), s.final_ratio, s.final_slope, 100 * rel(s.final_slope, 1.0 / 3.0))};
}

Outcome overall_model(Context& ctx) {
  const auto& f = ctx.critical_r().overall;
  const double a = f.coefficient("a"), g = f.coefficient("gamma");
  const bool ok = rel(a, 4.0 / 3.0) <= 0.20 && rel(g, 1.5) <= 0.20 && f.residual_rms <= 0.1;
  return {ok, fmt("a = %.3f vs 4/3 (rel.err %.0f%%), gamma = %.3f vs 3/2 (rel.err %.0f%%), tol 20%%; RMS %.3f (tol 0.1) "
                  "on r in [0.1, 2.5]",
                  a, 100 * rel(a, 4.0 / 3.0), g, 100 * rel(g, 1.5), f.residual_rms)};
}

Outcome scale_invariance(Context& ctx) {
  const std::size_t n = ctx.critical_sites();
  const auto small = build_kernel(critical_preset(n));
  const auto big = build_kernel(critical_preset(2 * n));
  double worst = 0.0;
  std::string where;
  for (std::size_t len : {256, 512}) {
    for (double r : {0.25, 0.5, 1.0}) {
      const auto d = static_cast<std::size_t>(std::llround(r * len));
      const double e1 = log_negativity(small, BlockPair::make(n, len, d));
      const double e2 = log_negativity(big, BlockPair::make(2 * n, 2 * len, 2 * d));
      const double x = rel(e1, e2);
      if (x > worst) {
        worst = x;
        where = fmt("L=%zu r=%.2f", len, r);
      }
    }
  }
  return {worst <= 0.01, fmt("max rel. diff E(N,L,D) vs E(2N,2L,2D) = %.3f%% at %s (tol 1%%), L in {256, 512}",
                             100 * worst, where.c_str())};
}

Outcome saturation(Context& ctx) {
  const auto& s = ctx.noncritical_l();
  const double slope = s.onset_line.coefficient("slope"), icpt = s.onset_line.coefficient("intercept");
  const double ref = -s.reference_line.coefficient("decay"), decay = s.plateau_decay.coefficient("decay");
  const bool ok = rel(slope, 0.75) <= 0.15 && rel(icpt, 1.0) <= 0.15 && rel(ref, -2.1) <= 0.10 &&
                  rel(decay, 2.25) <= 0.10;
  return {ok, fmt("l_s = %.3f d0 + %.3f (slope rel.err %.0f%%, intercept rel.err %.0f%%, tol 15%%); E(l=d0) slope %.3f "
                  "(rel.err %.1f%%, tol 10%%); saturation decay %.3f (rel.err %.1f%%, tol 10%%)",
                  slope, icpt, 100 * rel(slope, 0.75), 100 * rel(icpt, 1.0), ref, 100 * rel(ref, -2.1), decay,
                  100 * rel(decay, 2.25))};
}

Outcome tail(Context&) {
  const auto series = analyse_noncritical_d(run_noncritical_d_sweep(io::figure_configs("fig4", io::Profile::desk)[0]));
  bool ok = series.size() == 2;
  std::string detail;
  for (const auto& s : series) {
    const bool quad_better = s.tail_quadratic.residual_rms < s.tail_linear.residual_rms;
    const bool head_negative = s.head_power && s.head_power->coefficient("exponent") < 0.0;
    ok = ok && quad_better && head_negative;
    detail += fmt("l0=%g: RMS quadratic %.3f vs linear %.3f, head exponent %.3f; ", s.l0, s.tail_quadratic.residual_rms,
                  s.tail_linear.residual_rms, s.head_power ? s.head_power->coefficient("exponent") : std::nan(""));
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome information_scaling(Context& ctx) {
  const auto& a = ctx.critical_r();
  const double p = a.mutual_information.coefficient("exponent");
  const double slope = a.negativity_to_information.coefficient("slope");
  const double rms = a.negativity_to_information.residual_rms;
  const bool ok = std::abs(p + 0.05) <= 0.03 && slope < 0.0 && rms <= 0.15;
  return {ok, fmt("I exponent %.4f (target -0.05 +- 0.03); ln(E/I) vs r slope %.3f, linear RMS %.3f (tol 0.15)", p, slope,
                  rms)};
}

Outcome determinism(Context&) {
  const auto configs = io::figure_configs("fig3", io::Profile::desk);
  auto render = [&](std::size_t threads) {
    RunOptions o;
    o.threads = threads;
    std::ostringstream ss;
    io::write_csv(ss, run_sweep(configs[0], o));
    return ss.str();
  };
  const std::string a = render(0), b = render(0), c = render(1);
  return {a == b && a == c, fmt("noncritical l-sweep CSV, %zu bytes: repeat %s, single-threaded %s", a.size(),
                                a == b ? "identical" : "DIFFERS", a == c ? "identical" : "DIFFERS")};
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--profile") && i + 1 < argc) {
      ctx.paper = !std::strcmp(argv[++i], "paper");
    } else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string t; std::getline(ss, t, ',');) only.insert(std::stoi(t));
    } else {
      std::fprintf(stderr, "usage: %s [--profile desk|paper] [--only 1,2,...]\n", argv[0]);
      return 2;
    }
  }

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome(Context&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "purity", purity},
      {2, "oracle equivalence", oracles},
      {3, "critical decay constant", decay_constant},
      {4, "short-distance power", short_distance},
      {5, "saddle point", saddle},
      {6, "overall model", overall_model},
      {7, "scale invariance", scale_invariance},
      {8, "noncritical saturation", saturation},
      {9, "noncritical tail", tail},
      {10, "mutual information", information_scaling},
      {11, "determinism", determinism},
  };

  int failed = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.contains(c.id)) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s %2d %-24s %s [%.0fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed (%s profile)\n", ran - failed, ran, ctx.paper ? "paper" : "desk");
  return failed ? 1 : 0;
}
