#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hcent/analysis.hpp"
#include "hcent/cli_io.hpp"
#include "hcent/errors.hpp"
#include "hcent/experiments.hpp"
#include "hcent/measures.hpp"
#include "hcent/oracle.hpp"

using namespace hcent;
using io::json;

namespace {

struct ChainArgs {
  std::size_t n_sites = kDeskSites;
  std::optional<double> coupling;
  std::optional<double> xi;

  void add(CLI::App* app) {
    app->add_option("--n-sites", n_sites, "Ring size N")->capture_default_str();
    auto* c = app->add_option("--coupling", coupling, "Coupling alpha in [0, 1)");
    auto* x = app->add_option("--xi", xi, "Correlation length xi >= 1/sqrt(2)");
    c->excludes(x);
  }

  ChainSpec spec() const {
    if (xi) return ChainSpec::from_xi(n_sites, *xi);
    return ChainSpec::from_coupling(n_sites, coupling.value_or(kCriticalCoupling));
  }
};

std::string join_args(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    out += argv[i];
  }
  return out;
}

int cmd_measure(const ChainArgs& chain, std::size_t len, std::size_t sep, std::size_t offset, const std::string& format) {
  const auto spec = chain.spec();
  const auto pair = BlockPair::make(spec.n_sites(), len, sep, offset);
  const auto kernel = build_kernel(spec);
  const auto rec = measure_pair(kernel, pair);
  if (format == "csv") {
    std::cout << io::to_csv(rec);
  } else {
    std::cout << io::to_json(rec).dump(2) << '\n';
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir, bool force, const std::string& command_line) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError("", "cannot read config file " + config_path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  const SweepConfig config = io::parse_sweep_config(doc);

  std::filesystem::path prefix = config.output_path.empty()
                                     ? std::filesystem::path(config_path).stem()
                                     : std::filesystem::path(config.output_path);
  if (!out_dir.empty()) prefix = std::filesystem::path(out_dir) / prefix;
  if (!force) {
    for (const char* ext : {".csv", ".manifest.json"}) {
      auto p = prefix;
      p += ext;
      if (std::filesystem::exists(p)) throw ConfigError("output", p.string() + " exists (use --force to overwrite)");
    }
  }

  RunOptions options;
  std::mutex log_mutex;
  const std::size_t total = config.grid.size();
  std::size_t done = 0;
  options.on_point = [&](std::size_t index, const SweepRow& row) {
    std::lock_guard lock(log_mutex);
    ++done;
    std::fprintf(stderr, "[%zu/%zu] #%zu N=%zu L=%zu D=%zu E_LN=%.6g bits I=%.6g nats (%.2fs)\n", done, total, index,
                 row.point.chain.n_sites(), row.point.block_len, row.point.separation, row.record.log_negativity,
                 row.record.mutual_information, row.seconds);
  };
  const SweepResult result = run_sweep(config, options);
  const auto [csv, man] =
      io::write_sweep_outputs(prefix, result, io::manifest(result, command_line, io::config_hash(doc), doc), force);
  std::cerr << "wrote " << csv.string() << " and " << man.string() << '\n';
  return 0;
}

struct FitArgs {
  std::string csv_path;
  std::string model = "exp_linear";
  std::string x = "r";
  std::string y = "E_LN_bits";
  std::optional<double> lo;
  std::optional<double> hi;
  std::optional<double> series;
  std::optional<std::string> detrend_beta;
  double detrend_lo = 0.5;
  double detrend_hi = 2.5;
  double alpha = 1.0 / 3.0;
  double beta_c = 2.8284271247461903;
  std::string out;
};

int cmd_fit(const FitArgs& a) {
  std::ifstream in(a.csv_path);
  if (!in) throw ConfigError("", "cannot read " + a.csv_path);
  const io::CsvTable table = io::read_csv_table(in);
  const std::size_t cx = table.column(a.x);
  const std::size_t cy = table.column(a.y);
  std::optional<std::size_t> cs;
  if (a.series) cs = table.column("series");

  analysis::Rows rows;
  for (const auto& r : table.rows) {
    if (cs && r[*cs] != *a.series) continue;
    rows.push_back({r[cx], r[cy]});
  }

  json detrend = nullptr;
  if (a.detrend_beta) {
    double beta = 0.0;
    if (*a.detrend_beta == "auto") {
      analysis::Rows positive;
      for (const auto& p : rows) {
        if (p.y > 0.0) positive.push_back(p);
      }
      beta = analysis::fit_exponential(positive, {a.detrend_lo, a.detrend_hi}).coefficient("decay");
    } else {
      try {
        std::size_t used = 0;
        beta = std::stod(*a.detrend_beta, &used);
        if (used != a.detrend_beta->size()) throw std::invalid_argument("");
      } catch (const std::logic_error&) {
        throw ConfigError("--detrend-beta", "expected a number or 'auto'");
      }
    }
    for (auto& p : rows) p.y *= std::exp(beta * p.x);
    detrend = beta;
  }

  const analysis::Window window{a.lo.value_or(-std::numeric_limits<double>::infinity()),
                                a.hi.value_or(std::numeric_limits<double>::infinity())};
  analysis::FitResult fit;
  switch (analysis::model_from_string(a.model)) {
    case analysis::Model::linear: fit = analysis::fit_linear(rows, window); break;
    case analysis::Model::exp_linear: fit = analysis::fit_exponential(rows, window); break;
    case analysis::Model::power_law: fit = analysis::fit_power(rows, window); break;
    case analysis::Model::exp_quadratic: fit = analysis::fit_quadratic_exponent(rows, window); break;
    case analysis::Model::overall_model: {
      analysis::OverallModelOptions opts;
      opts.alpha = a.alpha;
      opts.beta_c = a.beta_c;
      fit = analysis::fit_overall_model(rows, window, opts);
      break;
    }
  }

  json report = io::to_json(fit);
  report["source"] = a.csv_path;
  report["x"] = a.x;
  report["y"] = a.y;
  report["series"] = a.series ? json(*a.series) : json(nullptr);
  report["detrend_beta"] = detrend;
  const std::string text = report.dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw ConfigError("--out", "failed writing " + a.out);
  }
  return 0;
}

int cmd_reproduce(const std::string& id, const std::string& profile, const std::string& out_dir, bool force) {
  const auto p = profile == "paper" ? io::Profile::paper : io::Profile::desk;
  RunOptions options;
  std::mutex log_mutex;
  options.on_point = [&](std::size_t index, const SweepRow& row) {
    std::lock_guard lock(log_mutex);
    std::fprintf(stderr, "#%zu N=%zu L=%zu D=%zu E_LN=%.6g (%.2fs)\n", index, row.point.chain.n_sites(),
                 row.point.block_len, row.point.separation, row.record.log_negativity, row.seconds);
  };
  const auto report = io::reproduce_figure(id, p, options);
  io::write_figure_outputs(out_dir, report, force);
  io::print_summary(std::cout, report);
  return 0;
}

int cmd_kernel(const ChainArgs& chain, const std::string& which, const std::string& out) {
  const auto kernel = build_kernel(chain.spec());
  const auto c = which == "h" ? Correlator::momentum : Correlator::position;
  if (out.empty()) {
    io::write_kernel(std::cout, kernel, c);
  } else {
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    io::write_kernel(f, kernel, c);
    if (!f) throw ConfigError("--out", "failed writing " + out);
  }
  return 0;
}

int cmd_self_check() {
  const auto s = oracle::run_self_check();
  std::printf("self-check over %zu instances\n", s.instances);
  std::printf("  kernel    max |diff| = %.3e  (tol %.0e)\n", s.kernel.max_abs_diff, oracle::kKernelTolerance);
  std::printf("  spectrum  max rel    = %.3e  (tol %.0e)\n", s.spectrum.max_abs_diff, oracle::kSpectrumTolerance);
  std::printf("  two-mode  max |diff| = %.3e  (tol %.0e)\n", s.two_mode.max_abs_diff, oracle::kTwoModeTolerance);
  std::printf("%s\n", s.passed ? "PASS" : "FAIL");
  return s.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block entanglement in the harmonic chain vacuum"};
  app.set_version_flag("--version", library_version());
  bool self_check = false;
  app.add_flag("--self-check", self_check, "Compare against brute-force references on small chains");

  ChainArgs measure_chain;
  std::size_t len = 0, sep = 0, offset = 0;
  std::string format = "json";
  auto* measure = app.add_subcommand("measure", "Entropies, mutual information and negativity for one block pair");
  measure_chain.add(measure);
  measure->add_option("--block-len", len, "Block length L")->required();
  measure->add_option("--separation", sep, "Gap D between the blocks")->required();
  measure->add_option("--offset", offset, "First site of block A")->capture_default_str();
  measure->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  std::string config_path, out_dir;
  bool force = false;
  auto* sweep = app.add_subcommand("sweep", "Run a sweep config, write CSV and manifest");
  sweep->add_option("config", config_path, "Sweep config (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out-dir", out_dir, "Directory for the outputs");
  sweep->add_flag("--force", force, "Overwrite existing outputs");

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Fit a model to two columns of a sweep CSV");
  fit->add_option("csv", fit_args.csv_path)->required()->check(CLI::ExistingFile);
  fit->add_option("--model", fit_args.model, "exp_linear | power_law | exp_quadratic | overall_model | linear")
      ->capture_default_str();
  fit->add_option("--x", fit_args.x)->capture_default_str();
  fit->add_option("--y", fit_args.y)->capture_default_str();
  fit->add_option("--lo", fit_args.lo, "Window lower bound on x");
  fit->add_option("--hi", fit_args.hi, "Window upper bound on x");
  fit->add_option("--series", fit_args.series, "Restrict to one series label");
  fit->add_option("--detrend-beta", fit_args.detrend_beta,
                  "Multiply y by exp(beta x) first; 'auto' fits beta on the detrend window");
  fit->add_option("--detrend-lo", fit_args.detrend_lo)->capture_default_str();
  fit->add_option("--detrend-hi", fit_args.detrend_hi)->capture_default_str();
  fit->add_option("--alpha", fit_args.alpha, "Fixed alpha for overall_model")->capture_default_str();
  fit->add_option("--beta-c", fit_args.beta_c, "Fixed beta_c for overall_model")->capture_default_str();
  fit->add_option("--out", fit_args.out, "Write the report here instead of stdout");

  std::string fig_id, profile = "desk", fig_dir = "figures";
  bool fig_force = false;
  auto* reproduce = app.add_subcommand("reproduce", "Run a canned figure sweep and its fits");
  reproduce->add_option("figure", fig_id)->required()->check(CLI::IsMember(io::figure_ids()));
  reproduce->add_option("--profile", profile)->check(CLI::IsMember({"desk", "paper"}))->capture_default_str();
  reproduce->add_option("--out-dir", fig_dir)->capture_default_str();
  reproduce->add_flag("--force", fig_force);

  ChainArgs kernel_chain;
  std::string which = "g", kernel_out;
  auto* kernel = app.add_subcommand("kernel", "Export the correlator g(x) or h(x) for every lag");
  kernel_chain.add(kernel);
  kernel->add_option("--which", which)->check(CLI::IsMember({"g", "h"}))->capture_default_str();
  kernel->add_option("--out", kernel_out);

  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (self_check) return cmd_self_check();
    if (*measure) return cmd_measure(measure_chain, len, sep, offset, format);
    if (*sweep) return cmd_sweep(config_path, out_dir, force, join_args(argc, argv));
    if (*fit) return cmd_fit(fit_args);
    if (*reproduce) return cmd_reproduce(fig_id, profile, fig_dir, fig_force);
    if (*kernel) return cmd_kernel(kernel_chain, which, kernel_out);
    std::cerr << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hcent: " << e.what() << '\n';
  }
  return 1;
}
