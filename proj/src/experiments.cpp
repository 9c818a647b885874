#include "hcent/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>

#include "hcent/errors.hpp"
#include "hcent/version.hpp"

namespace hcent {

namespace {

constexpr SweepKind kAllKinds[] = {
    SweepKind::critical_r,
    SweepKind::scale_invariance,
    SweepKind::block_size_at_fixed_D,
    SweepKind::noncritical_l_at_fixed_d,
    SweepKind::noncritical_d_at_fixed_l,
    SweepKind::transition_fixed_r,
};

// Which of (L, D) a sweep varies along each curve.
bool sweeps_block_len(SweepKind kind) {
  switch (kind) {
    case SweepKind::scale_invariance:
    case SweepKind::block_size_at_fixed_D:
    case SweepKind::noncritical_l_at_fixed_d: return true;
    default: return false;
  }
}

std::vector<double> spaced(double lo, double hi, std::size_t points, bool log) {
  std::vector<double> v;
  if (points == 0) return v;
  if (points == 1) return {lo};
  v.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    v.push_back(log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo));
  }
  return v;
}

std::size_t round_to_size(double x) { return static_cast<std::size_t>(std::llround(std::max(x, 0.0))); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

SweepResult run_checked(SweepKind expected, const SweepConfig& config, const RunOptions& options) {
  if (config.kind != expected) {
    throw ConfigError("sweep_kind", "expected " + to_string(expected) + ", got " + to_string(config.kind));
  }
  return run_sweep(config, options);
}

}  // namespace

std::string to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::critical_r: return "critical_r";
    case SweepKind::scale_invariance: return "scale_invariance";
    case SweepKind::block_size_at_fixed_D: return "block_size_at_fixed_D";
    case SweepKind::noncritical_l_at_fixed_d: return "noncritical_l_at_fixed_d";
    case SweepKind::noncritical_d_at_fixed_l: return "noncritical_d_at_fixed_l";
    case SweepKind::transition_fixed_r: return "transition_fixed_r";
  }
  return "unknown";
}

SweepKind sweep_kind_from_string(const std::string& name) {
  for (SweepKind k : kAllKinds) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("sweep_kind", "unknown sweep kind '" + name + "'");
}

bool is_critical(SweepKind kind) noexcept {
  return kind == SweepKind::critical_r || kind == SweepKind::scale_invariance ||
         kind == SweepKind::block_size_at_fixed_D;
}

void validate(const SweepConfig& config) {
  if (config.grid.empty()) throw ConfigError("grid", "sweep grid is empty");
  std::map<double, std::size_t> last;
  for (std::size_t i = 0; i < config.grid.size(); ++i) {
    const GridPoint& p = config.grid[i];
    const std::string field = "grid[" + std::to_string(i) + "]";
    try {
      (void)BlockPair::make(p.chain.n_sites(), p.block_len, p.separation);
    } catch (const DomainError& e) {
      throw ConfigError(field, std::string(e.what()) + " (L=" + std::to_string(p.block_len) +
                                   ", D=" + std::to_string(p.separation) + ", N=" +
                                   std::to_string(p.chain.n_sites()) + ")");
    }
    const std::size_t swept = sweeps_block_len(config.kind) ? p.block_len : p.separation;
    auto it = last.find(p.series);
    if (it != last.end() && swept <= it->second) {
      throw ConfigError(field, "swept parameter not strictly increasing within series " + std::to_string(p.series) +
                                   " (L=" + std::to_string(p.block_len) + ", D=" + std::to_string(p.separation) + ")");
    }
    last[p.series] = swept;
  }
}

std::vector<GridPoint> critical_r_grid(const ChainSpec& chain, const CriticalRGrid& grid) {
  if (grid.block_len == 0) throw ConfigError("grid.block_len", "must be positive");
  if (grid.log_spacing && !(grid.r_min > 0.0)) throw ConfigError("grid.r_min", "log spacing needs r_min > 0");
  std::vector<GridPoint> out;
  std::set<std::size_t> seen;
  for (double r : spaced(grid.r_min, grid.r_max, grid.points, grid.log_spacing)) {
    const std::size_t d = round_to_size(r * static_cast<double>(grid.block_len));
    if (seen.insert(d).second) out.push_back({0.0, chain, grid.block_len, d});
  }
  std::ranges::sort(out, {}, &GridPoint::separation);
  return out;
}

std::vector<GridPoint> scale_invariance_grid(const ChainSpec& chain, const ScaleInvarianceGrid& grid) {
  std::vector<GridPoint> out;
  auto lens = grid.block_lens;
  std::ranges::sort(lens);
  for (double r : grid.ratios) {
    for (std::size_t len : lens) {
      const std::size_t d = round_to_size(r * static_cast<double>(len));
      const double actual = static_cast<double>(d) / static_cast<double>(len);
      if (r <= 0.0 || std::abs(actual - r) / r > kRatioTolerance) {
        throw ConfigError("grid", "r=" + std::to_string(r) + ", L=" + std::to_string(len) + " rounds to D/L=" +
                                      std::to_string(actual) + ", more than 2% off");
      }
      out.push_back({r, chain, len, d});
    }
  }
  return out;
}

std::vector<GridPoint> block_size_grid(const ChainSpec& chain, const BlockSizeGrid& grid) {
  std::vector<GridPoint> out;
  for (std::size_t d0 : grid.separations) {
    std::set<std::size_t> lens;
    for (double len : spaced(grid.min_ratio * static_cast<double>(d0), grid.max_ratio * static_cast<double>(d0),
                             grid.points, true)) {
      lens.insert(std::max<std::size_t>(1, round_to_size(len)));
    }
    for (std::size_t len : lens) out.push_back({static_cast<double>(d0), chain, len, d0});
  }
  return out;
}

std::vector<GridPoint> noncritical_l_grid(const ChainSpec& chain, const NoncriticalLGrid& grid) {
  const double x = chain.xi();
  std::vector<GridPoint> out;
  for (double d0 : grid.d0_values) {
    const std::size_t d = round_to_size(d0 * x);
    std::set<std::size_t> lens;
    for (double l : spaced(grid.l_min, grid.l_max, grid.points, false)) {
      lens.insert(std::max<std::size_t>(1, round_to_size(l * x)));
    }
    if (d > 0) lens.insert(d);  // the l = d0 reference point
    for (std::size_t len : lens) out.push_back({d0, chain, len, d});
  }
  return out;
}

std::vector<GridPoint> noncritical_d_grid(const ChainSpec& chain, const NoncriticalDGrid& grid) {
  const double x = chain.xi();
  std::vector<GridPoint> out;
  for (double l0 : grid.l0_values) {
    const std::size_t len = std::max<std::size_t>(1, round_to_size(l0 * x));
    std::set<std::size_t> seps;
    for (double d : spaced(grid.d_min, grid.d_max_factor * l0, grid.points, true)) {
      seps.insert(std::max<std::size_t>(1, round_to_size(d * x)));
    }
    for (std::size_t sep : seps) out.push_back({l0, chain, len, sep});
  }
  return out;
}

std::vector<GridPoint> transition_grid(const ChainSpec& chain, const TransitionGrid& grid) {
  const double x = chain.xi();
  std::vector<GridPoint> out;
  for (double r : grid.ratios) {
    std::set<std::size_t> seps;
    for (double d : spaced(grid.d_min, grid.d_max, grid.points, true)) {
      const std::size_t sep = round_to_size(d * x);
      if (sep == 0) continue;
      const std::size_t len = round_to_size(static_cast<double>(sep) / r);
      if (len == 0) continue;
      const double actual = static_cast<double>(sep) / static_cast<double>(len);
      if (std::abs(actual - r) / r > kRatioTolerance) continue;
      seps.insert(sep);
    }
    for (std::size_t sep : seps) out.push_back({r, chain, round_to_size(static_cast<double>(sep) / r), sep});
  }
  return out;
}

const char* library_version() noexcept { return kVersion; }

std::size_t default_thread_count() {
  if (const char* env = std::getenv("HCENT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult run_sweep(const SweepConfig& config, const RunOptions& options) {
  validate(config);

  // One kernel per distinct chain, built up front and then shared read-only.
  std::map<std::pair<std::size_t, double>, std::shared_ptr<const CorrelationKernel>> kernels;
  std::vector<const CorrelationKernel*> kernel_of(config.grid.size());
  for (std::size_t i = 0; i < config.grid.size(); ++i) {
    const ChainSpec& c = config.grid[i].chain;
    auto& slot = kernels[{c.n_sites(), c.coupling()}];
    if (!slot) slot = std::make_shared<const CorrelationKernel>(build_kernel(c));
    kernel_of[i] = slot.get();
  }

  SweepResult result;
  result.config = config;
  result.timestamp = utc_timestamp();
  result.code_version = kVersion;

  std::vector<std::optional<SweepRow>> rows(config.grid.size());
  std::atomic<std::size_t> next{0};
  std::mutex report_mutex;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= config.grid.size()) return;
      {
        std::lock_guard lock(report_mutex);
        if (failure) return;
      }
      try {
        const GridPoint& p = config.grid[i];
        const auto start = std::chrono::steady_clock::now();
        const auto pair = BlockPair::make(p.chain.n_sites(), p.block_len, p.separation);
        MeasureRecord record = measure_pair(*kernel_of[i], pair);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        rows[i].emplace(SweepRow{p, std::move(record), secs});
        if (options.on_point) {
          std::lock_guard lock(report_mutex);
          options.on_point(i, *rows[i]);
        }
      } catch (...) {
        std::lock_guard lock(report_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const std::size_t threads =
      std::min(options.threads == 0 ? default_thread_count() : options.threads, config.grid.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  result.rows.reserve(rows.size());
  for (auto& r : rows) result.rows.push_back(std::move(*r));
  return result;
}

SweepResult run_critical_r_sweep(const SweepConfig& config, const RunOptions& options) {
  return run_checked(SweepKind::critical_r, config, options);
}
SweepResult run_scale_invariance_sweep(const SweepConfig& config, const RunOptions& options) {
  return run_checked(SweepKind::scale_invariance, config, options);
}
SweepResult run_block_size_sweep(const SweepConfig& config, const RunOptions& options) {
  return run_checked(SweepKind::block_size_at_fixed_D, config, options);
}
SweepResult run_noncritical_l_sweep(const SweepConfig& config, const RunOptions& options) {
  return run_checked(SweepKind::noncritical_l_at_fixed_d, config, options);
}
SweepResult run_noncritical_d_sweep(const SweepConfig& config, const RunOptions& options) {
  return run_checked(SweepKind::noncritical_d_at_fixed_l, config, options);
}
SweepResult run_transition_sweep(const SweepConfig& config, const RunOptions& options) {
  return run_checked(SweepKind::transition_fixed_r, config, options);
}

SweepConfig doubled(const SweepConfig& config, DoublingMode mode) {
  SweepConfig out = config;
  for (GridPoint& p : out.grid) {
    const std::size_t n = 2 * p.chain.n_sites();
    p.chain = mode == DoublingMode::keep_coupling ? ChainSpec::from_coupling(n, p.chain.coupling())
                                                  : ChainSpec::from_xi(n, 2.0 * p.chain.xi());
    p.block_len *= 2;
    p.separation *= 2;
  }
  out.notes.emplace_back("doubled", mode == DoublingMode::keep_coupling ? "keep_coupling" : "scale_xi");
  return out;
}

SweepConfig doubled(const SweepConfig& config) {
  return doubled(config, is_critical(config.kind) ? DoublingMode::keep_coupling : DoublingMode::scale_xi);
}

double quantity(const SweepRow& row, Quantity q) {
  const auto& p = row.point;
  const auto& m = row.record;
  switch (q) {
    case Quantity::r: return static_cast<double>(p.separation) / static_cast<double>(p.block_len);
    case Quantity::d: return static_cast<double>(p.separation) / p.chain.xi();
    case Quantity::l: return static_cast<double>(p.block_len) / p.chain.xi();
    case Quantity::L: return static_cast<double>(p.block_len);
    case Quantity::D: return static_cast<double>(p.separation);
    case Quantity::entropy_a: return m.entropy_a;
    case Quantity::entropy_b: return m.entropy_b;
    case Quantity::entropy_ab: return m.entropy_ab;
    case Quantity::mutual_information: return m.mutual_information;
    case Quantity::log_negativity: return m.log_negativity;
  }
  return 0.0;
}

std::vector<double> series_labels(const SweepResult& result) {
  std::vector<double> labels;
  for (const auto& row : result.rows) {
    if (std::ranges::find(labels, row.point.series) == labels.end()) labels.push_back(row.point.series);
  }
  return labels;
}

analysis::Rows series_rows(const SweepResult& result, double series, Quantity x, Quantity y) {
  analysis::Rows out;
  for (const auto& row : result.rows) {
    if (row.point.series == series) out.push_back({quantity(row, x), quantity(row, y)});
  }
  return out;
}

double flatness(const SweepResult& result, double series, Quantity y) {
  std::vector<double> values;
  for (const auto& row : result.rows) {
    if (row.point.series == series) values.push_back(std::log(quantity(row, y)));
  }
  if (values.size() < 2) throw FitError("flatness needs at least two points in the series");
  const auto upper = std::span(values).subspan((values.size() - 1) / 2);
  const auto [lo, hi] = std::ranges::minmax(upper);
  return hi - lo;
}

}  // namespace hcent
