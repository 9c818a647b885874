#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hcent/analysis.hpp"
#include "hcent/chain_model.hpp"
#include "hcent/measures.hpp"

namespace hcent {

enum class SweepKind {
  critical_r,
  scale_invariance,
  block_size_at_fixed_D,
  noncritical_l_at_fixed_d,
  noncritical_d_at_fixed_l,
  transition_fixed_r,
};

std::string to_string(SweepKind kind);
SweepKind sweep_kind_from_string(const std::string& name);
bool is_critical(SweepKind kind) noexcept;

/// One evaluation: `series` labels the curve (the parameter held fixed:
/// r, D0, d0, l0 ...) and the chain may differ between points.
struct GridPoint {
  double series;
  ChainSpec chain;
  std::size_t block_len;
  std::size_t separation;
};

struct SweepConfig {
  SweepKind kind = SweepKind::critical_r;
  std::vector<GridPoint> grid;
  std::string output_path;
  /// Free-form generator description echoed into result metadata.
  std::vector<std::pair<std::string, std::string>> notes;
};

/// Checks every point fits on its ring (2L + D <= N, L >= 1) and that within
/// each series the swept parameter is strictly increasing. Throws
/// ConfigError naming the offending grid index.
void validate(const SweepConfig& config);

// Grid generators. Generated points that collapse onto an earlier one after
// integer rounding are dropped.

struct CriticalRGrid {
  std::size_t block_len = 512;
  double r_min = 0.05;
  double r_max = 3.0;
  std::size_t points = 40;
  bool log_spacing = true;
};
std::vector<GridPoint> critical_r_grid(const ChainSpec& chain, const CriticalRGrid& grid);

/// Largest relative |D/L - r| / r accepted when rounding D = r L.
inline constexpr double kRatioTolerance = 0.02;

struct ScaleInvarianceGrid {
  std::vector<double> ratios{0.25, 0.5, 1.0};
  std::vector<std::size_t> block_lens{128, 256, 512, 1024};
};
/// Throws ConfigError when rounding moves D/L more than kRatioTolerance off r.
std::vector<GridPoint> scale_invariance_grid(const ChainSpec& chain, const ScaleInvarianceGrid& grid);

struct BlockSizeGrid {
  std::vector<std::size_t> separations{100};
  /// L range as multiples of each separation.
  double min_ratio = 0.2;
  double max_ratio = 20.0;
  std::size_t points = 24;
};
std::vector<GridPoint> block_size_grid(const ChainSpec& chain, const BlockSizeGrid& grid);

struct NoncriticalLGrid {
  std::vector<double> d0_values{1.0, 2.0, 4.0};
  double l_min = 0.125;
  double l_max = 12.0;
  std::size_t points = 48;
};
std::vector<GridPoint> noncritical_l_grid(const ChainSpec& chain, const NoncriticalLGrid& grid);

struct NoncriticalDGrid {
  std::vector<double> l0_values{2.0, 4.0};
  double d_min = 1.0 / 16.0;
  /// Upper end as a multiple of l0.
  double d_max_factor = 3.0;
  std::size_t points = 48;
};
std::vector<GridPoint> noncritical_d_grid(const ChainSpec& chain, const NoncriticalDGrid& grid);

struct TransitionGrid {
  std::vector<double> ratios{0.25, 0.5, 2.0, 4.0};
  double d_min = 1.0 / 16.0;
  double d_max = 4.0;
  std::size_t points = 24;
};
/// D log-spaced over [d_min, d_max] xi, L = round(D / r); points whose
/// rounded ratio is off by more than kRatioTolerance are skipped.
std::vector<GridPoint> transition_grid(const ChainSpec& chain, const TransitionGrid& grid);

struct SweepRow {
  GridPoint point;
  MeasureRecord record;
  double seconds = 0.0;
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRow> rows;  // grid order
  std::string timestamp;       // ISO-8601 UTC
  std::string code_version;
};

struct RunOptions {
  /// 0 = HCENT_THREADS from the environment, falling back to hardware concurrency.
  std::size_t threads = 0;
  /// Called after each point finishes (from worker threads, serialized).
  std::function<void(std::size_t index, const SweepRow&)> on_point;
};

std::size_t default_thread_count();

/// Library version string recorded in every SweepResult.
const char* library_version() noexcept;

/// Evaluates every grid point; one kernel per distinct chain, shared read-only.
SweepResult run_sweep(const SweepConfig& config, const RunOptions& options = {});

// Kind-checked entry points; each throws ConfigError if config.kind differs.
SweepResult run_critical_r_sweep(const SweepConfig& config, const RunOptions& options = {});
SweepResult run_scale_invariance_sweep(const SweepConfig& config, const RunOptions& options = {});
SweepResult run_block_size_sweep(const SweepConfig& config, const RunOptions& options = {});
SweepResult run_noncritical_l_sweep(const SweepConfig& config, const RunOptions& options = {});
SweepResult run_noncritical_d_sweep(const SweepConfig& config, const RunOptions& options = {});
SweepResult run_transition_sweep(const SweepConfig& config, const RunOptions& options = {});

enum class DoublingMode {
  /// Keep the coupling (critical chains, xi >> N).
  keep_coupling,
  /// Double xi as well, so d = D/xi and l = L/xi are unchanged.
  scale_xi,
};

/// Same sweep at twice the resolution: N, L, D doubled.
SweepConfig doubled(const SweepConfig& config, DoublingMode mode);
/// keep_coupling for critical kinds, scale_xi otherwise.
SweepConfig doubled(const SweepConfig& config);

// Result access.

enum class Quantity { r, d, l, L, D, entropy_a, entropy_b, entropy_ab, mutual_information, log_negativity };

double quantity(const SweepRow& row, Quantity q);

/// Distinct series labels in first-appearance order.
std::vector<double> series_labels(const SweepResult& result);

/// (x, y) rows of one series.
analysis::Rows series_rows(const SweepResult& result, double series, Quantity x, Quantity y);

/// max - min of ln y over the upper half of the series (by grid order).
double flatness(const SweepResult& result, double series, Quantity y);

}  // namespace hcent
