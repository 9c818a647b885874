#pragma once

#include <optional>
#include <vector>

#include "hcent/analysis.hpp"
#include "hcent/experiments.hpp"

// Feature extraction on finished sweeps: the fitted constants behind each
// figure. Each analyse_* takes the matching sweep kind.

namespace hcent {

/// Negativities below this are round-off and are left out of log fits.
inline constexpr double kLogFitFloor = 1e-10;

struct CriticalRWindows {
  analysis::Window decay{0.5, 2.5};
  analysis::Window short_distance{0.0, 0.25};
  analysis::Window overall{0.1, 2.5};
};

struct CriticalRAnalysis {
  /// ln E vs r; coefficient "decay" is beta_c.
  analysis::FitResult decay;
  /// ln(E e^{beta_c r}) vs ln r for small r; "exponent" is -alpha.
  analysis::FitResult short_distance;
  /// a, gamma with alpha and beta_c fixed from the two fits above.
  analysis::FitResult overall;
  /// ln I vs ln r over the whole sweep.
  analysis::FitResult mutual_information;
  /// ln(E / I) vs r over the whole sweep (linear model).
  analysis::FitResult negativity_to_information;
  bool negativity_strictly_decreasing = false;
  /// (r, ln(E1/E0)) with E0 = exp(intercept - beta_c r).
  analysis::Rows power_correction;
};

CriticalRAnalysis analyse_critical_r(const SweepResult& result, const CriticalRWindows& windows = {});

struct ScaleSeries {
  double ratio;
  double negativity_flatness;   // max - min of ln E over the upper half of L
  double information_flatness;  // same for I
};

std::vector<ScaleSeries> analyse_scale_invariance(const SweepResult& result);

struct BlockSizeSeries {
  double separation;
  std::vector<analysis::SlopePoint> slopes;
  /// L where d ln E / d ln L first drops through 2.
  std::optional<double> saddle;
  /// Slope at the largest L in the sweep.
  double final_slope;
  double final_ratio;  // L / D0 at that point
};

std::vector<BlockSizeSeries> analyse_block_size(const SweepResult& result);

struct SaturationSeries {
  double d0;
  analysis::Saturation saturation;
  /// E_LN at L = D (l = d0), or nullopt if the grid lacks that point.
  std::optional<double> at_l_equal_d;
};

struct NoncriticalLAnalysis {
  std::vector<SaturationSeries> series;
  /// l_s vs d0 (linear model: slope, intercept).
  analysis::FitResult onset_line;
  /// ln E(l = d0) vs d0; "decay" is minus the slope.
  analysis::FitResult reference_line;
  /// ln E_sat vs d0; "decay" is the saturation-regime decay constant.
  analysis::FitResult plateau_decay;
};

/// Needs at least three d0 series for the regressions.
NoncriticalLAnalysis analyse_noncritical_l(const SweepResult& result);

struct TailSeries {
  double l0;
  analysis::FitResult tail_linear;     // ln E vs d on d > max(l0, 1)
  analysis::FitResult tail_quadratic;  // ln E vs d^2 on the same window
  std::optional<analysis::FitResult> head_power;  // ln E vs ln d on d < head_limit
};

struct NoncriticalDOptions {
  double head_limit = 0.25;
};

std::vector<TailSeries> analyse_noncritical_d(const SweepResult& result, const NoncriticalDOptions& options = {});

struct TransitionSeries {
  double ratio;
  /// max - min of ln E over points with l <= critical_l_max; NaN with fewer than two.
  double critical_flatness;
};

struct TransitionAnalysis {
  std::vector<TransitionSeries> series;
  /// Largest pairwise |ln E_a - ln E_b| among r < 1 curves on the window,
  /// curves compared by linear interpolation in d.
  double coincidence_below_one;
  /// Same statistic among r > 1 curves.
  double spread_above_one;
  analysis::Window window;
};

struct TransitionOptions {
  double critical_l_max = 0.25;
  analysis::Window saturation_window{2.0, 4.0};
};

TransitionAnalysis analyse_transition(const SweepResult& result, const TransitionOptions& options = {});

}  // namespace hcent
