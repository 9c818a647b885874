#include "hcent/figures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "hcent/errors.hpp"

namespace hcent {

namespace {

void require_kind(const SweepResult& result, SweepKind kind) {
  if (result.config.kind != kind) {
    throw ConfigError("sweep_kind", "analysis expects " + to_string(kind) + ", got " + to_string(result.config.kind));
  }
}

analysis::Rows above_floor(analysis::Rows rows) {
  std::erase_if(rows, [](const analysis::Point& p) { return !(p.y > kLogFitFloor); });
  return rows;
}

double interpolate(const analysis::Rows& sorted, double x) {
  auto it = std::ranges::lower_bound(sorted, x, {}, &analysis::Point::x);
  if (it == sorted.begin()) return sorted.front().y;
  if (it == sorted.end()) return sorted.back().y;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double t = (x - lo.x) / (hi.x - lo.x);
  return lo.y + t * (hi.y - lo.y);
}

// Largest pairwise difference of ln E between curves sampled on their union
// of d values inside the window.
double pairwise_spread(const std::vector<analysis::Rows>& curves, const analysis::Window& window) {
  if (curves.size() < 2) return 0.0;
  std::vector<double> xs;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& c : curves) {
    lo = std::max(lo, c.front().x);
    hi = std::min(hi, c.back().x);
    for (const auto& p : c) xs.push_back(p.x);
  }
  double spread = 0.0;
  for (double x : xs) {
    if (!window.contains(x) || x < lo || x > hi) continue;
    double mn = std::numeric_limits<double>::infinity();
    double mx = -mn;
    for (const auto& c : curves) {
      const double v = interpolate(c, x);
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    spread = std::max(spread, mx - mn);
  }
  return spread;
}

}  // namespace

CriticalRAnalysis analyse_critical_r(const SweepResult& result, const CriticalRWindows& windows) {
  require_kind(result, SweepKind::critical_r);
  CriticalRAnalysis out;
  const auto labels = series_labels(result);
  const double series = labels.front();
  const auto neg = above_floor(series_rows(result, series, Quantity::r, Quantity::log_negativity));
  const auto info = series_rows(result, series, Quantity::r, Quantity::mutual_information);

  out.decay = analysis::fit_exponential(neg, windows.decay);
  const double beta = out.decay.coefficient("decay");
  const double intercept = out.decay.coefficient("intercept");

  analysis::Rows residual;
  for (const auto& p : neg) {
    if (p.x > 0.0) residual.push_back({p.x, p.y * std::exp(beta * p.x)});
    if (p.x > 0.0) out.power_correction.push_back({p.x, std::log(p.y) - (intercept - beta * p.x)});
  }
  analysis::Window short_window = windows.short_distance;
  short_window.lo = std::max(short_window.lo, std::numeric_limits<double>::min());
  out.short_distance = analysis::fit_power(residual, short_window);

  analysis::OverallModelOptions opts;
  opts.alpha = -out.short_distance.coefficient("exponent");
  opts.beta_c = beta;
  out.overall = analysis::fit_overall_model(neg, windows.overall, opts);

  analysis::Rows positive_info;
  for (const auto& p : info) {
    if (p.x > 0.0) positive_info.push_back(p);
  }
  out.mutual_information = analysis::fit_power(positive_info);

  const auto info_sorted = analysis::select(info, {});
  analysis::Rows ratio;
  for (const auto& p : neg) {
    const double i = interpolate(info_sorted, p.x);
    ratio.push_back({p.x, std::log(p.y / i)});
  }
  out.negativity_to_information = analysis::fit_linear(ratio);

  const auto all = analysis::select(series_rows(result, series, Quantity::r, Quantity::log_negativity), {});
  out.negativity_strictly_decreasing = true;
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (!(all[i].y < all[i - 1].y)) out.negativity_strictly_decreasing = false;
  }
  return out;
}

std::vector<ScaleSeries> analyse_scale_invariance(const SweepResult& result) {
  require_kind(result, SweepKind::scale_invariance);
  std::vector<ScaleSeries> out;
  for (double r : series_labels(result)) {
    out.push_back({r, flatness(result, r, Quantity::log_negativity), flatness(result, r, Quantity::mutual_information)});
  }
  return out;
}

std::vector<BlockSizeSeries> analyse_block_size(const SweepResult& result) {
  require_kind(result, SweepKind::block_size_at_fixed_D);
  std::vector<BlockSizeSeries> out;
  for (double d0 : series_labels(result)) {
    const auto rows = above_floor(series_rows(result, d0, Quantity::L, Quantity::log_negativity));
    BlockSizeSeries s{d0, analysis::loglog_slope(rows), std::nullopt, 0.0, 0.0};
    s.saddle = analysis::first_crossing(s.slopes, 2.0);
    s.final_slope = s.slopes.back().slope;
    s.final_ratio = s.slopes.back().x / d0;
    out.push_back(std::move(s));
  }
  return out;
}

NoncriticalLAnalysis analyse_noncritical_l(const SweepResult& result) {
  require_kind(result, SweepKind::noncritical_l_at_fixed_d);
  NoncriticalLAnalysis out;
  analysis::Rows onsets;
  analysis::Rows reference;
  analysis::Rows plateaus;
  for (double d0 : series_labels(result)) {
    const auto rows = series_rows(result, d0, Quantity::l, Quantity::log_negativity);
    SaturationSeries s{d0, analysis::detect_saturation(rows), std::nullopt};
    for (const auto& row : result.rows) {
      if (row.point.series == d0 && row.point.block_len == row.point.separation) s.at_l_equal_d = row.record.log_negativity;
    }
    onsets.push_back({d0, s.saturation.onset});
    plateaus.push_back({d0, s.saturation.plateau});
    if (s.at_l_equal_d) reference.push_back({d0, *s.at_l_equal_d});
    out.series.push_back(s);
  }
  out.onset_line = analysis::fit_linear(onsets);
  out.reference_line = analysis::fit_exponential(reference);
  out.plateau_decay = analysis::fit_exponential(plateaus);
  return out;
}

std::vector<TailSeries> analyse_noncritical_d(const SweepResult& result, const NoncriticalDOptions& options) {
  require_kind(result, SweepKind::noncritical_d_at_fixed_l);
  std::vector<TailSeries> out;
  for (double l0 : series_labels(result)) {
    const auto rows = above_floor(series_rows(result, l0, Quantity::d, Quantity::log_negativity));
    analysis::Window tail{std::nextafter(std::max(l0, 1.0), std::numeric_limits<double>::infinity()),
                          std::numeric_limits<double>::infinity()};
    TailSeries s{l0, analysis::fit_exponential(rows, tail), analysis::fit_quadratic_exponent(rows, tail), std::nullopt};
    try {
      s.head_power = analysis::fit_power(rows, {std::numeric_limits<double>::min(), options.head_limit});
    } catch (const FitError&) {
      // Too few head points on this grid.
    }
    out.push_back(std::move(s));
  }
  return out;
}

TransitionAnalysis analyse_transition(const SweepResult& result, const TransitionOptions& options) {
  require_kind(result, SweepKind::transition_fixed_r);
  TransitionAnalysis out;
  out.window = options.saturation_window;
  std::vector<analysis::Rows> below;
  std::vector<analysis::Rows> above;
  for (double r : series_labels(result)) {
    analysis::Rows curve;
    double mn = std::numeric_limits<double>::infinity();
    double mx = -mn;
    std::size_t n_critical = 0;
    for (const auto& row : result.rows) {
      if (row.point.series != r || !(row.record.log_negativity > kLogFitFloor)) continue;
      const double ln_e = std::log(row.record.log_negativity);
      curve.push_back({quantity(row, Quantity::d), ln_e});
      if (quantity(row, Quantity::l) <= options.critical_l_max) {
        mn = std::min(mn, ln_e);
        mx = std::max(mx, ln_e);
        ++n_critical;
      }
    }
    out.series.push_back({r, n_critical >= 2 ? mx - mn : std::numeric_limits<double>::quiet_NaN()});
    if (curve.empty()) continue;
    curve = analysis::select(curve, {});
    (r < 1.0 ? below : above).push_back(std::move(curve));
  }
  out.coincidence_below_one = pairwise_spread(below, options.saturation_window);
  out.spread_above_one = pairwise_spread(above, options.saturation_window);
  return out;
}

}  // namespace hcent
