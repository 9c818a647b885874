#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hcent::analysis {

struct Point {
  double x;
  double y;
};
using Rows = std::vector<Point>;

/// Closed interval [lo, hi]; defaults to everything.
struct Window {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

enum class Model { exp_linear, power_law, exp_quadratic, overall_model, linear };

std::string to_string(Model model);
Model model_from_string(const std::string& name);

struct FitResult {
  Model model = Model::linear;
  std::vector<std::pair<std::string, double>> coefficients;
  /// RMS of the residuals in the fitted (transformed) coordinate.
  double residual_rms = 0.0;
  Window window;
  std::size_t n_points = 0;
  /// Only meaningful for overall_model.
  bool converged = true;

  /// Throws std::out_of_range for an unknown name.
  double coefficient(const std::string& name) const;
};

/// Rows inside `window`, sorted by x, with duplicate x values averaged.
Rows select(std::span<const Point> rows, const Window& window);

/// y = slope x + intercept. Coefficients: slope, intercept.
FitResult fit_linear(std::span<const Point> rows, const Window& window = {});

/// ln y = intercept - decay x. Coefficients: decay, intercept.
FitResult fit_exponential(std::span<const Point> rows, const Window& window = {});

/// ln y = log_prefactor + exponent ln x. Coefficients: exponent, log_prefactor.
FitResult fit_power(std::span<const Point> rows, const Window& window = {});

/// ln y = intercept - beta x^2. Coefficients: beta, intercept.
FitResult fit_quadratic_exponent(std::span<const Point> rows, const Window& window = {});

struct SlopePoint {
  double x;
  double slope;
};

/// d ln y / d ln x by centered differences, one-sided at the ends.
/// Throws FitError on duplicate x or fewer than 3 points.
std::vector<SlopePoint> loglog_slope(std::span<const Point> rows);

/// First x where a piecewise-linear (in ln x) slope curve crosses `level`.
std::optional<double> first_crossing(std::span<const SlopePoint> slopes, double level);

/// ln E = ln(a r^-alpha + exp(-gamma / r)) - beta_c r.
double overall_model_log(double r, double a, double gamma, double alpha, double beta_c);

struct OverallModelOptions {
  /// Held fixed unless the matching `free_*` flag is set.
  double alpha = 1.0 / 3.0;
  double beta_c = 2.8284271247461903;
  bool free_alpha = false;
  bool free_beta = false;
  /// Starting values for the multi-start search.
  std::vector<double> a_seeds{0.1, 0.5, 4.0 / 3.0, 3.0};
  std::vector<double> gamma_seeds{0.5, 1.5, 4.0};
  std::size_t max_iterations = 200;
};

/// Levenberg-Marquardt fit of overall_model_log to ln y.
/// Coefficients: a, gamma, alpha, beta_c. `converged` is false when no start
/// met the stopping rule; the best iterate is still returned.
FitResult fit_overall_model(std::span<const Point> rows, const Window& window = {},
                            const OverallModelOptions& options = {});

struct Saturation {
  double onset;    // l_s
  double plateau;  // E_sat
};

inline constexpr double kSaturationTolerance = 0.02;

/// Plateau is the mean of the top three grid points, which must agree within
/// kSaturationTolerance. The onset is where the curve enters, and afterwards
/// stays inside, the +-2% band around the plateau; it is linearly
/// interpolated between the bracketing grid points. Throws FitError when no
/// plateau is reached.
Saturation detect_saturation(std::span<const Point> rows);

}  // namespace hcent::analysis
