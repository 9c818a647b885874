#include "hcent/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "hcent/errors.hpp"

namespace hcent::analysis {

namespace {

constexpr std::size_t kMinPoints = 3;

struct LineFit {
  double slope;
  double intercept;
  double rms;
};

LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("all abscissae coincide; slope undefined");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double res = y[i] - (slope * x[i] + intercept);
    ss += res * res;
  }
  return {slope, intercept, std::sqrt(ss / n)};
}

Rows checked_selection(std::span<const Point> rows, const Window& window, bool positive_x, bool positive_y) {
  Rows sel = select(rows, window);
  if (sel.size() < kMinPoints) {
    throw FitError("fit window [" + std::to_string(window.lo) + ", " + std::to_string(window.hi) + "] holds " +
                   std::to_string(sel.size()) + " points, need at least 3");
  }
  for (const auto& p : sel) {
    if (positive_x && !(p.x > 0.0)) throw FitError("nonpositive abscissa " + std::to_string(p.x));
    if (positive_y && !(p.y > 0.0)) throw FitError("nonpositive value " + std::to_string(p.y) + " in a log fit");
  }
  return sel;
}

template <class FX, class FY>
LineFit transformed_fit(const Rows& sel, FX fx, FY fy) {
  std::vector<double> x(sel.size());
  std::vector<double> y(sel.size());
  for (std::size_t i = 0; i < sel.size(); ++i) {
    x[i] = fx(sel[i].x);
    y[i] = fy(sel[i].y);
  }
  return least_squares_line(x, y);
}

FitResult make_result(Model model, std::vector<std::pair<std::string, double>> coefficients, double rms,
                      const Rows& sel, const Window& window) {
  FitResult f;
  f.model = model;
  f.coefficients = std::move(coefficients);
  f.residual_rms = rms;
  f.window = window;
  f.n_points = sel.size();
  return f;
}

}  // namespace

std::string to_string(Model model) {
  switch (model) {
    case Model::exp_linear: return "exp_linear";
    case Model::power_law: return "power_law";
    case Model::exp_quadratic: return "exp_quadratic";
    case Model::overall_model: return "overall_model";
    case Model::linear: return "linear";
  }
  return "unknown";
}

Model model_from_string(const std::string& name) {
  for (Model m : {Model::exp_linear, Model::power_law, Model::exp_quadratic, Model::overall_model, Model::linear}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("model", "unknown fit model '" + name + "'");
}

double FitResult::coefficient(const std::string& name) const {
  for (const auto& [k, v] : coefficients) {
    if (k == name) return v;
  }
  throw std::out_of_range("fit has no coefficient '" + name + "'");
}

Rows select(std::span<const Point> rows, const Window& window) {
  Rows in;
  for (const auto& p : rows) {
    if (window.contains(p.x)) in.push_back(p);
  }
  std::ranges::stable_sort(in, {}, &Point::x);
  Rows out;
  for (std::size_t i = 0; i < in.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < in.size() && in[j].x == in[i].x) sum += in[j++].y;
    out.push_back({in[i].x, sum / static_cast<double>(j - i)});
    i = j;
  }
  return out;
}

FitResult fit_linear(std::span<const Point> rows, const Window& window) {
  const Rows sel = checked_selection(rows, window, false, false);
  const auto fit = transformed_fit(sel, [](double x) { return x; }, [](double y) { return y; });
  return make_result(Model::linear, {{"slope", fit.slope}, {"intercept", fit.intercept}}, fit.rms, sel, window);
}

FitResult fit_exponential(std::span<const Point> rows, const Window& window) {
  const Rows sel = checked_selection(rows, window, false, true);
  const auto fit = transformed_fit(sel, [](double x) { return x; }, [](double y) { return std::log(y); });
  return make_result(Model::exp_linear, {{"decay", -fit.slope}, {"intercept", fit.intercept}}, fit.rms, sel,
                     window);
}

FitResult fit_power(std::span<const Point> rows, const Window& window) {
  const Rows sel = checked_selection(rows, window, true, true);
  const auto fit =
      transformed_fit(sel, [](double x) { return std::log(x); }, [](double y) { return std::log(y); });
  return make_result(Model::power_law, {{"exponent", fit.slope}, {"log_prefactor", fit.intercept}}, fit.rms, sel,
                     window);
}

FitResult fit_quadratic_exponent(std::span<const Point> rows, const Window& window) {
  const Rows sel = checked_selection(rows, window, false, true);
  const auto fit = transformed_fit(sel, [](double x) { return x * x; }, [](double y) { return std::log(y); });
  return make_result(Model::exp_quadratic, {{"beta", -fit.slope}, {"intercept", fit.intercept}}, fit.rms, sel,
                     window);
}

std::vector<SlopePoint> loglog_slope(std::span<const Point> rows) {
  if (rows.size() < kMinPoints) throw FitError("log-log slope needs at least 3 points");
  Rows sorted(rows.begin(), rows.end());
  std::ranges::stable_sort(sorted, {}, &Point::x);
  std::vector<double> lx(sorted.size());
  std::vector<double> ly(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!(sorted[i].x > 0.0) || !(sorted[i].y > 0.0)) throw FitError("log-log slope needs positive data");
    if (i > 0 && sorted[i].x == sorted[i - 1].x) {
      throw FitError("duplicate abscissa " + std::to_string(sorted[i].x) + " in log-log slope");
    }
    lx[i] = std::log(sorted[i].x);
    ly[i] = std::log(sorted[i].y);
  }
  const std::size_t n = sorted.size();
  std::vector<SlopePoint> out(n);
  out[0] = {sorted[0].x, (ly[1] - ly[0]) / (lx[1] - lx[0])};
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] = {sorted[i].x, (ly[i + 1] - ly[i - 1]) / (lx[i + 1] - lx[i - 1])};
  }
  out[n - 1] = {sorted[n - 1].x, (ly[n - 1] - ly[n - 2]) / (lx[n - 1] - lx[n - 2])};
  return out;
}

std::optional<double> first_crossing(std::span<const SlopePoint> slopes, double level) {
  for (std::size_t i = 0; i + 1 < slopes.size(); ++i) {
    const double a = slopes[i].slope - level;
    const double b = slopes[i + 1].slope - level;
    if (a == 0.0) return slopes[i].x;
    if ((a < 0.0) != (b < 0.0)) {
      const double t = a / (a - b);
      const double la = std::log(slopes[i].x);
      const double lb = std::log(slopes[i + 1].x);
      return std::exp(la + t * (lb - la));
    }
  }
  if (!slopes.empty() && slopes.back().slope == level) return slopes.back().x;
  return std::nullopt;
}

double overall_model_log(double r, double a, double gamma, double alpha, double beta_c) {
  return std::log(a * std::pow(r, -alpha) + std::exp(-gamma / r)) - beta_c * r;
}

FitResult fit_overall_model(std::span<const Point> rows, const Window& window, const OverallModelOptions& options) {
  const Rows sel = checked_selection(rows, window, true, true);
  const auto n = static_cast<Eigen::Index>(sel.size());
  Eigen::VectorXd x(n);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i) = sel[static_cast<std::size_t>(i)].x;
    target(i) = std::log(sel[static_cast<std::size_t>(i)].y);
  }

  // Parameter vector: a, gamma, then alpha and beta_c when free.
  const Eigen::Index n_params = 2 + (options.free_alpha ? 1 : 0) + (options.free_beta ? 1 : 0);
  auto unpack = [&](const Eigen::VectorXd& p) {
    Eigen::Index k = 2;
    const double alpha = options.free_alpha ? p(k++) : options.alpha;
    const double beta = options.free_beta ? p(k++) : options.beta_c;
    return std::array<double, 4>{p(0), p(1), alpha, beta};
  };
  auto residuals = [&](const Eigen::VectorXd& p) {
    const auto [a, gamma, alpha, beta] = unpack(p);
    Eigen::VectorXd res(n);
    for (Eigen::Index i = 0; i < n; ++i) res(i) = overall_model_log(x(i), a, gamma, alpha, beta) - target(i);
    return res;
  };
  auto jacobian = [&](const Eigen::VectorXd& p) {
    const auto [a, gamma, alpha, beta] = unpack(p);
    Eigen::MatrixXd jac(n, n_params);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ri = x(i);
      const double power = std::pow(ri, -alpha);
      const double u = a * power;
      const double v = std::exp(-gamma / ri);
      const double s = u + v;
      Eigen::Index k = 0;
      jac(i, k++) = power / s;
      jac(i, k++) = -(v / ri) / s;
      if (options.free_alpha) jac(i, k++) = -u * std::log(ri) / s;
      if (options.free_beta) jac(i, k++) = -ri;
    }
    return jac;
  };
  auto admissible = [&](const Eigen::VectorXd& p) {
    if (!(p(0) > 0.0) || !(p(1) > 0.0)) return false;
    return p.allFinite();
  };

  Eigen::VectorXd best;
  double best_cost = std::numeric_limits<double>::infinity();
  bool best_converged = false;

  for (double a0 : options.a_seeds) {
    for (double g0 : options.gamma_seeds) {
      Eigen::VectorXd p(n_params);
      p(0) = a0;
      p(1) = g0;
      Eigen::Index k = 2;
      if (options.free_alpha) p(k++) = options.alpha;
      if (options.free_beta) p(k++) = options.beta_c;

      Eigen::VectorXd res = residuals(p);
      double cost = res.squaredNorm();
      double lambda = 1e-3;
      bool converged = false;
      for (std::size_t it = 0; it < options.max_iterations && !converged; ++it) {
        const Eigen::MatrixXd jac = jacobian(p);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * res;
        bool stepped = false;
        while (lambda < 1e12) {
          Eigen::MatrixXd damped = jtj;
          damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
          const Eigen::VectorXd step = damped.ldlt().solve(-grad);
          const Eigen::VectorXd trial = p + step;
          if (admissible(trial)) {
            const Eigen::VectorXd trial_res = residuals(trial);
            const double trial_cost = trial_res.squaredNorm();
            if (std::isfinite(trial_cost) && trial_cost <= cost) {
              const double drop = cost - trial_cost;
              const bool small_step = step.norm() <= 1e-12 * (p.norm() + 1e-12);
              p = trial;
              res = trial_res;
              converged = drop <= 1e-15 * std::max(cost, 1e-300) || small_step;
              cost = trial_cost;
              lambda = std::max(lambda * 0.3, 1e-12);
              stepped = true;
              break;
            }
          }
          lambda *= 10.0;
        }
        if (!stepped) {
          // No descent direction left at any damping: a stationary point.
          converged = true;
        }
      }
      if (cost < best_cost) {
        best_cost = cost;
        best = p;
        best_converged = converged;
      }
    }
  }
  if (best.size() == 0) throw FitError("overall model fit produced no iterate");

  const auto [a, gamma, alpha, beta] = unpack(best);
  FitResult f = make_result(Model::overall_model, {{"a", a}, {"gamma", gamma}, {"alpha", alpha}, {"beta_c", beta}},
                            std::sqrt(best_cost / static_cast<double>(n)), sel, window);
  f.converged = best_converged;
  return f;
}

Saturation detect_saturation(std::span<const Point> rows) {
  const Rows sel = select(rows, {});
  if (sel.size() < kMinPoints) throw FitError("saturation detection needs at least 3 points");
  const std::size_t n = sel.size();
  double lo = sel[n - 3].y;
  double hi = lo;
  double sum = 0.0;
  for (std::size_t i = n - 3; i < n; ++i) {
    lo = std::min(lo, sel[i].y);
    hi = std::max(hi, sel[i].y);
    sum += sel[i].y;
  }
  if (!(lo > 0.0) || (hi - lo) / lo > kSaturationTolerance) {
    throw FitError("no plateau: the last three points differ by more than 2%; extend the sweep range");
  }
  const double plateau = sum / 3.0;
  auto inside = [&](double y) { return std::abs(y / plateau - 1.0) <= kSaturationTolerance; };

  std::size_t k = n;
  while (k > 0 && inside(sel[k - 1].y)) --k;
  if (k == n) throw FitError("plateau band is empty");
  if (k == 0) return {sel[0].x, plateau};

  const Point out = sel[k - 1];
  const Point in = sel[k];
  const double edge = out.y < plateau ? plateau * (1.0 - kSaturationTolerance) : plateau * (1.0 + kSaturationTolerance);
  const double t = (edge - out.y) / (in.y - out.y);
  return {out.x + t * (in.x - out.x), plateau};
}

}  // namespace hcent::analysis
