#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hcent/cli_io.hpp"
#include "hcent/errors.hpp"
#include "hcent/figures.hpp"

namespace hcent::io {

namespace {

constexpr double kBetaC = 2.8284271247461903;  // 2 sqrt(2)

struct Chains {
  ChainSpec critical;
  ChainSpec noncritical;
  ChainSpec transition;
};

Chains chains_for(Profile profile) {
  if (profile == Profile::paper) {
    return {critical_preset(kPaperSites), ChainSpec::from_xi(8192, 32.0), ChainSpec::from_xi(16384, 64.0)};
  }
  return {critical_preset(kDeskSites), ChainSpec::from_xi(4096, 16.0), ChainSpec::from_xi(8192, 64.0)};
}

SweepConfig make(SweepKind kind, std::vector<GridPoint> grid, const std::string& output,
                 std::vector<std::pair<std::string, std::string>> notes) {
  SweepConfig c{kind, std::move(grid), output, std::move(notes)};
  validate(c);
  return c;
}

analysis::Rows log_y(analysis::Rows rows) {
  analysis::Rows out;
  for (const auto& p : rows) {
    if (p.y > kLogFitFloor) out.push_back({p.x, std::log(p.y)});
  }
  return out;
}

std::string label(const char* prefix, double v) {
  std::ostringstream os;
  os << prefix << v;
  return os.str();
}

SummaryRow row(std::string quantity, double fitted, std::optional<double> paper, std::optional<double> tol,
               std::string note = {}) {
  return {std::move(quantity), fitted, paper, tol, std::move(note)};
}

json slope_points(const std::vector<analysis::SlopePoint>& pts) {
  json out = json::array();
  for (const auto& p : pts) out.push_back({p.x, p.slope});
  return out;
}

FigureReport fig1(Profile profile, const RunOptions& options) {
  FigureReport rep{"fig1", {}, {}, {}, json::object()};
  const auto configs = figure_configs("fig1", profile);
  rep.sweeps.push_back(run_critical_r_sweep(configs[0], options));
  rep.sweeps.push_back(run_scale_invariance_sweep(configs[1], options));
  const auto& sweep = rep.sweeps[0];
  const double s = series_labels(sweep).front();

  const auto a = analyse_critical_r(sweep);
  const double tol_beta = profile == Profile::paper ? 0.02 : 0.05;
  rep.summary.push_back(row("beta_c", a.decay.coefficient("decay"), kBetaC, tol_beta));
  rep.summary.push_back(row("alpha", -a.short_distance.coefficient("exponent"), 1.0 / 3.0, 0.10));
  rep.summary.push_back(row("a", a.overall.coefficient("a"), 4.0 / 3.0, 0.20));
  rep.summary.push_back(row("gamma", a.overall.coefficient("gamma"), 1.5, 0.20));
  rep.summary.push_back(row("overall_rms", a.overall.residual_rms, std::nullopt, std::nullopt, "target <= 0.1"));
  rep.summary.push_back(row("I_exponent", a.mutual_information.coefficient("exponent"), -0.05, 0.6));
  rep.summary.push_back(row("ln(E/I)_slope", a.negativity_to_information.coefficient("slope"), std::nullopt,
                            std::nullopt, "expected negative"));
  rep.summary.push_back(row("ln(E/I)_linear_rms", a.negativity_to_information.residual_rms, std::nullopt,
                            std::nullopt, "target <= 0.15"));

  rep.curves.push_back({"lnE_vs_r", "r", "ln E_LN", log_y(series_rows(sweep, s, Quantity::r, Quantity::log_negativity))});
  rep.curves.push_back({"lnI_vs_r", "r", "ln I", log_y(series_rows(sweep, s, Quantity::r, Quantity::mutual_information))});
  analysis::Rows correction;
  for (const auto& p : a.power_correction) correction.push_back({std::log(p.x), p.y});
  rep.curves.push_back({"lnE1_over_E0_vs_lnr", "ln r", "ln(E1/E0)", correction});
  for (double r : series_labels(rep.sweeps[1])) {
    rep.curves.push_back({label("lnE_vs_L_r", r), "L", "ln E_LN",
                          log_y(series_rows(rep.sweeps[1], r, Quantity::L, Quantity::log_negativity))});
  }

  json flat = json::array();
  for (const auto& f : analyse_scale_invariance(rep.sweeps[1])) {
    flat.push_back({{"r", f.ratio}, {"negativity_flatness", f.negativity_flatness},
                    {"information_flatness", f.information_flatness}});
  }
  rep.details = {{"decay", to_json(a.decay)},
                 {"short_distance", to_json(a.short_distance)},
                 {"overall", to_json(a.overall)},
                 {"mutual_information", to_json(a.mutual_information)},
                 {"negativity_to_information", to_json(a.negativity_to_information)},
                 {"negativity_strictly_decreasing", a.negativity_strictly_decreasing},
                 {"scale_invariance", flat}};
  return rep;
}

FigureReport fig2(Profile profile, const RunOptions& options) {
  FigureReport rep{"fig2", {}, {}, {}, json::object()};
  rep.sweeps.push_back(run_block_size_sweep(figure_configs("fig2", profile)[0], options));
  json series = json::array();
  for (const auto& s : analyse_block_size(rep.sweeps[0])) {
    const double expected = std::sqrt(2.0) * s.separation;
    rep.summary.push_back(row(label("saddle_L_D0=", s.separation), s.saddle.value_or(std::nan("")), expected, 0.10));
    rep.summary.push_back(row(label("final_slope_D0=", s.separation), s.final_slope, 1.0 / 3.0, 0.20,
                              label("at L/D0=", s.final_ratio)));
    analysis::Rows curve;
    for (const auto& p : s.slopes) curve.push_back({p.x, p.slope});
    rep.curves.push_back({label("slope_vs_L_D0=", s.separation), "L", "d ln E / d ln L", curve});
    json saddle = nullptr;
    if (s.saddle) saddle = *s.saddle;
    series.push_back({{"D0", s.separation}, {"saddle", saddle}, {"final_slope", s.final_slope},
                      {"final_ratio", s.final_ratio}, {"slopes", slope_points(s.slopes)}});
  }
  rep.details = {{"series", series}};
  return rep;
}

FigureReport fig3(Profile profile, const RunOptions& options) {
  FigureReport rep{"fig3", {}, {}, {}, json::object()};
  rep.sweeps.push_back(run_noncritical_l_sweep(figure_configs("fig3", profile)[0], options));
  const auto& sweep = rep.sweeps[0];
  const auto a = analyse_noncritical_l(sweep);
  rep.summary.push_back(row("l_s_slope", a.onset_line.coefficient("slope"), 0.75, 0.15));
  rep.summary.push_back(row("l_s_intercept", a.onset_line.coefficient("intercept"), 1.0, 0.15));
  rep.summary.push_back(row("E(l=d0)_log_slope", -a.reference_line.coefficient("decay"), -2.1, 0.10));
  rep.summary.push_back(row("saturation_decay", a.plateau_decay.coefficient("decay"), 2.25, 0.10));
  json table = json::array();
  for (const auto& s : a.series) {
    rep.summary.push_back(row(label("l_s_d0=", s.d0), s.saturation.onset, std::nullopt, std::nullopt,
                              label("E_sat=", s.saturation.plateau)));
    json at = nullptr;
    if (s.at_l_equal_d) at = *s.at_l_equal_d;
    table.push_back({{"d0", s.d0}, {"l_s", s.saturation.onset}, {"E_sat", s.saturation.plateau}, {"E_at_l_eq_d", at}});
    rep.curves.push_back({label("lnE_vs_l_d0=", s.d0), "l", "ln E_LN",
                          log_y(series_rows(sweep, s.d0, Quantity::l, Quantity::log_negativity))});
  }
  rep.details = {{"saturation", table},
                 {"onset_line", to_json(a.onset_line)},
                 {"reference_line", to_json(a.reference_line)},
                 {"plateau_decay", to_json(a.plateau_decay)}};
  return rep;
}

FigureReport fig4(Profile profile, const RunOptions& options) {
  FigureReport rep{"fig4", {}, {}, {}, json::object()};
  rep.sweeps.push_back(run_noncritical_d_sweep(figure_configs("fig4", profile)[0], options));
  const auto& sweep = rep.sweeps[0];
  json series = json::array();
  for (const auto& s : analyse_noncritical_d(sweep)) {
    rep.summary.push_back(row(label("tail_rms_linear_l0=", s.l0), s.tail_linear.residual_rms, std::nullopt, std::nullopt));
    rep.summary.push_back(row(label("tail_rms_quadratic_l0=", s.l0), s.tail_quadratic.residual_rms, std::nullopt,
                              std::nullopt, "expected below linear"));
    rep.summary.push_back(row(label("beta_nc_l0=", s.l0), s.tail_quadratic.coefficient("beta"), std::nullopt,
                              std::nullopt));
    json head = nullptr;
    if (s.head_power) {
      rep.summary.push_back(row(label("head_exponent_l0=", s.l0), s.head_power->coefficient("exponent"), std::nullopt,
                                std::nullopt, "expected negative"));
      head = to_json(*s.head_power);
    }
    rep.curves.push_back({label("lnE_vs_d_l0=", s.l0), "d", "ln E_LN",
                          log_y(series_rows(sweep, s.l0, Quantity::d, Quantity::log_negativity))});
    series.push_back({{"l0", s.l0}, {"tail_linear", to_json(s.tail_linear)},
                      {"tail_quadratic", to_json(s.tail_quadratic)}, {"head_power", head}});
  }
  rep.details = {{"series", series}};
  return rep;
}

FigureReport fig5(Profile profile, const RunOptions& options) {
  FigureReport rep{"fig5", {}, {}, {}, json::object()};
  rep.sweeps.push_back(run_transition_sweep(figure_configs("fig5", profile)[0], options));
  const auto& sweep = rep.sweeps[0];
  const auto a = analyse_transition(sweep);
  rep.summary.push_back(row("coincidence_r<1", a.coincidence_below_one, std::nullopt, std::nullopt,
                            "target <= 0.1 on d in [2,4]"));
  rep.summary.push_back(row("spread_r>1", a.spread_above_one, std::nullopt, std::nullopt, "expected > 0.1"));
  json series = json::array();
  for (const auto& s : a.series) {
    rep.summary.push_back(row(label("critical_flatness_r=", s.ratio), s.critical_flatness, std::nullopt, std::nullopt));
    series.push_back({{"r", s.ratio}, {"critical_flatness", s.critical_flatness}});
    rep.curves.push_back({label("lnE_vs_d_r=", s.ratio), "d", "ln E_LN",
                          log_y(series_rows(sweep, s.ratio, Quantity::d, Quantity::log_negativity))});
  }
  rep.details = {{"series", series},
                 {"coincidence_below_one", a.coincidence_below_one},
                 {"spread_above_one", a.spread_above_one},
                 {"window", {a.window.lo, a.window.hi}}};
  return rep;
}

}  // namespace

std::optional<double> SummaryRow::relative_error() const {
  if (!paper || *paper == 0.0 || !std::isfinite(fitted)) return std::nullopt;
  return std::abs(fitted - *paper) / std::abs(*paper);
}

std::optional<bool> SummaryRow::within_tolerance() const {
  if (!tolerance) return std::nullopt;
  const auto err = relative_error();
  return err && *err <= *tolerance;
}

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig1", "fig2", "fig3", "fig4", "fig5"};
  return ids;
}

std::vector<SweepConfig> figure_configs(const std::string& id, Profile profile) {
  const Chains c = chains_for(profile);
  const std::string tag = profile == Profile::paper ? "paper" : "desk";
  if (id == "fig1") {
    return {make(SweepKind::critical_r, critical_r_grid(c.critical, {}), "fig1_critical_r",
                 {{"profile", tag}, {"grid", "L=512, r log-spaced over [0.05, 3], 40 points"}}),
            make(SweepKind::scale_invariance, scale_invariance_grid(c.critical, {}), "fig1_scale_invariance",
                 {{"profile", tag}, {"grid", "r in {0.25, 0.5, 1}, L in {128, 256, 512, 1024}"}})};
  }
  if (id == "fig2") {
    BlockSizeGrid g;
    g.separations = profile == Profile::paper ? std::vector<std::size_t>{20, 50, 100, 200}
                                              : std::vector<std::size_t>{20, 100};
    return {make(SweepKind::block_size_at_fixed_D, block_size_grid(c.critical, g), "fig2_block_size",
                 {{"profile", tag}, {"grid", "L/D0 log-spaced over [0.2, 20], 24 points per D0"}})};
  }
  if (id == "fig3") {
    return {make(SweepKind::noncritical_l_at_fixed_d, noncritical_l_grid(c.noncritical, {}), "fig3_noncritical_l",
                 {{"profile", tag}, {"grid", "d0 in {1, 2, 4}, l log-spaced over [1/8, 12]"}})};
  }
  if (id == "fig4") {
    return {make(SweepKind::noncritical_d_at_fixed_l, noncritical_d_grid(c.noncritical, {}), "fig4_noncritical_d",
                 {{"profile", tag}, {"grid", "l0 in {2, 4}, d log-spaced over [1/16, 3 l0]"}})};
  }
  if (id == "fig5") {
    return {make(SweepKind::transition_fixed_r, transition_grid(c.transition, {}), "fig5_transition",
                 {{"profile", tag}, {"grid", "r in {0.25, 0.5, 2, 4}, d log-spaced over [1/16, 4]"}})};
  }
  throw ConfigError("figure_id", "unknown figure '" + id + "' (expected fig1..fig5)");
}

FigureReport reproduce_figure(const std::string& id, Profile profile, const RunOptions& options) {
  if (id == "fig1") return fig1(profile, options);
  if (id == "fig2") return fig2(profile, options);
  if (id == "fig3") return fig3(profile, options);
  if (id == "fig4") return fig4(profile, options);
  if (id == "fig5") return fig5(profile, options);
  throw ConfigError("figure_id", "unknown figure '" + id + "' (expected fig1..fig5)");
}

std::vector<std::filesystem::path> write_figure_outputs(const std::filesystem::path& dir, const FigureReport& report,
                                                        bool force) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto open = [&](const std::filesystem::path& p) {
    if (!force && std::filesystem::exists(p)) throw ConfigError("output", p.string() + " exists (use --force to overwrite)");
    written.push_back(p);
    return std::ofstream(p, std::ios::binary | std::ios::trunc);
  };

  for (const auto& sweep : report.sweeps) {
    const auto prefix = dir / sweep.config.output_path;
    const auto [csv, man] = write_sweep_outputs(prefix, sweep, manifest(sweep, "reproduce " + report.id, "", {}), force);
    written.push_back(csv);
    written.push_back(man);
  }
  for (const auto& c : report.curves) {
    auto out = open(dir / (report.id + "_" + c.name + ".dat"));
    out << "# " << c.x_label << " | " << c.y_label << '\n';
    for (const auto& p : c.points) out << format_double(p.x) << ' ' << format_double(p.y) << '\n';
  }
  json summary = json::array();
  for (const auto& r : report.summary) {
    json paper = nullptr, tol = nullptr, err = nullptr, ok = nullptr;
    if (r.paper) paper = *r.paper;
    if (r.tolerance) tol = *r.tolerance;
    if (auto e = r.relative_error()) err = *e;
    if (auto w = r.within_tolerance()) ok = *w;
    summary.push_back({{"quantity", r.quantity}, {"fitted", std::isfinite(r.fitted) ? json(r.fitted) : json(nullptr)},
                       {"paper", paper}, {"tolerance", tol}, {"relative_error", err}, {"pass", ok},
                       {"note", r.note}});
  }
  auto out = open(dir / (report.id + "_summary.json"));
  out << json{{"figure", report.id}, {"summary", summary}, {"fits", report.details}}.dump(2) << '\n';
  return written;
}

void print_summary(std::ostream& os, const FigureReport& report) {
  os << report.id << '\n';
  os << std::left << std::setw(28) << "quantity" << std::right << std::setw(14) << "fitted" << std::setw(12) << "paper"
     << std::setw(10) << "rel.err" << std::setw(8) << "ok" << "  note\n";
  for (const auto& r : report.summary) {
    os << std::left << std::setw(28) << r.quantity << std::right << std::setw(14) << std::setprecision(6) << r.fitted;
    if (r.paper) {
      os << std::setw(12) << *r.paper;
    } else {
      os << std::setw(12) << "-";
    }
    if (auto e = r.relative_error()) {
      os << std::setw(9) << std::fixed << std::setprecision(1) << 100.0 * *e << '%' << std::defaultfloat;
    } else {
      os << std::setw(10) << "-";
    }
    if (auto w = r.within_tolerance()) {
      os << std::setw(8) << (*w ? "yes" : "NO");
    } else {
      os << std::setw(8) << "-";
    }
    os << "  " << r.note << '\n';
  }
}

}  // namespace hcent::io
