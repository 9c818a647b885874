#include "hcent/cli_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "hcent/errors.hpp"
#include "hcent/version.hpp"

namespace hcent::io {

namespace {

// Strict reader over one JSON object: every key must be consumed.
class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    if (!obj_.contains(key)) throw ConfigError(path(key), "missing required field");
    return obj_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(path(key), "expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  std::size_t count(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(path(key), "expected a nonnegative integer");
    return v.get<std::size_t>();
  }
  std::size_t count(const std::string& key, std::size_t fallback) { return has(key) ? count(key) : fallback; }

  std::string text(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(path(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_array() || v.empty()) throw ConfigError(path(key), "expected a nonempty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(path(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  std::vector<std::size_t> counts(const std::string& key, std::vector<std::size_t> fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_array() || v.empty()) throw ConfigError(path(key), "expected a nonempty array of integers");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer() || v[i].get<long long>() < 0) {
        throw ConfigError(path(key) + "[" + std::to_string(i) + "]", "expected a nonnegative integer");
      }
      out.push_back(v[i].get<std::size_t>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [k, v] : obj_.items()) {
      if (!used_.contains(k)) throw ConfigError(path(k), "unknown field");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

ChainSpec parse_chain(const json& doc, const std::string& path) {
  Fields f(doc, path);
  try {
    if (f.has("preset")) {
      const std::string preset = f.text("preset");
      if (preset != "critical") throw ConfigError(f.path("preset"), "unknown preset '" + preset + "'");
      const auto spec = critical_preset(f.count("n_sites", kDeskSites));
      f.finish();
      return spec;
    }
    const std::size_t n = f.count("n_sites");
    if (f.has("coupling") == f.has("xi")) throw ConfigError(path, "give exactly one of 'coupling' or 'xi'");
    const auto spec = f.has("coupling") ? ChainSpec::from_coupling(n, f.number("coupling"))
                                        : ChainSpec::from_xi(n, f.number("xi"));
    f.finish();
    return spec;
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
}

std::vector<GridPoint> parse_explicit(const json& arr, const ChainSpec& chain, const std::string& path) {
  if (!arr.is_array() || arr.empty()) throw ConfigError(path, "expected a nonempty array of grid points");
  std::vector<GridPoint> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Fields p(arr[i], path + "[" + std::to_string(i) + "]");
    ChainSpec c = chain;
    if (p.has("n_sites")) c = ChainSpec::from_coupling(p.count("n_sites"), chain.coupling());
    out.push_back({p.number("series", 0.0), c, p.count("L"), p.count("D")});
    p.finish();
  }
  return out;
}

std::vector<GridPoint> parse_grid(SweepKind kind, const json& doc, const ChainSpec& chain) {
  Fields f(doc, "grid");
  if (f.has("explicit")) {
    auto pts = parse_explicit(f.raw("explicit"), chain, "grid.explicit");
    f.finish();
    return pts;
  }
  std::vector<GridPoint> pts;
  switch (kind) {
    case SweepKind::critical_r: {
      CriticalRGrid g;
      g.block_len = f.count("block_len", g.block_len);
      g.r_min = f.number("r_min", g.r_min);
      g.r_max = f.number("r_max", g.r_max);
      g.points = f.count("points", g.points);
      if (f.has("spacing")) {
        const std::string s = f.text("spacing");
        if (s != "log" && s != "linear") throw ConfigError("grid.spacing", "expected 'log' or 'linear'");
        g.log_spacing = s == "log";
      }
      pts = critical_r_grid(chain, g);
      break;
    }
    case SweepKind::scale_invariance: {
      ScaleInvarianceGrid g;
      g.ratios = f.numbers("ratios", g.ratios);
      g.block_lens = f.counts("block_lens", g.block_lens);
      pts = scale_invariance_grid(chain, g);
      break;
    }
    case SweepKind::block_size_at_fixed_D: {
      BlockSizeGrid g;
      g.separations = f.counts("separations", g.separations);
      g.min_ratio = f.number("min_ratio", g.min_ratio);
      g.max_ratio = f.number("max_ratio", g.max_ratio);
      g.points = f.count("points", g.points);
      pts = block_size_grid(chain, g);
      break;
    }
    case SweepKind::noncritical_l_at_fixed_d: {
      NoncriticalLGrid g;
      g.d0_values = f.numbers("d0_values", g.d0_values);
      g.l_min = f.number("l_min", g.l_min);
      g.l_max = f.number("l_max", g.l_max);
      g.points = f.count("points", g.points);
      pts = noncritical_l_grid(chain, g);
      break;
    }
    case SweepKind::noncritical_d_at_fixed_l: {
      NoncriticalDGrid g;
      g.l0_values = f.numbers("l0_values", g.l0_values);
      g.d_min = f.number("d_min", g.d_min);
      g.d_max_factor = f.number("d_max_factor", g.d_max_factor);
      g.points = f.count("points", g.points);
      pts = noncritical_d_grid(chain, g);
      break;
    }
    case SweepKind::transition_fixed_r: {
      TransitionGrid g;
      g.ratios = f.numbers("ratios", g.ratios);
      g.d_min = f.number("d_min", g.d_min);
      g.d_max = f.number("d_max", g.d_max);
      g.points = f.count("points", g.points);
      pts = transition_grid(chain, g);
      break;
    }
  }
  f.finish();
  return pts;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ConfigError("csv line " + std::to_string(line_no), "not a number: '" + s + "'");
  }
  return v;
}

}  // namespace

SweepConfig parse_sweep_config(const json& doc) {
  Fields f(doc, "");
  const json& version = f.raw("schema_version");
  if (!version.is_number_integer() || version.get<int>() != kConfigSchemaVersion) {
    throw ConfigError("schema_version", "unsupported schema version (expected " +
                                            std::to_string(kConfigSchemaVersion) + ")");
  }
  SweepConfig config;
  config.kind = sweep_kind_from_string(f.text("sweep_kind"));
  const ChainSpec chain = parse_chain(f.raw("chain"), "chain");
  config.grid = parse_grid(config.kind, f.raw("grid"), chain);
  if (f.has("output")) config.output_path = f.text("output");
  f.finish();

  validate(config);
  return config;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_sweep_config(doc);
}

std::string canonical(const json& doc) { return doc.dump(); }

std::string config_hash(const json& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical(doc)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{"series", "N", "coupling", "xi", "L", "D", "r",
                                             "d", "l", "S_A", "S_B", "S_AB", "I_nats", "E_LN_bits"};
  return cols;
}

void write_csv(std::ostream& os, const SweepResult& result) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& row : result.rows) {
    const auto& p = row.point;
    const auto& m = row.record;
    os << format_double(p.series) << ',' << p.chain.n_sites() << ',' << format_double(p.chain.coupling()) << ','
       << format_double(p.chain.xi()) << ',' << p.block_len << ',' << p.separation << ','
       << format_double(quantity(row, Quantity::r)) << ',' << format_double(quantity(row, Quantity::d)) << ','
       << format_double(quantity(row, Quantity::l)) << ',' << format_double(m.entropy_a) << ','
       << format_double(m.entropy_b) << ',' << format_double(m.entropy_ab) << ','
       << format_double(m.mutual_information) << ',' << format_double(m.log_negativity) << '\n';
  }
}

CsvTable read_csv_table(std::istream& is) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("csv", "empty file");
  t.header = split(line, ',');
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != t.header.size()) {
      throw ConfigError("csv line " + std::to_string(line_no), "expected " + std::to_string(t.header.size()) +
                                                                   " cells, got " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_number(c, line_no));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ConfigError("csv", "missing column '" + name + "'");
}

std::vector<SweepRow> read_sweep_csv(std::istream& is) {
  const CsvTable t = read_csv_table(is);
  const std::size_t c_series = t.column("series"), c_n = t.column("N"), c_coupling = t.column("coupling"),
                    c_l = t.column("L"), c_d = t.column("D"), c_sa = t.column("S_A"), c_sb = t.column("S_B"),
                    c_sab = t.column("S_AB"), c_i = t.column("I_nats"), c_e = t.column("E_LN_bits");
  std::vector<SweepRow> rows;
  for (const auto& r : t.rows) {
    const auto n = static_cast<std::size_t>(r[c_n]);
    const auto chain = ChainSpec::from_coupling(n, r[c_coupling]);
    const auto len = static_cast<std::size_t>(r[c_l]);
    const auto sep = static_cast<std::size_t>(r[c_d]);
    GridPoint p{r[c_series], chain, len, sep};
    MeasureRecord m{r[c_sa], r[c_sb], r[c_sab], r[c_i], r[c_e], chain, BlockPair::make(n, len, sep)};
    rows.push_back({p, m, 0.0});
  }
  return rows;
}

json manifest(const SweepResult& result, const std::string& command_line, const std::string& hash,
              const json& config_echo) {
  json chains = json::array();
  std::set<std::pair<std::size_t, double>> seen;
  for (const auto& p : result.config.grid) {
    if (!seen.insert({p.chain.n_sites(), p.chain.coupling()}).second) continue;
    chains.push_back({{"n_sites", p.chain.n_sites()},
                      {"coupling", p.chain.coupling()},
                      {"xi", p.chain.xi()},
                      {"mass", p.chain.mass()}});
  }
  std::size_t l_min = SIZE_MAX, l_max = 0, d_min = SIZE_MAX, d_max = 0;
  json series = json::array();
  for (double s : series_labels(result)) series.push_back(s);
  for (const auto& p : result.config.grid) {
    l_min = std::min(l_min, p.block_len);
    l_max = std::max(l_max, p.block_len);
    d_min = std::min(d_min, p.separation);
    d_max = std::max(d_max, p.separation);
  }
  json seconds = json::array();
  for (const auto& r : result.rows) seconds.push_back(r.seconds);
  json notes = json::object();
  for (const auto& [k, v] : result.config.notes) notes[k] = v;

  return {{"tool", "hcent"},
          {"tool_version", kVersion},
          {"command_line", command_line},
          {"config_hash", hash},
          {"config", config_echo},
          {"sweep_kind", to_string(result.config.kind)},
          {"chains", chains},
          {"grid_summary",
           {{"points", result.config.grid.size()},
            {"series", series},
            {"L_range", {l_min, l_max}},
            {"D_range", {d_min, d_max}}}},
          {"units", {{"entropy", "nats"}, {"mutual_information", "nats"}, {"log_negativity", "bits"}}},
          {"timestamp", result.timestamp},
          {"seconds_per_point", seconds},
          {"notes", notes}};
}

json to_json(const analysis::FitResult& fit) {
  json coeffs = json::object();
  for (const auto& [k, v] : fit.coefficients) coeffs[k] = v;
  auto bound = [](double v) -> json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  return {{"model", analysis::to_string(fit.model)},
          {"coefficients", coeffs},
          {"residual_rms", fit.residual_rms},
          {"window", {{"lo", bound(fit.window.lo)}, {"hi", bound(fit.window.hi)}}},
          {"n_points", fit.n_points},
          {"converged", fit.converged}};
}

json to_json(const MeasureRecord& m) {
  return {{"n_sites", m.spec.n_sites()},
          {"coupling", m.spec.coupling()},
          {"xi", m.spec.xi()},
          {"block_len", m.pair.block_len()},
          {"separation", m.pair.separation()},
          {"offset", m.pair.offset_a()},
          {"r", m.pair.r()},
          {"S_A", m.entropy_a},
          {"S_B", m.entropy_b},
          {"S_AB", m.entropy_ab},
          {"I_nats", m.mutual_information},
          {"E_LN_bits", m.log_negativity}};
}

std::string to_csv(const MeasureRecord& m) {
  std::ostringstream os;
  os << "N,coupling,xi,L,D,offset,r,S_A,S_B,S_AB,I_nats,E_LN_bits\n"
     << m.spec.n_sites() << ',' << format_double(m.spec.coupling()) << ',' << format_double(m.spec.xi()) << ','
     << m.pair.block_len() << ',' << m.pair.separation() << ',' << m.pair.offset_a() << ','
     << format_double(m.pair.r()) << ',' << format_double(m.entropy_a) << ',' << format_double(m.entropy_b) << ','
     << format_double(m.entropy_ab) << ',' << format_double(m.mutual_information) << ','
     << format_double(m.log_negativity) << '\n';
  return os.str();
}

void write_kernel(std::ostream& os, const CorrelationKernel& kernel, Correlator which) {
  os << "# lag " << (which == Correlator::position ? "g" : "h") << '\n';
  const auto v = kernel.values(which);
  for (std::size_t x = 0; x < v.size(); ++x) os << x << ' ' << format_double(v[x]) << '\n';
}

std::pair<std::filesystem::path, std::filesystem::path> write_sweep_outputs(const std::filesystem::path& prefix,
                                                                            const SweepResult& result,
                                                                            const json& manifest_doc, bool force) {
  std::filesystem::path csv = prefix;
  csv += ".csv";
  std::filesystem::path man = prefix;
  man += ".manifest.json";
  if (!force) {
    for (const auto& p : {csv, man}) {
      if (std::filesystem::exists(p)) throw ConfigError("output", p.string() + " exists (use --force to overwrite)");
    }
  }
  if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());

  // Render both first so a failure leaves nothing half written.
  std::ostringstream csv_text;
  write_csv(csv_text, result);
  const std::string man_text = manifest_doc.dump(2) + "\n";
  for (const auto& [path, text] : {std::pair{csv, csv_text.str()}, std::pair{man, man_text}}) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw ConfigError("output", "failed writing " + path.string());
  }
  return {csv, man};
}

}  // namespace hcent::io
