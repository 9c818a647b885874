#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcent/analysis.hpp"
#include "hcent/chain_model.hpp"
#include "hcent/experiments.hpp"
#include "hcent/measures.hpp"

namespace hcent::io {

using json = nlohmann::json;

inline constexpr int kConfigSchemaVersion = 1;

/// Parses a sweep config document (schema version 1). Errors are ConfigError
/// with the dotted path of the offending field.
///
///   {
///     "schema_version": 1,
///     "sweep_kind": "critical_r",
///     "chain": {"n_sites": 8192, "coupling": 0.999999999999}   // or "xi", or "preset": "critical"
///     "grid": {"block_len": 512, "r_min": 0.05, "r_max": 3.0, "points": 40, "spacing": "log"},
///     "output": "results/critical_r"
///   }
///
/// Any kind also accepts "grid": {"explicit": [{"series": s, "L": l, "D": d, "n_sites": n}, ...]}.
SweepConfig parse_sweep_config(const json& doc);
SweepConfig load_sweep_config(const std::filesystem::path& path);

/// Canonical JSON of a parsed document; identical configs give identical text.
std::string canonical(const json& doc);
/// 64-bit FNV-1a of canonical(doc), as 16 hex digits.
std::string config_hash(const json& doc);

/// %.17g: parses back to the same double.
std::string format_double(double v);

/// Column names of the sweep CSV, in order.
const std::vector<std::string>& csv_columns();

void write_csv(std::ostream& os, const SweepResult& result);

/// Rows of a sweep CSV; seconds are not stored and read back as 0.
std::vector<SweepRow> read_sweep_csv(std::istream& is);

/// Minimal numeric CSV table for cmd_fit.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Throws ConfigError for a missing column.
  std::size_t column(const std::string& name) const;
};
CsvTable read_csv_table(std::istream& is);

json manifest(const SweepResult& result, const std::string& command_line, const std::string& config_hash,
              const json& config_echo);

json to_json(const analysis::FitResult& fit);
json to_json(const MeasureRecord& record);
/// Single header line plus one data line.
std::string to_csv(const MeasureRecord& record);

/// "# lag <name>" header followed by one "lag value" line per lag.
void write_kernel(std::ostream& os, const CorrelationKernel& kernel, Correlator which);

/// Writes <prefix>.csv and <prefix>.manifest.json. Refuses to overwrite
/// unless `force`; returns the two paths.
std::pair<std::filesystem::path, std::filesystem::path> write_sweep_outputs(
    const std::filesystem::path& prefix, const SweepResult& result, const json& manifest_doc, bool force);

enum class Profile { desk, paper };

struct Curve {
  std::string name;
  std::string x_label;
  std::string y_label;
  analysis::Rows points;
};

struct SummaryRow {
  std::string quantity;
  double fitted;
  std::optional<double> paper;
  /// Relative tolerance for the pass column, if the comparison is gated.
  std::optional<double> tolerance;
  std::string note;

  std::optional<double> relative_error() const;
  std::optional<bool> within_tolerance() const;
};

struct FigureReport {
  std::string id;
  std::vector<SweepResult> sweeps;
  std::vector<Curve> curves;
  std::vector<SummaryRow> summary;
  json details;
};

const std::vector<std::string>& figure_ids();

/// Canned sweep configs for a figure (several for fig1: r sweep + scale inset).
std::vector<SweepConfig> figure_configs(const std::string& id, Profile profile);

/// Runs the figure's sweeps and fits. Throws ConfigError for an unknown id.
FigureReport reproduce_figure(const std::string& id, Profile profile, const RunOptions& options = {});

/// Writes <dir>/<id>_<curve>.dat two-column files, <id>_summary.json and the
/// sweep CSVs. Returns the files written.
std::vector<std::filesystem::path> write_figure_outputs(const std::filesystem::path& dir, const FigureReport& report,
                                                        bool force);

/// Fixed-width summary table.
void print_summary(std::ostream& os, const FigureReport& report);

}  // namespace hcent::io
