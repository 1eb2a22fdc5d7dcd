#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dlms/algorithms.hpp"
#include "dlms/experiments.hpp"

namespace dlms::csv {

/// Deterministic shortest-round-trip-ish formatting ("%.12g"); the same
/// inputs always produce byte-identical output.
std::string format_double(double value);

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// RFC-4180-style CSV with '#'-prefixed metadata comments, a header row and
/// one row per iteration. Simulation columns are dB traces; theory columns
/// (when present) follow them with their labels.
void write_msd_csv(std::ostream& out, const MSDReport& report, const Metadata& metadata);
void save_msd_csv(const std::string& path, const MSDReport& report, const Metadata& metadata);

/// Theory-only trace: iteration, msd_db, plus one mean-error column per
/// stacked coefficient when mean_history is non-null (iterations x MN).
void write_theory_csv(std::ostream& out, const Eigen::VectorXd& msd_linear,
                      const Metadata& metadata, const Eigen::MatrixXd* mean_history,
                      int nodes, int taps);

/// Long-form weight history: iteration, node, tap_index, weight_value.
void write_weight_history_csv(std::ostream& out, const TrialResult& result, int nodes,
                              int taps);

struct ParsedCsv {
    std::vector<std::string> comments;  // without the leading '#'
    std::vector<std::string> columns;
    Eigen::MatrixXd data;               // rows x columns
};

ParsedCsv read_csv(std::istream& in);
ParsedCsv load_csv(const std::string& path);

/// Self-contained gnuplot script drawing dB-vs-iteration curves with one
/// series per column; columns labeled theory_* are drawn dashed. Throws
/// ConfigError when the CSV does not look like output of this tool.
std::string make_plot_script(const std::string& csv_path, const ParsedCsv& parsed,
                             const std::string& output_image);

} // namespace dlms::csv
