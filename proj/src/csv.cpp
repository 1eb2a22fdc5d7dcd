#include "dlms/csv.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dlms/errors.hpp"

namespace dlms::csv {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

void write_msd_csv(std::ostream& out, const MSDReport& report, const Metadata& metadata) {
    for (const auto& [key, value] : metadata) out << "# " << key << ": " << value << "\n";
    for (std::size_t v = 0; v < report.variant_labels.size(); ++v) {
        if (report.diverged_trials[v] > 0)
            out << "# diverged: " << report.variant_labels[v] << "="
                << report.diverged_trials[v] << "/" << report.trials << "\n";
    }
    for (std::size_t t = 0; t < report.theory_labels.size(); ++t) {
        if (t < report.theory_steady_state_db.size())
            out << "# steady_state_db: " << report.theory_labels[t] << "="
                << format_double(report.theory_steady_state_db[t]) << "\n";
    }

    out << "iteration";
    for (const auto& label : report.variant_labels) out << "," << label;
    for (const auto& label : report.theory_labels) out << "," << label;
    out << "\n";

    for (long i = 0; i < report.iterations; ++i) {
        out << i;
        for (int v = 0; v < report.msd.cols(); ++v)
            out << "," << format_double(msd_to_db(report.msd(i, v)));
        for (int t = 0; t < report.theory_msd.cols(); ++t)
            out << "," << format_double(msd_to_db(report.theory_msd(i, t)));
        out << "\n";
    }
}

void save_msd_csv(const std::string& path, const MSDReport& report, const Metadata& metadata) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_msd_csv(out, report, metadata);
    if (!out) throw IoError("failed writing '" + path + "'");
}

void write_theory_csv(std::ostream& out, const Eigen::VectorXd& msd_linear,
                      const Metadata& metadata, const Eigen::MatrixXd* mean_history,
                      int nodes, int taps) {
    for (const auto& [key, value] : metadata) out << "# " << key << ": " << value << "\n";
    out << "iteration,msd_db";
    if (mean_history) {
        for (int k = 0; k < nodes; ++k)
            for (int m = 0; m < taps; ++m) out << ",mean_err_n" << (k + 1) << "_t" << (m + 1);
    }
    out << "\n";
    for (long i = 0; i < msd_linear.size(); ++i) {
        out << i << "," << format_double(msd_to_db(msd_linear(i)));
        if (mean_history)
            for (int c = 0; c < mean_history->cols(); ++c)
                out << "," << format_double((*mean_history)(i, c));
        out << "\n";
    }
}

void write_weight_history_csv(std::ostream& out, const TrialResult& result, int nodes,
                              int taps) {
    out << "iteration,node,tap_index,weight_value\n";
    for (long i = 0; i < result.weight_history.rows(); ++i)
        for (int k = 0; k < nodes; ++k)
            for (int m = 0; m < taps; ++m)
                out << i << "," << (k + 1) << "," << (m + 1) << ","
                    << format_double(result.weight_history(i, k * taps + m)) << "\n";
}

ParsedCsv read_csv(std::istream& in) {
    ParsedCsv parsed;
    std::string line;
    std::vector<std::vector<double>> rows;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string comment = line.substr(1);
            if (!comment.empty() && comment[0] == ' ') comment.erase(0, 1);
            parsed.comments.push_back(comment);
            continue;
        }
        std::stringstream fields(line);
        std::string field;
        if (!header_seen) {
            while (std::getline(fields, field, ',')) parsed.columns.push_back(field);
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(fields, field, ',')) {
            try {
                row.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw ConfigError("non-numeric CSV field '" + field + "'");
            }
        }
        if (row.size() != parsed.columns.size())
            throw ConfigError("CSV row has wrong field count");
        rows.push_back(std::move(row));
    }
    parsed.data.resize(static_cast<long>(rows.size()),
                       static_cast<long>(parsed.columns.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            parsed.data(static_cast<long>(r), static_cast<long>(c)) = rows[r][c];
    return parsed;
}

ParsedCsv load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_csv(in);
}

std::string make_plot_script(const std::string& csv_path, const ParsedCsv& parsed,
                             const std::string& output_image) {
    if (parsed.columns.empty() || parsed.columns[0] != "iteration")
        throw ConfigError("unrecognized CSV schema: first column must be 'iteration'");
    if (parsed.columns.size() < 2)
        throw ConfigError("unrecognized CSV schema: no data columns");
    if (parsed.data.rows() < 1) throw ConfigError("CSV contains no data rows");

    std::ostringstream out;
    out << "set datafile separator ','\n"
        << "set datafile commentschars '#'\n"
        << "set key outside right\n"
        << "set grid\n"
        << "set xlabel 'iteration'\n"
        << "set ylabel 'network MSD (dB)'\n"
        << "set terminal pngcairo size 1100,650\n"
        << "set output '" << output_image << "'\n"
        << "plot \\\n";
    for (std::size_t c = 1; c < parsed.columns.size(); ++c) {
        const std::string& label = parsed.columns[c];
        const bool theory = label.rfind("theory_", 0) == 0;
        out << "  '" << csv_path << "' using 1:" << (c + 1) << " with lines";
        if (theory) out << " dashtype 2 linewidth 2";
        out << " title '" << label << "'";
        out << (c + 1 < parsed.columns.size() ? ", \\\n" : "\n");
    }
    return out.str();
}

} // namespace dlms::csv
