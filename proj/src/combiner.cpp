#include "dlms/combiner.hpp"

#include <cmath>
#include <sstream>

#include "dlms/errors.hpp"

namespace dlms {

CombinationMatrix build_uniform_combiner(const Topology& t) {
    const int n = t.node_count;
    CombinationMatrix m;
    m.entries = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        const double w = 1.0 / t.degree(k);
        for (int l : t.neighborhoods[k]) m.entries(l, k) = w;
    }
    return m;
}

CombinationMatrix build_metropolis_combiner(const Topology& t) {
    const int n = t.node_count;
    CombinationMatrix m;
    m.entries = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        double off_diagonal = 0.0;
        for (int l : t.neighborhoods[k]) {
            if (l == k) continue;
            const double w = 1.0 / std::max(t.degree(l), t.degree(k));
            m.entries(l, k) = w;
            off_diagonal += w;
        }
        m.entries(k, k) = 1.0 - off_diagonal;
    }
    return m;
}

std::string CombinerViolation::to_string() const {
    std::ostringstream out;
    switch (kind) {
        case Kind::Support:
            out << "entry (" << row + 1 << ", " << col + 1 << ") = " << value
                << " lies outside the neighborhood of node " << col + 1;
            break;
        case Kind::ColumnSum:
            out << "column " << col + 1 << " sums to " << value;
            break;
        case Kind::Range:
            out << "entry (" << row + 1 << ", " << col + 1 << ") = " << value
                << " outside [0, 1]";
            break;
    }
    return out.str();
}

std::string ValidationReport::to_string() const {
    std::ostringstream out;
    if (ok()) {
        out << "valid";
    } else {
        out << violations.size() << " violation(s):\n";
        for (const auto& v : violations) out << "  " << v.to_string() << "\n";
    }
    for (const auto& w : warnings) out << "warning: " << w << "\n";
    return out.str();
}

ValidationReport validate_combiner(const CombinationMatrix& m, const Topology& t) {
    const int n = t.node_count;
    if (m.entries.rows() != n || m.entries.cols() != n)
        throw ConfigError("combination matrix size does not match topology");

    ValidationReport report;
    for (int k = 0; k < n; ++k) {
        double sum = 0.0;
        for (int l = 0; l < n; ++l) {
            const double a = m.entries(l, k);
            sum += a;
            if (a != 0.0 && !t.adjacent(l, k))
                report.violations.push_back({CombinerViolation::Kind::Support, l, k, a});
            if (a < 0.0 || a > 1.0)
                report.violations.push_back({CombinerViolation::Kind::Range, l, k, a});
        }
        if (std::abs(sum - 1.0) > kColumnSumTolerance)
            report.violations.push_back({CombinerViolation::Kind::ColumnSum, -1, k, sum});
    }
    if (!is_connected(t))
        report.warnings.push_back(
            "topology is disconnected; each component adapts independently");
    return report;
}

} // namespace dlms
