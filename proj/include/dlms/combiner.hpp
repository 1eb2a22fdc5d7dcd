#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dlms/topology.hpp"

namespace dlms {

/// Column-stochastic neighbor-weight matrix. Column k holds the weights node
/// k applies to its neighbors' intermediate estimates, so the combination
/// stage reads w_k = sum_l entries(l,k) * phi_l. Entries outside the
/// neighborhood are zero and every column sums to 1.
struct CombinationMatrix {
    Eigen::MatrixXd entries;
    int size() const { return static_cast<int>(entries.rows()); }
};

/// Uniform rule: a(l,k) = 1/|N_k| for l in N_k.
CombinationMatrix build_uniform_combiner(const Topology& t);

/// Metropolis rule: a(l,k) = 1/max(|N_l|,|N_k|) for adjacent l != k, with the
/// self-weight absorbing the remainder. Result is symmetric, hence doubly
/// stochastic.
CombinationMatrix build_metropolis_combiner(const Topology& t);

struct CombinerViolation {
    enum class Kind { Support, ColumnSum, Range };
    Kind kind;
    int row = -1;   // -1 when the violation concerns a whole column
    int col = -1;
    double value = 0.0;
    std::string to_string() const;
};

struct ValidationReport {
    std::vector<CombinerViolation> violations;
    std::vector<std::string> warnings;  // e.g. disconnected graph
    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

/// Checks support, column sums (tolerance 1e-12) and entry range against the
/// topology. Disconnected graphs produce a warning, not a violation.
/// Throws ConfigError on dimension mismatch.
ValidationReport validate_combiner(const CombinationMatrix& m, const Topology& t);

inline constexpr double kColumnSumTolerance = 1e-12;

} // namespace dlms
