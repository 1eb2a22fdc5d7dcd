#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "dlms/algorithms.hpp"
#include "dlms/theory.hpp"

namespace dlms {

/// Stage descriptions where active positions hold coefficient 1 and all
/// others 0. Positions are chosen by a seeded draw; when nested is true the
/// active set of each stage contains the previous stage's set.
struct SparsityScenario {
    struct Stage {
        long start = 0;
        int active = 0;
    };
    std::vector<Stage> stages;
    bool nested = true;
    std::uint64_t seed = 0;

    TrueVectorSchedule build(int taps) const;  // throws ConfigError on bad stages
};

/// A full Monte Carlo experiment: the unit of reproducibility. All variants
/// share the same data realizations within a trial, and per-trial generators
/// are derived from (master_seed, trial_index), so the report is a pure
/// function of this struct.
struct ExperimentSpec {
    std::string name;
    Topology topology;
    CombinationMatrix combiner;
    std::string combiner_rule = "uniform";  // builder used, echoed into configs
    SignalProfile profile;
    int taps = 0;
    TrueVectorSchedule schedule;
    std::vector<AlgorithmVariant> variants;
    long iterations = 0;
    int trials = 0;
    std::uint64_t master_seed = 0;
    double tail_fraction = 0.1;  // tail window used for steady-state estimates

    void validate() const;  // throws ConfigError
};

/// Averaged traces in linear MSD units (convert with msd_to_db for output).
/// Divergent trials are excluded from a variant's average and counted; a
/// variant whose trials all diverged keeps a NaN trace and is flagged.
struct MSDReport {
    std::vector<std::string> variant_labels;
    Eigen::MatrixXd msd;                   // iterations x variants, linear
    std::vector<int> diverged_trials;      // per variant
    int trials = 0;
    long iterations = 0;

    Eigen::MatrixXd theory_msd;            // iterations x k, empty when absent
    std::vector<std::string> theory_labels;
    std::vector<double> theory_steady_state_db;  // one per theory column when known

    bool variant_flagged(int v) const { return diverged_trials[v] >= trials; }
};

/// dB value 10*log10(x) with a floor of -320 dB so exact zeros stay finite.
double msd_to_db(double msd);
inline constexpr double kDbFloor = -320.0;

/// Mean of a trace over [first, last] (inclusive), in dB.
double steady_state_db(const Eigen::Ref<const Eigen::VectorXd>& linear_trace,
                       long first, long last);
/// Tail window of the final schedule stage under the spec's tail_fraction.
std::pair<long, long> tail_window(const ExperimentSpec& spec);

/// OpenMP Monte Carlo driver: trials run concurrently, each into its own
/// slot, and the reduction sums per-trial traces in trial order, so the
/// result is identical for any job count. jobs <= 0 uses all cores.
MSDReport run_monte_carlo(const ExperimentSpec& spec, int jobs = 0);

/// Single-threaded reference driver kept for testing; must produce results
/// identical to run_monte_carlo.
MSDReport run_monte_carlo_serial(const ExperimentSpec& spec);

/// FNV-1a checksum of every (u, d) value a trial feeds the algorithms, in
/// draw order. Variants see byte-identical data iff these match.
std::uint64_t trial_data_checksum(const ExperimentSpec& spec, long trial_index);

/// Theory-versus-simulation comparison for one ATC variant of the spec.
struct TheoryComparison {
    MSDReport report;                  // simulation traces + theory column
    Eigen::VectorXd gap_db;            // theory dB - simulation dB per iteration
    double max_abs_gap_after_burnin = 0.0;
    double mean_abs_gap_tail = 0.0;    // over the final tail_iterations
    long burnin = 0;
    long tail_iterations = 0;
    double closed_form_db = 0.0;       // steady-state closed form
    double sim_tail_db = 0.0;          // simulation tail average
    double theory_tail_db = 0.0;       // transient-recursion tail average
};

/// Runs the Monte Carlo average, the transient moment recursion and the
/// closed-form steady state on one configuration. Throws ConfigError for CTA
/// variants (no theory exists for them).
TheoryComparison compare_theory_simulation(const ExperimentSpec& spec, int variant_index,
                                           long burnin = 100, long tail_iterations = 500,
                                           int jobs = 0);

/// 20-node synthetic sparse scenario: M = 64, stages of 1/16/32 active taps
/// at iterations 0/3000/6000, leaky/LZA/LRZA variants for both strategies at
/// mu = 0.01, gamma = 0.002, rho = 0.0005, eps = 1.
ExperimentSpec scenario_41(std::uint64_t seed, Coloring coloring = Coloring::White);

/// 20-node system-identification scenario: M = 128, AR(0.7) inputs, a highly
/// sparse first segment followed by a frozen synthetic 128-tap acoustic-path
/// stand-in, full algorithm family for both strategies.
ExperimentSpec scenario_42(std::uint64_t seed);

/// 5-node theory-validation scenario: M = 5, w_o = [0 0 1 0 0]^T, white
/// inputs, ATC-LZA anchor variant (mu = 0.03, gamma = 0.001, rho = 0.001).
ExperimentSpec scenario_43(std::uint64_t seed);

/// Anchored parameter sweeps for the 5-node scenario. Kinds: lza-mu,
/// lza-gamma, lza-rho, lrza-mu, lrza-gamma, lrza-rho.
std::vector<AlgorithmVariant> scenario_43_sweep(const std::string& kind);

/// The deterministic 128-tap impulse response scenario_42 uses for its
/// second segment: seeded sparse taps with exponentially decaying envelope,
/// unit norm. Not a reproduction of any measured path.
Eigen::VectorXd synthetic_acoustic_path(int taps, std::uint64_t seed);

inline constexpr std::uint64_t kAcousticPathSeed = 0x5157a7e5u;

} // namespace dlms
