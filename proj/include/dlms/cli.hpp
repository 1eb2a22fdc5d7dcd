#pragma once

#include <cstdint>
#include <string>

namespace dlms::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;      // config / usage errors
inline constexpr int kExitNumerical = 2;  // divergence or instability
inline constexpr int kExitIo = 3;         // filesystem errors

/// Options shared by the config-driven subcommands. The config file and the
/// scenario preset are alternatives; flags override whatever they resolve to.
struct CommonOptions {
    std::string config_path;
    std::string scenario;
    long iterations = -1;   // <0: keep resolved value
    int trials = -1;
    std::int64_t seed = -1;
    int jobs = 0;           // <=0: all cores
    std::string output_dir; // empty: $DLMS_OUTPUT_DIR or "."
};

struct SimulateOptions {
    CommonOptions common;
    std::string output_csv = "msd.csv";
    std::string weights_csv;  // when set, dump variant 0 / trial 0 weight history
    bool strict = false;      // nonzero exit when any variant diverged
};

struct TheoryOptions {
    CommonOptions common;
    std::string output_csv = "theory.csv";
    int variant_index = 0;
    bool mean_error_columns = false;
};

struct StabilityOptions {
    CommonOptions common;
    int variant_index = 0;
    bool empirical = false;      // bisect an empirical divergence threshold
    int empirical_trials = 5;
    long empirical_iterations = 2000;
    long fourth_moment_samples = 200000;  // sampled estimator (colored inputs)
};

struct PlotOptions {
    std::string csv_path;
    std::string output_script;  // default: csv path with .gp suffix
    std::string output_image;   // default: csv path with .png suffix
};

struct ValidateOptions {
    CommonOptions common;
    std::string topology_path;  // validate an edge-list file instead of a config
};

int run_simulate(const SimulateOptions& options);
int run_theory(const TheoryOptions& options);
int run_stability(const StabilityOptions& options);
int run_plot(const PlotOptions& options);
int run_validate(const ValidateOptions& options);

} // namespace dlms::cli
