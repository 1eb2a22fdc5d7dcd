#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dlms/experiments.hpp"

namespace dlms {

/// Textual experiment description. Every field has a documented default and
/// unknown keys are rejected at parse time. A RunConfig either names a
/// scenario preset or spells the experiment out; build_spec resolves both to
/// the same ExperimentSpec, and config_from_spec reverses the mapping into a
/// fully explicit config for output metadata.
struct RunConfig {
    std::string scenario;  // preset name ("4.1", "4.3-lza-mu", ...) or empty

    struct TopologyCfg {
        std::string type = "geometric";  // geometric | full | ring | edges | file
        int nodes = 20;
        double radius = 0.35;            // geometric only
        std::uint64_t seed = 7;          // geometric only
        std::vector<std::pair<int, int>> edges;  // 1-indexed, edges only
        std::string path;                // file only
    } topology;

    std::string combiner = "uniform";    // uniform | metropolis

    struct SignalCfg {
        // explicit per-node variances win over the sampled ranges
        std::vector<double> input_variances;
        std::vector<double> noise_variances;
        std::pair<double, double> input_range{0.8, 1.2};
        std::pair<double, double> noise_range{0.01, 0.05};
        std::uint64_t seed = 0;          // 0: derived from the master seed
        std::string coloring = "white";  // white | ar1
        double ar_pole = 0.7;
    } signal;

    int taps = 5;

    struct SystemCfg {
        std::string type = "vector";     // vector | stages | sparsity
        std::vector<double> values;      // type vector
        std::vector<std::pair<long, std::vector<double>>> stages;  // type stages
        std::vector<SparsityScenario::Stage> sparsity_stages;      // type sparsity
        bool nested = true;
        std::uint64_t seed = 0;          // 0: derived from the master seed
    } system;

    struct VariantCfg {
        std::string strategy = "atc";    // atc | cta
        std::string attractor = "none";  // none | za | rza
        double mu = 0.01;
        double gamma = 0.0;
        double rho = 0.0;
        double epsilon = 1.0;
        std::string name;                // optional column label
    };
    std::vector<VariantCfg> variants;

    long iterations = 3000;
    int trials = 100;
    std::uint64_t seed = 1;
    double tail_fraction = 0.1;

    /// Which override-able fields the source document set explicitly; only
    /// consulted when the config names a scenario preset.
    struct Present {
        bool iterations = false;
        bool trials = false;
        bool tail_fraction = false;
        bool variants = false;
    } present;
};

/// Strict parse: any key outside the schema raises ConfigError naming it.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);
RunConfig load_config(const std::string& path);

/// Resolve a config (preset or explicit fields) into a runnable spec.
/// Override fields (iterations, trials, seed, variants) replace the preset's
/// values when the config sets them explicitly alongside a scenario name.
ExperimentSpec build_spec(const RunConfig& c);

/// Fully explicit echo of a spec: edge-list topology, per-node variances,
/// stage vectors. build_spec(config_from_spec(s)) reproduces s.
RunConfig config_from_spec(const ExperimentSpec& s);

/// Names accepted in RunConfig::scenario / --scenario.
std::vector<std::string> preset_names();
ExperimentSpec preset_spec(const std::string& name, std::uint64_t seed);

} // namespace dlms
