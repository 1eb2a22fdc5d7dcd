#include "dlms/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dlms/config.hpp"
#include "dlms/csv.hpp"
#include "dlms/errors.hpp"
#include "dlms/theory.hpp"

namespace dlms::cli {

namespace {

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const IoError*>(&e)) return kExitIo;
    if (dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
    return kExitUsage;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

ExperimentSpec resolve_spec(const CommonOptions& common) {
    RunConfig config;
    if (!common.config_path.empty()) {
        config = load_config(common.config_path);
        if (!common.scenario.empty()) config.scenario = common.scenario;
    } else if (!common.scenario.empty()) {
        config.scenario = common.scenario;
    } else {
        throw ConfigError("either --config or --scenario is required");
    }
    if (common.seed >= 0) config.seed = static_cast<std::uint64_t>(common.seed);
    ExperimentSpec spec = build_spec(config);
    if (common.iterations > 0) spec.iterations = common.iterations;
    if (common.trials > 0) spec.trials = common.trials;
    spec.validate();
    return spec;
}

std::string output_directory(const CommonOptions& common) {
    if (!common.output_dir.empty()) return common.output_dir;
    if (const char* env = std::getenv("DLMS_OUTPUT_DIR"); env && *env) return env;
    return ".";
}

std::string join_path(const std::string& dir, const std::string& file) {
    if (file.empty() || file.front() == '/') return file;
    if (dir.empty() || dir == ".") return file;
    return dir.back() == '/' ? dir + file : dir + "/" + file;
}

csv::Metadata spec_metadata(const ExperimentSpec& spec) {
    csv::Metadata meta;
    meta.emplace_back("tool", "dlms");
    meta.emplace_back("scenario", spec.name);
    meta.emplace_back("seed", std::to_string(spec.master_seed));
    meta.emplace_back("trials", std::to_string(spec.trials));
    meta.emplace_back("iterations", std::to_string(spec.iterations));
    meta.emplace_back("config", config_to_json(config_from_spec(spec)).dump());
    return meta;
}

} // namespace

int run_simulate(const SimulateOptions& options) {
    return guarded([&]() {
        ExperimentSpec spec = resolve_spec(options.common);
        const MSDReport report = run_monte_carlo(spec, options.common.jobs);

        csv::Metadata meta = spec_metadata(spec);
        const auto [tail_first, tail_last] = tail_window(spec);
        for (std::size_t v = 0; v < report.variant_labels.size(); ++v) {
            if (report.variant_flagged(static_cast<int>(v))) continue;
            meta.emplace_back(
                "tail_db_" + report.variant_labels[v],
                csv::format_double(steady_state_db(report.msd.col(v), tail_first, tail_last)));
        }

        const std::string dir = output_directory(options.common);
        const std::string csv_path = join_path(dir, options.output_csv);
        csv::save_msd_csv(csv_path, report, meta);
        std::cout << "wrote " << csv_path << "\n";

        if (!options.weights_csv.empty()) {
            TrialSpec ts;
            ts.topology = &spec.topology;
            ts.combiner = &spec.combiner;
            ts.profile = &spec.profile;
            ts.taps = spec.taps;
            ts.variant = spec.variants.front();
            ts.schedule = &spec.schedule;
            ts.iterations = spec.iterations;
            ts.master_seed = spec.master_seed;
            ts.trial_index = 0;
            ts.record_weights = true;
            const TrialResult trial = run_trial(ts);
            const std::string weights_path = join_path(dir, options.weights_csv);
            std::ofstream out(weights_path);
            if (!out) throw IoError("cannot open '" + weights_path + "' for writing");
            csv::write_weight_history_csv(out, trial, spec.topology.node_count, spec.taps);
            std::cout << "wrote " << weights_path << "\n";
        }

        int divergent_variants = 0;
        for (std::size_t v = 0; v < report.variant_labels.size(); ++v) {
            if (report.diverged_trials[v] > 0) {
                ++divergent_variants;
                std::cerr << "variant " << report.variant_labels[v] << " diverged in "
                          << report.diverged_trials[v] << "/" << report.trials
                          << " trials\n";
            }
        }
        if (options.strict && divergent_variants > 0) return kExitNumerical;
        return kExitOk;
    });
}

int run_theory(const TheoryOptions& options) {
    return guarded([&]() {
        ExperimentSpec spec = resolve_spec(options.common);
        if (options.variant_index < 0 ||
            options.variant_index >= static_cast<int>(spec.variants.size()))
            throw ConfigError("variant index out of range");
        if (spec.schedule.stages.size() != 1)
            throw ConfigError("theory traces require a fixed true vector");
        const AlgorithmVariant& variant = spec.variants[options.variant_index];
        const Eigen::VectorXd& w_o = spec.schedule.stages.front().second;

        const theory::StackedOperators ops =
            theory::make_stacked_operators(spec.combiner, spec.profile, spec.taps, variant);
        const double radius = theory::spectral_radius(ops.A - ops.B);
        if (radius >= 1.0) {
            std::ostringstream msg;
            msg << "unstable configuration: spectral radius " << radius << " >= 1";
            throw NumericalError(msg.str());
        }

        // iterate by hand so the mean history is available on request
        theory::GlobalMoments moments = theory::GlobalMoments::initial(w_o, ops.nodes);
        Eigen::VectorXd msd(spec.iterations);
        Eigen::MatrixXd mean_history;
        if (options.mean_error_columns)
            mean_history.resize(spec.iterations, ops.dim());
        for (long i = 0; i < spec.iterations; ++i) {
            theory::transient_step(moments, ops);
            msd(i) = moments.msd(ops.nodes);
            if (options.mean_error_columns)
                mean_history.row(i) = moments.mean_err.transpose();
        }
        const theory::SteadyState closed = theory::steady_state_msd(ops, w_o);

        csv::Metadata meta = spec_metadata(spec);
        meta.emplace_back("variant", spec.variants[options.variant_index].label());
        meta.emplace_back("steady_state_db", csv::format_double(closed.msd_db));
        meta.emplace_back("spectral_radius", csv::format_double(radius));

        const std::string path =
            join_path(output_directory(options.common), options.output_csv);
        std::ofstream out(path);
        if (!out) throw IoError("cannot open '" + path + "' for writing");
        csv::write_theory_csv(out, msd, meta,
                              options.mean_error_columns ? &mean_history : nullptr,
                              ops.nodes, ops.taps);
        std::cout << "wrote " << path << "\n"
                  << "steady-state MSD: " << csv::format_double(closed.msd_db) << " dB\n";
        return kExitOk;
    });
}

int run_stability(const StabilityOptions& options) {
    return guarded([&]() {
        ExperimentSpec spec = resolve_spec(options.common);
        if (options.variant_index < 0 ||
            options.variant_index >= static_cast<int>(spec.variants.size()))
            throw ConfigError("variant index out of range");
        const AlgorithmVariant& variant = spec.variants[options.variant_index];
        const theory::StackedOperators ops =
            theory::make_stacked_operators(spec.combiner, spec.profile, spec.taps, variant);

        Eigen::MatrixXd fourth;
        if (spec.profile.coloring == Coloring::White) {
            Eigen::VectorXd node_vars(spec.profile.nodes());
            for (int k = 0; k < spec.profile.nodes(); ++k)
                node_vars(k) = spec.profile.effective_input_variance(k);
            fourth = theory::gaussian_fourth_moment(node_vars, spec.taps);
        } else {
            fourth = theory::sampled_fourth_moment(spec.profile, spec.taps,
                                                   options.fourth_moment_samples,
                                                   spec.master_seed, options.common.jobs);
        }
        const theory::StabilityBounds bounds = theory::stability_bounds(ops, fourth);
        std::cout << "mean bound:              " << csv::format_double(bounds.mean_bound) << "\n"
                  << "mean-square (quadratic): "
                  << csv::format_double(bounds.ms_bound_quadratic) << "\n"
                  << "mean-square (companion): "
                  << csv::format_double(bounds.ms_bound_companion) << "\n"
                  << "mean-square bound:       " << csv::format_double(bounds.ms_bound) << "\n"
                  << "combined bound:          " << csv::format_double(bounds.combined) << "\n";

        if (options.empirical) {
            ExperimentSpec probe = spec;
            probe.trials = options.empirical_trials;
            probe.iterations = std::min(spec.iterations, options.empirical_iterations);
            probe.variants = {variant};
            auto diverges = [&](double mu) {
                probe.variants[0].params.step_size = mu;
                const MSDReport r = run_monte_carlo(probe, options.common.jobs);
                if (r.diverged_trials[0] > probe.trials / 2) return true;
                if (r.variant_flagged(0)) return true;
                return r.msd.col(0).maxCoeff() > 1e6;
            };
            double lo = bounds.combined / 16.0;
            double hi = bounds.combined * 16.0;
            if (diverges(lo)) {
                std::cout << "empirical threshold: below " << csv::format_double(lo) << "\n";
                return kExitOk;
            }
            if (!diverges(hi)) {
                std::cout << "empirical threshold: above " << csv::format_double(hi) << "\n";
                return kExitOk;
            }
            for (int i = 0; i < 20; ++i) {
                const double mid = std::sqrt(lo * hi);
                (diverges(mid) ? hi : lo) = mid;
            }
            std::cout << "empirical threshold: " << csv::format_double(std::sqrt(lo * hi))
                      << " (bisection over seeded trials)\n";
        }
        return kExitOk;
    });
}

int run_plot(const PlotOptions& options) {
    return guarded([&]() {
        if (options.csv_path.empty()) throw ConfigError("plot requires a CSV path");
        const csv::ParsedCsv parsed = csv::load_csv(options.csv_path);
        auto with_suffix = [&](const std::string& given, const char* suffix) {
            if (!given.empty()) return given;
            const auto dot = options.csv_path.rfind('.');
            const std::string stem =
                dot == std::string::npos ? options.csv_path : options.csv_path.substr(0, dot);
            return stem + suffix;
        };
        const std::string script_path = with_suffix(options.output_script, ".gp");
        const std::string image_path = with_suffix(options.output_image, ".png");
        const std::string script =
            csv::make_plot_script(options.csv_path, parsed, image_path);
        std::ofstream out(script_path);
        if (!out) throw IoError("cannot open '" + script_path + "' for writing");
        out << script;
        if (!out) throw IoError("failed writing '" + script_path + "'");
        std::cout << "wrote " << script_path << " (run: gnuplot " << script_path << ")\n";
        return kExitOk;
    });
}

int run_validate(const ValidateOptions& options) {
    return guarded([&]() {
        if (!options.topology_path.empty()) {
            const Topology t = load_edge_list(options.topology_path);
            std::cout << "topology: " << t.node_count << " nodes, "
                      << (is_connected(t) ? "connected" : "disconnected") << "\n";
            const ValidationReport report = validate_combiner(build_uniform_combiner(t), t);
            std::cout << "uniform combiner: " << report.to_string() << "\n";
            return report.ok() ? kExitOk : kExitUsage;
        }
        ExperimentSpec spec = resolve_spec(options.common);
        const ValidationReport report = validate_combiner(spec.combiner, spec.topology);
        std::cout << "spec '" << spec.name << "': " << spec.topology.node_count
                  << " nodes, " << spec.taps << " taps, " << spec.variants.size()
                  << " variant(s), " << spec.trials << " trial(s)\n"
                  << "combiner: " << report.to_string() << "\n";
        return report.ok() ? kExitOk : kExitUsage;
    });
}

} // namespace dlms::cli
