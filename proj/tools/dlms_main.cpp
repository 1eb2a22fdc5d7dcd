#include <CLI11.hpp>

#include "dlms/cli.hpp"
#include "dlms/config.hpp"

namespace {

void add_common(CLI::App* cmd, dlms::cli::CommonOptions& common) {
    cmd->add_option("-c,--config", common.config_path, "JSON experiment config");
    cmd->add_option("-s,--scenario", common.scenario,
                    "scenario preset (see `dlms list-scenarios`)");
    cmd->add_option("--iterations", common.iterations, "override iteration count");
    cmd->add_option("--trials", common.trials, "override trial count");
    cmd->add_option("--seed", common.seed, "override master seed");
    cmd->add_option("-j,--jobs", common.jobs, "worker threads (default: all cores)");
    cmd->add_option("--output-dir", common.output_dir,
                    "output directory (default: $DLMS_OUTPUT_DIR or '.')");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"diffusion LMS simulation and analysis toolkit"};
    app.require_subcommand(1);

    dlms::cli::SimulateOptions simulate;
    auto* sim_cmd = app.add_subcommand("simulate", "run a Monte Carlo experiment");
    add_common(sim_cmd, simulate.common);
    sim_cmd->add_option("-o,--output", simulate.output_csv, "MSD CSV filename");
    sim_cmd->add_option("--weights-csv", simulate.weights_csv,
                        "also dump the first trial's weight history");
    sim_cmd->add_flag("--strict", simulate.strict, "nonzero exit on any divergence");

    dlms::cli::TheoryOptions theory;
    auto* theory_cmd =
        app.add_subcommand("theory", "transient and steady-state moment predictions");
    add_common(theory_cmd, theory.common);
    theory_cmd->add_option("-o,--output", theory.output_csv, "theory CSV filename");
    theory_cmd->add_option("--variant", theory.variant_index, "variant index (default 0)");
    theory_cmd->add_flag("--mean-errors", theory.mean_error_columns,
                         "emit per-coefficient mean-error columns");

    dlms::cli::StabilityOptions stability;
    auto* stab_cmd = app.add_subcommand("stability", "step-size stability bounds");
    add_common(stab_cmd, stability.common);
    stab_cmd->add_option("--variant", stability.variant_index, "variant index (default 0)");
    stab_cmd->add_flag("--empirical", stability.empirical,
                       "bisect an empirical divergence threshold by simulation");
    stab_cmd->add_option("--empirical-trials", stability.empirical_trials,
                         "trials per probe (default 5)");
    stab_cmd->add_option("--empirical-iterations", stability.empirical_iterations,
                         "iterations per probe (default 2000)");
    stab_cmd->add_option("--fourth-moment-samples", stability.fourth_moment_samples,
                         "samples for the colored-input estimator");

    dlms::cli::PlotOptions plot;
    auto* plot_cmd = app.add_subcommand("plot", "emit a gnuplot script for a result CSV");
    plot_cmd->add_option("csv", plot.csv_path, "CSV produced by this tool")->required();
    plot_cmd->add_option("-o,--output", plot.output_script, "script path (default: <csv>.gp)");
    plot_cmd->add_option("--image", plot.output_image, "image path (default: <csv>.png)");

    dlms::cli::ValidateOptions validate;
    auto* val_cmd = app.add_subcommand("validate", "check a config or topology file");
    add_common(val_cmd, validate.common);
    val_cmd->add_option("--topology", validate.topology_path, "edge-list file to check");

    auto* list_cmd = app.add_subcommand("list-scenarios", "print scenario presets");

    CLI11_PARSE(app, argc, argv);

    if (sim_cmd->parsed()) return dlms::cli::run_simulate(simulate);
    if (theory_cmd->parsed()) return dlms::cli::run_theory(theory);
    if (stab_cmd->parsed()) return dlms::cli::run_stability(stability);
    if (plot_cmd->parsed()) return dlms::cli::run_plot(plot);
    if (val_cmd->parsed()) return dlms::cli::run_validate(validate);
    if (list_cmd->parsed()) {
        for (const auto& name : dlms::preset_names()) std::printf("%s\n", name.c_str());
        return 0;
    }
    return dlms::cli::kExitUsage;
}
