#include "dlms/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dlms/errors.hpp"

namespace dlms {

namespace {

std::vector<int> seeded_permutation(int n, rng::Xoshiro256pp& gen) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(gen.next() % static_cast<std::uint64_t>(i + 1));
        std::swap(order[i], order[j]);
    }
    return order;
}

std::vector<std::string> unique_labels(const std::vector<AlgorithmVariant>& variants) {
    std::vector<std::string> labels;
    labels.reserve(variants.size());
    for (const auto& v : variants) {
        std::string label = v.label();
        int suffix = 2;
        while (std::find(labels.begin(), labels.end(), label) != labels.end()) {
            label = v.label() + "_" + std::to_string(suffix++);
        }
        labels.push_back(label);
    }
    return labels;
}

std::string format_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

/// All variants of one trial on identical data; column v gets variant v's
/// trace, diverged[v] is set when that run aborted.
Eigen::MatrixXd run_trial_all_variants(const ExperimentSpec& spec, long trial,
                                       std::vector<char>& diverged) {
    const long iters = spec.iterations;
    const int variants = static_cast<int>(spec.variants.size());
    Eigen::MatrixXd traces = Eigen::MatrixXd::Zero(iters, variants);
    for (int v = 0; v < variants; ++v) {
        TrialSpec ts;
        ts.topology = &spec.topology;
        ts.combiner = &spec.combiner;
        ts.profile = &spec.profile;
        ts.taps = spec.taps;
        ts.variant = spec.variants[v];
        ts.schedule = &spec.schedule;
        ts.iterations = iters;
        ts.master_seed = spec.master_seed;
        ts.trial_index = trial;
        const TrialResult result = run_trial(ts);
        if (result.diverged) {
            diverged[v] = 1;
        } else {
            traces.col(v) = result.msd;
        }
    }
    return traces;
}

MSDReport reduce_trials(const ExperimentSpec& spec,
                        const std::vector<Eigen::MatrixXd>& per_trial,
                        const std::vector<std::vector<char>>& diverged) {
    const int variants = static_cast<int>(spec.variants.size());
    MSDReport report;
    report.variant_labels = unique_labels(spec.variants);
    report.trials = spec.trials;
    report.iterations = spec.iterations;
    report.diverged_trials.assign(variants, 0);
    report.msd.resize(spec.iterations, variants);
    for (int v = 0; v < variants; ++v) {
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(spec.iterations);
        int completed = 0;
        for (int t = 0; t < spec.trials; ++t) {
            if (diverged[t][v]) continue;
            sum += per_trial[t].col(v);
            ++completed;
        }
        report.diverged_trials[v] = spec.trials - completed;
        if (completed > 0) {
            report.msd.col(v) = sum / completed;
        } else {
            report.msd.col(v).setConstant(std::numeric_limits<double>::quiet_NaN());
        }
    }
    return report;
}

} // namespace

TrueVectorSchedule SparsityScenario::build(int taps) const {
    if (stages.empty()) throw ConfigError("sparsity scenario needs at least one stage");
    if (stages.front().start != 0) throw ConfigError("first stage must start at iteration 0");
    long prev_start = -1;
    int prev_active = 0;
    for (const auto& stage : stages) {
        if (stage.start <= prev_start)
            throw ConfigError("stage starts must be strictly increasing");
        if (stage.active < 1 || stage.active > taps)
            throw ConfigError("active position count must lie in [1, taps]");
        if (nested && stage.active < prev_active)
            throw ConfigError("nested stages cannot lose active positions");
        prev_start = stage.start;
        prev_active = stage.active;
    }

    TrueVectorSchedule schedule;
    rng::Xoshiro256pp gen(rng::derive_key(seed, {0x5c4edULL}));
    std::vector<int> shared = seeded_permutation(taps, gen);
    for (std::size_t j = 0; j < stages.size(); ++j) {
        const std::vector<int>& order =
            nested ? shared : (shared = seeded_permutation(taps, gen));
        Eigen::VectorXd w = Eigen::VectorXd::Zero(taps);
        for (int i = 0; i < stages[j].active; ++i) w(order[i]) = 1.0;
        schedule.stages.emplace_back(stages[j].start, std::move(w));
    }
    return schedule;
}

void ExperimentSpec::validate() const {
    if (taps < 1) throw ConfigError("experiment needs at least one tap");
    if (iterations < 1) throw ConfigError("experiment needs at least one iteration");
    if (trials < 1) throw ConfigError("experiment needs at least one trial");
    if (variants.empty()) throw ConfigError("experiment needs at least one variant");
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
        throw ConfigError("tail fraction must lie in (0, 1]");
    profile.validate();
    if (profile.nodes() != topology.node_count)
        throw ConfigError("profile node count does not match topology");
    if (combiner.size() != topology.node_count)
        throw ConfigError("combiner size does not match topology");
    schedule.validate(taps);
    for (const auto& v : variants) v.params.validate();
}

double msd_to_db(double msd) {
    if (std::isnan(msd)) return msd;  // flagged-divergent traces stay NaN
    if (!(msd > 0.0)) return kDbFloor;
    return std::max(10.0 * std::log10(msd), kDbFloor);
}

double steady_state_db(const Eigen::Ref<const Eigen::VectorXd>& linear_trace,
                       long first, long last) {
    if (first < 0 || last >= linear_trace.size() || first > last)
        throw ConfigError("steady-state window out of range");
    const double mean = linear_trace.segment(first, last - first + 1).mean();
    return msd_to_db(mean);
}

std::pair<long, long> tail_window(const ExperimentSpec& spec) {
    // anchor on the last stage that is actually reached by the run
    long stage_start = 0;
    for (const auto& [start, values] : spec.schedule.stages)
        if (start < spec.iterations) stage_start = start;
    const long length = spec.iterations - stage_start;
    const long tail = std::max<long>(1, static_cast<long>(length * spec.tail_fraction));
    return {spec.iterations - tail, spec.iterations - 1};
}

MSDReport run_monte_carlo(const ExperimentSpec& spec, int jobs) {
    spec.validate();
    std::vector<Eigen::MatrixXd> per_trial(spec.trials);
    std::vector<std::vector<char>> diverged(
        spec.trials, std::vector<char>(spec.variants.size(), 0));
#ifdef _OPENMP
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#else
    (void)jobs;
#endif
    for (int t = 0; t < spec.trials; ++t)
        per_trial[t] = run_trial_all_variants(spec, t, diverged[t]);
    return reduce_trials(spec, per_trial, diverged);
}

MSDReport run_monte_carlo_serial(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<Eigen::MatrixXd> per_trial(spec.trials);
    std::vector<std::vector<char>> diverged(
        spec.trials, std::vector<char>(spec.variants.size(), 0));
    for (int t = 0; t < spec.trials; ++t)
        per_trial[t] = run_trial_all_variants(spec, t, diverged[t]);
    return reduce_trials(spec, per_trial, diverged);
}

std::uint64_t trial_data_checksum(const ExperimentSpec& spec, long trial_index) {
    spec.validate();
    const int nodes = spec.topology.node_count;
    TrialDataSource source(spec.profile, spec.taps, spec.master_seed, trial_index);
    Eigen::MatrixXd regressors(spec.taps, nodes);
    Eigen::VectorXd desired(nodes);

    std::uint64_t hash = 1469598103934665603ULL;
    auto absorb = [&hash](double value) {
        std::uint64_t bits;
        std::memcpy(&bits, &value, sizeof(bits));
        for (int byte = 0; byte < 8; ++byte) {
            hash ^= (bits >> (8 * byte)) & 0xffULL;
            hash *= 1099511628211ULL;
        }
    };
    for (long i = 0; i < spec.iterations; ++i) {
        source.fill(spec.schedule.at(i), regressors, desired);
        for (int k = 0; k < nodes; ++k)
            for (int m = 0; m < spec.taps; ++m) absorb(regressors(m, k));
        for (int k = 0; k < nodes; ++k) absorb(desired(k));
    }
    return hash;
}

TheoryComparison compare_theory_simulation(const ExperimentSpec& spec, int variant_index,
                                           long burnin, long tail_iterations, int jobs) {
    spec.validate();
    if (variant_index < 0 || variant_index >= static_cast<int>(spec.variants.size()))
        throw ConfigError("variant index out of range");
    const AlgorithmVariant& variant = spec.variants[variant_index];
    if (variant.strategy != Strategy::Atc)
        throw ConfigError("no theory is available for CTA variants");
    if (spec.schedule.stages.size() != 1)
        throw ConfigError("theory comparison requires a fixed true vector");
    if (burnin < 0 || burnin >= spec.iterations)
        throw ConfigError("burn-in must lie within the iteration range");
    tail_iterations = std::min(tail_iterations, spec.iterations);
    if (tail_iterations < 1) throw ConfigError("tail window must be non-empty");

    TheoryComparison cmp;
    cmp.burnin = burnin;
    cmp.tail_iterations = tail_iterations;
    cmp.report = run_monte_carlo(spec, jobs);
    if (cmp.report.variant_flagged(variant_index))
        throw NumericalError("variant diverged in every trial; nothing to compare");

    const Eigen::VectorXd& w_o = spec.schedule.stages.front().second;
    const theory::StackedOperators ops =
        theory::make_stacked_operators(spec.combiner, spec.profile, spec.taps, variant);
    const theory::TransientTrace transient =
        theory::transient_msd(ops, w_o, spec.iterations);
    if (!transient.ok)
        throw NumericalError("transient moment recursion blew up at iteration " +
                             std::to_string(transient.failed_iteration));
    const theory::SteadyState closed = theory::steady_state_msd(ops, w_o);

    cmp.report.theory_msd = transient.msd;
    cmp.report.theory_labels = {"theory_" + cmp.report.variant_labels[variant_index]};
    cmp.report.theory_steady_state_db = {closed.msd_db};
    cmp.closed_form_db = closed.msd_db;

    const auto sim = cmp.report.msd.col(variant_index);
    cmp.gap_db.resize(spec.iterations);
    double max_gap = 0.0;
    for (long i = 0; i < spec.iterations; ++i) {
        cmp.gap_db(i) = msd_to_db(transient.msd(i)) - msd_to_db(sim(i));
        if (i >= burnin) max_gap = std::max(max_gap, std::abs(cmp.gap_db(i)));
    }
    cmp.max_abs_gap_after_burnin = max_gap;
    cmp.mean_abs_gap_tail =
        cmp.gap_db.tail(tail_iterations).cwiseAbs().mean();
    cmp.sim_tail_db =
        steady_state_db(sim, spec.iterations - tail_iterations, spec.iterations - 1);
    cmp.theory_tail_db = steady_state_db(
        transient.msd, spec.iterations - tail_iterations, spec.iterations - 1);
    return cmp;
}

namespace {

AlgorithmVariant make_variant(Strategy s, Attractor a, double mu, double gamma,
                              double rho, double eps = 1.0) {
    AlgorithmVariant v;
    v.strategy = s;
    v.attractor = a;
    v.params.step_size = mu;
    v.params.leak = gamma;
    v.params.attractor_strength = rho;
    v.params.reweight_scale = eps;
    return v;
}

ExperimentSpec scenario_41_42_base(std::uint64_t seed, int taps) {
    ExperimentSpec s;
    s.topology = random_geometric_topology(20, 0.35, rng::derive_key(seed, {0x101}));
    s.combiner = build_uniform_combiner(s.topology);
    s.profile = sample_profile(20, {0.8, 1.2}, {0.1, 0.3}, rng::derive_key(seed, {0x102}));
    s.taps = taps;
    s.trials = 100;
    s.master_seed = seed;
    return s;
}

} // namespace

ExperimentSpec scenario_41(std::uint64_t seed, Coloring coloring) {
    ExperimentSpec s = scenario_41_42_base(seed, 64);
    s.name = coloring == Coloring::White ? "4.1" : "4.1-colored";
    if (coloring == Coloring::Ar1) {
        s.profile.coloring = Coloring::Ar1;
        s.profile.ar_pole = 0.7;
    }
    s.iterations = 9000;

    SparsityScenario sparsity;
    sparsity.stages = {{0, 1}, {3000, 16}, {6000, 32}};
    sparsity.nested = true;
    sparsity.seed = rng::derive_key(seed, {0x103});
    s.schedule = sparsity.build(s.taps);

    const double mu = 0.01, gamma = 0.002, rho = 0.0005, eps = 1.0;
    for (Strategy strat : {Strategy::Atc, Strategy::Cta}) {
        s.variants.push_back(make_variant(strat, Attractor::None, mu, gamma, 0.0));
        s.variants.push_back(make_variant(strat, Attractor::Za, mu, gamma, rho));
        s.variants.push_back(make_variant(strat, Attractor::Rza, mu, gamma, rho, eps));
    }
    return s;
}

ExperimentSpec scenario_42(std::uint64_t seed) {
    ExperimentSpec s = scenario_41_42_base(seed, 128);
    s.name = "4.2";
    s.profile.coloring = Coloring::Ar1;
    s.profile.ar_pole = 0.7;
    s.iterations = 8000;

    Eigen::VectorXd sparse_path = Eigen::VectorXd::Zero(s.taps);
    sparse_path(0) = 1.0;
    s.schedule.stages.emplace_back(0, std::move(sparse_path));
    s.schedule.stages.emplace_back(4000, synthetic_acoustic_path(s.taps, kAcousticPathSeed));

    const double mu = 0.01, gamma = 0.002, rho = 0.0005, eps = 1.0;
    for (Strategy strat : {Strategy::Atc, Strategy::Cta}) {
        s.variants.push_back(make_variant(strat, Attractor::None, mu, 0.0, 0.0));
        s.variants.push_back(make_variant(strat, Attractor::None, mu, gamma, 0.0));
        s.variants.push_back(make_variant(strat, Attractor::Za, mu, 0.0, rho));
        s.variants.push_back(make_variant(strat, Attractor::Rza, mu, 0.0, rho, eps));
        s.variants.push_back(make_variant(strat, Attractor::Za, mu, gamma, rho));
        s.variants.push_back(make_variant(strat, Attractor::Rza, mu, gamma, rho, eps));
    }
    return s;
}

ExperimentSpec scenario_43(std::uint64_t seed) {
    ExperimentSpec s;
    s.name = "4.3";
    s.topology = random_geometric_topology(5, 0.75, rng::derive_key(seed, {0x104}));
    s.combiner = build_uniform_combiner(s.topology);
    s.profile =
        sample_profile(5, {0.85, 1.15}, {0.003, 0.008}, rng::derive_key(seed, {0x105}));
    s.taps = 5;
    s.iterations = 3000;
    s.trials = 500;
    s.master_seed = seed;

    Eigen::VectorXd w_o = Eigen::VectorXd::Zero(5);
    w_o(2) = 1.0;
    s.schedule.stages.emplace_back(0, std::move(w_o));

    s.variants.push_back(make_variant(Strategy::Atc, Attractor::Za, 0.03, 0.001, 0.001));
    return s;
}

std::vector<AlgorithmVariant> scenario_43_sweep(const std::string& kind) {
    std::vector<AlgorithmVariant> variants;
    auto push = [&variants](Attractor a, double mu, double gamma, double rho,
                            const std::string& swept, double value) {
        AlgorithmVariant v = make_variant(Strategy::Atc, a, mu, gamma, rho, 1.0);
        v.name = v.label() + "_" + swept + format_param(value);
        variants.push_back(std::move(v));
    };
    if (kind == "lza-mu") {
        for (double mu : {0.01, 0.02, 0.03}) push(Attractor::Za, mu, 0.001, 0.005, "mu", mu);
    } else if (kind == "lza-gamma") {
        for (double g : {0.001, 0.01, 0.1}) push(Attractor::Za, 0.03, g, 0.001, "gamma", g);
    } else if (kind == "lza-rho") {
        for (double r : {0.001, 0.003, 0.005}) push(Attractor::Za, 0.03, 0.001, r, "rho", r);
    } else if (kind == "lrza-mu") {
        for (double mu : {0.004, 0.008, 0.012}) push(Attractor::Rza, mu, 0.001, 0.005, "mu", mu);
    } else if (kind == "lrza-gamma") {
        for (double g : {0.001, 0.01, 0.1}) push(Attractor::Rza, 0.008, g, 0.001, "gamma", g);
    } else if (kind == "lrza-rho") {
        for (double r : {0.001, 0.003, 0.005}) push(Attractor::Rza, 0.008, 0.001, r, "rho", r);
    } else {
        throw ConfigError("unknown sweep kind '" + kind + "'");
    }
    return variants;
}

Eigen::VectorXd synthetic_acoustic_path(int taps, std::uint64_t seed) {
    if (taps < 2) throw ConfigError("acoustic path needs at least two taps");
    rng::Xoshiro256pp gen(rng::derive_key(seed, {0xf1eULL}));
    Eigen::VectorXd h = Eigen::VectorXd::Zero(taps);
    h(0) = 1.0;  // direct path
    const int reflections = std::max(8, taps / 8);
    std::vector<int> order = seeded_permutation(taps - 1, gen);
    for (int i = 0; i < reflections && i < taps - 1; ++i) {
        const int pos = 1 + order[i];
        const double amplitude = (0.3 + 0.7 * gen.uniform01()) *
                                 std::exp(-3.0 * pos / taps);
        h(pos) = gen.uniform01() < 0.5 ? -amplitude : amplitude;
    }
    return h / h.norm();
}

} // namespace dlms
