#include "dlms/algorithms.hpp"

#include <cmath>
#include <sstream>

#include "dlms/errors.hpp"

namespace dlms {

namespace {

inline double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

inline double attractor_term(double w, Attractor kind, double eps) {
    switch (kind) {
        case Attractor::None: return 0.0;
        case Attractor::Za: return sign_of(w);
        case Attractor::Rza: return sign_of(w) / (1.0 + eps * std::abs(w));
    }
    return 0.0;
}

void check_dimensions(const NetworkState& state, const CombinationMatrix& combiner,
                      const Eigen::MatrixXd& regressors, const Eigen::VectorXd& desired) {
    const auto nodes = state.weights.cols();
    const auto taps = state.weights.rows();
    if (combiner.entries.rows() != nodes || combiner.entries.cols() != nodes)
        throw ConfigError("combiner size does not match network state");
    if (regressors.rows() != taps || regressors.cols() != nodes)
        throw ConfigError("regressor block size does not match network state");
    if (desired.size() != nodes)
        throw ConfigError("desired vector length does not match node count");
}

} // namespace

void HyperParams::validate() const {
    if (!(step_size > 0.0)) throw ConfigError("step size mu must be > 0");
    if (leak < 0.0) throw ConfigError("leak factor gamma must be >= 0");
    if (attractor_strength < 0.0) throw ConfigError("attractor strength rho must be >= 0");
    if (!(reweight_scale > 0.0)) throw ConfigError("reweight scale epsilon must be > 0");
}

std::string to_string(Strategy s) { return s == Strategy::Atc ? "atc" : "cta"; }

std::string to_string(Attractor a) {
    switch (a) {
        case Attractor::None: return "none";
        case Attractor::Za: return "za";
        case Attractor::Rza: return "rza";
    }
    return "none";
}

std::string AlgorithmVariant::label() const {
    if (!name.empty()) return name;
    std::ostringstream out;
    out << to_string(strategy) << "_";
    const bool leaky = params.leak > 0.0;
    switch (attractor) {
        case Attractor::None: out << (leaky ? "leaky_dlms" : "dlms"); break;
        case Attractor::Za: out << (leaky ? "lza_dlms" : "za_dlms"); break;
        case Attractor::Rza: out << (leaky ? "lrza_dlms" : "rza_dlms"); break;
    }
    return out.str();
}

NetworkState NetworkState::zeros(int taps, int nodes) {
    NetworkState s;
    s.weights = Eigen::MatrixXd::Zero(taps, nodes);
    s.intermediates = Eigen::MatrixXd::Zero(taps, nodes);
    s.iteration = 0;
    return s;
}

Eigen::VectorXd zero_attractor(const Eigen::VectorXd& w, Attractor kind, double eps) {
    return w.unaryExpr([kind, eps](double x) { return attractor_term(x, kind, eps); });
}

void atc_step(NetworkState& state, const CombinationMatrix& combiner,
              const AlgorithmVariant& variant, const Eigen::MatrixXd& regressors,
              const Eigen::VectorXd& desired) {
    check_dimensions(state, combiner, regressors, desired);
    const HyperParams& p = variant.params;
    const double keep = 1.0 - p.step_size * p.leak;
    const int nodes = static_cast<int>(state.weights.cols());

    for (int k = 0; k < nodes; ++k) {
        const auto u = regressors.col(k);
        const auto w = state.weights.col(k);
        const double err = desired(k) - u.dot(w);
        state.intermediates.col(k) = keep * w + (p.step_size * err) * u;
        if (variant.attractor != Attractor::None && p.attractor_strength != 0.0) {
            state.intermediates.col(k) -=
                p.attractor_strength *
                w.unaryExpr([&](double x) { return attractor_term(x, variant.attractor, p.reweight_scale); });
        }
    }
    state.weights.noalias() = state.intermediates * combiner.entries;
    ++state.iteration;
}

void cta_step(NetworkState& state, const CombinationMatrix& combiner,
              const AlgorithmVariant& variant, const Eigen::MatrixXd& regressors,
              const Eigen::VectorXd& desired) {
    check_dimensions(state, combiner, regressors, desired);
    const HyperParams& p = variant.params;
    const double keep = 1.0 - p.step_size * p.leak;
    const int nodes = static_cast<int>(state.weights.cols());

    state.intermediates.noalias() = state.weights * combiner.entries;
    for (int k = 0; k < nodes; ++k) {
        const auto u = regressors.col(k);
        const auto phi = state.intermediates.col(k);
        const double err = desired(k) - u.dot(phi);
        state.weights.col(k) = keep * phi + (p.step_size * err) * u;
        if (variant.attractor != Attractor::None && p.attractor_strength != 0.0) {
            state.weights.col(k) -=
                p.attractor_strength *
                phi.unaryExpr([&](double x) { return attractor_term(x, variant.attractor, p.reweight_scale); });
        }
    }
    ++state.iteration;
}

void step(NetworkState& state, const CombinationMatrix& combiner,
          const AlgorithmVariant& variant, const Eigen::MatrixXd& regressors,
          const Eigen::VectorXd& desired) {
    if (variant.strategy == Strategy::Atc)
        atc_step(state, combiner, variant, regressors, desired);
    else
        cta_step(state, combiner, variant, regressors, desired);
}

const Eigen::VectorXd& TrueVectorSchedule::at(long iteration) const {
    const Eigen::VectorXd* current = &stages.front().second;
    for (const auto& [start, vec] : stages) {
        if (start > iteration) break;
        current = &vec;
    }
    return *current;
}

void TrueVectorSchedule::validate(int taps) const {
    if (stages.empty()) throw ConfigError("schedule needs at least one stage");
    if (stages.front().first != 0) throw ConfigError("first schedule stage must start at 0");
    long prev = -1;
    for (const auto& [start, vec] : stages) {
        if (start <= prev) throw ConfigError("schedule stage starts must be strictly increasing");
        if (vec.size() != taps) throw ConfigError("schedule stage length does not match tap count");
        prev = start;
    }
}

TrialDataSource::TrialDataSource(const SignalProfile& profile, int taps,
                                 std::uint64_t master_seed, long trial_index) {
    const int nodes = profile.nodes();
    noise_std_ = profile.noise_variances.array().sqrt();
    streams_.reserve(nodes);
    input_gens_.reserve(nodes);
    noise_gens_.reserve(nodes);
    const auto trial = static_cast<std::uint64_t>(trial_index);
    for (int k = 0; k < nodes; ++k) {
        streams_.emplace_back(taps, profile.input_variances(k), profile.coloring,
                              profile.ar_pole);
        input_gens_.emplace_back(
            rng::substream_key(master_seed, trial, k, rng::StreamRole::Input));
        noise_gens_.emplace_back(
            rng::substream_key(master_seed, trial, k, rng::StreamRole::Noise));
    }
}

void TrialDataSource::fill(const Eigen::VectorXd& w_true, Eigen::MatrixXd& regressors,
                           Eigen::VectorXd& desired) {
    const int nodes = static_cast<int>(streams_.size());
    for (int k = 0; k < nodes; ++k)
        regressors.col(k) = streams_[k].next(input_gens_[k]);
    for (int k = 0; k < nodes; ++k)
        desired(k) = regressors.col(k).dot(w_true) + noise_std_(k) * noise_gens_[k].gaussian();
}

TrialResult run_trial(const TrialSpec& spec) {
    if (!spec.topology || !spec.combiner || !spec.profile || !spec.schedule)
        throw ConfigError("trial spec is missing a component");
    if (spec.iterations < 1) throw ConfigError("trial needs at least one iteration");
    spec.variant.params.validate();
    spec.profile->validate();
    spec.schedule->validate(spec.taps);
    const int nodes = spec.topology->node_count;
    if (spec.profile->nodes() != nodes)
        throw ConfigError("profile node count does not match topology");

    TrialDataSource source(*spec.profile, spec.taps, spec.master_seed, spec.trial_index);
    NetworkState state = NetworkState::zeros(spec.taps, nodes);
    Eigen::MatrixXd regressors(spec.taps, nodes);
    Eigen::VectorXd desired(nodes);

    TrialResult result;
    result.msd.resize(spec.iterations);
    if (spec.record_weights)
        result.weight_history.resize(spec.iterations, static_cast<long>(nodes) * spec.taps);

    for (long i = 0; i < spec.iterations; ++i) {
        const Eigen::VectorXd& w_true = spec.schedule->at(i);
        source.fill(w_true, regressors, desired);
        step(state, *spec.combiner, spec.variant, regressors, desired);

        double msd = 0.0;
        for (int k = 0; k < nodes; ++k)
            msd += (w_true - state.weights.col(k)).squaredNorm();
        msd /= nodes;
        result.msd(i) = msd;
        if (!std::isfinite(msd)) {
            result.diverged = true;
            result.divergence_iteration = i;
            result.msd.conservativeResize(i + 1);
            if (spec.record_weights)
                result.weight_history.conservativeResize(i + 1, Eigen::NoChange);
            return result;
        }
        if (spec.record_weights)
            result.weight_history.row(i) = state.weights.reshaped().transpose();
    }
    return result;
}

} // namespace dlms
