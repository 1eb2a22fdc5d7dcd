#include "dlms/signal.hpp"

#include <cmath>

#include "dlms/errors.hpp"

namespace dlms {

double SignalProfile::effective_input_variance(int k) const {
    const double v = input_variances(k);
    if (coloring == Coloring::Ar1) return v / (1.0 - ar_pole * ar_pole);
    return v;
}

void SignalProfile::validate() const {
    if (input_variances.size() == 0 || input_variances.size() != noise_variances.size())
        throw ConfigError("signal profile needs matching, non-empty variance vectors");
    if ((input_variances.array() <= 0.0).any())
        throw ConfigError("input variances must be strictly positive");
    // zero is allowed: a noiseless node is a meaningful degenerate case
    if ((noise_variances.array() < 0.0).any())
        throw ConfigError("noise variances must be nonnegative");
    if (coloring == Coloring::Ar1 && !(std::abs(ar_pole) < 1.0))
        throw ConfigError("AR(1) pole must satisfy |a| < 1");
}

SignalProfile sample_profile(int n, std::pair<double, double> input_range,
                             std::pair<double, double> noise_range, std::uint64_t seed) {
    if (n < 1) throw ConfigError("profile needs at least one node");
    auto check = [](std::pair<double, double> r, const char* what) {
        if (!(r.first > 0.0) || r.second < r.first)
            throw ConfigError(std::string(what) + " range must satisfy 0 < lo <= hi");
    };
    check(input_range, "input variance");
    check(noise_range, "noise variance");

    rng::Xoshiro256pp gen(rng::derive_key(seed, {0x70726f66ULL}));
    SignalProfile p;
    p.input_variances.resize(n);
    p.noise_variances.resize(n);
    for (int k = 0; k < n; ++k) p.input_variances(k) = gen.uniform(input_range.first, input_range.second);
    for (int k = 0; k < n; ++k) p.noise_variances(k) = gen.uniform(noise_range.first, noise_range.second);
    return p;
}

RegressorStream::RegressorStream(int taps, double variance, Coloring coloring, double pole)
    : window_(Eigen::VectorXd::Zero(taps)),
      stddev_(std::sqrt(variance)),
      coloring_(coloring),
      pole_(pole) {
    if (taps < 1) throw ConfigError("regressor stream needs at least one tap");
    if (!(variance > 0.0)) throw ConfigError("input variance must be positive");
    if (coloring_ == Coloring::Ar1 && !(std::abs(pole_) < 1.0))
        throw ConfigError("AR(1) pole must satisfy |a| < 1");
}

const Eigen::VectorXd& RegressorStream::next(rng::Xoshiro256pp& gen) {
    double sample = stddev_ * gen.gaussian();
    if (coloring_ == Coloring::Ar1) {
        sample += pole_ * prev_output_;
        prev_output_ = sample;
    }
    const int m = static_cast<int>(window_.size());
    for (int i = m - 1; i > 0; --i) window_(i) = window_(i - 1);
    window_(0) = sample;
    return window_;
}

double desired_sample(const Eigen::VectorXd& u, const Eigen::VectorXd& w,
                      double noise_std, rng::Xoshiro256pp& gen) {
    if (u.size() != w.size()) throw ConfigError("regressor and weight lengths differ");
    if (noise_std < 0.0) throw ConfigError("noise standard deviation must be >= 0");
    return u.dot(w) + noise_std * gen.gaussian();
}

} // namespace dlms
