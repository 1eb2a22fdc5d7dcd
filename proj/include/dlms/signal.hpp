#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "dlms/rng.hpp"

namespace dlms {

enum class Coloring { White, Ar1 };

/// Per-node input and noise variances, plus the input coloring model.
/// Input variances are strictly positive; noise variances may be zero
/// (noiseless node). AR(1) coloring y(i) = x(i) + a*y(i-1) is applied
/// without renormalization, so the effective (stationary) input variance
/// becomes sigma^2 / (1 - a^2); effective_input_variance reports it.
struct SignalProfile {
    Eigen::VectorXd input_variances;
    Eigen::VectorXd noise_variances;
    Coloring coloring = Coloring::White;
    double ar_pole = 0.0;  // a, |a| < 1; used only when coloring == Ar1

    int nodes() const { return static_cast<int>(input_variances.size()); }
    double effective_input_variance(int k) const;
    void validate() const;  // throws ConfigError
};

/// Draw per-node variances uniformly from the given [lo, hi] ranges.
/// Deterministic for a fixed (n, ranges, seed).
SignalProfile sample_profile(int n, std::pair<double, double> input_range,
                             std::pair<double, double> noise_range, std::uint64_t seed);

/// Tapped delay line of length M producing the regressor window
/// u_i = [y(i), y(i-1), ..., y(i-M+1)]. The line is zero-initialized, and for
/// AR(1) coloring the recursion state starts at zero as well.
class RegressorStream {
public:
    RegressorStream(int taps, double variance, Coloring coloring = Coloring::White,
                    double pole = 0.0);

    /// Draw one sample, shift it into the delay line, return the window.
    const Eigen::VectorXd& next(rng::Xoshiro256pp& gen);
    const Eigen::VectorXd& window() const { return window_; }

private:
    Eigen::VectorXd window_;
    double stddev_;
    Coloring coloring_;
    double pole_;
    double prev_output_ = 0.0;
};

/// d = u . w + v with v ~ N(0, noise_std^2). Throws ConfigError on length
/// mismatch.
double desired_sample(const Eigen::VectorXd& u, const Eigen::VectorXd& w,
                      double noise_std, rng::Xoshiro256pp& gen);

} // namespace dlms
