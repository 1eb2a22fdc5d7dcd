#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "dlms/algorithms.hpp"
#include "dlms/combiner.hpp"
#include "dlms/signal.hpp"

namespace dlms::theory {

/// Stacked network-wide operators for the moment recursions of the ATC
/// family. With N nodes and M taps, everything lives in dimension MN and the
/// stacking order is col{w_1, ..., w_N}.
///
/// mixing is the operator that maps stacked intermediates to stacked
/// combined weights: block (k,l) equals a(l,k) * I_M for the combiner whose
/// column k weights node k's neighborhood. Its defining property is
/// mixing * col{x, ..., x} = col{x, ..., x} for any x.
///
/// The derived operators are
///   A = (I - mu * S_u) * mixing^T,  B = mu * gamma * mixing^T,
///   C = mu * mixing^T,              D = rho * mixing^T,
/// with S_u = E[U^T U] the diagonal of per-node input variances.
struct StackedOperators {
    int nodes = 0;
    int taps = 0;
    AlgorithmVariant variant;          // strategy must be Atc
    Eigen::MatrixXd mixing;            // MN x MN
    Eigen::VectorXd input_var_diag;    // MN entries of S_u
    Eigen::VectorXd noise_gram_diag;   // MN entries of E[U^T v v^T U]
    Eigen::MatrixXd A, B, C, D;        // MN x MN

    int dim() const { return nodes * taps; }
};

/// Build the stacked operators from a combiner, a signal profile and the
/// variant hyperparameters. Colored profiles contribute their effective
/// stationary variances; the analysis itself assumes white regressors, so
/// predictions for colored inputs are approximations. Throws ConfigError for
/// CTA variants (the analysis covers the ATC family only).
StackedOperators make_stacked_operators(const CombinationMatrix& combiner,
                                        const SignalProfile& profile, int taps,
                                        const AlgorithmVariant& variant);

/// First and second moments of the stacked weight error vector, plus the
/// stacked true vector they refer to.
struct GlobalMoments {
    Eigen::VectorXd w_opt;             // col{w_o, ..., w_o}
    Eigen::VectorXd mean_err;          // E[w_err]
    Eigen::MatrixXd second_moment;     // E[w_err w_err^T], symmetric

    /// Per-coefficient variance second_moment(i,i) - mean_err(i)^2, clamped
    /// to 0 down to -1e-9; anything more negative throws NumericalError.
    double variance(int index) const;
    /// Network MSD = trace(second_moment) / N.
    double msd(int nodes) const { return second_moment.trace() / nodes; }

    /// Moments of the zero-initialized filter: the error equals the true
    /// vector deterministically.
    static GlobalMoments initial(const Eigen::VectorXd& w_o, int nodes);
};

/// E[sign(X)] for X ~ N(true_coef - mean_err, variance); the degenerate
/// variance returns sign of the mean with sign(0) = 0.
double expected_sign(double true_coef, double mean_err, double variance);

/// E|X| for the same X (folded-normal mean); degenerate variance returns the
/// absolute mean.
double expected_abs(double true_coef, double mean_err, double variance);

/// Per-coefficient E[g(w)]: expected_sign for Za, and for Rza the ratio
/// approximation expected_sign / (1 + eps * expected_abs).
Eigen::VectorXd expected_attractor(const GlobalMoments& m, Attractor kind, double eps);

/// One step of the mean recursion
///   E[w_err_i] = A^T E[w_err] + B^T (w_opt - E[w_err]) + D^T E[g(w)].
Eigen::VectorXd mean_step(const GlobalMoments& m, const StackedOperators& ops);

/// One step of the second-moment recursion (ten-term sandwich form). The
/// attractor cross moments factor across distinct coefficients into products
/// of first moments; diagonals use the exact folded-normal values for Za and
/// the ratio approximations for Rza. Throws NumericalError on non-finite
/// results.
Eigen::MatrixXd mean_square_step(const GlobalMoments& m, const StackedOperators& ops,
                                 bool symmetrize = true);

/// Advance both moments one iteration (both updates read the old state).
void transient_step(GlobalMoments& m, const StackedOperators& ops);

struct TransientTrace {
    Eigen::VectorXd msd;        // linear scale, one entry per iteration
    bool ok = true;
    long failed_iteration = -1; // first iteration with a non-finite moment
    GlobalMoments final_moments;
};

/// Iterate the transient recursions from the zero-initialized filter.
/// Guarded to MN <= 256.
TransientTrace transient_msd(const StackedOperators& ops, const Eigen::VectorXd& w_o,
                             long iterations);

/// Analytic E[(U^T U) x (U^T U)] for white Gaussian regressors: cross-node
/// blocks factor by spatial independence, same-node blocks follow the
/// Gaussian fourth-moment identity. Result is (MN)^2 x (MN)^2.
Eigen::MatrixXd gaussian_fourth_moment(const Eigen::VectorXd& node_variances, int taps);

/// Sample-mean estimate of the same matrix, usable for colored inputs where
/// no closed form is available. White profiles draw independent windows;
/// colored profiles time-average one stationary stream per node after a
/// warm-up. Deterministic for fixed arguments regardless of thread count.
Eigen::MatrixXd sampled_fourth_moment(const SignalProfile& profile, int taps,
                                      long samples, std::uint64_t seed, int jobs = 0);

struct StabilityBounds {
    double mean_bound = 0.0;          // (2 - gamma) / max input variance
    double ms_bound_quadratic = 0.0;  // 1 / lambda_max(J^-1 K)
    double ms_bound_companion = 0.0;  // 1 / max positive real eigenvalue of H (inf if none)
    double ms_bound = 0.0;            // min of the two mean-square branches
    double combined = 0.0;            // min(mean_bound, ms_bound)
};

/// Step-size stability bounds for the ATC family. fourth_moment is
/// E[(U^T U) x (U^T U)] from either source above. Throws NumericalError if
/// the J diagonal is not strictly positive.
StabilityBounds stability_bounds(const StackedOperators& ops,
                                 const Eigen::MatrixXd& fourth_moment);

/// Largest eigenvalue magnitude of a square real matrix.
double spectral_radius(const Eigen::MatrixXd& m);

struct SteadyState {
    double msd = 0.0;
    double msd_db = 0.0;
    double spectral_radius = 0.0;     // of the homogeneous mean/MS operator A - B
    Eigen::VectorXd mean_err;         // fixed point of the mean recursion
};

/// Closed-form steady-state network MSD. Solves the mean fixed point
///   (I - A^T + B^T) E[w_err] = B^T w_opt + D^T g(w_o),
/// then evaluates the limit of the second-moment recursion with the
/// steady-state attractor approximations g(w_inf) ~ g(w_o). Guarded to
/// MN <= 64; throws NumericalError when the homogeneous operator has
/// spectral radius >= 1.
SteadyState steady_state_msd(const StackedOperators& ops, const Eigen::VectorXd& w_o);

/// Reduced path for the leaky family (rho = 0 required): drops every
/// attractor term before assembly. Must agree with the general path at
/// rho = 0.
SteadyState steady_state_msd_leaky(const StackedOperators& ops, const Eigen::VectorXd& w_o);

/// vec(X)^T vec(Y) = trace(X^T Y); the trace evaluation the steady-state
/// assembly relies on.
double trace_via_vec(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

inline constexpr int kMaxTransientDim = 256;
inline constexpr int kMaxSteadyStateDim = 64;

} // namespace dlms::theory
