#include "dlms/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dlms/errors.hpp"
#include "dlms/rng.hpp"

namespace dlms::theory {

namespace {

inline double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

inline double db_of(double msd) {
    return msd > 1.0e-32 ? 10.0 * std::log10(msd) : -320.0;
}

Eigen::VectorXd stack_true_vector(const Eigen::VectorXd& w_o, int nodes) {
    Eigen::VectorXd stacked(w_o.size() * nodes);
    for (int k = 0; k < nodes; ++k) stacked.segment(k * w_o.size(), w_o.size()) = w_o;
    return stacked;
}

/// I - (E x E), filled column by column.
Eigen::MatrixXd identity_minus_self_kron(const Eigen::MatrixXd& e) {
    const int n = static_cast<int>(e.rows());
    const int n2 = n * n;
    Eigen::MatrixXd big(n2, n2);
#pragma omp parallel for schedule(static)
    for (int c = 0; c < n2; ++c) {
        const int j = c / n;
        const int q = c % n;
        for (int i = 0; i < n; ++i)
            big.block(i * n, c, n, 1) = -e(i, j) * e.col(q);
    }
    big.diagonal().array() += 1.0;
    return big;
}

struct AttractorMoments {
    Eigen::VectorXd eg;        // E[g(w)]
    Eigen::MatrixXd egg;       // E[g(w) g(w)^T]
    Eigen::MatrixXd ewg;       // E[w g(w)^T]
};

/// Cross moments factor into products of expectations; diagonals are exact
/// for Za (E[sign^2] = 1 at positive variance, E[w sign(w)] = E|w|) and use
/// the ratio approximations for Rza.
AttractorMoments attractor_moments(const GlobalMoments& m, Attractor kind, double eps) {
    const int n = static_cast<int>(m.mean_err.size());
    Eigen::VectorXd eg(n), eabs(n), mean_w(n), variances(n);
    for (int i = 0; i < n; ++i) {
        variances(i) = m.variance(i);
        eabs(i) = expected_abs(m.w_opt(i), m.mean_err(i), variances(i));
        mean_w(i) = m.w_opt(i) - m.mean_err(i);
        const double es = expected_sign(m.w_opt(i), m.mean_err(i), variances(i));
        eg(i) = kind == Attractor::Rza ? es / (1.0 + eps * eabs(i)) : es;
    }

    AttractorMoments out;
    out.eg = eg;
    out.egg = eg * eg.transpose();
    out.ewg = mean_w * eg.transpose();
    for (int i = 0; i < n; ++i) {
        if (variances(i) == 0.0) {
            // degenerate coefficient: g is deterministic
            out.egg(i, i) = eg(i) * eg(i);
            out.ewg(i, i) = mean_w(i) * eg(i);
        } else if (kind == Attractor::Za) {
            out.egg(i, i) = 1.0;
            out.ewg(i, i) = eabs(i);
        } else {
            const double denom = 1.0 + eps * eabs(i);
            out.egg(i, i) = 1.0 / (denom * denom);
            out.ewg(i, i) = eabs(i) / denom;
        }
    }
    return out;
}

} // namespace

StackedOperators make_stacked_operators(const CombinationMatrix& combiner,
                                        const SignalProfile& profile, int taps,
                                        const AlgorithmVariant& variant) {
    if (variant.strategy != Strategy::Atc)
        throw ConfigError("the moment analysis covers ATC variants only");
    variant.params.validate();
    profile.validate();
    const int nodes = combiner.size();
    if (profile.nodes() != nodes)
        throw ConfigError("profile node count does not match combiner");
    if (taps < 1) throw ConfigError("tap count must be positive");

    StackedOperators ops;
    ops.nodes = nodes;
    ops.taps = taps;
    ops.variant = variant;
    const int dim = nodes * taps;

    ops.mixing = Eigen::MatrixXd::Zero(dim, dim);
    for (int k = 0; k < nodes; ++k)
        for (int l = 0; l < nodes; ++l) {
            const double a = combiner.entries(l, k);
            if (a == 0.0) continue;
            for (int m = 0; m < taps; ++m) ops.mixing(k * taps + m, l * taps + m) = a;
        }

    ops.input_var_diag.resize(dim);
    ops.noise_gram_diag.resize(dim);
    for (int k = 0; k < nodes; ++k) {
        const double su = profile.effective_input_variance(k);
        const double gv = su * profile.noise_variances(k);
        for (int m = 0; m < taps; ++m) {
            ops.input_var_diag(k * taps + m) = su;
            ops.noise_gram_diag(k * taps + m) = gv;
        }
    }

    const HyperParams& p = variant.params;
    const Eigen::MatrixXd mixing_t = ops.mixing.transpose();
    ops.A = (1.0 - p.step_size * ops.input_var_diag.array()).matrix().asDiagonal() * mixing_t;
    ops.B = (p.step_size * p.leak) * mixing_t;
    ops.C = p.step_size * mixing_t;
    ops.D = p.attractor_strength * mixing_t;
    return ops;
}

double GlobalMoments::variance(int index) const {
    const double v = second_moment(index, index) - mean_err(index) * mean_err(index);
    if (v < -1e-9) {
        std::ostringstream msg;
        msg << "coefficient " << index << " has variance " << v
            << "; the moment recursion is unstable or mis-assembled";
        throw NumericalError(msg.str());
    }
    return v > 0.0 ? v : 0.0;
}

GlobalMoments GlobalMoments::initial(const Eigen::VectorXd& w_o, int nodes) {
    GlobalMoments m;
    m.w_opt = stack_true_vector(w_o, nodes);
    m.mean_err = m.w_opt;
    m.second_moment = m.w_opt * m.w_opt.transpose();
    return m;
}

double expected_sign(double true_coef, double mean_err, double variance) {
    const double mean = true_coef - mean_err;
    if (variance <= 0.0) return sign_of(mean);
    return std::erf(mean / std::sqrt(2.0 * variance));
}

double expected_abs(double true_coef, double mean_err, double variance) {
    const double mean = true_coef - mean_err;
    if (variance <= 0.0) return std::abs(mean);
    const double sigma = std::sqrt(variance);
    return mean * std::erf(mean / (sigma * std::numbers::sqrt2)) +
           sigma * std::sqrt(2.0 / std::numbers::pi) *
               std::exp(-mean * mean / (2.0 * variance));
}

Eigen::VectorXd expected_attractor(const GlobalMoments& m, Attractor kind, double eps) {
    const int n = static_cast<int>(m.mean_err.size());
    if (kind == Attractor::None) return Eigen::VectorXd::Zero(n);
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) {
        const double var = m.variance(i);
        const double es = expected_sign(m.w_opt(i), m.mean_err(i), var);
        if (kind == Attractor::Za) {
            out(i) = es;
        } else {
            out(i) = es / (1.0 + eps * expected_abs(m.w_opt(i), m.mean_err(i), var));
        }
    }
    return out;
}

Eigen::VectorXd mean_step(const GlobalMoments& m, const StackedOperators& ops) {
    if (m.mean_err.size() != ops.dim()) throw ConfigError("moment size does not match operators");
    const HyperParams& p = ops.variant.params;
    Eigen::VectorXd next = ops.A.transpose() * m.mean_err;
    if (p.leak > 0.0) next.noalias() += ops.B.transpose() * (m.w_opt - m.mean_err);
    if (p.attractor_strength > 0.0 && ops.variant.attractor != Attractor::None) {
        next.noalias() += ops.D.transpose() *
                          expected_attractor(m, ops.variant.attractor, p.reweight_scale);
    }
    return next;
}

Eigen::MatrixXd mean_square_step(const GlobalMoments& m, const StackedOperators& ops,
                                 bool symmetrize) {
    if (m.second_moment.rows() != ops.dim())
        throw ConfigError("moment size does not match operators");
    const HyperParams& p = ops.variant.params;
    const bool with_leak = p.leak > 0.0;
    const bool with_attractor =
        p.attractor_strength > 0.0 && ops.variant.attractor != Attractor::None;

    const Eigen::MatrixXd at = ops.A.transpose();
    Eigen::MatrixXd next = at * m.second_moment * ops.A;
    next.noalias() +=
        ops.C.transpose() * ops.noise_gram_diag.asDiagonal() * ops.C;

    // E[w_err w^T] = E[w_err] w_opt^T - E[w_err w_err^T]
    Eigen::MatrixXd err_w;
    if (with_leak) {
        err_w = m.mean_err * m.w_opt.transpose() - m.second_moment;
        // E[w w^T] = w_opt w_opt^T - w_opt E[w_err]^T - E[w_err] w_opt^T + E[w_err w_err^T]
        Eigen::MatrixXd ww = m.w_opt * m.w_opt.transpose();
        ww.noalias() -= m.w_opt * m.mean_err.transpose();
        ww.noalias() -= m.mean_err * m.w_opt.transpose();
        ww += m.second_moment;
        next.noalias() += ops.B.transpose() * ww * ops.B;
        const Eigen::MatrixXd cross = at * err_w * ops.B;
        next += cross + cross.transpose();
    }

    if (with_attractor) {
        const AttractorMoments g =
            attractor_moments(m, ops.variant.attractor, p.reweight_scale);
        next.noalias() += ops.D.transpose() * g.egg * ops.D;
        // E[w_err g^T] = w_opt E[g]^T - E[w g^T]
        const Eigen::MatrixXd err_g = m.w_opt * g.eg.transpose() - g.ewg;
        const Eigen::MatrixXd cross_a = at * err_g * ops.D;
        next += cross_a + cross_a.transpose();
        if (with_leak) {
            const Eigen::MatrixXd cross_b = ops.B.transpose() * g.ewg * ops.D;
            next += cross_b + cross_b.transpose();
        }
    }

    if (!next.allFinite())
        throw NumericalError("second-moment recursion produced non-finite entries");
    if (symmetrize) next = ((next + next.transpose()) * 0.5).eval();
    return next;
}

void transient_step(GlobalMoments& m, const StackedOperators& ops) {
    Eigen::MatrixXd next_second = mean_square_step(m, ops);
    Eigen::VectorXd next_mean = mean_step(m, ops);
    m.second_moment = std::move(next_second);
    m.mean_err = std::move(next_mean);
}

TransientTrace transient_msd(const StackedOperators& ops, const Eigen::VectorXd& w_o,
                             long iterations) {
    if (ops.dim() > kMaxTransientDim) {
        std::ostringstream msg;
        msg << "transient recursion limited to M*N <= " << kMaxTransientDim
            << " (requested " << ops.dim() << ")";
        throw ConfigError(msg.str());
    }
    if (w_o.size() != ops.taps) throw ConfigError("true vector length does not match taps");
    if (iterations < 1) throw ConfigError("need at least one iteration");

    TransientTrace trace;
    trace.msd.resize(iterations);
    GlobalMoments m = GlobalMoments::initial(w_o, ops.nodes);
    for (long i = 0; i < iterations; ++i) {
        try {
            transient_step(m, ops);
        } catch (const NumericalError&) {
            trace.ok = false;
            trace.failed_iteration = i;
            trace.msd.conservativeResize(i);
            break;
        }
        const double msd = m.msd(ops.nodes);
        trace.msd(i) = msd;
        if (!std::isfinite(msd)) {
            trace.ok = false;
            trace.failed_iteration = i;
            trace.msd.conservativeResize(i + 1);
            break;
        }
    }
    trace.final_moments = std::move(m);
    return trace;
}

Eigen::MatrixXd gaussian_fourth_moment(const Eigen::VectorXd& node_variances, int taps) {
    const int nodes = static_cast<int>(node_variances.size());
    if (nodes < 1 || taps < 1) throw ConfigError("need at least one node and one tap");
    const int n = nodes * taps;
    const int big = n * n;
    Eigen::MatrixXd k4 = Eigen::MatrixXd::Zero(big, big);
    for (int i = 0; i < n; ++i) {
        const int node_i = i / taps, tap_i = i % taps;
        for (int j = 0; j < n; ++j) {
            if (j / taps != node_i) continue;  // first factor vanishes across nodes
            const int tap_j = j % taps;
            for (int p = 0; p < n; ++p) {
                const int node_p = p / taps, tap_p = p % taps;
                for (int q = 0; q < n; ++q) {
                    if (q / taps != node_p) continue;
                    const int tap_q = q % taps;
                    double value;
                    if (node_i != node_p) {
                        value = (tap_i == tap_j && tap_p == tap_q)
                                    ? node_variances(node_i) * node_variances(node_p)
                                    : 0.0;
                    } else {
                        const double s4 = node_variances(node_i) * node_variances(node_i);
                        value = s4 * ((tap_i == tap_j && tap_p == tap_q) +
                                      (tap_i == tap_p && tap_j == tap_q) +
                                      (tap_i == tap_q && tap_j == tap_p));
                    }
                    if (value != 0.0) k4(i * n + p, j * n + q) = value;
                }
            }
        }
    }
    return k4;
}

Eigen::MatrixXd sampled_fourth_moment(const SignalProfile& profile, int taps,
                                      long samples, std::uint64_t seed, int jobs) {
    profile.validate();
    if (taps < 1) throw ConfigError("tap count must be positive");
    if (samples < 1) throw ConfigError("need at least one sample");
    const int nodes = profile.nodes();
    const int n = nodes * taps;
    const int big = n * n;

    auto add_sample = [&](const Eigen::MatrixXd& windows, Eigen::MatrixXd& acc) {
        for (int a = 0; a < nodes; ++a)
            for (int ti = 0; ti < taps; ++ti)
                for (int tj = 0; tj < taps; ++tj) {
                    const double xij = windows(ti, a) * windows(tj, a);
                    const int i = a * taps + ti;
                    const int j = a * taps + tj;
                    for (int b = 0; b < nodes; ++b)
                        for (int tp = 0; tp < taps; ++tp) {
                            const double left = xij * windows(tp, b);
                            for (int tq = 0; tq < taps; ++tq)
                                acc(i * n + b * taps + tp, j * n + b * taps + tq) +=
                                    left * windows(tq, b);
                        }
                }
    };

    if (profile.coloring == Coloring::White) {
        // independent windows per sample, accumulated per fixed-size chunk so
        // the reduction order does not depend on the thread count
        const long chunk_size = 2048;
        const long chunks = (samples + chunk_size - 1) / chunk_size;
        std::vector<Eigen::MatrixXd> partial(chunks);
#ifdef _OPENMP
        const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#else
        const int threads = 1;
        (void)jobs;
#endif
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (long c = 0; c < chunks; ++c) {
            Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(big, big);
            Eigen::MatrixXd windows(taps, nodes);
            const long first = c * chunk_size;
            const long last = std::min(samples, first + chunk_size);
            for (long s = first; s < last; ++s) {
                rng::Xoshiro256pp gen(rng::derive_key(seed, {static_cast<std::uint64_t>(s)}));
                for (int k = 0; k < nodes; ++k) {
                    const double sd = std::sqrt(profile.input_variances(k));
                    for (int m = 0; m < taps; ++m) windows(m, k) = sd * gen.gaussian();
                }
                add_sample(windows, acc);
            }
            partial[c] = std::move(acc);
        }
        Eigen::MatrixXd total = Eigen::MatrixXd::Zero(big, big);
        for (long c = 0; c < chunks; ++c) total += partial[c];
        return total / static_cast<double>(samples);
    }

    // colored inputs: time-average one stationary stream per node
    std::vector<RegressorStream> streams;
    std::vector<rng::Xoshiro256pp> gens;
    for (int k = 0; k < nodes; ++k) {
        streams.emplace_back(taps, profile.input_variances(k), profile.coloring,
                             profile.ar_pole);
        gens.emplace_back(rng::derive_key(seed, {0xc0103edULL, static_cast<std::uint64_t>(k)}));
    }
    const long warmup = taps + static_cast<long>(20.0 / (1.0 - std::abs(profile.ar_pole)));
    Eigen::MatrixXd windows(taps, nodes);
    for (long s = 0; s < warmup; ++s)
        for (int k = 0; k < nodes; ++k) streams[k].next(gens[k]);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(big, big);
    for (long s = 0; s < samples; ++s) {
        for (int k = 0; k < nodes; ++k) windows.col(k) = streams[k].next(gens[k]);
        add_sample(windows, acc);
    }
    return acc / static_cast<double>(samples);
}

double spectral_radius(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigenvalue computation failed");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

StabilityBounds stability_bounds(const StackedOperators& ops,
                                 const Eigen::MatrixXd& fourth_moment) {
    const int n = ops.dim();
    const int big = n * n;
    if (n > 32)
        throw ConfigError("stability bounds limited to M*N <= 32 "
                          "(the companion eigenproblem is dense of size 2(MN)^2)");
    if (fourth_moment.rows() != big || fourth_moment.cols() != big)
        throw ConfigError("fourth moment has wrong dimensions");
    const double gamma = ops.variant.params.leak;
    const Eigen::VectorXd& s = ops.input_var_diag;

    StabilityBounds bounds;
    bounds.mean_bound = (2.0 - gamma) / s.maxCoeff();

    Eigen::VectorXd j_diag(big);
    for (int i = 0; i < n; ++i)
        for (int p = 0; p < n; ++p) j_diag(i * n + p) = s(i) + s(p) + 2.0 * gamma;
    if (j_diag.minCoeff() <= 0.0)
        throw NumericalError("J is singular; input variances must be positive");

    Eigen::MatrixXd k_mat = fourth_moment;
    for (int i = 0; i < n; ++i)
        for (int p = 0; p < n; ++p)
            k_mat(i * n + p, i * n + p) += gamma * gamma + gamma * (s(i) + s(p));

    // lambda_max(J^-1 K) through the symmetric similarity J^-1/2 K J^-1/2
    const Eigen::VectorXd j_inv_sqrt = j_diag.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd k_sym = j_inv_sqrt.asDiagonal() * k_mat * j_inv_sqrt.asDiagonal();
    k_sym = ((k_sym + k_sym.transpose()) * 0.5).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sym_solver(k_sym,
                                                              Eigen::EigenvaluesOnly);
    if (sym_solver.info() != Eigen::Success)
        throw NumericalError("eigenvalue computation for J^-1 K failed");
    const double lambda_quad = sym_solver.eigenvalues().maxCoeff();
    bounds.ms_bound_quadratic = lambda_quad > 0.0
                                    ? 1.0 / lambda_quad
                                    : std::numeric_limits<double>::infinity();

    // companion matrix H = [[J/2, -K/2], [I, 0]]
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * big, 2 * big);
    h.topLeftCorner(big, big) = (0.5 * j_diag).asDiagonal();
    h.topRightCorner(big, big) = -0.5 * k_mat;
    h.bottomLeftCorner(big, big).setIdentity();
    Eigen::EigenSolver<Eigen::MatrixXd> h_solver(h, false);
    if (h_solver.info() != Eigen::Success)
        throw NumericalError("eigenvalue computation for the companion matrix failed");
    const auto h_eigs = h_solver.eigenvalues();
    const double h_radius = h_eigs.cwiseAbs().maxCoeff();
    const double imag_tol = 1e-9 * std::max(h_radius, 1.0);
    double max_positive_real = 0.0;
    for (int i = 0; i < h_eigs.size(); ++i) {
        if (std::abs(h_eigs(i).imag()) <= imag_tol && h_eigs(i).real() > imag_tol)
            max_positive_real = std::max(max_positive_real, h_eigs(i).real());
    }
    bounds.ms_bound_companion = max_positive_real > 0.0
                                    ? 1.0 / max_positive_real
                                    : std::numeric_limits<double>::infinity();

    bounds.ms_bound = std::min(bounds.ms_bound_quadratic, bounds.ms_bound_companion);
    bounds.combined = std::min(bounds.mean_bound, bounds.ms_bound);
    return bounds;
}

double trace_via_vec(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols() || x.rows() != x.cols())
        throw ConfigError("trace_via_vec needs square matrices of equal size");
    return x.cwiseProduct(y).sum();
}

namespace {

SteadyState steady_state_impl(const StackedOperators& ops, const Eigen::VectorXd& w_o,
                              bool leaky_reduced) {
    const int n = ops.dim();
    if (n > kMaxSteadyStateDim) {
        std::ostringstream msg;
        msg << "steady-state closed form limited to M*N <= " << kMaxSteadyStateDim
            << " (requested " << n << ")";
        throw ConfigError(msg.str());
    }
    if (w_o.size() != ops.taps) throw ConfigError("true vector length does not match taps");
    const HyperParams& p = ops.variant.params;
    if (leaky_reduced && p.attractor_strength != 0.0)
        throw ConfigError("the reduced leaky path requires rho = 0");

    const Eigen::MatrixXd homogeneous = ops.A - ops.B;
    SteadyState ss;
    ss.spectral_radius = spectral_radius(homogeneous);
    if (ss.spectral_radius >= 1.0) {
        std::ostringstream msg;
        msg << "moment recursion is unstable (spectral radius "
            << ss.spectral_radius << " >= 1)";
        throw NumericalError(msg.str());
    }

    const Eigen::VectorXd w_opt = stack_true_vector(w_o, ops.nodes);
    const bool with_attractor = !leaky_reduced && p.attractor_strength > 0.0 &&
                                ops.variant.attractor != Attractor::None;
    const Eigen::VectorXd g_o =
        with_attractor ? zero_attractor(w_opt, ops.variant.attractor, p.reweight_scale)
                       : Eigen::VectorXd::Zero(n).eval();

    // mean fixed point: (I - A^T + B^T) m = B^T w_opt + D^T g(w_o)
    Eigen::MatrixXd mean_system = Eigen::MatrixXd::Identity(n, n) - homogeneous.transpose();
    Eigen::VectorXd rhs = ops.B.transpose() * w_opt;
    if (with_attractor) rhs.noalias() += ops.D.transpose() * g_o;
    const Eigen::VectorXd mean_err = mean_system.partialPivLu().solve(rhs);
    ss.mean_err = mean_err;

    // z with z^T = vec(I)^T (I - E^T x E^T)^-1, via (I - E x E) z = vec(I)
    Eigen::MatrixXd system = identity_minus_self_kron(homogeneous);
    Eigen::VectorXd vec_identity =
        Eigen::MatrixXd::Identity(n, n).reshaped();
    const Eigen::VectorXd z = system.partialPivLu().solve(vec_identity);
    if (!z.allFinite()) throw NumericalError("steady-state trace system is singular");
    const Eigen::MatrixXd z_mat = z.reshaped(n, n);

    // driving terms of the second-moment recursion at the fixed point
    const Eigen::MatrixXd at = ops.A.transpose();
    const Eigen::MatrixXd bt = ops.B.transpose();
    Eigen::MatrixXd v =
        ops.C.transpose() * ops.noise_gram_diag.asDiagonal() * ops.C;
    if (p.leak > 0.0) {
        Eigen::MatrixXd ww = w_opt * w_opt.transpose();
        ww.noalias() -= w_opt * mean_err.transpose();
        ww.noalias() -= mean_err * w_opt.transpose();
        v.noalias() += bt * ww * ops.B;
        v.noalias() += at * (mean_err * w_opt.transpose()) * ops.B;
        v.noalias() += bt * (w_opt * mean_err.transpose()) * ops.A;
    }
    if (with_attractor) {
        const Eigen::MatrixXd dt = ops.D.transpose();
        const Eigen::VectorXd mean_w = w_opt - mean_err;  // E[w_inf]
        v.noalias() += dt * (g_o * g_o.transpose()) * ops.D;
        v.noalias() += at * (mean_err * g_o.transpose()) * ops.D;
        v.noalias() += dt * (g_o * mean_err.transpose()) * ops.A;
        if (p.leak > 0.0) {
            v.noalias() += bt * (mean_w * g_o.transpose()) * ops.D;
            v.noalias() += dt * (g_o * mean_w.transpose()) * ops.B;
        }
    }

    const double trace = trace_via_vec(z_mat, v);
    ss.msd = trace / ops.nodes;
    ss.msd_db = db_of(ss.msd);
    return ss;
}

} // namespace

SteadyState steady_state_msd(const StackedOperators& ops, const Eigen::VectorXd& w_o) {
    return steady_state_impl(ops, w_o, false);
}

SteadyState steady_state_msd_leaky(const StackedOperators& ops, const Eigen::VectorXd& w_o) {
    return steady_state_impl(ops, w_o, true);
}

} // namespace dlms::theory
