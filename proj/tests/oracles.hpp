#pragma once

// Test-only oracles, deliberately independent of the library implementation:
// the quadrature routines use only exp-based density evaluation (no erf), and
// the reference filters are plain two-pass loops over std::vector.

#include <functional>
#include <vector>

namespace oracles {

/// Recursive adaptive Simpson integration to absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-11);

/// E[sign(X)] and E|X| for X ~ N(mean, variance), by quadrature over the
/// Gaussian density split at zero.
double quad_expected_sign(double mean, double variance);
double quad_expected_abs(double mean, double variance);

/// Straight-line adapt-then-combine diffusion filter: every node adapts from
/// the pre-step weights, then every node averages intermediates. Supports
/// leak and ZA/RZA attractors (attractor: 0 none, 1 ZA, 2 RZA).
struct ReferenceAtc {
    int nodes = 0;
    int taps = 0;
    double mu = 0.0, leak = 0.0, rho = 0.0, eps = 1.0;
    int attractor = 0;
    std::vector<std::vector<double>> weights;            // [node][tap]
    std::vector<std::vector<double>> combiner;           // entry [l][k]

    ReferenceAtc(int nodes, int taps, std::vector<std::vector<double>> combiner);
    void step(const std::vector<std::vector<double>>& u, const std::vector<double>& d);
};

/// Combine-then-adapt counterpart; the attractor acts on the combined value.
struct ReferenceCta {
    int nodes = 0;
    int taps = 0;
    double mu = 0.0, leak = 0.0, rho = 0.0, eps = 1.0;
    int attractor = 0;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> combiner;

    ReferenceCta(int nodes, int taps, std::vector<std::vector<double>> combiner);
    void step(const std::vector<std::vector<double>>& u, const std::vector<double>& d);
};

} // namespace oracles
