#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracles {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa, double b,
                double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

double gaussian_density(double x, double mean, double sigma) {
    const double z = (x - mean) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * 2.50662827463100050241576528481);
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a >= b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    return adaptive(f, a, fa, b, fb, m, fm, simpson(a, fa, b, fb, fm), tol, 48);
}

namespace {

/// Integrate over [lo, hi] split into sigma-scaled panels around the density
/// peak (and at zero), so no panel hides the bump between Simpson samples.
double integrate_panels(const std::function<double(double)>& f, double lo, double hi,
                        double mean, double sigma) {
    std::vector<double> knots{lo, hi, 0.0};
    for (double offset : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0})
        knots.push_back(mean + offset * sigma);
    std::sort(knots.begin(), knots.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double a = std::max(lo, knots[i]);
        const double b = std::min(hi, knots[i + 1]);
        if (b > a) total += integrate(f, a, b);
    }
    return total;
}

} // namespace

double quad_expected_sign(double mean, double variance) {
    if (variance <= 0.0) return sign_of(mean);
    const double sigma = std::sqrt(variance);
    auto density = [&](double x) { return gaussian_density(x, mean, sigma); };
    const double lo = mean - 16.0 * sigma;
    const double hi = mean + 16.0 * sigma;
    if (hi <= 0.0) return -1.0;
    if (lo >= 0.0) return 1.0;
    return integrate_panels(density, 0.0, hi, mean, sigma) -
           integrate_panels(density, lo, 0.0, mean, sigma);
}

double quad_expected_abs(double mean, double variance) {
    if (variance <= 0.0) return std::abs(mean);
    const double sigma = std::sqrt(variance);
    auto weighted = [&](double x) { return std::abs(x) * gaussian_density(x, mean, sigma); };
    const double lo = mean - 16.0 * sigma;
    const double hi = mean + 16.0 * sigma;
    return integrate_panels(weighted, lo, hi, mean, sigma);
}

namespace {

double attractor_of(double w, int kind, double eps) {
    if (kind == 0) return 0.0;
    const double s = w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0);
    if (kind == 1) return s;
    return s / (1.0 + eps * std::abs(w));
}

} // namespace

ReferenceAtc::ReferenceAtc(int nodes_in, int taps_in,
                           std::vector<std::vector<double>> combiner_in)
    : nodes(nodes_in),
      taps(taps_in),
      weights(nodes_in, std::vector<double>(taps_in, 0.0)),
      combiner(std::move(combiner_in)) {}

void ReferenceAtc::step(const std::vector<std::vector<double>>& u,
                        const std::vector<double>& d) {
    std::vector<std::vector<double>> phi(nodes, std::vector<double>(taps, 0.0));
    for (int k = 0; k < nodes; ++k) {
        double err = d[k];
        for (int m = 0; m < taps; ++m) err -= u[k][m] * weights[k][m];
        for (int m = 0; m < taps; ++m) {
            phi[k][m] = (1.0 - mu * leak) * weights[k][m] + mu * u[k][m] * err -
                        rho * attractor_of(weights[k][m], attractor, eps);
        }
    }
    for (int k = 0; k < nodes; ++k) {
        for (int m = 0; m < taps; ++m) {
            double sum = 0.0;
            for (int l = 0; l < nodes; ++l) sum += combiner[l][k] * phi[l][m];
            weights[k][m] = sum;
        }
    }
}

ReferenceCta::ReferenceCta(int nodes_in, int taps_in,
                           std::vector<std::vector<double>> combiner_in)
    : nodes(nodes_in),
      taps(taps_in),
      weights(nodes_in, std::vector<double>(taps_in, 0.0)),
      combiner(std::move(combiner_in)) {}

void ReferenceCta::step(const std::vector<std::vector<double>>& u,
                        const std::vector<double>& d) {
    std::vector<std::vector<double>> phi(nodes, std::vector<double>(taps, 0.0));
    for (int k = 0; k < nodes; ++k)
        for (int m = 0; m < taps; ++m) {
            double sum = 0.0;
            for (int l = 0; l < nodes; ++l) sum += combiner[l][k] * weights[l][m];
            phi[k][m] = sum;
        }
    for (int k = 0; k < nodes; ++k) {
        double err = d[k];
        for (int m = 0; m < taps; ++m) err -= u[k][m] * phi[k][m];
        for (int m = 0; m < taps; ++m) {
            weights[k][m] = (1.0 - mu * leak) * phi[k][m] + mu * u[k][m] * err -
                            rho * attractor_of(phi[k][m], attractor, eps);
        }
    }
}

} // namespace oracles
