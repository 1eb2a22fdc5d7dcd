#include <doctest.h>

#include <cmath>

#include "dlms/algorithms.hpp"
#include "dlms/errors.hpp"
#include "oracles.hpp"

using namespace dlms;

namespace {

AlgorithmVariant variant(Strategy s, Attractor a, double mu, double gamma, double rho,
                         double eps = 1.0) {
    AlgorithmVariant v;
    v.strategy = s;
    v.attractor = a;
    v.params = {mu, gamma, rho, eps};
    return v;
}

CombinationMatrix identity_combiner(int n) {
    CombinationMatrix m;
    m.entries = Eigen::MatrixXd::Identity(n, n);
    return m;
}

std::vector<std::vector<double>> to_nested(const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

} // namespace

TEST_CASE("zero attractor") {
    Eigen::Vector3d w(-2.0, 0.0, 3.0);
    const Eigen::VectorXd za = zero_attractor(w, Attractor::Za, 1.0);
    CHECK(za(0) == -1.0);
    CHECK(za(1) == 0.0);
    CHECK(za(2) == 1.0);

    Eigen::VectorXd one(1);
    one << 1.0;
    CHECK(zero_attractor(one, Attractor::Rza, 1.0)(0) == 0.5);
    one << -0.25;
    CHECK(zero_attractor(one, Attractor::Rza, 1.0)(0) == -0.8);
}

TEST_CASE("single-node ATC with no leak and no attractor is plain LMS") {
    const AlgorithmVariant v = variant(Strategy::Atc, Attractor::None, 0.1, 0.0, 0.0);
    const CombinationMatrix identity = identity_combiner(1);
    NetworkState state = NetworkState::zeros(3, 1);
    rng::Xoshiro256pp gen(17);
    Eigen::VectorXd manual = Eigen::VectorXd::Zero(3);
    Eigen::MatrixXd u(3, 1);
    Eigen::VectorXd d(1);
    for (int i = 0; i < 50; ++i) {
        for (int m = 0; m < 3; ++m) u(m, 0) = gen.gaussian();
        d(0) = gen.gaussian();
        atc_step(state, identity, v, u, d);
        manual += 0.1 * (d(0) - u.col(0).dot(manual)) * u.col(0);
        CHECK((state.weights.col(0) - manual).cwiseAbs().maxCoeff() <= 1e-15);
    }
}

TEST_CASE("mu = 0, rho = 0 reduces both strategies to pure neighbor averaging") {
    const Topology t = ring(4);
    const CombinationMatrix m = build_uniform_combiner(t);
    const Eigen::MatrixXd u = Eigen::MatrixXd::Ones(2, 4);
    const Eigen::VectorXd d = Eigen::VectorXd::Ones(4);
    for (Strategy strat : {Strategy::Atc, Strategy::Cta}) {
        NetworkState state = NetworkState::zeros(2, 4);
        state.weights << 1, 2, 3, 4, -1, 0, 1, 2;
        const Eigen::MatrixXd expected = state.weights * m.entries;
        step(state, m, variant(strat, Attractor::None, 0.0, 0.7, 0.0), u, d);
        CHECK((state.weights - expected).cwiseAbs().maxCoeff() <= 1e-15);
    }
}

TEST_CASE("two-node scalar example evaluates the update exactly") {
    // w = [0.5, 0.2], u = [1, 2], d = [1, 1], mu = 0.1, gamma = 0.01,
    // rho = 0.05 (ZA), uniform combiner on a connected pair
    const CombinationMatrix m = build_uniform_combiner(fully_connected(2));
    const AlgorithmVariant atc = variant(Strategy::Atc, Attractor::Za, 0.1, 0.01, 0.05);
    Eigen::MatrixXd u(1, 2);
    u << 1.0, 2.0;
    const Eigen::VectorXd d = Eigen::VectorXd::Ones(2);

    NetworkState state = NetworkState::zeros(1, 2);
    state.weights << 0.5, 0.2;
    atc_step(state, m, atc, u, d);
    // phi_1 = 0.999*0.5 + 0.1*1*0.5 - 0.05 = 0.4995
    // phi_2 = 0.999*0.2 + 0.1*2*0.6 - 0.05 = 0.2698
    CHECK(state.weights(0, 0) == doctest::Approx(0.38465).epsilon(1e-12));
    CHECK(state.weights(0, 1) == doctest::Approx(0.38465).epsilon(1e-12));

    state = NetworkState::zeros(1, 2);
    state.weights << 0.5, 0.2;
    const AlgorithmVariant cta = variant(Strategy::Cta, Attractor::Za, 0.1, 0.01, 0.05);
    cta_step(state, m, cta, u, d);
    // phi = 0.35 at both nodes; adapt with attractor on phi
    CHECK(state.weights(0, 0) == doctest::Approx(0.36465).epsilon(1e-12));
    CHECK(state.weights(0, 1) == doctest::Approx(0.35965).epsilon(1e-12));
}

TEST_CASE("identity combiner makes ATC and CTA coincide exactly") {
    const CombinationMatrix identity = identity_combiner(3);
    const AlgorithmVariant atc = variant(Strategy::Atc, Attractor::Rza, 0.05, 0.01, 0.002);
    const AlgorithmVariant cta = variant(Strategy::Cta, Attractor::Rza, 0.05, 0.01, 0.002);
    NetworkState sa = NetworkState::zeros(4, 3);
    NetworkState sc = NetworkState::zeros(4, 3);
    rng::Xoshiro256pp gen(23);
    Eigen::MatrixXd u(4, 3);
    Eigen::VectorXd d(3);
    for (int i = 0; i < 50; ++i) {
        for (int m = 0; m < 4; ++m)
            for (int k = 0; k < 3; ++k) u(m, k) = gen.gaussian();
        for (int k = 0; k < 3; ++k) d(k) = gen.gaussian();
        atc_step(sa, identity, atc, u, d);
        cta_step(sc, identity, cta, u, d);
        CHECK((sa.weights - sc.weights).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("attractor-only dynamics shrink weights by rho*|g| without overshoot") {
    const CombinationMatrix identity = identity_combiner(1);
    const double rho = 0.05;
    const Eigen::MatrixXd u = Eigen::MatrixXd::Zero(3, 1);
    const Eigen::VectorXd d = Eigen::VectorXd::Zero(1);
    for (Attractor kind : {Attractor::Za, Attractor::Rza}) {
        NetworkState state = NetworkState::zeros(3, 1);
        state.weights.col(0) << 0.3, -0.07, 0.0;
        // mu = 0 disables adaptation; only the attractor acts
        const AlgorithmVariant v = variant(Strategy::Atc, kind, 0.0, 0.0, rho, 2.0);
        for (int i = 0; i < 20; ++i) {
            const Eigen::VectorXd before = state.weights.col(0);
            const Eigen::VectorXd g = zero_attractor(before, kind, 2.0);
            atc_step(state, identity, v, u, d);
            const Eigen::VectorXd after = state.weights.col(0);
            for (int m = 0; m < 3; ++m) {
                CHECK(after(m) == doctest::Approx(before(m) - rho * g(m)).epsilon(1e-15));
                // zero may be crossed, but never by more than rho
                if (before(m) * after(m) < 0.0) CHECK(std::abs(after(m)) <= rho);
                if (std::abs(before(m)) > rho)
                    CHECK(std::abs(after(m)) <= std::abs(before(m)) + 1e-15);
            }
        }
    }
}

TEST_CASE("reweighted attractor is never stronger than the plain one") {
    rng::Xoshiro256pp gen(5);
    Eigen::VectorXd w(20);
    for (int i = 0; i < w.size(); ++i) w(i) = 3.0 * gen.gaussian();
    for (double eps : {0.1, 1.0, 10.0}) {
        const Eigen::VectorXd za = zero_attractor(w, Attractor::Za, eps);
        const Eigen::VectorXd rza = zero_attractor(w, Attractor::Rza, eps);
        for (int i = 0; i < w.size(); ++i)
            CHECK(std::abs(rza(i)) <= std::abs(za(i)));
    }
}

TEST_CASE("both strategies match the two-pass reference implementations") {
    const Topology t = random_geometric_topology(5, 0.75, 42);
    const CombinationMatrix m = build_uniform_combiner(t);
    const double mu = 0.05, gamma = 0.01, rho = 0.002, eps = 1.0;

    oracles::ReferenceAtc ref_atc(5, 4, to_nested(m.entries));
    ref_atc.mu = mu;
    ref_atc.leak = gamma;
    ref_atc.rho = rho;
    ref_atc.eps = eps;
    ref_atc.attractor = 2;
    oracles::ReferenceCta ref_cta(5, 4, to_nested(m.entries));
    ref_cta.mu = mu;
    ref_cta.leak = gamma;
    ref_cta.rho = rho;
    ref_cta.eps = eps;
    ref_cta.attractor = 2;

    const AlgorithmVariant va = variant(Strategy::Atc, Attractor::Rza, mu, gamma, rho, eps);
    const AlgorithmVariant vc = variant(Strategy::Cta, Attractor::Rza, mu, gamma, rho, eps);
    NetworkState sa = NetworkState::zeros(4, 5);
    NetworkState sc = NetworkState::zeros(4, 5);

    rng::Xoshiro256pp gen(99);
    Eigen::MatrixXd u(4, 5);
    Eigen::VectorXd d(5);
    std::vector<std::vector<double>> u_ref(5, std::vector<double>(4));
    std::vector<double> d_ref(5);
    for (int i = 0; i < 200; ++i) {
        for (int k = 0; k < 5; ++k) {
            for (int mm = 0; mm < 4; ++mm) {
                u(mm, k) = gen.gaussian();
                u_ref[k][mm] = u(mm, k);
            }
            d(k) = gen.gaussian();
            d_ref[k] = d(k);
        }
        atc_step(sa, m, va, u, d);
        cta_step(sc, m, vc, u, d);
        ref_atc.step(u_ref, d_ref);
        ref_cta.step(u_ref, d_ref);
        for (int k = 0; k < 5; ++k)
            for (int mm = 0; mm < 4; ++mm) {
                CHECK(std::abs(sa.weights(mm, k) - ref_atc.weights[k][mm]) <=
                      1e-12 * (1.0 + std::abs(ref_atc.weights[k][mm])));
                CHECK(std::abs(sc.weights(mm, k) - ref_cta.weights[k][mm]) <=
                      1e-12 * (1.0 + std::abs(ref_cta.weights[k][mm])));
            }
    }
}

TEST_CASE("run_trial") {
    const Topology t = fully_connected(3);
    const CombinationMatrix m = build_uniform_combiner(t);
    SignalProfile profile;
    profile.input_variances = Eigen::VectorXd::Constant(3, 1.0);
    profile.noise_variances = Eigen::VectorXd::Constant(3, 0.0);

    TrueVectorSchedule zero_system;
    zero_system.stages.emplace_back(0, Eigen::VectorXd::Zero(4));

    TrialSpec spec;
    spec.topology = &t;
    spec.combiner = &m;
    spec.profile = &profile;
    spec.taps = 4;
    spec.schedule = &zero_system;
    spec.iterations = 100;
    spec.master_seed = 11;
    spec.trial_index = 0;

    SUBCASE("zero system and zero noise stay exactly at zero MSD") {
        spec.variant = variant(Strategy::Atc, Attractor::None, 0.1, 0.0, 0.0);
        const TrialResult r = run_trial(spec);
        CHECK_FALSE(r.diverged);
        CHECK(r.msd.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("same seed twice gives identical traces") {
        spec.variant = variant(Strategy::Atc, Attractor::Za, 0.05, 0.001, 0.001);
        TrueVectorSchedule system;
        Eigen::VectorXd w_o(4);
        w_o << 1, 0, 0, 0;
        system.stages.emplace_back(0, w_o);
        spec.schedule = &system;
        const TrialResult a = run_trial(spec);
        const TrialResult b = run_trial(spec);
        CHECK(a.msd == b.msd);
    }
    SUBCASE("noise-free single-tap LMS descends monotonically") {
        const Topology single = fully_connected(1);
        const CombinationMatrix mi = build_uniform_combiner(single);
        SignalProfile p1;
        p1.input_variances = Eigen::VectorXd::Constant(1, 1.0);
        p1.noise_variances = Eigen::VectorXd::Constant(1, 0.0);
        TrueVectorSchedule system;
        system.stages.emplace_back(0, Eigen::VectorXd::Constant(1, 2.0));
        TrialSpec s1;
        s1.topology = &single;
        s1.combiner = &mi;
        s1.profile = &p1;
        s1.taps = 1;
        s1.variant = variant(Strategy::Atc, Attractor::None, 0.05, 0.0, 0.0);
        s1.schedule = &system;
        s1.iterations = 500;
        s1.master_seed = 3;
        const TrialResult r = run_trial(s1);
        REQUIRE_FALSE(r.diverged);
        for (int i = 1; i < r.msd.size(); ++i) CHECK(r.msd(i) <= r.msd(i - 1) * (1.0 + 1e-12));
    }
    SUBCASE("a wildly excessive step size flags divergence and truncates") {
        SignalProfile noisy = profile;
        noisy.noise_variances.setConstant(0.01);
        TrueVectorSchedule system;
        Eigen::VectorXd w_o(4);
        w_o << 1, 1, 1, 1;
        system.stages.emplace_back(0, w_o);
        spec.profile = &noisy;
        spec.schedule = &system;
        spec.iterations = 4000;
        spec.variant = variant(Strategy::Atc, Attractor::None, 5.0, 0.0, 0.0);
        const TrialResult r = run_trial(spec);
        CHECK(r.diverged);
        CHECK(r.divergence_iteration >= 0);
        CHECK(r.msd.size() == r.divergence_iteration + 1);
    }
    SUBCASE("weight history records every iteration") {
        spec.variant = variant(Strategy::Atc, Attractor::None, 0.1, 0.0, 0.0);
        spec.record_weights = true;
        const TrialResult r = run_trial(spec);
        CHECK(r.weight_history.rows() == 100);
        CHECK(r.weight_history.cols() == 12);
    }
}

TEST_CASE("schedule lookup respects stage boundaries") {
    TrueVectorSchedule schedule;
    schedule.stages.emplace_back(0, Eigen::VectorXd::Constant(2, 1.0));
    schedule.stages.emplace_back(10, Eigen::VectorXd::Constant(2, 2.0));
    schedule.validate(2);
    CHECK(schedule.at(0)(0) == 1.0);
    CHECK(schedule.at(9)(0) == 1.0);
    CHECK(schedule.at(10)(0) == 2.0);
    CHECK(schedule.at(5000)(0) == 2.0);

    TrueVectorSchedule bad;
    bad.stages.emplace_back(5, Eigen::VectorXd::Constant(2, 1.0));
    CHECK_THROWS_AS(bad.validate(2), ConfigError);
}

TEST_CASE("hyperparameter validation") {
    HyperParams p;
    p.step_size = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {0.1, -0.1, 0.0, 1.0};
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {0.1, 0.0, -1e-9, 1.0};
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {0.1, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {0.1, 0.002, 0.0005, 1.0};
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("variant labels name the algorithm family") {
    CHECK(variant(Strategy::Atc, Attractor::None, 0.1, 0.0, 0.0).label() == "atc_dlms");
    CHECK(variant(Strategy::Atc, Attractor::None, 0.1, 0.01, 0.0).label() == "atc_leaky_dlms");
    CHECK(variant(Strategy::Atc, Attractor::Za, 0.1, 0.01, 0.1).label() == "atc_lza_dlms");
    CHECK(variant(Strategy::Cta, Attractor::Rza, 0.1, 0.0, 0.1).label() == "cta_rza_dlms");
    AlgorithmVariant named = variant(Strategy::Atc, Attractor::Za, 0.1, 0.0, 0.1);
    named.name = "custom";
    CHECK(named.label() == "custom");
}
