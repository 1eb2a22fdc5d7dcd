#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dlms/combiner.hpp"
#include "dlms/signal.hpp"
#include "dlms/topology.hpp"

namespace dlms {

enum class Strategy { Atc, Cta };
enum class Attractor { None, Za, Rza };

/// (mu, gamma, rho, epsilon). rho and epsilon are the reparameterized
/// attractor constants: a log-sum penalty with weight rho' and scale eps'
/// maps to rho = mu*rho'/eps' and epsilon = 1/eps'.
struct HyperParams {
    double step_size = 0.01;        // mu > 0
    double leak = 0.0;              // gamma >= 0
    double attractor_strength = 0.0;// rho >= 0
    double reweight_scale = 1.0;    // epsilon > 0, reweighted attractor only
    void validate() const;          // throws ConfigError
};

/// One point in the algorithm family: plain/leaky x none/ZA/RZA x ATC/CTA.
struct AlgorithmVariant {
    Strategy strategy = Strategy::Atc;
    Attractor attractor = Attractor::None;
    HyperParams params;
    std::string name;  // optional; label() derives one when empty

    std::string label() const;
};

std::string to_string(Strategy s);
std::string to_string(Attractor a);

/// Per-node weight vectors and adaptation intermediates, column per node.
/// Everything starts at zero.
struct NetworkState {
    Eigen::MatrixXd weights;        // M x N
    Eigen::MatrixXd intermediates;  // M x N
    long iteration = 0;

    static NetworkState zeros(int taps, int nodes);
    bool finite() const { return weights.allFinite(); }
};

/// sign(w) elementwise for Za (sign(0) = 0); sign(w)/(1 + eps*|w|) for Rza.
Eigen::VectorXd zero_attractor(const Eigen::VectorXd& w, Attractor kind, double eps);

/// Adapt-then-combine update. All nodes adapt from the pre-step weights into
/// the intermediates, then every node averages its neighbors' intermediates.
/// regressors holds one window per column; desired holds one sample per node.
void atc_step(NetworkState& state, const CombinationMatrix& combiner,
              const AlgorithmVariant& variant, const Eigen::MatrixXd& regressors,
              const Eigen::VectorXd& desired);

/// Combine-then-adapt update; the attractor acts on the combined
/// intermediate rather than the previous weight.
void cta_step(NetworkState& state, const CombinationMatrix& combiner,
              const AlgorithmVariant& variant, const Eigen::MatrixXd& regressors,
              const Eigen::VectorXd& desired);

/// Dispatch on variant.strategy.
void step(NetworkState& state, const CombinationMatrix& combiner,
          const AlgorithmVariant& variant, const Eigen::MatrixXd& regressors,
          const Eigen::VectorXd& desired);

/// Piecewise-constant true weight vector: stages[j] = (first iteration,
/// vector). Stage starts must be strictly increasing with the first at 0.
struct TrueVectorSchedule {
    std::vector<std::pair<long, Eigen::VectorXd>> stages;
    const Eigen::VectorXd& at(long iteration) const;
    void validate(int taps) const;  // throws ConfigError
};

/// Everything one Monte Carlo trial needs. Generator substreams are derived
/// from (master_seed, trial_index, node, role), so the data a trial sees does
/// not depend on the variant: rerunning with another variant replays
/// identical signals.
struct TrialSpec {
    const Topology* topology = nullptr;
    const CombinationMatrix* combiner = nullptr;
    const SignalProfile* profile = nullptr;
    int taps = 0;
    AlgorithmVariant variant;
    const TrueVectorSchedule* schedule = nullptr;
    long iterations = 0;
    std::uint64_t master_seed = 0;
    long trial_index = 0;
    bool record_weights = false;
};

struct TrialResult {
    Eigen::VectorXd msd;            // network MSD per iteration; truncated on divergence
    bool diverged = false;
    long divergence_iteration = -1;
    Eigen::MatrixXd weight_history; // iterations x (N*M) when recorded, else empty
};

/// Run one seeded trial, recording (1/N) sum_k ||w_true(i) - w_k,i||^2 after
/// each update. A non-finite MSD truncates the trace and flags divergence
/// instead of raising: stability sweeps observe divergence as data.
TrialResult run_trial(const TrialSpec& spec);

/// Per-iteration signal source used by run_trial; exposed so tests and the
/// paired-data checksum can replay exactly the same draws in the same order.
class TrialDataSource {
public:
    TrialDataSource(const SignalProfile& profile, int taps, std::uint64_t master_seed,
                    long trial_index);
    /// Fill one iteration: column k of regressors gets node k's window and
    /// desired(k) = u_k . w_true + v_k.
    void fill(const Eigen::VectorXd& w_true, Eigen::MatrixXd& regressors,
              Eigen::VectorXd& desired);

private:
    std::vector<RegressorStream> streams_;
    std::vector<rng::Xoshiro256pp> input_gens_;
    std::vector<rng::Xoshiro256pp> noise_gens_;
    Eigen::VectorXd noise_std_;
};

} // namespace dlms
