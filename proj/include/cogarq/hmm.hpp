#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "cogarq/channel.hpp"
#include "cogarq/closedform.hpp"
#include "cogarq/rng.hpp"
#include "cogarq/types.hpp"

namespace cogarq {

enum class Regime : std::uint8_t { Silent, Transmitting };

std::string_view to_string(Regime r) noexcept;

/// Row-major square matrix with row-stochastic rows (not required to be ergodic).
using Matrix = std::vector<std::vector<double>>;

/// ACK/NACK symbols overheard by the secondary user, each tagged with whether it was
/// transmitting in that slot.
struct ObservationSequence {
    std::vector<Feedback> symbols;
    std::vector<Regime> regimes;

    static ObservationSequence constant(std::vector<Feedback> symbols, Regime regime);
    std::size_t size() const noexcept { return symbols.size(); }
    void validate() const;
};

/// Hidden chain with known, regime-dependent emission probabilities P(ACK | state, regime).
struct HmmSpec {
    std::size_t n_states = 2;
    SuccessProfile emissions;
    /// Initial state distribution; the stationary law of the transitions when empty.
    std::optional<std::vector<double>> initial;

    static HmmSpec from_model(const ChannelModel& model);
    double emission(std::size_t state, Regime regime, Feedback fb) const;
    void validate() const;
};

struct ForwardBackwardResult {
    double log_likelihood = 0.0;
    /// posterior[t][i] = P(X_t = i | all observations).
    std::vector<std::vector<double>> posterior;
    /// pairwise[t][i][j] = P(X_t = i, X_{t+1} = j | all observations), t < L - 1.
    std::vector<Matrix> pairwise;
};

/// Scaled forward-backward pass. Throws DegenerateObservationError when an observation has
/// zero probability under the model.
ForwardBackwardResult forward_backward(const ObservationSequence& obs, const HmmSpec& spec, const Matrix& transitions);

struct EmOptions {
    double tolerance = 1e-8;
    std::size_t max_iterations = 500;
    /// Bounds applied to the final estimate before renormalizing each row.
    double clamp = 1e-6;
};

struct HmmFit {
    Matrix transitions;
    double log_likelihood = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    /// Log-likelihood of the unclamped iterate before each update (non-decreasing).
    std::vector<double> log_likelihood_history;

    TransitionMatrix transition_matrix() const { return TransitionMatrix(transitions); }
};

/// EM over the transition matrix with emissions held fixed. The initial distribution is
/// spec.initial when given and uniform otherwise, and stays fixed.
HmmFit baum_welch(const ObservationSequence& obs, const HmmSpec& spec, const Matrix& init,
                  const EmOptions& options = {});

/// Sticky starting matrix: diagonal 0.8, the rest spread evenly, every entry jittered by
/// up to +-jitter and rows renormalized.
Matrix sticky_start(std::size_t n_states, RandomStream& rng, double jitter = 0.05);

/// Best of `starts` Baum-Welch runs from jittered sticky starts seeded by (seed, start).
HmmFit fit_transitions(const ObservationSequence& obs, const HmmSpec& spec, std::uint64_t seed,
                       std::size_t starts = 4, const EmOptions& options = {});

/// Silent phase first (multi-start), then a transmitting phase initialized from its result.
HmmFit train_three_state_two_phase(const ObservationSequence& silent, const ObservationSequence& transmitting,
                                   const HmmSpec& spec, std::uint64_t seed, std::size_t starts = 4,
                                   const EmOptions& options = {});

/// Mean row-wise L1 distance between estimated and true transitions, minimized over state
/// relabelings that leave the emissions of the listed regimes unchanged.
double aligned_error(const Matrix& estimate, const Matrix& truth, const HmmSpec& spec,
                     const std::vector<Regime>& regimes = {Regime::Silent, Regime::Transmitting});

/// Feedback sequence of `length` slots under a constant regime, starting from the
/// stationary distribution.
ObservationSequence generate_observations(const ChannelModel& model, Regime regime, std::size_t length,
                                          RandomStream& rng);

/// Text form: "regime: silent|transmitting" then one line over {A, N}.
void write_trace(std::ostream& out, const ObservationSequence& obs);
ObservationSequence read_trace(std::istream& in);

enum class DegradationEvaluation { Analytic, Simulated };

struct DegradationOptions {
    std::uint64_t seed = 1;
    std::size_t starts = 4;
    EmOptions em;
    DegradationEvaluation evaluation = DegradationEvaluation::Analytic;
    /// Slots per simulated evaluation.
    std::size_t sim_horizon = 100000;
};

struct DegradationRow {
    double w = 0.0;
    BurstLength m_true = BurstLength::finite(0);
    BurstLength m_estimated = BurstLength::finite(0);
    double rate_true = 0.0;
    double rate_estimated = 0.0;
    /// rate_true - rate_estimated.
    double degradation = 0.0;
};

struct DegradationResult {
    HmmFit fit;
    std::vector<DegradationRow> rows;
};

/// Burst-length policy implied by (possibly anti-correlated) estimated parameters: the
/// optimal M when P_EE > P_NE, otherwise whichever of always-listen (M = 0) and
/// always-transmit is myopically better.
BurstLength policy_from_estimate(const MPolicyParams& estimate);

/// Trains on a silent trace of the true erasure channel, picks the burst length that is
/// optimal for the estimate, and scores it under the true channel.
DegradationResult degradation_experiment(const ChannelModel& true_model, std::size_t training_length,
                                         const std::vector<double>& w_grid, double r_s = 1.0,
                                         const DegradationOptions& options = {});

/// Per-seed estimation errors for one training length. Two-state models train on a silent
/// trace; three-state models run the two-phase procedure with a transmit phase of
/// `transmit_length` slots (0 = same as `length`). Errors are aligned_error against truth.
struct EstimationSummary {
    std::size_t length = 0;
    std::vector<double> errors;
    double median = 0.0;
    double mean = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
};

EstimationSummary estimation_study(const ChannelModel& model, std::size_t length, std::size_t seeds,
                                   std::uint64_t seed, std::size_t starts = 4, const EmOptions& options = {},
                                   std::size_t transmit_length = 0, std::size_t threads = 0);

/// degradation_experiment averaged over seeds, one row per weight.
struct DegradationSummary {
    std::size_t length = 0;
    double w = 0.0;
    std::size_t seeds = 0;
    double mean_degradation = 0.0;
    double stderr_degradation = 0.0;
    double mean_rate_true = 0.0;
    double mean_rate_estimated = 0.0;
};

std::vector<DegradationSummary> degradation_study(const ChannelModel& true_model, std::size_t training_length,
                                                  const std::vector<double>& w_grid, std::size_t seeds,
                                                  double r_s = 1.0, const DegradationOptions& options = {},
                                                  std::size_t threads = 0);

} // namespace cogarq
