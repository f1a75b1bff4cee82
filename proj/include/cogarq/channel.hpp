#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cogarq/rng.hpp"
#include "cogarq/types.hpp"

namespace cogarq {

/// Row-stochastic S x S matrix of primary-channel transitions (row i = transitions out of i).
/// Construction rejects non-stochastic rows and chains that are not irreducible and aperiodic,
/// and caches the stationary distribution.
class TransitionMatrix {
public:
    TransitionMatrix() = default;
    explicit TransitionMatrix(std::vector<std::vector<double>> rows);

    /// [[p00, 1 - p00], [p10, 1 - p10]].
    static TransitionMatrix two_state(double p00, double p10);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t from, std::size_t to) const { return data_[from * n_ + to]; }
    std::span<const double> row(std::size_t from) const { return {data_.data() + from * n_, n_}; }
    std::vector<std::vector<double>> rows() const;

    const std::vector<double>& stationary() const noexcept { return stationary_; }

    friend bool operator==(const TransitionMatrix& a, const TransitionMatrix& b)
    {
        return a.n_ == b.n_ && a.data_ == b.data_;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
    std::vector<double> stationary_;
};

/// Per-state probability that the primary packet is acknowledged, with the secondary user
/// silent (a_i) or transmitting (b_i).
struct SuccessProfile {
    std::vector<double> silent_ack;
    std::vector<double> transmit_ack;

    double ack_probability(std::size_t state, bool secondary_transmits) const
    {
        return secondary_transmits ? transmit_ack[state] : silent_ack[state];
    }

    friend bool operator==(const SuccessProfile&, const SuccessProfile&) = default;
};

enum class Preset { General, Erasure, GilbertElliot, ThreeState };

std::string_view to_string(Preset p) noexcept;

/// A primary channel: Markov state dynamics, ACK probabilities and the primary reward r_p.
class ChannelModel {
public:
    ChannelModel() = default;
    ChannelModel(TransitionMatrix transitions, SuccessProfile success, double primary_reward = 1.0,
                 std::vector<std::string> labels = {}, Preset preset = Preset::General);

    /// States (E, N); E never delivers, N delivers only while the secondary user is silent.
    static ChannelModel erasure(double p_ee, double p_ne, double primary_reward = 1.0);

    /// States (B, G); gamma = (silent|B, transmit|B, silent|G, transmit|G).
    static ChannelModel gilbert_elliot(double p_bb, double p_gb, double gamma1, double gamma2,
                                       double gamma3, double gamma4, double primary_reward = 1.0);

    /// States (B, G, Vg); B never delivers, G delivers only under silence, Vg always delivers.
    static ChannelModel three_state(TransitionMatrix transitions, double primary_reward = 1.0);

    const TransitionMatrix& transitions() const noexcept { return transitions_; }
    const SuccessProfile& success() const noexcept { return success_; }
    double primary_reward() const noexcept { return primary_reward_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    Preset preset() const noexcept { return preset_; }
    std::size_t states() const noexcept { return transitions_.size(); }

    /// True when the success profile is exactly the erasure profile (0,1)/(0,0).
    bool is_erasure() const;

private:
    TransitionMatrix transitions_;
    SuccessProfile success_;
    double primary_reward_ = 1.0;
    std::vector<std::string> labels_;
    Preset preset_ = Preset::General;
};

using ChannelState = std::size_t;

/// pi with pi P = pi, sum pi = 1.
Belief stationary_distribution(const TransitionMatrix& p);

/// T^M(P_EE): probability of erasure in the slot after an M-slot transmission burst that
/// followed an observed erasure, i.e. the (M+1)-step E->E return probability.
double m_step_erasure_prob(std::uint64_t m, double p_ee, double p_ne);

ChannelState sample_transition(ChannelState state, const TransitionMatrix& p, RandomStream& rng);

/// Draws a state from a distribution (inverse CDF).
ChannelState sample_state(std::span<const double> distribution, RandomStream& rng);

Feedback sample_ack(ChannelState state, bool secondary_transmits, const SuccessProfile& profile,
                    RandomStream& rng);

} // namespace cogarq
