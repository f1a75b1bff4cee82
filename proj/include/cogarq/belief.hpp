#pragma once

#include "cogarq/channel.hpp"
#include "cogarq/types.hpp"

namespace cogarq {

/// Parameters of a two-state Gilbert-Elliot channel. p_bb / p_gb play the roles of P_EE / P_NE.
struct GilbertElliotParams {
    double p_bb = 0.8;
    double p_gb = 0.1;
    double gamma1 = 0.2;  // ACK | B, silent
    double gamma2 = 0.01; // ACK | B, transmit
    double gamma3 = 0.95; // ACK | G, silent
    double gamma4 = 0.3;  // ACK | G, transmit
};

/// Pair-form belief: for the three-state model (P(G), P(Vg)); for two channels the
/// per-channel erasure probabilities.
struct BeliefPair {
    double p = 0.0;
    double q = 0.0;
    friend bool operator==(const BeliefPair&, const BeliefPair&) = default;
};

/// Bayes posterior on the current state followed by one Markov step. Silent slots use the
/// silent ACK probabilities, transmit slots the transmit ones.
Belief update_general(const Belief& b, const Observation& obs, const ChannelModel& model);

/// P(ACK | b, action) = sum_i b_i * ack(i, action).
double observation_probability(const Belief& b, Action action, const ChannelModel& model);

/// Erasure model, p = P(E) for the coming slot.
double update_two_state_erasure(double p, const Observation& obs, double p_ee, double p_ne);

/// Gilbert-Elliot model, p = P(B) for the coming slot.
double update_gilbert_elliot(double p, const Observation& obs, const GilbertElliotParams& params);

/// Three-state model (states B, G, Vg), pq = (P(G), P(Vg)).
BeliefPair update_three_state(BeliefPair pq, const Observation& obs, const TransitionMatrix& p);

/// Two independent erasure channels, pq = (P(E) on channel 1, P(E) on channel 2).
BeliefPair update_two_channel(BeliefPair pq, const Observation& obs, const TransitionMatrix& p1,
                              const TransitionMatrix& p2);

} // namespace cogarq
