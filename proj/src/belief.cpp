#include "cogarq/belief.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "cogarq/errors.hpp"

namespace cogarq {

namespace {

bool transmits(Action a)
{
    switch (a) {
    case Action::Listen: return false;
    case Action::Transmit: return true;
    default: throw PreconditionError("single-channel update given a two-channel action");
    }
}

// One-step propagation of a two-state erasure-probability: p P_EE + (1 - p) P_NE.
double propagate(double p, double p_ee, double p_ne) { return p * p_ee + (1.0 - p) * p_ne; }

double erasure_channel_update(double p, bool occupied, Feedback fb, double p_ee, double p_ne)
{
    if (occupied)
        return propagate(p, p_ee, p_ne);
    if (fb == Feedback::Ack) {
        if (p >= 1.0)
            throw DegenerateObservationError("ACK while silent has zero likelihood when P(E) = 1");
        return p_ne;
    }
    if (p <= 0.0)
        throw DegenerateObservationError("NACK while silent has zero likelihood when P(E) = 0");
    return p_ee;
}

} // namespace

Belief update_general(const Belief& b, const Observation& obs, const ChannelModel& model)
{
    const std::size_t s = model.states();
    if (b.size() != s)
        throw PreconditionError("belief size does not match the model");
    const bool tx = transmits(obs.action);
    const SuccessProfile& prof = model.success();

    std::vector<double> post(s);
    double norm = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
        const double ack = prof.ack_probability(i, tx);
        const double like = obs.feedback == Feedback::Ack ? ack : 1.0 - ack;
        post[i] = like * b[i];
        norm += post[i];
    }
    if (!(norm > 0.0))
        throw DegenerateObservationError(std::string("observed ") + std::string(to_string(obs.feedback)) +
                                         " has zero likelihood under the current belief");

    const TransitionMatrix& p = model.transitions();
    std::vector<double> next(s, 0.0);
    for (std::size_t i = 0; i < s; ++i) {
        const double w = post[i] / norm;
        if (w == 0.0)
            continue;
        for (std::size_t j = 0; j < s; ++j)
            next[j] += w * p(i, j);
    }
    double total = 0.0;
    for (double v : next)
        total += v;
    for (double& v : next)
        v /= total;
    return Belief(std::move(next));
}

double observation_probability(const Belief& b, Action action, const ChannelModel& model)
{
    if (b.size() != model.states())
        throw PreconditionError("belief size does not match the model");
    const bool tx = transmits(action);
    double acc = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i)
        acc += b[i] * model.success().ack_probability(i, tx);
    return acc;
}

double update_two_state_erasure(double p, const Observation& obs, double p_ee, double p_ne)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw PreconditionError("belief p outside [0, 1]");
    return erasure_channel_update(p, transmits(obs.action), obs.feedback, p_ee, p_ne);
}

double update_gilbert_elliot(double p, const Observation& obs, const GilbertElliotParams& g)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw PreconditionError("belief p outside [0, 1]");
    const bool tx = transmits(obs.action);
    const double ack_bad = tx ? g.gamma2 : g.gamma1;
    const double ack_good = tx ? g.gamma4 : g.gamma3;
    const double like_bad = obs.feedback == Feedback::Ack ? ack_bad : 1.0 - ack_bad;
    const double like_good = obs.feedback == Feedback::Ack ? ack_good : 1.0 - ack_good;
    const double norm = like_bad * p + like_good * (1.0 - p);
    if (!(norm > 0.0))
        throw DegenerateObservationError("Gilbert-Elliot feedback has zero likelihood under the belief");
    const double posterior_bad = like_bad * p / norm;
    return posterior_bad * g.p_bb + (1.0 - posterior_bad) * g.p_gb;
}

BeliefPair update_three_state(BeliefPair pq, const Observation& obs, const TransitionMatrix& p)
{
    if (p.size() != 3)
        throw PreconditionError("three-state update needs a 3x3 transition matrix");
    const double g = pq.p;
    const double vg = pq.q;
    if (!(g >= 0.0 && vg >= 0.0 && g + vg <= 1.0 + 1e-12))
        throw PreconditionError("three-state belief must satisfy p, q >= 0 and p + q <= 1");
    constexpr std::size_t B = 0, G = 1, V = 2;
    const bool tx = transmits(obs.action);

    if (!tx && obs.feedback == Feedback::Nack) {
        if (!(1.0 - g - vg > 0.0))
            throw DegenerateObservationError("NACK while silent needs P(B) > 0");
        return {p(B, G), p(B, V)};
    }
    if (!tx) {
        const double s = g + vg;
        if (!(s > 0.0))
            throw DegenerateObservationError("ACK while silent needs P(G) + P(Vg) > 0");
        return {g / s * p(G, G) + vg / s * p(V, G), g / s * p(G, V) + vg / s * p(V, V)};
    }
    if (obs.feedback == Feedback::Ack) {
        if (!(vg > 0.0))
            throw DegenerateObservationError("ACK while transmitting needs P(Vg) > 0");
        return {p(V, G), p(V, V)};
    }
    const double rest = 1.0 - vg;
    if (!(rest > 0.0))
        throw DegenerateObservationError("NACK while transmitting needs P(Vg) < 1");
    const double bad = std::max(1.0 - g - vg, 0.0);
    return {g / rest * p(G, G) + bad / rest * p(B, G), g / rest * p(G, V) + bad / rest * p(B, V)};
}

BeliefPair update_two_channel(BeliefPair pq, const Observation& obs, const TransitionMatrix& p1,
                              const TransitionMatrix& p2)
{
    if (p1.size() != 2 || p2.size() != 2)
        throw PreconditionError("two-channel update needs two 2x2 transition matrices");
    if (!(pq.p >= 0.0 && pq.p <= 1.0 && pq.q >= 0.0 && pq.q <= 1.0))
        throw PreconditionError("two-channel belief outside [0, 1]^2");
    if (!is_two_channel(obs.action))
        throw PreconditionError("two-channel update given a single-channel action");
    if (!obs.second)
        throw PreconditionError("two-channel observation is missing channel-2 feedback");
    const bool occupies1 = obs.action == Action::TransmitCh1;
    const bool occupies2 = obs.action == Action::TransmitCh2;
    return {erasure_channel_update(pq.p, occupies1, obs.feedback, p1(0, 0), p1(1, 0)),
            erasure_channel_update(pq.q, occupies2, *obs.second, p2(0, 0), p2(1, 0))};
}

} // namespace cogarq
