#include "cogarq/policies.hpp"

#include <string>

#include "cogarq/belief.hpp"
#include "cogarq/errors.hpp"

namespace cogarq {

std::string_view to_string(PolicyKind k) noexcept
{
    switch (k) {
    case PolicyKind::DP: return "dp";
    case PolicyKind::Greedy: return "greedy";
    case PolicyKind::MPolicy: return "mpolicy";
    case PolicyKind::Genie: return "genie";
    case PolicyKind::AlwaysListen: return "always_listen";
    case PolicyKind::AlwaysTransmit: return "always_transmit";
    }
    return "?";
}

PolicyKind parse_policy_kind(std::string_view name)
{
    for (PolicyKind k : {PolicyKind::DP, PolicyKind::Greedy, PolicyKind::MPolicy, PolicyKind::Genie,
                         PolicyKind::AlwaysListen, PolicyKind::AlwaysTransmit})
        if (to_string(k) == name)
            return k;
    throw PreconditionError("unknown policy kind '" + std::string(name) +
                            "' (expected dp, greedy, mpolicy, genie, always_listen, always_transmit)");
}

GridPoint stationary_point(const PolicyContext& ctx)
{
    const auto& m = ctx.models;
    switch (ctx.problem()) {
    case ProblemKind::TwoState:
    case ProblemKind::GilbertElliot: return {m[0].transitions().stationary()[0], 0.0};
    case ProblemKind::ThreeState: {
        const auto& pi = m[0].transitions().stationary();
        return {pi[1], pi[2]};
    }
    case ProblemKind::TwoChannel:
        return {m[0].transitions().stationary()[0], m[1].transitions().stationary()[0]};
    }
    return {};
}

GridPoint update_point(const PolicyContext& ctx, GridPoint x, const Observation& obs)
{
    const auto& m = ctx.models;
    switch (ctx.problem()) {
    case ProblemKind::TwoState:
        return {update_two_state_erasure(x.x, obs, m[0].transitions()(0, 0), m[0].transitions()(1, 0)), 0.0};
    case ProblemKind::GilbertElliot: {
        const auto& s = m[0].success();
        const GilbertElliotParams g{m[0].transitions()(0, 0), m[0].transitions()(1, 0), s.silent_ack[0],
                                    s.transmit_ack[0],       s.silent_ack[1],           s.transmit_ack[1]};
        return {update_gilbert_elliot(x.x, obs, g), 0.0};
    }
    case ProblemKind::ThreeState: {
        const BeliefPair n = update_three_state({x.x, x.y}, obs, m[0].transitions());
        return {n.p, n.q};
    }
    case ProblemKind::TwoChannel: {
        const BeliefPair n = update_two_channel({x.x, x.y}, obs, m[0].transitions(), m[1].transitions());
        return {n.p, n.q};
    }
    }
    return x;
}

PolicyHandle::PolicyHandle(PolicyKind kind, PolicyContext ctx) : kind_(kind), ctx_(std::move(ctx))
{
    problem_ = ctx_.problem();
    dynamics_ = make_dynamics(ctx_.models, ctx_.w, ctx_.r_s);
    reset();
}

PolicyHandle PolicyHandle::dp(PolicyContext ctx, std::shared_ptr<const ValueGrid> grid)
{
    if (!grid)
        throw PreconditionError("DP policy needs a solved value grid");
    PolicyHandle h(PolicyKind::DP, std::move(ctx));
    if (grid->problem != h.problem_)
        throw PreconditionError("value grid was solved for " + std::string(to_string(grid->problem)) +
                                ", not " + std::string(to_string(h.problem_)));
    h.grid_ = std::move(grid);
    return h;
}

PolicyHandle PolicyHandle::greedy(PolicyContext ctx) { return PolicyHandle(PolicyKind::Greedy, std::move(ctx)); }

PolicyHandle PolicyHandle::m_policy(PolicyContext ctx, BurstLength m)
{
    PolicyHandle h(PolicyKind::MPolicy, std::move(ctx));
    if (h.problem_ == ProblemKind::TwoChannel)
        throw PreconditionError("the M-policy is defined for a single channel");
    h.burst_ = m;
    return h;
}

PolicyHandle PolicyHandle::genie(PolicyContext ctx) { return PolicyHandle(PolicyKind::Genie, std::move(ctx)); }

PolicyHandle PolicyHandle::always_listen(PolicyContext ctx)
{
    return PolicyHandle(PolicyKind::AlwaysListen, std::move(ctx));
}

PolicyHandle PolicyHandle::always_transmit(PolicyContext ctx)
{
    return PolicyHandle(PolicyKind::AlwaysTransmit, std::move(ctx));
}

void PolicyHandle::reset(std::optional<GridPoint> belief)
{
    belief_ = belief ? *belief : stationary_point(ctx_);
    counter_ = 0;
    forever_ = false;
    pending_.reset();
    known_first_.reset();
    known_second_.reset();
    initialized_ = true;
}

Action PolicyHandle::listen_action() const
{
    return problem_ == ProblemKind::TwoChannel ? Action::ListenBoth : Action::Listen;
}

Action PolicyHandle::transmit_action() const
{
    return problem_ == ProblemKind::TwoChannel ? Action::TransmitCh1 : Action::Transmit;
}

Action PolicyHandle::genie_decision() const
{
    const double w = ctx_.w;
    auto next_dist = [](const ChannelModel& m, const std::optional<ChannelState>& known) {
        if (known) {
            auto r = m.transitions().row(*known);
            return std::vector<double>(r.begin(), r.end());
        }
        return m.transitions().stationary();
    };
    auto ack = [](const ChannelModel& m, const std::vector<double>& dist, bool tx) {
        double acc = 0.0;
        for (std::size_t i = 0; i < dist.size(); ++i)
            acc += dist[i] * m.success().ack_probability(i, tx);
        return acc;
    };
    const ChannelModel& m1 = ctx_.models[0];
    const auto d1 = next_dist(m1, known_first_);
    if (problem_ != ProblemKind::TwoChannel) {
        const double g1 = w * m1.primary_reward() * ack(m1, d1, false);
        const double g2 = (1.0 - w) * ctx_.r_s + w * m1.primary_reward() * ack(m1, d1, true);
        return g2 >= g1 ? Action::Transmit : Action::Listen;
    }
    const ChannelModel& m2 = ctx_.models[1];
    const auto d2 = next_dist(m2, known_second_);
    const double a1 = m1.primary_reward() * ack(m1, d1, false);
    const double a2 = m2.primary_reward() * ack(m2, d2, false);
    const double listen = w * (a1 + a2);
    const double tx1 = (1.0 - w) * ctx_.r_s + w * a2;
    const double tx2 = (1.0 - w) * ctx_.r_s + w * a1;
    if (tx1 >= listen && tx1 >= tx2)
        return Action::TransmitCh1;
    if (tx2 >= listen)
        return Action::TransmitCh2;
    return Action::ListenBoth;
}

Action PolicyHandle::decide()
{
    if (!initialized_)
        throw StateError("policy used before initialization");
    if (pending_)
        throw StateError("decide called twice without an observation");
    Action a = listen_action();
    switch (kind_) {
    case PolicyKind::AlwaysListen: break;
    case PolicyKind::AlwaysTransmit: a = transmit_action(); break;
    case PolicyKind::MPolicy: a = (forever_ || counter_ > 0) ? Action::Transmit : Action::Listen; break;
    case PolicyKind::Genie: a = genie_decision(); break;
    case PolicyKind::Greedy: {
        std::vector<double> g(static_cast<std::size_t>(dynamics_->action_count()));
        Branches br;
        for (int i = 0; i < dynamics_->action_count(); ++i)
            g[static_cast<std::size_t>(i)] = dynamics_->expand(belief_, i, br);
        a = dynamics_->action(best_action(g));
        break;
    }
    case PolicyKind::DP: a = dynamics_->action(best_action(q_values(*dynamics_, *grid_, belief_))); break;
    }
    pending_ = a;
    return a;
}

void PolicyHandle::observe(const Observation& obs)
{
    if (!initialized_)
        throw StateError("policy used before initialization");
    if (!pending_)
        throw StateError("observation received without a preceding decision");
    if (obs.action != *pending_)
        throw StateError("observation is for action " + std::string(to_string(obs.action)) +
                         " but the policy chose " + std::string(to_string(*pending_)));
    if (problem_ == ProblemKind::TwoChannel && !obs.second)
        throw StateError("two-channel observation is missing channel-2 feedback");
    pending_.reset();
    if (kind_ == PolicyKind::MPolicy) {
        if (obs.action == Action::Transmit) {
            if (counter_ > 0)
                --counter_;
        } else if (obs.feedback == Feedback::Nack) {
            if (burst_.is_infinite())
                forever_ = true;
            else
                counter_ = burst_.value();
        }
    }
    belief_ = update_point(ctx_, belief_, obs);
}

void PolicyHandle::reveal(ChannelState first, std::optional<ChannelState> second)
{
    known_first_ = first;
    if (second)
        known_second_ = second;
}

GridPoint PolicyHandle::belief() const
{
    if (!initialized_)
        throw StateError("policy used before initialization");
    return belief_;
}

} // namespace cogarq
