#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "cogarq/channel.hpp"
#include "cogarq/closedform.hpp"
#include "cogarq/dp.hpp"
#include "cogarq/grid.hpp"
#include "cogarq/types.hpp"

namespace cogarq {

enum class PolicyKind { DP, Greedy, MPolicy, Genie, AlwaysListen, AlwaysTransmit };

std::string_view to_string(PolicyKind k) noexcept;
/// Accepts "dp", "greedy", "mpolicy", "genie", "always_listen", "always_transmit".
PolicyKind parse_policy_kind(std::string_view name);

/// The decision problem a policy acts in: the channel(s) and reward weights.
struct PolicyContext {
    std::vector<ChannelModel> models;
    double w = 0.5;
    double r_s = 1.0;

    ProblemKind problem() const { return classify(models); }
};

/// Belief coordinates of the stationary distribution(s) for a problem.
GridPoint stationary_point(const PolicyContext& ctx);

/// Exact belief update in grid coordinates.
GridPoint update_point(const PolicyContext& ctx, GridPoint x, const Observation& obs);

/// A stateful decision rule. Call decide(), then observe() with the feedback for that slot;
/// the simulator also calls reveal() with the true state(s) of the slot just played, which
/// only the genie uses.
class PolicyHandle {
public:
    PolicyHandle() = default;

    static PolicyHandle dp(PolicyContext ctx, std::shared_ptr<const ValueGrid> grid);
    static PolicyHandle greedy(PolicyContext ctx);
    static PolicyHandle m_policy(PolicyContext ctx, BurstLength m);
    static PolicyHandle genie(PolicyContext ctx);
    static PolicyHandle always_listen(PolicyContext ctx);
    static PolicyHandle always_transmit(PolicyContext ctx);

    PolicyKind kind() const noexcept { return kind_; }
    bool initialized() const noexcept { return initialized_; }

    /// Restart from the given belief (stationary when empty) and forget revealed states.
    void reset(std::optional<GridPoint> belief = std::nullopt);

    Action decide();
    void observe(const Observation& obs);
    void reveal(ChannelState first, std::optional<ChannelState> second = std::nullopt);

    GridPoint belief() const;
    /// Remaining transmissions of an M-policy burst (0 for other kinds).
    std::uint64_t counter() const noexcept { return counter_; }
    const PolicyContext& context() const noexcept { return ctx_; }

private:
    PolicyHandle(PolicyKind kind, PolicyContext ctx);

    Action listen_action() const;
    Action transmit_action() const;
    Action genie_decision() const;

    PolicyKind kind_ = PolicyKind::AlwaysListen;
    PolicyContext ctx_;
    ProblemKind problem_ = ProblemKind::TwoState;
    std::shared_ptr<const BeliefDynamics> dynamics_;
    std::shared_ptr<const ValueGrid> grid_;
    BurstLength burst_ = BurstLength::finite(0);

    bool initialized_ = false;
    std::optional<Action> pending_;
    GridPoint belief_{};
    std::uint64_t counter_ = 0;
    bool forever_ = false;
    std::optional<ChannelState> known_first_;
    std::optional<ChannelState> known_second_;
};

} // namespace cogarq
