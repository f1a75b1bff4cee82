#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "cogarq/channel.hpp"
#include "cogarq/grid.hpp"
#include "cogarq/types.hpp"

namespace cogarq {

enum class ProblemKind { TwoState, GilbertElliot, ThreeState, TwoChannel };

std::string_view to_string(ProblemKind k) noexcept;

/// Discounted-reward solver settings. r_p is carried by the channel model(s).
struct SolverParams {
    double alpha = 0.999;
    double w = 0.5;
    double r_s = 1.0;
    /// Points per belief axis; 0 selects 1025 on the interval and 257 per axis in 2D.
    std::size_t grid_resolution = 0;
    double tolerance = 1e-10;
    std::size_t max_iterations = 1'000'000;

    void validate() const;
    std::size_t resolution_for(Domain d) const;
};

/// Successor beliefs of one action with their probabilities.
struct Branches {
    std::array<GridPoint, 4> next{};
    std::array<double, 4> prob{};
    int count = 0;

    void add(double p, GridPoint x)
    {
        if (!(p > 0.0))
            return;
        next[static_cast<std::size_t>(count)] = x;
        prob[static_cast<std::size_t>(count)] = p;
        ++count;
    }
};

/// Belief-MDP of one model variant: immediate weighted reward w*G1 or (1-w)*G2 terms and the
/// observation-driven belief transitions for each action.
class BeliefDynamics {
public:
    virtual ~BeliefDynamics() = default;
    virtual ProblemKind kind() const noexcept = 0;
    virtual Domain domain() const noexcept = 0;
    virtual int action_count() const noexcept = 0;
    virtual Action action(int index) const = 0;
    /// Returns the immediate reward of `action` at belief `x` and fills the successors.
    virtual double expand(GridPoint x, int action, Branches& out) const = 0;
};

std::shared_ptr<const BeliefDynamics> two_state_dynamics(const ChannelModel& model, double w, double r_s);
std::shared_ptr<const BeliefDynamics> gilbert_elliot_dynamics(const ChannelModel& model, double w, double r_s);
std::shared_ptr<const BeliefDynamics> three_state_dynamics(const ChannelModel& model, double w, double r_s);
std::shared_ptr<const BeliefDynamics> two_channel_dynamics(const ChannelModel& ch1, const ChannelModel& ch2,
                                                           double w, double r_s);

/// Problem kind implied by a list of channels: one erasure channel, one other two-state
/// channel, one three-state channel, or two erasure channels.
ProblemKind classify(const std::vector<ChannelModel>& models);

std::shared_ptr<const BeliefDynamics> make_dynamics(const std::vector<ChannelModel>& models, double w, double r_s);

struct SolveDiagnostics {
    std::size_t iterations = 0;
    bool converged = false;
    /// Width of the final bracket on the fixed point (sup-norm bound on the value error).
    double bound_width = 0.0;
    /// max |max_a Q(x, a) - V(x)| over the grid at the returned V.
    double bellman_residual = 0.0;
    /// span(T h_k - h_k) per iteration; contracts by at least alpha each step.
    std::vector<double> span_history;
};

/// Value function and greedy actions on a belief grid.
struct ValueGrid {
    ProblemKind problem = ProblemKind::TwoState;
    BeliefGrid grid;
    std::vector<double> values;
    std::vector<std::uint8_t> actions;
    double alpha = 0.999;
    SolveDiagnostics diagnostics;

    double value_at(GridPoint x) const;
    Action action(std::size_t node) const;
    GridPoint point(std::size_t node) const { return grid.point(node); }
};

/// Action labels for a problem kind, indexed like ValueGrid::actions.
Action action_of(ProblemKind kind, int index);

/// Generic solver: relative value iteration with MacQueen-Porteus bounds, started from the
/// myopic value, stopped when the bound width drops below the tolerance.
ValueGrid solve(const BeliefDynamics& dynamics, const SolverParams& params);

ValueGrid solve_two_state(const ChannelModel& model, const SolverParams& params);
ValueGrid solve_gilbert_elliot(const ChannelModel& model, const SolverParams& params);
ValueGrid solve_three_state(const ChannelModel& model, const SolverParams& params);
ValueGrid solve_two_channel(const ChannelModel& ch1, const ChannelModel& ch2, const SolverParams& params);

/// Dispatches to the solver matching classify(models).
ValueGrid solve_problem(const std::vector<ChannelModel>& models, const SolverParams& params);

/// One-step lookahead Q(x, a) = r(x, a) + alpha * sum_o P(o) V(next) with V interpolated.
std::vector<double> q_values(const BeliefDynamics& dynamics, const ValueGrid& grid, GridPoint x);

/// Index of the best action; ties (within a relative 1e-12) go to the lowest index (listening).
int best_action(const std::vector<double>& q);

struct ThresholdReport {
    /// Midpoint of the Listen -> Transmit cell; empty when one action is used everywhere.
    std::optional<double> p_th;
    /// Set when no crossing exists.
    std::optional<Action> uniform_action;
    /// 1 - (1-w) r_s / (w r_p) and 1 - (1-w) r_s P_NE / (w r_p).
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    /// Stationary P(E) and P_EE.
    double finite_m_lower = 0.0;
    double finite_m_upper = 0.0;

    bool all_same_action() const noexcept { return uniform_action.has_value(); }
};

/// Locates the single Listen -> Transmit switch of a 1D action grid. More than one switch
/// raises InvariantViolation.
ThresholdReport extract_threshold(const ValueGrid& grid, const SolverParams& params, const ChannelModel& model);

} // namespace cogarq
