#include "cogarq/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cogarq/belief.hpp"
#include "cogarq/errors.hpp"

namespace cogarq {

std::string_view to_string(ProblemKind k) noexcept
{
    switch (k) {
    case ProblemKind::TwoState: return "two_state";
    case ProblemKind::GilbertElliot: return "gilbert_elliot";
    case ProblemKind::ThreeState: return "three_state";
    case ProblemKind::TwoChannel: return "two_channel";
    }
    return "?";
}

void SolverParams::validate() const
{
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw PreconditionError("discount alpha must lie in [0, 1)");
    if (!(w >= 0.0 && w <= 1.0))
        throw PreconditionError("weight w must lie in [0, 1]");
    if (!(r_s >= 0.0) || !std::isfinite(r_s))
        throw PreconditionError("secondary reward r_s must be finite and non-negative");
    if (grid_resolution == 1)
        throw PreconditionError("grid resolution must be at least 2");
    if (!(tolerance > 0.0))
        throw PreconditionError("tolerance must be positive");
    if (max_iterations == 0)
        throw PreconditionError("max_iterations must be positive");
}

std::size_t SolverParams::resolution_for(Domain d) const
{
    if (grid_resolution != 0)
        return grid_resolution;
    return d == Domain::Interval ? 1025 : 257;
}

Action action_of(ProblemKind kind, int index)
{
    return kind == ProblemKind::TwoChannel ? two_channel_action(index) : single_channel_action(index);
}

namespace {

constexpr int kListen = 0;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

Observation single(Action a, Feedback f) { return Observation{a, f, std::nullopt}; }

class TwoStateDynamics final : public BeliefDynamics {
public:
    TwoStateDynamics(const ChannelModel& m, double w, double r_s)
        : p_ee_(m.transitions()(0, 0)), p_ne_(m.transitions()(1, 0)), r_p_(m.primary_reward()), w_(w), r_s_(r_s)
    {
    }
    ProblemKind kind() const noexcept override { return ProblemKind::TwoState; }
    Domain domain() const noexcept override { return Domain::Interval; }
    int action_count() const noexcept override { return 2; }
    Action action(int i) const override { return single_channel_action(i); }

    double expand(GridPoint x, int a, Branches& out) const override
    {
        const double p = clamp01(x.x);
        out = Branches{};
        if (a == kListen) {
            out.add(1.0 - p, {p_ne_, 0.0});
            out.add(p, {p_ee_, 0.0});
            return w_ * r_p_ * (1.0 - p);
        }
        out.add(1.0, {p * p_ee_ + (1.0 - p) * p_ne_, 0.0});
        return (1.0 - w_) * r_s_;
    }

private:
    double p_ee_, p_ne_, r_p_, w_, r_s_;
};

class GilbertElliotDynamics final : public BeliefDynamics {
public:
    GilbertElliotDynamics(const ChannelModel& m, double w, double r_s) : r_p_(m.primary_reward()), w_(w), r_s_(r_s)
    {
        const auto& s = m.success();
        g_ = GilbertElliotParams{m.transitions()(0, 0), m.transitions()(1, 0), s.silent_ack[0], s.transmit_ack[0],
                                 s.silent_ack[1], s.transmit_ack[1]};
    }
    ProblemKind kind() const noexcept override { return ProblemKind::GilbertElliot; }
    Domain domain() const noexcept override { return Domain::Interval; }
    int action_count() const noexcept override { return 2; }
    Action action(int i) const override { return single_channel_action(i); }

    double expand(GridPoint x, int a, Branches& out) const override
    {
        const double p = clamp01(x.x);
        out = Branches{};
        const Action act = single_channel_action(a);
        const double ack = a == kListen ? g_.gamma1 * p + g_.gamma3 * (1.0 - p)
                                        : g_.gamma2 * p + g_.gamma4 * (1.0 - p);
        if (ack > 0.0)
            out.add(ack, {update_gilbert_elliot(p, single(act, Feedback::Ack), g_), 0.0});
        if (1.0 - ack > 0.0)
            out.add(1.0 - ack, {update_gilbert_elliot(p, single(act, Feedback::Nack), g_), 0.0});
        if (a == kListen)
            return w_ * r_p_ * ack;
        return (1.0 - w_) * r_s_ + w_ * r_p_ * ack;
    }

private:
    GilbertElliotParams g_;
    double r_p_, w_, r_s_;
};

class ThreeStateDynamics final : public BeliefDynamics {
public:
    ThreeStateDynamics(const ChannelModel& m, double w, double r_s)
        : p_(m.transitions()), r_p_(m.primary_reward()), w_(w), r_s_(r_s)
    {
    }
    ProblemKind kind() const noexcept override { return ProblemKind::ThreeState; }
    Domain domain() const noexcept override { return Domain::Simplex; }
    int action_count() const noexcept override { return 2; }
    Action action(int i) const override { return single_channel_action(i); }

    double expand(GridPoint x, int a, Branches& out) const override
    {
        double g = std::max(x.x, 0.0);
        double v = std::max(x.y, 0.0);
        if (g + v > 1.0) {
            const double t = g + v;
            g /= t;
            v /= t;
        }
        const BeliefPair pq{g, v};
        const double bad = std::max(1.0 - g - v, 0.0);
        out = Branches{};
        auto put = [&](double prob, Action act, Feedback fb) {
            if (prob > 0.0) {
                const BeliefPair n = update_three_state(pq, single(act, fb), p_);
                out.add(prob, {n.p, n.q});
            }
        };
        if (a == kListen) {
            put(bad, Action::Listen, Feedback::Nack);
            put(g + v, Action::Listen, Feedback::Ack);
            return w_ * r_p_ * (g + v);
        }
        put(v, Action::Transmit, Feedback::Ack);
        put(1.0 - v, Action::Transmit, Feedback::Nack);
        return (1.0 - w_) * r_s_ + w_ * r_p_ * v;
    }

private:
    TransitionMatrix p_;
    double r_p_, w_, r_s_;
};

class TwoChannelDynamics final : public BeliefDynamics {
public:
    TwoChannelDynamics(const ChannelModel& c1, const ChannelModel& c2, double w, double r_s)
        : ee1_(c1.transitions()(0, 0)), ne1_(c1.transitions()(1, 0)), ee2_(c2.transitions()(0, 0)),
          ne2_(c2.transitions()(1, 0)), r1_(c1.primary_reward()), r2_(c2.primary_reward()), w_(w), r_s_(r_s)
    {
    }
    ProblemKind kind() const noexcept override { return ProblemKind::TwoChannel; }
    Domain domain() const noexcept override { return Domain::Square; }
    int action_count() const noexcept override { return 3; }
    Action action(int i) const override { return two_channel_action(i); }

    double expand(GridPoint x, int a, Branches& out) const override
    {
        const double p = clamp01(x.x);
        const double q = clamp01(x.y);
        out = Branches{};
        const double prop1 = p * ee1_ + (1.0 - p) * ne1_;
        const double prop2 = q * ee2_ + (1.0 - q) * ne2_;
        switch (a) {
        case 0:
            out.add((1.0 - p) * (1.0 - q), {ne1_, ne2_});
            out.add((1.0 - p) * q, {ne1_, ee2_});
            out.add(p * (1.0 - q), {ee1_, ne2_});
            out.add(p * q, {ee1_, ee2_});
            return w_ * (r1_ * (1.0 - p) + r2_ * (1.0 - q));
        case 1:
            out.add(1.0 - q, {prop1, ne2_});
            out.add(q, {prop1, ee2_});
            return (1.0 - w_) * r_s_ + w_ * r2_ * (1.0 - q);
        default:
            out.add(1.0 - p, {ne1_, prop2});
            out.add(p, {ee1_, prop2});
            return (1.0 - w_) * r_s_ + w_ * r1_ * (1.0 - p);
        }
    }

private:
    double ee1_, ne1_, ee2_, ne2_, r1_, r2_, w_, r_s_;
};

void require_erasure(const ChannelModel& m, const char* who)
{
    if (!m.is_erasure())
        throw PreconditionError(std::string(who) + " requires the erasure success profile (0,1)/(0,0)");
}

} // namespace

std::shared_ptr<const BeliefDynamics> two_state_dynamics(const ChannelModel& model, double w, double r_s)
{
    require_erasure(model, "two-state solver");
    if (!(model.transitions()(0, 0) > model.transitions()(1, 0)))
        throw PreconditionError("two-state solver requires P_EE > P_NE");
    return std::make_shared<TwoStateDynamics>(model, w, r_s);
}

std::shared_ptr<const BeliefDynamics> gilbert_elliot_dynamics(const ChannelModel& model, double w, double r_s)
{
    if (model.states() != 2)
        throw PreconditionError("Gilbert-Elliot solver requires a two-state channel");
    const auto& s = model.success();
    if (!(s.silent_ack[1] > s.silent_ack[0]))
        throw PreconditionError("Gilbert-Elliot solver requires gamma3 > gamma1");
    if (!(s.transmit_ack[1] >= s.transmit_ack[0]))
        throw PreconditionError("Gilbert-Elliot solver requires gamma4 >= gamma2");
    if (!(model.transitions()(0, 0) > model.transitions()(1, 0)))
        throw PreconditionError("Gilbert-Elliot solver requires P_BB > P_GB");
    return std::make_shared<GilbertElliotDynamics>(model, w, r_s);
}

std::shared_ptr<const BeliefDynamics> three_state_dynamics(const ChannelModel& model, double w, double r_s)
{
    if (model.states() != 3 || model.success().silent_ack != std::vector<double>{0.0, 1.0, 1.0} ||
        model.success().transmit_ack != std::vector<double>{0.0, 0.0, 1.0})
        throw PreconditionError("three-state solver requires the (B, G, Vg) success profile");
    return std::make_shared<ThreeStateDynamics>(model, w, r_s);
}

std::shared_ptr<const BeliefDynamics> two_channel_dynamics(const ChannelModel& ch1, const ChannelModel& ch2,
                                                           double w, double r_s)
{
    require_erasure(ch1, "two-channel solver (channel 1)");
    require_erasure(ch2, "two-channel solver (channel 2)");
    return std::make_shared<TwoChannelDynamics>(ch1, ch2, w, r_s);
}

ProblemKind classify(const std::vector<ChannelModel>& models)
{
    if (models.size() == 2)
        return ProblemKind::TwoChannel;
    if (models.size() != 1)
        throw PreconditionError("expected one or two channel models");
    const ChannelModel& m = models.front();
    if (m.is_erasure())
        return ProblemKind::TwoState;
    if (m.states() == 2)
        return ProblemKind::GilbertElliot;
    if (m.states() == 3)
        return ProblemKind::ThreeState;
    throw PreconditionError("no belief solver for a " + std::to_string(m.states()) + "-state channel");
}

std::shared_ptr<const BeliefDynamics> make_dynamics(const std::vector<ChannelModel>& models, double w, double r_s)
{
    switch (classify(models)) {
    case ProblemKind::TwoState: return two_state_dynamics(models[0], w, r_s);
    case ProblemKind::GilbertElliot: return gilbert_elliot_dynamics(models[0], w, r_s);
    case ProblemKind::ThreeState: return three_state_dynamics(models[0], w, r_s);
    case ProblemKind::TwoChannel: return two_channel_dynamics(models[0], models[1], w, r_s);
    }
    throw PreconditionError("unknown problem kind");
}

ValueGrid solve_problem(const std::vector<ChannelModel>& models, const SolverParams& params)
{
    params.validate();
    return solve(*make_dynamics(models, params.w, params.r_s), params);
}

double ValueGrid::value_at(GridPoint x) const
{
    const Stencil s = grid.stencil(x);
    double v = 0.0;
    for (int k = 0; k < s.count; ++k)
        v += s.weight[static_cast<std::size_t>(k)] * values[s.node[static_cast<std::size_t>(k)]];
    return v;
}

Action ValueGrid::action(std::size_t node) const { return action_of(problem, actions[node]); }

int best_action(const std::vector<double>& q)
{
    int best = 0;
    for (std::size_t a = 1; a < q.size(); ++a) {
        const double eps = 1e-12 * std::max(1.0, std::abs(q[static_cast<std::size_t>(best)]));
        if (q[a] > q[static_cast<std::size_t>(best)] + eps)
            best = static_cast<int>(a);
    }
    return best;
}

std::vector<double> q_values(const BeliefDynamics& dynamics, const ValueGrid& grid, GridPoint x)
{
    std::vector<double> q(static_cast<std::size_t>(dynamics.action_count()));
    Branches br;
    for (int a = 0; a < dynamics.action_count(); ++a) {
        double v = dynamics.expand(x, a, br);
        double cont = 0.0;
        for (int k = 0; k < br.count; ++k)
            cont += br.prob[static_cast<std::size_t>(k)] * grid.value_at(br.next[static_cast<std::size_t>(k)]);
        q[static_cast<std::size_t>(a)] = v + grid.alpha * cont;
    }
    return q;
}

namespace {

// Sparse Bellman operator on the grid: for (node, action) the immediate reward and the
// alpha-scaled interpolation coefficients onto grid nodes.
struct Operator {
    std::size_t nodes = 0;
    int actions = 0;
    std::vector<double> reward;
    std::vector<std::size_t> start;
    std::vector<std::uint32_t> index;
    std::vector<double> coef;

    double q(std::size_t n, int a, const std::vector<double>& h) const
    {
        const std::size_t k = n * static_cast<std::size_t>(actions) + static_cast<std::size_t>(a);
        double acc = 0.0;
        for (std::size_t e = start[k]; e < start[k + 1]; ++e)
            acc += coef[e] * h[index[e]];
        return reward[k] + acc;
    }
};

Operator build_operator(const BeliefDynamics& dyn, const BeliefGrid& grid, double alpha)
{
    Operator op;
    op.nodes = grid.size();
    op.actions = dyn.action_count();
    const std::size_t rows = op.nodes * static_cast<std::size_t>(op.actions);
    op.reward.resize(rows);
    op.start.resize(rows + 1);
    op.index.reserve(rows * 4);
    op.coef.reserve(rows * 4);
    Branches br;
    for (std::size_t n = 0; n < op.nodes; ++n) {
        const GridPoint x = grid.point(n);
        for (int a = 0; a < op.actions; ++a) {
            const std::size_t k = n * static_cast<std::size_t>(op.actions) + static_cast<std::size_t>(a);
            op.start[k] = op.index.size();
            op.reward[k] = dyn.expand(x, a, br);
            for (int b = 0; b < br.count; ++b) {
                const Stencil s = grid.stencil(br.next[static_cast<std::size_t>(b)]);
                for (int e = 0; e < s.count; ++e) {
                    op.index.push_back(s.node[static_cast<std::size_t>(e)]);
                    op.coef.push_back(alpha * br.prob[static_cast<std::size_t>(b)] *
                                      s.weight[static_cast<std::size_t>(e)]);
                }
            }
        }
    }
    op.start[rows] = op.index.size();
    return op;
}

int argmax_q(const Operator& op, std::size_t n, const std::vector<double>& h, std::vector<double>& scratch,
             double& best_value)
{
    for (int a = 0; a < op.actions; ++a)
        scratch[static_cast<std::size_t>(a)] = op.q(n, a, h);
    const int best = best_action(scratch);
    best_value = scratch[static_cast<std::size_t>(best)];
    return best;
}

} // namespace

ValueGrid solve(const BeliefDynamics& dynamics, const SolverParams& params)
{
    params.validate();
    ValueGrid out;
    out.problem = dynamics.kind();
    out.alpha = params.alpha;
    out.grid = BeliefGrid(dynamics.domain(), params.resolution_for(dynamics.domain()));
    const Operator op = build_operator(dynamics, out.grid, params.alpha);
    const std::size_t n = op.nodes;
    const auto na = static_cast<std::size_t>(op.actions);

    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < na; ++a)
            best = std::max(best, op.reward[i * na + a]);
        h[i] = best;
    }

    const double alpha = params.alpha;
    const double gain = alpha / (1.0 - alpha);
    std::vector<double> th(n);
    std::vector<double> scratch(na);
    std::vector<double> values;
    auto& diag = out.diagnostics;
    constexpr std::size_t kStallIterations = 200;
    double best_span = std::numeric_limits<double>::infinity();
    std::size_t best_at = 0;
    for (std::size_t it = 1; it <= params.max_iterations; ++it) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = 0; i < n; ++i) {
            double best;
            argmax_q(op, i, h, scratch, best);
            th[i] = best;
            const double u = best - h[i];
            lo = std::min(lo, u);
            hi = std::max(hi, u);
        }
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw SolverError("value iteration produced a non-finite value");
        const double span = hi - lo;
        diag.span_history.push_back(span);
        diag.iterations = it;
        const double width = gain * span;
        if (span < best_span) {
            best_span = span;
            best_at = it;
        }
        // The bound width is unreachable once span sits at the rounding floor of the values;
        // then stop as soon as span (which bounds the Bellman residual) is within tolerance
        // and has not improved for kStallIterations.
        const bool stalled = span < params.tolerance && it - best_at >= kStallIterations;
        if (width < params.tolerance || stalled) {
            values.resize(n);
            const double shift = gain * 0.5 * (lo + hi);
            for (std::size_t i = 0; i < n; ++i)
                values[i] = th[i] + shift;
            diag.converged = true;
            diag.bound_width = width;
            break;
        }
        const double ref = th[0];
        for (std::size_t i = 0; i < n; ++i)
            h[i] = th[i] - ref;
    }
    if (!diag.converged)
        throw SolverError("value iteration did not converge within " + std::to_string(params.max_iterations) +
                          " iterations (last span " + std::to_string(diag.span_history.back()) + ")");

    out.actions.resize(n);
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double best;
        out.actions[i] = static_cast<std::uint8_t>(argmax_q(op, i, values, scratch, best));
        residual = std::max(residual, std::abs(best - values[i]));
    }
    diag.bellman_residual = residual;
    out.values = std::move(values);
    return out;
}

ValueGrid solve_two_state(const ChannelModel& model, const SolverParams& params)
{
    params.validate();
    return solve(*two_state_dynamics(model, params.w, params.r_s), params);
}

ValueGrid solve_gilbert_elliot(const ChannelModel& model, const SolverParams& params)
{
    params.validate();
    return solve(*gilbert_elliot_dynamics(model, params.w, params.r_s), params);
}

ValueGrid solve_three_state(const ChannelModel& model, const SolverParams& params)
{
    params.validate();
    return solve(*three_state_dynamics(model, params.w, params.r_s), params);
}

ValueGrid solve_two_channel(const ChannelModel& ch1, const ChannelModel& ch2, const SolverParams& params)
{
    params.validate();
    return solve(*two_channel_dynamics(ch1, ch2, params.w, params.r_s), params);
}

ThresholdReport extract_threshold(const ValueGrid& grid, const SolverParams& params, const ChannelModel& model)
{
    if (grid.grid.domain() != Domain::Interval)
        throw PreconditionError("threshold extraction needs a one-dimensional value grid");
    if (model.states() != 2)
        throw PreconditionError("threshold extraction needs a two-state channel");
    ThresholdReport rep;
    const double wr = params.w * model.primary_reward();
    const double sr = (1.0 - params.w) * params.r_s;
    const double p_ne = model.transitions()(1, 0);
    if (wr > 0.0) {
        rep.lower_bound = 1.0 - sr / wr;
        rep.upper_bound = 1.0 - sr * p_ne / wr;
    } else {
        rep.lower_bound = rep.upper_bound = -std::numeric_limits<double>::infinity();
    }
    rep.finite_m_lower = model.transitions().stationary()[0];
    rep.finite_m_upper = model.transitions()(0, 0);

    std::size_t crossing = 0;
    int switches = 0;
    for (std::size_t i = 1; i < grid.actions.size(); ++i) {
        if (grid.actions[i] == grid.actions[i - 1])
            continue;
        ++switches;
        if (grid.actions[i - 1] != 0)
            throw InvariantViolation("action grid switches from transmit back to listen near p = " +
                                     std::to_string(grid.point(i).x));
        crossing = i;
    }
    if (switches > 1)
        throw InvariantViolation("action grid has " + std::to_string(switches) + " listen/transmit switches");
    if (switches == 0) {
        rep.uniform_action = grid.action(0);
        return rep;
    }
    rep.p_th = 0.5 * (grid.point(crossing - 1).x + grid.point(crossing).x);
    return rep;
}

} // namespace cogarq
