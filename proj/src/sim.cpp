#include "cogarq/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "json.hpp"

#include "cogarq/errors.hpp"
#include "cogarq/parallel.hpp"
#include "cogarq/rng.hpp"

namespace cogarq {

namespace {

constexpr std::size_t kBatches = 32;

struct Sample {
    double mean_p = 0.0;
    double mean_s = 0.0;
    double mean_r = 0.0;
};

double standard_error(const std::vector<double>& xs)
{
    const auto n = static_cast<double>(xs.size());
    if (xs.size() < 2)
        return 0.0;
    double mean = 0.0;
    for (double x : xs)
        mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (n - 1.0) / n);
}

GridPoint random_belief(ProblemKind kind, RandomStream& rng)
{
    switch (kind) {
    case ProblemKind::TwoState:
    case ProblemKind::GilbertElliot: return {rng.uniform(), 0.0};
    case ProblemKind::TwoChannel: {
        const double p = rng.uniform();
        return {p, rng.uniform()};
    }
    case ProblemKind::ThreeState: {
        double u = rng.uniform();
        double v = rng.uniform();
        if (u + v > 1.0) {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        return {u, v};
    }
    }
    return {};
}

} // namespace

PolicyHandle make_policy(const PolicySpec& spec, const PolicyContext& ctx)
{
    switch (spec.kind) {
    case PolicyKind::DP: return PolicyHandle::dp(ctx, spec.grid);
    case PolicyKind::Greedy: return PolicyHandle::greedy(ctx);
    case PolicyKind::MPolicy: return PolicyHandle::m_policy(ctx, spec.m);
    case PolicyKind::Genie: return PolicyHandle::genie(ctx);
    case PolicyKind::AlwaysListen: return PolicyHandle::always_listen(ctx);
    case PolicyKind::AlwaysTransmit: return PolicyHandle::always_transmit(ctx);
    }
    throw PreconditionError("unknown policy kind");
}

void SimConfig::validate() const
{
    if (models.empty() || models.size() > 2)
        throw PreconditionError("simulation needs one or two channel models");
    if (!(w >= 0.0 && w <= 1.0))
        throw PreconditionError("weight w must lie in [0, 1]");
    if (!(r_s >= 0.0) || !std::isfinite(r_s))
        throw PreconditionError("secondary reward must be finite and non-negative");
    if (replications < 1)
        throw PreconditionError("replications must be at least 1");
    if (!(horizon > effective_burn_in()))
        throw PreconditionError("horizon must exceed burn_in");
    if (horizon - effective_burn_in() < kBatches && replications == 1)
        throw PreconditionError("a single replication needs at least 32 counted slots for batch means");
    classify(models);
}

RunStats run_episode(const SimConfig& config, const PolicySpec& spec, std::uint64_t episode_index)
{
    config.validate();
    const PolicyContext ctx = config.context();
    const ProblemKind kind = ctx.problem();
    const bool two = kind == ProblemKind::TwoChannel;
    RandomStream rng = RandomStream::derive(config.seed, episode_index);

    PolicyHandle policy = make_policy(spec, ctx);
    if (config.random_init)
        policy.reset(random_belief(kind, rng));

    const ChannelModel& m1 = config.models[0];
    const ChannelModel* m2 = two ? &config.models[1] : nullptr;
    ChannelState s1 = sample_state(m1.transitions().stationary(), rng);
    ChannelState s2 = two ? sample_state(m2->transitions().stationary(), rng) : 0;

    const std::size_t burn = config.effective_burn_in();
    const std::size_t counted = config.horizon - burn;
    const std::size_t batch_len = counted / kBatches;
    std::ostream* trace = episode_index == 0 ? config.trace : nullptr;

    std::uint64_t acks1 = 0, acks2 = 0, nacks = 0, tx = 0;
    std::vector<double> batch_p, batch_s, batch_r;
    std::uint64_t b_acks1 = 0, b_acks2 = 0, b_tx = 0, b_len = 0;
    const double r1 = m1.primary_reward();
    const double r2 = two ? m2->primary_reward() : 0.0;

    for (std::size_t t = 0; t < config.horizon; ++t) {
        s1 = sample_transition(s1, m1.transitions(), rng);
        if (two)
            s2 = sample_transition(s2, m2->transitions(), rng);
        const GridPoint before = policy.belief();
        const Action a = policy.decide();
        Observation obs;
        obs.action = a;
        bool transmits = false;
        if (two) {
            const bool on1 = a == Action::TransmitCh1;
            const bool on2 = a == Action::TransmitCh2;
            transmits = on1 || on2;
            obs.feedback = sample_ack(s1, on1, m1.success(), rng);
            obs.second = sample_ack(s2, on2, m2->success(), rng);
        } else {
            transmits = a == Action::Transmit;
            obs.feedback = sample_ack(s1, transmits, m1.success(), rng);
        }
        policy.observe(obs);
        if (two)
            policy.reveal(s1, s2);
        else
            policy.reveal(s1);

        if (trace) {
            nlohmann::json row{{"slot", t},
                               {"state", two ? nlohmann::json::array({s1, s2}) : nlohmann::json(s1)},
                               {"action", to_string(a)},
                               {"feedback", to_string(obs.feedback)},
                               {"belief", nlohmann::json::array({before.x, before.y})}};
            if (obs.second)
                row["feedback2"] = to_string(*obs.second);
            *trace << row.dump() << '\n';
        }

        if (t < burn)
            continue;
        const bool ack1 = obs.feedback == Feedback::Ack;
        const bool ack2 = two && *obs.second == Feedback::Ack;
        acks1 += ack1;
        acks2 += ack2;
        nacks += !ack1;
        if (two)
            nacks += !ack2;
        tx += transmits;
        b_acks1 += ack1;
        b_acks2 += ack2;
        b_tx += transmits;
        if (++b_len == batch_len && batch_p.size() < kBatches) {
            const double len = static_cast<double>(b_len);
            const double p = (r1 * static_cast<double>(b_acks1) + r2 * static_cast<double>(b_acks2)) / len;
            const double s = config.r_s * static_cast<double>(b_tx) / len;
            batch_p.push_back(p);
            batch_s.push_back(s);
            batch_r.push_back(config.w * p + (1.0 - config.w) * s);
            b_acks1 = b_acks2 = b_tx = b_len = 0;
        }
    }

    RunStats out;
    const double n = static_cast<double>(counted);
    out.rate_p = (r1 * static_cast<double>(acks1) + r2 * static_cast<double>(acks2)) / n;
    out.rate_s = config.r_s * static_cast<double>(tx) / n;
    out.rate = config.w * out.rate_p + (1.0 - config.w) * out.rate_s;
    out.stderr_p = standard_error(batch_p);
    out.stderr_s = standard_error(batch_s);
    out.stderr_r = standard_error(batch_r);
    out.ack_count = acks1 + acks2;
    out.nack_count = nacks;
    out.transmit_count = tx;
    out.slots = counted;
    out.replications = 1;
    return out;
}

RunStats simulate(const SimConfig& config, const PolicySpec& spec)
{
    config.validate();
    const std::size_t reps = config.replications;
    std::vector<RunStats> runs(reps);
    parallel_for(reps, config.threads, [&](std::size_t i) { runs[i] = run_episode(config, spec, i); });
    if (reps == 1)
        return runs.front();

    RunStats out;
    std::vector<double> ps, ss, rs;
    for (const auto& r : runs) {
        ps.push_back(r.rate_p);
        ss.push_back(r.rate_s);
        rs.push_back(r.rate);
        out.ack_count += r.ack_count;
        out.nack_count += r.nack_count;
        out.transmit_count += r.transmit_count;
        out.slots += r.slots;
    }
    const double n = static_cast<double>(reps);
    for (std::size_t i = 0; i < reps; ++i) {
        out.rate_p += ps[i] / n;
        out.rate_s += ss[i] / n;
    }
    out.rate = config.w * out.rate_p + (1.0 - config.w) * out.rate_s;
    out.stderr_p = standard_error(ps);
    out.stderr_s = standard_error(ss);
    out.stderr_r = standard_error(rs);
    out.replications = reps;
    return out;
}

std::vector<SweepRow> sweep_weights(const SimConfig& base, const std::vector<double>& w_grid,
                                    const std::vector<PolicyKind>& policies, const SolverParams& solver)
{
    std::vector<SweepRow> rows;
    for (double w : w_grid) {
        if (!(w >= 0.0 && w <= 1.0))
            throw PreconditionError("weight grid entries must lie in [0, 1]");
        SimConfig cfg = base;
        cfg.w = w;
        std::shared_ptr<const ValueGrid> grid;
        for (PolicyKind kind : policies) {
            PolicySpec spec;
            spec.kind = kind;
            SweepRow row;
            row.w = w;
            row.policy = kind;
            if (kind == PolicyKind::DP) {
                if (!grid) {
                    SolverParams sp = solver;
                    sp.w = w;
                    sp.r_s = cfg.r_s;
                    grid = std::make_shared<const ValueGrid>(solve_problem(cfg.models, sp));
                }
                spec.grid = grid;
            } else if (kind == PolicyKind::MPolicy) {
                const ChannelModel& m = cfg.models.at(0);
                if (cfg.models.size() != 1 || !m.is_erasure())
                    throw PreconditionError("the M-policy sweep needs a single erasure channel");
                const MPolicyParams mp{m.transitions()(0, 0), m.transitions()(1, 0), w, m.primary_reward(), cfg.r_s};
                spec.m = optimal_m(mp);
                row.m = spec.m;
            }
            row.stats = simulate(cfg, spec);
            rows.push_back(row);
        }
    }
    return rows;
}

void mark_dominated(std::vector<RegionPoint>& points, double z)
{
    for (auto& a : points) {
        a.dominated = false;
        for (const auto& b : points) {
            const double gap_p = z * std::hypot(a.stderr_p, b.stderr_p);
            const double gap_s = z * std::hypot(a.stderr_s, b.stderr_s);
            if (b.rate_p - a.rate_p > gap_p && b.rate_s - a.rate_s > gap_s) {
                a.dominated = true;
                break;
            }
        }
    }
}

std::vector<RegionPoint> empirical_rate_region(const SimConfig& base, const std::vector<double>& w_grid,
                                               const SolverParams& solver, double z)
{
    std::vector<RegionPoint> out;
    for (const SweepRow& row : sweep_weights(base, w_grid, {PolicyKind::DP}, solver))
        out.push_back({row.w, row.stats.rate_p, row.stats.rate_s, row.stats.stderr_p, row.stats.stderr_s, false});
    mark_dominated(out, z);
    return out;
}

} // namespace cogarq
