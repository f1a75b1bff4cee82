#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cogarq/channel.hpp"
#include "cogarq/closedform.hpp"
#include "cogarq/dp.hpp"
#include "cogarq/policies.hpp"

namespace cogarq {

/// Which policy to run; `grid` is required for DP and `m` for the M-policy.
struct PolicySpec {
    PolicyKind kind = PolicyKind::AlwaysListen;
    BurstLength m = BurstLength::finite(0);
    std::shared_ptr<const ValueGrid> grid;
};

PolicyHandle make_policy(const PolicySpec& spec, const PolicyContext& ctx);

struct SimConfig {
    std::vector<ChannelModel> models;
    double w = 0.5;
    double r_s = 1.0;
    std::size_t horizon = 1'000'000;
    /// Discarded leading slots; defaults to 1000 with a random initial belief and 0 otherwise.
    std::optional<std::size_t> burn_in;
    std::size_t replications = 16;
    std::uint64_t seed = 1;
    /// Start each episode from a uniformly random belief instead of the stationary one.
    bool random_init = false;
    /// Worker threads for replications; 0 uses the hardware concurrency.
    std::size_t threads = 0;
    /// When set, episode 0 writes one JSON object per slot.
    std::ostream* trace = nullptr;

    std::size_t effective_burn_in() const { return burn_in ? *burn_in : (random_init ? 1000 : 0); }
    PolicyContext context() const { return PolicyContext{models, w, r_s}; }
    void validate() const;
};

/// Per-slot averages over the counted (post burn-in) slots. In the two-channel problem the
/// feedback counts cover both channels, so ack_count + nack_count = 2 * slots.
struct RunStats {
    double rate_p = 0.0;
    double rate_s = 0.0;
    double rate = 0.0;
    double stderr_p = 0.0;
    double stderr_s = 0.0;
    double stderr_r = 0.0;
    std::uint64_t ack_count = 0;
    std::uint64_t nack_count = 0;
    std::uint64_t transmit_count = 0;
    std::uint64_t slots = 0;
    std::size_t replications = 0;
};

/// One episode with the stream derived from (seed, episode_index). Standard errors come from
/// 32 batch means.
RunStats run_episode(const SimConfig& config, const PolicySpec& policy, std::uint64_t episode_index);

/// All replications; standard errors across replications (batch means when there is one).
RunStats simulate(const SimConfig& config, const PolicySpec& policy);

struct SweepRow {
    double w = 0.0;
    PolicyKind policy = PolicyKind::AlwaysListen;
    /// Burst length used by the M-policy row.
    std::optional<BurstLength> m;
    RunStats stats;
};

/// One row per (w, policy). DP policies are re-solved at each w; the M-policy uses the
/// optimal burst length of the (erasure) model at each w.
std::vector<SweepRow> sweep_weights(const SimConfig& base, const std::vector<double>& w_grid,
                                    const std::vector<PolicyKind>& policies, const SolverParams& solver);

struct RegionPoint {
    double w = 0.0;
    double rate_p = 0.0;
    double rate_s = 0.0;
    double stderr_p = 0.0;
    double stderr_s = 0.0;
    bool dominated = false;
};

/// Simulated throughput pairs of the DP-optimal policy at each weight, with Pareto filtering.
std::vector<RegionPoint> empirical_rate_region(const SimConfig& base, const std::vector<double>& w_grid,
                                               const SolverParams& solver, double z = 2.0);

/// Marks points that another point beats in both coordinates by more than z combined
/// standard errors.
void mark_dominated(std::vector<RegionPoint>& points, double z);

} // namespace cogarq
