#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cogarq {

/// Two-state erasure channel and reward weights for the "transmit M packets after a NACK" scheme.
struct MPolicyParams {
    double p_ee = 0.99;
    double p_ne = 0.01;
    double w = 0.6;
    double r_p = 1.0;
    double r_s = 1.0;

    void validate() const;
};

/// Non-negative burst length, or the "transmit forever" sentinel.
class BurstLength {
public:
    static BurstLength finite(std::uint64_t m) noexcept { return BurstLength(m, false); }
    static BurstLength infinite() noexcept { return BurstLength(0, true); }

    bool is_infinite() const noexcept { return infinite_; }
    /// Burst length; throws PreconditionError on the infinite sentinel.
    std::uint64_t value() const;
    std::string to_string() const;

    friend bool operator==(const BurstLength&, const BurstLength&) = default;

private:
    BurstLength(std::uint64_t m, bool inf) noexcept : m_(m), infinite_(inf) {}
    std::uint64_t m_ = 0;
    bool infinite_ = false;
};

struct MPolicyEval {
    std::uint64_t m = 0;
    double pss_n = 0.0;
    double pss_e = 0.0;
    double pss_s = 0.0;
    double rate_p = 0.0;
    double rate_s = 0.0;
    double rate = 0.0;
};

/// Stationary throughputs of the M-policy in the long-run average sense.
MPolicyEval evaluate_m_policy(std::uint64_t m, const MPolicyParams& params);

/// Weighted throughput of the M-policy; the infinite sentinel gives (1 - w) r_s.
double weighted_rate(const BurstLength& m, const MPolicyParams& params);

/// Maximizer of R(M) over M >= 0, ties toward the smaller M. Scans upward while R increases,
/// which is exact because R(M) has a single peak.
BurstLength optimal_m(const MPolicyParams& params);

/// Sign of R(M+1) - R(M) from the closed-form increment B^(M+1) (C M + D) - E.
int rate_increment_sign(std::uint64_t m, const MPolicyParams& params);

struct IncrementConstants {
    double a_minus_b = 0.0;
    double B = 0.0;
    double C = 0.0;
    double D = 0.0;
    double E = 0.0;
};

IncrementConstants increment_constants(const MPolicyParams& params);

struct RootSolution {
    IncrementConstants constants;
    double K = 0.0;
    /// Root of C log M1 = K - M1 log B on M1 >= D (M1 = D when R already decreases at M = 0).
    double m1 = 0.0;
    /// (M1 - D) / C, clamped at 0.
    double m_continuous = 0.0;
    /// ceil(m_continuous): the integer maximizer implied by the root.
    std::uint64_t m_integer = 0;
};

/// Continuous root of the stationarity condition R(M+1) = R(M), found by bisection.
RootSolution root_equation_m1(const MPolicyParams& params);

/// Slots a greedy user keeps transmitting after a NACK (belief starts at P_EE and relaxes
/// toward P(E)); infinite when the myopic comparison never turns back to listening.
BurstLength greedy_burst_length(const MPolicyParams& params);

struct RatePoint {
    std::uint64_t m = 0;
    double rate_p = 0.0;
    double rate_s = 0.0;
};

struct RateRegion {
    /// (R_p(M), R_s(M)) for each requested M, in input order.
    std::vector<RatePoint> points;
    /// Indices into `points` of the upper concave boundary, ordered by decreasing R_p.
    std::vector<std::size_t> frontier;
    /// Consecutive frontier vertices; points on a segment are reached by time-sharing its ends.
    std::vector<std::pair<std::size_t, std::size_t>> segments;
};

/// Achievable (R_p, R_s) pairs for a list of distinct burst lengths. `params.w` is ignored.
RateRegion rate_region(const MPolicyParams& params, const std::vector<std::uint64_t>& m_list);

} // namespace cogarq
