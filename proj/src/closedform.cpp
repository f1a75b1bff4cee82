#include "cogarq/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cogarq/channel.hpp"
#include "cogarq/errors.hpp"

namespace cogarq {

namespace {

constexpr std::uint64_t kScanCap = 100000;

} // namespace

void MPolicyParams::validate() const
{
    if (!(p_ee >= 0.0 && p_ee <= 1.0 && p_ne >= 0.0 && p_ne <= 1.0))
        throw PreconditionError("transition probabilities must lie in [0, 1]");
    if (!(p_ee > p_ne))
        throw PreconditionError("M-policy analysis requires P_EE > P_NE");
    if (!(p_ne > 0.0))
        throw PreconditionError("M-policy analysis requires P_NE > 0 (otherwise E is absorbing)");
    if (!(w >= 0.0 && w <= 1.0))
        throw PreconditionError("weight w must lie in [0, 1]");
    if (!(r_p >= 0.0 && r_s >= 0.0) || !std::isfinite(r_p) || !std::isfinite(r_s))
        throw PreconditionError("rewards must be finite and non-negative");
}

std::uint64_t BurstLength::value() const
{
    if (infinite_)
        throw PreconditionError("burst length is infinite");
    return m_;
}

std::string BurstLength::to_string() const { return infinite_ ? "inf" : std::to_string(m_); }

MPolicyEval evaluate_m_policy(std::uint64_t m, const MPolicyParams& params)
{
    params.validate();
    const double t = m_step_erasure_prob(m, params.p_ee, params.p_ne);
    const double denom = 1.0 + 2.0 * params.p_ne - t;
    MPolicyEval out;
    out.m = m;
    out.pss_n = (1.0 - t) / denom;
    out.pss_e = params.p_ne / denom;
    out.pss_s = out.pss_e;
    const double norm = out.pss_n + out.pss_e + static_cast<double>(m) * out.pss_s;
    out.rate_p = params.r_p * out.pss_n / norm;
    out.rate_s = params.r_s * static_cast<double>(m) * out.pss_s / norm;
    out.rate = params.w * out.rate_p + (1.0 - params.w) * out.rate_s;
    return out;
}

double weighted_rate(const BurstLength& m, const MPolicyParams& params)
{
    if (m.is_infinite()) {
        params.validate();
        return (1.0 - params.w) * params.r_s;
    }
    return evaluate_m_policy(m.value(), params).rate;
}

BurstLength optimal_m(const MPolicyParams& params)
{
    params.validate();
    const double wr = params.w * params.r_p;
    const double sr = (1.0 - params.w) * params.r_s;
    if (wr < sr)
        return BurstLength::infinite();
    if (wr * (1.0 - params.p_ee) > sr)
        return BurstLength::finite(0);
    std::uint64_t m = 0;
    double current = evaluate_m_policy(0, params).rate;
    while (m < kScanCap) {
        const double next = evaluate_m_policy(m + 1, params).rate;
        if (!(next > current))
            return BurstLength::finite(m);
        current = next;
        ++m;
    }
    return BurstLength::infinite();
}

IncrementConstants increment_constants(const MPolicyParams& params)
{
    params.validate();
    const double a_coef = 1.0 - params.p_ee;
    const double b = params.p_ee - params.p_ne;
    const double p = params.p_ne;
    const double k = p * (1.0 - b);
    const double av = params.w * params.r_p * a_coef * k;
    const double bv = (1.0 - params.w) * params.r_s * a_coef * k;
    IncrementConstants c;
    c.a_minus_b = av - bv;
    c.B = b;
    c.C = (av - bv) * (1.0 - b);
    c.D = (av - bv) + av * (1.0 - b);
    c.E = (av - bv) - (1.0 - params.w) * params.r_s * p * p * (1.0 - b) * (1.0 - b);
    return c;
}

int rate_increment_sign(std::uint64_t m, const MPolicyParams& params)
{
    const IncrementConstants c = increment_constants(params);
    const double v = std::pow(c.B, static_cast<double>(m) + 1.0) * (c.C * static_cast<double>(m) + c.D) - c.E;
    return (v > 0.0) - (v < 0.0);
}

RootSolution root_equation_m1(const MPolicyParams& params)
{
    RootSolution out;
    out.constants = increment_constants(params);
    const auto& c = out.constants;
    if (!(c.a_minus_b > 0.0))
        throw PreconditionError("root equation needs a - b > 0 (w r_p > (1 - w) r_s)");
    if (!(c.C > 0.0))
        throw PreconditionError("root equation needs C > 0");
    if (!(c.D > 0.0))
        throw PreconditionError("root equation needs D > 0");
    if (!(c.E > 0.0))
        throw PreconditionError("root equation needs E > 0 (otherwise R(M) increases for every M)");
    if (!(c.B > 0.0))
        throw PreconditionError("root equation needs B = P_EE - P_NE > 0");

    const double log_b = std::log(c.B);
    out.K = c.C * std::log(c.E) + (c.D - c.C) * log_b;
    // Decreasing on M1 >= D: its derivative C / M1 + log B is negative there.
    auto f = [&](double m1) { return c.C * std::log(m1) + m1 * log_b - out.K; };

    double lo = c.D;
    if (!(f(lo) > 0.0)) {
        out.m1 = c.D;
        out.m_continuous = 0.0;
        out.m_integer = 0;
        return out;
    }
    double hi = 2.0 * c.D;
    while (f(hi) > 0.0)
        hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    out.m1 = 0.5 * (lo + hi);
    out.m_continuous = std::max((out.m1 - c.D) / c.C, 0.0);
    out.m_integer = static_cast<std::uint64_t>(std::ceil(out.m_continuous));
    return out;
}

BurstLength greedy_burst_length(const MPolicyParams& params)
{
    params.validate();
    const double sr = (1.0 - params.w) * params.r_s;
    const double wr = params.w * params.r_p;
    const double p_e = params.p_ne / (1.0 - params.p_ee + params.p_ne);
    // The belief falls monotonically from P_EE toward P(E) while transmitting, so the
    // transmit condition only gets easier to satisfy.
    if (sr >= wr * (1.0 - p_e))
        return sr > wr * (1.0 - params.p_ee) ? BurstLength::infinite() : BurstLength::finite(0);
    std::uint64_t count = 0;
    double p = params.p_ee;
    while (sr > wr * (1.0 - p)) {
        ++count;
        p = p * params.p_ee + (1.0 - p) * params.p_ne;
    }
    return BurstLength::finite(count);
}

RateRegion rate_region(const MPolicyParams& params, const std::vector<std::uint64_t>& m_list)
{
    params.validate();
    if (std::set<std::uint64_t>(m_list.begin(), m_list.end()).size() != m_list.size())
        throw PreconditionError("rate region burst lengths must be distinct");
    RateRegion out;
    out.points.reserve(m_list.size());
    for (std::uint64_t m : m_list) {
        const MPolicyEval e = evaluate_m_policy(m, params);
        out.points.push_back({m, e.rate_p, e.rate_s});
    }
    std::vector<std::size_t> order(out.points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& pa = out.points[a];
        const auto& pb = out.points[b];
        return pa.rate_p != pb.rate_p ? pa.rate_p > pb.rate_p : pa.rate_s > pb.rate_s;
    });
    // Upper hull walking from the largest R_p toward larger R_s.
    std::vector<std::size_t> hull;
    auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
        const auto& po = out.points[o];
        const auto& pa = out.points[a];
        const auto& pb = out.points[b];
        return (pa.rate_p - po.rate_p) * (pb.rate_s - po.rate_s) - (pa.rate_s - po.rate_s) * (pb.rate_p - po.rate_p);
    };
    for (std::size_t idx : order) {
        if (!hull.empty() && out.points[idx].rate_s <= out.points[hull.back()].rate_s)
            continue;
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), idx) <= 0.0)
            hull.pop_back();
        hull.push_back(idx);
    }
    out.frontier = hull;
    for (std::size_t i = 1; i < hull.size(); ++i)
        out.segments.emplace_back(hull[i - 1], hull[i]);
    return out;
}

} // namespace cogarq
