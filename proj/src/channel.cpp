#include "cogarq/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "cogarq/errors.hpp"

namespace cogarq {

namespace {

constexpr double kRowTolerance = 1e-12;
constexpr double kStationaryResidual = 1e-10;

// Irreducible + aperiodic <=> primitive <=> (P > 0)^k is all-positive for k = (n-1)^2 + 1.
bool is_primitive(std::size_t n, const std::vector<double>& data)
{
    using Pattern = std::vector<char>;
    Pattern base(n * n);
    for (std::size_t i = 0; i < n * n; ++i)
        base[i] = data[i] > 0.0;
    Pattern power = base;
    const std::size_t steps = (n - 1) * (n - 1) + 1;
    for (std::size_t s = 1; s < steps; ++s) {
        Pattern next(n * n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                if (power[i * n + k])
                    for (std::size_t j = 0; j < n; ++j)
                        next[i * n + j] |= base[k * n + j];
        power.swap(next);
    }
    return std::all_of(power.begin(), power.end(), [](char c) { return c != 0; });
}

std::vector<double> solve_stationary(std::size_t n, const std::vector<double>& data)
{
    Eigen::MatrixXd a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                data[j * n + i] - (i == j ? 1.0 : 0.0);
    a.row(static_cast<Eigen::Index>(n - 1)).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    rhs(static_cast<Eigen::Index>(n - 1)) = 1.0;
    Eigen::VectorXd pi = a.fullPivLu().solve(rhs);

    std::vector<double> out(pi.data(), pi.data() + n);
    double sum = 0.0;
    for (double& v : out) {
        v = std::max(v, 0.0);
        sum += v;
    }
    for (double& v : out)
        v /= sum;

    double residual = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += out[i] * data[i * n + j];
        residual = std::max(residual, std::abs(acc - out[j]));
    }
    if (!(residual < kStationaryResidual))
        throw ConstructionError("stationary distribution residual " + std::to_string(residual) +
                                " exceeds 1e-10");
    return out;
}

void check_probability(double v, const char* what)
{
    if (!(v >= 0.0 && v <= 1.0))
        throw ConstructionError(std::string(what) + " must lie in [0, 1], got " + std::to_string(v));
}

} // namespace

TransitionMatrix::TransitionMatrix(std::vector<std::vector<double>> rows) : n_(rows.size())
{
    if (n_ < 2)
        throw ConstructionError("transition matrix needs at least two states");
    data_.reserve(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) {
        if (rows[i].size() != n_)
            throw ConstructionError("transition matrix row " + std::to_string(i) + " has " +
                                    std::to_string(rows[i].size()) + " entries, expected " +
                                    std::to_string(n_));
        double sum = 0.0;
        for (double v : rows[i]) {
            check_probability(v, "transition probability");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kRowTolerance)
            throw ConstructionError("transition matrix row " + std::to_string(i) +
                                    " does not sum to 1 (sum = " + std::to_string(sum) + ")");
        data_.insert(data_.end(), rows[i].begin(), rows[i].end());
    }
    if (!is_primitive(n_, data_))
        throw ConstructionError("transition matrix is not irreducible and aperiodic");
    stationary_ = solve_stationary(n_, data_);
}

TransitionMatrix TransitionMatrix::two_state(double p00, double p10)
{
    check_probability(p00, "p00");
    check_probability(p10, "p10");
    return TransitionMatrix({{p00, 1.0 - p00}, {p10, 1.0 - p10}});
}

std::vector<std::vector<double>> TransitionMatrix::rows() const
{
    std::vector<std::vector<double>> out(n_);
    for (std::size_t i = 0; i < n_; ++i)
        out[i].assign(data_.begin() + static_cast<std::ptrdiff_t>(i * n_),
                      data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_));
    return out;
}

std::string_view to_string(Preset p) noexcept
{
    switch (p) {
    case Preset::General: return "general";
    case Preset::Erasure: return "erasure";
    case Preset::GilbertElliot: return "gilbert_elliot";
    case Preset::ThreeState: return "three_state";
    }
    return "?";
}

ChannelModel::ChannelModel(TransitionMatrix transitions, SuccessProfile success, double primary_reward,
                           std::vector<std::string> labels, Preset preset)
    : transitions_(std::move(transitions)), success_(std::move(success)), primary_reward_(primary_reward),
      labels_(std::move(labels)), preset_(preset)
{
    const std::size_t s = transitions_.size();
    if (success_.silent_ack.size() != s || success_.transmit_ack.size() != s)
        throw ConstructionError("success profile length does not match the number of states");
    for (double v : success_.silent_ack)
        check_probability(v, "silent ACK probability");
    for (double v : success_.transmit_ack)
        check_probability(v, "transmit ACK probability");
    if (!(primary_reward_ >= 0.0) || !std::isfinite(primary_reward_))
        throw ConstructionError("primary reward must be finite and non-negative");
    if (!labels_.empty() && labels_.size() != s)
        throw ConstructionError("state label count does not match the number of states");
}

ChannelModel ChannelModel::erasure(double p_ee, double p_ne, double primary_reward)
{
    return ChannelModel(TransitionMatrix::two_state(p_ee, p_ne), SuccessProfile{{0.0, 1.0}, {0.0, 0.0}},
                        primary_reward, {"E", "N"}, Preset::Erasure);
}

ChannelModel ChannelModel::gilbert_elliot(double p_bb, double p_gb, double gamma1, double gamma2,
                                          double gamma3, double gamma4, double primary_reward)
{
    return ChannelModel(TransitionMatrix::two_state(p_bb, p_gb),
                        SuccessProfile{{gamma1, gamma3}, {gamma2, gamma4}}, primary_reward, {"B", "G"},
                        Preset::GilbertElliot);
}

ChannelModel ChannelModel::three_state(TransitionMatrix transitions, double primary_reward)
{
    if (transitions.size() != 3)
        throw ConstructionError("three-state preset needs a 3x3 transition matrix");
    return ChannelModel(std::move(transitions), SuccessProfile{{0.0, 1.0, 1.0}, {0.0, 0.0, 1.0}},
                        primary_reward, {"B", "G", "Vg"}, Preset::ThreeState);
}

bool ChannelModel::is_erasure() const
{
    return states() == 2 && success_.silent_ack == std::vector<double>{0.0, 1.0} &&
           success_.transmit_ack == std::vector<double>{0.0, 0.0};
}

Belief stationary_distribution(const TransitionMatrix& p) { return Belief(p.stationary()); }

double m_step_erasure_prob(std::uint64_t m, double p_ee, double p_ne)
{
    if (!(p_ee > p_ne))
        throw PreconditionError("T^M requires a positively correlated channel (P_EE > P_NE)");
    if (!(p_ee <= 1.0 && p_ne >= 0.0))
        throw PreconditionError("T^M requires probabilities in [0, 1]");
    const double decay = std::pow(p_ee - p_ne, static_cast<double>(m) + 1.0);
    return (p_ne + decay * (1.0 - p_ee)) / (1.0 + p_ne - p_ee);
}

ChannelState sample_state(std::span<const double> distribution, RandomStream& rng)
{
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t j = 0; j < distribution.size(); ++j) {
        acc += distribution[j];
        if (u < acc)
            return j;
    }
    // Rounding left u above the accumulated mass: fall back to the last state with mass.
    for (std::size_t j = distribution.size(); j-- > 0;)
        if (distribution[j] > 0.0)
            return j;
    return distribution.size() - 1;
}

ChannelState sample_transition(ChannelState state, const TransitionMatrix& p, RandomStream& rng)
{
    return sample_state(p.row(state), rng);
}

Feedback sample_ack(ChannelState state, bool secondary_transmits, const SuccessProfile& profile,
                    RandomStream& rng)
{
    const double prob = profile.ack_probability(state, secondary_transmits);
    return rng.uniform() < prob ? Feedback::Ack : Feedback::Nack;
}

} // namespace cogarq
