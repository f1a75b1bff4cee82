#include "cogarq/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cogarq/errors.hpp"

namespace cogarq {

std::string_view to_string(Action a) noexcept
{
    switch (a) {
    case Action::Listen: return "listen";
    case Action::Transmit: return "transmit";
    case Action::ListenBoth: return "listen_both";
    case Action::TransmitCh1: return "tx_ch1";
    case Action::TransmitCh2: return "tx_ch2";
    }
    return "?";
}

std::string_view to_string(Feedback f) noexcept { return f == Feedback::Ack ? "ACK" : "NACK"; }

int action_index(Action a) noexcept
{
    switch (a) {
    case Action::Listen:
    case Action::ListenBoth: return 0;
    case Action::Transmit:
    case Action::TransmitCh1: return 1;
    case Action::TransmitCh2: return 2;
    }
    return 0;
}

Action single_channel_action(int index)
{
    switch (index) {
    case 0: return Action::Listen;
    case 1: return Action::Transmit;
    default: throw PreconditionError("single-channel action index out of range: " + std::to_string(index));
    }
}

Action two_channel_action(int index)
{
    switch (index) {
    case 0: return Action::ListenBoth;
    case 1: return Action::TransmitCh1;
    case 2: return Action::TransmitCh2;
    default: throw PreconditionError("two-channel action index out of range: " + std::to_string(index));
    }
}

bool is_two_channel(Action a) noexcept
{
    return a == Action::ListenBoth || a == Action::TransmitCh1 || a == Action::TransmitCh2;
}

Belief::Belief(std::vector<double> probs) : probs_(std::move(probs))
{
    if (probs_.empty())
        throw ConstructionError("belief must have at least one state");
    double sum = 0.0;
    for (double& p : probs_) {
        if (!(p >= -1e-12 && p <= 1.0 + 1e-12))
            throw ConstructionError("belief entry outside [0, 1]: " + std::to_string(p));
        p = std::clamp(p, 0.0, 1.0);
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ConstructionError("belief does not sum to 1 (sum = " + std::to_string(sum) + ")");
    for (double& p : probs_)
        p /= sum;
}

Belief Belief::from_scalar(double p)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw ConstructionError("scalar belief outside [0, 1]");
    return Belief({p, 1.0 - p});
}

Belief Belief::from_pair(double p, double q)
{
    if (!(p >= 0.0 && q >= 0.0 && p <= 1.0 && q <= 1.0))
        throw ConstructionError("pair belief coordinates outside [0, 1]");
    double rest = 1.0 - p - q;
    if (rest < -1e-12)
        throw ConstructionError("pair belief violates p + q <= 1");
    return Belief({std::max(rest, 0.0), p, q});
}

Belief Belief::uniform(std::size_t states)
{
    return Belief(std::vector<double>(states, 1.0 / static_cast<double>(states)));
}

double Belief::scalar() const
{
    if (probs_.size() != 2)
        throw PreconditionError("scalar view requires a two-state belief");
    return probs_[0];
}

std::pair<double, double> Belief::pair() const
{
    if (probs_.size() != 3)
        throw PreconditionError("pair view requires a three-state belief");
    return {probs_[1], probs_[2]};
}

} // namespace cogarq
