#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace cogarq {

enum class Feedback : std::uint8_t { Nack = 0, Ack = 1 };

/// Secondary-user action. Single-channel models use {Listen, Transmit}; the
/// two-channel model uses {ListenBoth, TransmitCh1, TransmitCh2}.
enum class Action : std::uint8_t { Listen, Transmit, ListenBoth, TransmitCh1, TransmitCh2 };

std::string_view to_string(Action a) noexcept;
std::string_view to_string(Feedback f) noexcept;

/// Position of the action within its model's action set (Listen/ListenBoth are 0).
int action_index(Action a) noexcept;
Action single_channel_action(int index);
Action two_channel_action(int index);
bool is_two_channel(Action a) noexcept;

/// What the secondary user did in a slot and the ARQ feedback it overheard.
/// `feedback` is the (only / first) channel; `second` is channel 2 in the two-channel model.
/// On the channel the secondary user occupies, the feedback carries no information.
struct Observation {
    Action action = Action::Listen;
    Feedback feedback = Feedback::Nack;
    std::optional<Feedback> second;
};

/// Point on the probability simplex over primary-channel states, stored as the full vector.
/// Scalar (S = 2) and pair (S = 3) forms are exact views of the same data.
class Belief {
public:
    Belief() = default;

    /// Entries must lie in [0, 1] and sum to 1 within 1e-12 (tiny drift is renormalized away).
    explicit Belief(std::vector<double> probs);

    /// Two-state belief (p, 1 - p); p is the probability of state 0 (erasure / bad).
    static Belief from_scalar(double p);

    /// Three-state belief (1 - p - q, p, q) with p = P(G), q = P(Vg).
    /// A remainder down to -1e-12 is clamped to zero.
    static Belief from_pair(double p, double q);

    static Belief uniform(std::size_t states);

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    std::span<const double> probs() const noexcept { return probs_; }

    double scalar() const;
    std::pair<double, double> pair() const;

    friend bool operator==(const Belief&, const Belief&) = default;

private:
    std::vector<double> probs_;
};

} // namespace cogarq
