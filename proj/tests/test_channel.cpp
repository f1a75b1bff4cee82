#include "doctest.h"

#include <cmath>

#include "cogarq/channel.hpp"
#include "cogarq/errors.hpp"
#include "oracles.hpp"

using namespace cogarq;

TEST_CASE("transition matrix rejects invalid rows")
{
    CHECK_THROWS_AS(TransitionMatrix({{0.5, 0.4}, {0.5, 0.5}}), ConstructionError);
    CHECK_THROWS_AS(TransitionMatrix({{1.2, -0.2}, {0.5, 0.5}}), ConstructionError);
    CHECK_THROWS_AS(TransitionMatrix(std::vector<std::vector<double>>{{1.0}}), ConstructionError);
    CHECK_THROWS_AS(TransitionMatrix({{0.5, 0.5}, {0.5, 0.5, 0.0}}), ConstructionError);
}

TEST_CASE("periodic or reducible chains are rejected")
{
    CHECK_THROWS_AS(TransitionMatrix({{0.0, 1.0}, {1.0, 0.0}}), ConstructionError);
    CHECK_THROWS_AS(TransitionMatrix({{1.0, 0.0}, {0.0, 1.0}}), ConstructionError);
    CHECK_THROWS_AS(TransitionMatrix({{1.0, 0.0}, {0.5, 0.5}}), ConstructionError);
    CHECK_THROWS_AS(TransitionMatrix({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}), ConstructionError);
    CHECK_NOTHROW(TransitionMatrix({{0, 1, 0}, {0, 0, 1}, {0.5, 0, 0.5}}));
}

TEST_CASE("stationary distribution matches power iteration")
{
    const std::vector<oracle::Mat> cases = {
        {{0.99, 0.01}, {0.01, 0.99}},
        {{0.8, 0.2}, {0.1, 0.9}},
        {{0.9, 0.005, 0.095}, {0.005, 0.9, 0.095}, {0.095, 0.005, 0.9}},
        {{0.2, 0.3, 0.5}, {0.6, 0.1, 0.3}, {0.25, 0.25, 0.5}},
        {{0.9999, 0.0001}, {0.3, 0.7}},
    };
    for (const auto& rows : cases) {
        const TransitionMatrix p(rows);
        const auto expect = oracle::power_iteration(rows, 2000000);
        const Belief pi = stationary_distribution(p);
        for (std::size_t i = 0; i < rows.size(); ++i)
            CHECK(pi[i] == doctest::Approx(expect[i]).epsilon(1e-10));
    }
}

TEST_CASE("erasure stationary law is P_NE / (P_NE + P_EN)")
{
    const auto m = ChannelModel::erasure(0.99, 0.01);
    CHECK(m.transitions().stationary()[0] == doctest::Approx(0.5).epsilon(1e-14));
    const auto g = ChannelModel::erasure(0.8, 0.1);
    CHECK(g.transitions().stationary()[0] == doctest::Approx(0.1 / 0.3).epsilon(1e-14));
}

TEST_CASE("T^M equals the (M+1)-step E->E return probability")
{
    for (auto [pee, pne] : {std::pair{0.99, 0.01}, {0.8, 0.1}, {0.6, 0.05}, {0.3, 0.2}}) {
        const oracle::Mat p = {{pee, 1 - pee}, {pne, 1 - pne}};
        for (std::uint64_t m : {0, 1, 2, 5, 17, 60}) {
            const auto pm = oracle::power(p, m + 1);
            CHECK(m_step_erasure_prob(m, pee, pne) == doctest::Approx(pm[0][0]).epsilon(1e-12));
        }
    }
    CHECK(m_step_erasure_prob(0, 0.99, 0.01) == doctest::Approx(0.99));
    CHECK_THROWS_AS(m_step_erasure_prob(3, 0.1, 0.2), PreconditionError);
}

TEST_CASE("presets carry the documented success profiles")
{
    const auto e = ChannelModel::erasure(0.99, 0.01, 2.0);
    CHECK(e.is_erasure());
    CHECK(e.primary_reward() == 2.0);
    CHECK(e.success().ack_probability(1, false) == 1.0);
    CHECK(e.success().ack_probability(1, true) == 0.0);
    const auto g = ChannelModel::gilbert_elliot(0.8, 0.1, 0.2, 0.01, 0.95, 0.3);
    CHECK_FALSE(g.is_erasure());
    CHECK(g.success().silent_ack == std::vector<double>{0.2, 0.95});
    CHECK(g.success().transmit_ack == std::vector<double>{0.01, 0.3});
    const auto t = ChannelModel::three_state(TransitionMatrix({{0.9, 0.005, 0.095}, {0.005, 0.9, 0.095}, {0.095, 0.005, 0.9}}));
    CHECK(t.success().silent_ack == std::vector<double>{0.0, 1.0, 1.0});
    CHECK(t.success().transmit_ack == std::vector<double>{0.0, 0.0, 1.0});
    CHECK_THROWS_AS(ChannelModel(TransitionMatrix::two_state(0.5, 0.5), SuccessProfile{{0.1}, {0.1, 0.2}}),
                    ConstructionError);
}

TEST_CASE("sampling frequencies follow the transition rows")
{
    const TransitionMatrix p({{0.2, 0.3, 0.5}, {0.6, 0.1, 0.3}, {0.25, 0.25, 0.5}});
    RandomStream rng(42);
    const int n = 200000;
    std::vector<int> hits(3, 0);
    for (int i = 0; i < n; ++i)
        ++hits[sample_transition(0, p, rng)];
    for (std::size_t j = 0; j < 3; ++j) {
        const double f = hits[j] / double(n);
        const double sigma = std::sqrt(p(0, j) * (1 - p(0, j)) / n);
        CHECK(std::abs(f - p(0, j)) < 5 * sigma);
    }
}

TEST_CASE("random streams are reproducible and distinct")
{
    RandomStream a = RandomStream::derive(7, 3);
    RandomStream b = RandomStream::derive(7, 3);
    RandomStream c = RandomStream::derive(7, 4);
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        CHECK(x != c());
    }
    RandomStream u(1);
    for (int i = 0; i < 1000; ++i) {
        const double v = u.uniform();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}
