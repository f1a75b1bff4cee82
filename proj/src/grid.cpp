#include "cogarq/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cogarq/errors.hpp"

namespace cogarq {

std::string_view to_string(Domain d) noexcept
{
    switch (d) {
    case Domain::Interval: return "interval";
    case Domain::Simplex: return "simplex";
    case Domain::Square: return "square";
    }
    return "?";
}

BeliefGrid::BeliefGrid(Domain domain, std::size_t resolution) : domain_(domain), n_(resolution)
{
    if (n_ < 2)
        throw PreconditionError("grid resolution must be at least 2");
    switch (domain_) {
    case Domain::Interval: size_ = n_; break;
    case Domain::Square: size_ = n_ * n_; break;
    case Domain::Simplex:
        size_ = n_ * (n_ + 1) / 2;
        simplex_i_.reserve(size_);
        simplex_j_.reserve(size_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; i + j < n_; ++j) {
                simplex_i_.push_back(static_cast<std::uint32_t>(i));
                simplex_j_.push_back(static_cast<std::uint32_t>(j));
            }
        break;
    }
    if (size_ > 0xffffffffULL)
        throw PreconditionError("grid too large");
}

GridPoint BeliefGrid::point(std::size_t node) const
{
    const double h = static_cast<double>(n_ - 1);
    switch (domain_) {
    case Domain::Interval: return {static_cast<double>(node) / h, 0.0};
    case Domain::Square: return {static_cast<double>(node / n_) / h, static_cast<double>(node % n_) / h};
    case Domain::Simplex: return {simplex_i_[node] / h, simplex_j_[node] / h};
    }
    return {};
}

std::size_t BeliefGrid::index(std::size_t i, std::size_t j) const
{
    switch (domain_) {
    case Domain::Interval: return i;
    case Domain::Square: return i * n_ + j;
    case Domain::Simplex: return row_offset(i) + j;
    }
    return 0;
}

std::size_t BeliefGrid::mirror(std::size_t node) const
{
    if (domain_ != Domain::Square)
        return node;
    return (node % n_) * n_ + node / n_;
}

namespace {

// Cell index and fractional offset along one axis, with the last cell closed on the right.
std::pair<std::size_t, double> locate(double x, std::size_t n)
{
    const double f = std::clamp(x, 0.0, 1.0) * static_cast<double>(n - 1);
    std::size_t i = static_cast<std::size_t>(std::floor(f));
    if (i > n - 2)
        i = n - 2;
    return {i, std::clamp(f - static_cast<double>(i), 0.0, 1.0)};
}

} // namespace

Stencil BeliefGrid::stencil(GridPoint p) const
{
    Stencil s;
    switch (domain_) {
    case Domain::Interval: {
        auto [i, a] = locate(p.x, n_);
        s.add(static_cast<std::uint32_t>(i), 1.0 - a);
        s.add(static_cast<std::uint32_t>(i + 1), a);
        break;
    }
    case Domain::Square: {
        auto [i, a] = locate(p.x, n_);
        auto [j, b] = locate(p.y, n_);
        s.add(static_cast<std::uint32_t>(index(i, j)), (1.0 - a) * (1.0 - b));
        s.add(static_cast<std::uint32_t>(index(i + 1, j)), a * (1.0 - b));
        s.add(static_cast<std::uint32_t>(index(i, j + 1)), (1.0 - a) * b);
        s.add(static_cast<std::uint32_t>(index(i + 1, j + 1)), a * b);
        break;
    }
    case Domain::Simplex: {
        double x = std::max(p.x, 0.0);
        double y = std::max(p.y, 0.0);
        if (x + y > 1.0) {
            const double t = x + y;
            x /= t;
            y /= t;
        }
        const double h = static_cast<double>(n_ - 1);
        const double fx = x * h;
        const double fy = y * h;
        auto i = static_cast<std::size_t>(std::floor(fx));
        auto j = static_cast<std::size_t>(std::floor(fy));
        double a = fx - static_cast<double>(i);
        double b = fy - static_cast<double>(j);
        // Pull the anchor back inside so that the lower triangle (i,j),(i+1,j),(i,j+1) exists.
        while (i + j > n_ - 2) {
            if (i > 0) {
                --i;
                a += 1.0;
            } else {
                --j;
                b += 1.0;
            }
        }
        if (a + b <= 1.0 || i + j + 2 > n_ - 1) {
            double w0 = std::max(1.0 - a - b, 0.0);
            const double t = w0 + a + b;
            s.add(static_cast<std::uint32_t>(index(i, j)), w0 / t);
            s.add(static_cast<std::uint32_t>(index(i + 1, j)), a / t);
            s.add(static_cast<std::uint32_t>(index(i, j + 1)), b / t);
        } else {
            s.add(static_cast<std::uint32_t>(index(i + 1, j + 1)), a + b - 1.0);
            s.add(static_cast<std::uint32_t>(index(i + 1, j)), 1.0 - b);
            s.add(static_cast<std::uint32_t>(index(i, j + 1)), 1.0 - a);
        }
        break;
    }
    }
    return s;
}

} // namespace cogarq
