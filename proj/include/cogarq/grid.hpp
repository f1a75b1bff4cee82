#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace cogarq {

enum class Domain { Interval, Simplex, Square };

std::string_view to_string(Domain d) noexcept;

/// A belief coordinate. On the interval only `x` is used; on the simplex (x, y) = (P(G), P(Vg));
/// on the square (x, y) are the two per-channel erasure probabilities.
struct GridPoint {
    double x = 0.0;
    double y = 0.0;
};

/// Linear-interpolation weights of a point against at most four grid nodes.
struct Stencil {
    std::array<std::uint32_t, 4> node{};
    std::array<double, 4> weight{};
    int count = 0;

    void add(std::uint32_t n, double w)
    {
        if (w == 0.0)
            return;
        node[static_cast<std::size_t>(count)] = n;
        weight[static_cast<std::size_t>(count)] = w;
        ++count;
    }
};

/// Uniform discretization of a belief domain with `resolution` points per axis.
/// Interval: n nodes at i/(n-1). Square: n*n nodes, index i*n + j. Simplex: nodes (i, j)
/// with i + j <= n-1, stored row by row in i.
class BeliefGrid {
public:
    BeliefGrid() = default;
    BeliefGrid(Domain domain, std::size_t resolution);

    Domain domain() const noexcept { return domain_; }
    std::size_t resolution() const noexcept { return n_; }
    std::size_t size() const noexcept { return size_; }

    GridPoint point(std::size_t node) const;
    std::size_t index(std::size_t i, std::size_t j = 0) const;

    /// Piecewise-linear (interval), bilinear (square) or barycentric on the triangulated
    /// simplex. Points are clamped into the domain first.
    Stencil stencil(GridPoint p) const;

    /// Mirror node (i, j) -> (j, i) on the square; identity elsewhere.
    std::size_t mirror(std::size_t node) const;

private:
    Domain domain_ = Domain::Interval;
    std::size_t n_ = 0;
    std::size_t size_ = 0;
    std::vector<std::uint32_t> simplex_i_;
    std::vector<std::uint32_t> simplex_j_;

    std::size_t row_offset(std::size_t i) const noexcept { return i * n_ - i * (i - (i > 0 ? 1 : 0)) / 2; }
};

} // namespace cogarq
