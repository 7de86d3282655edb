#pragma once

#include "hjfield/types.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace hjfield {

/// Uniform periodic tensor grid over [0, L)^dim with `per_axis` nodes per axis.
/// Node ordering is lexicographic with axis 0 fastest.
class PeriodicGrid {
public:
    PeriodicGrid() = default;
    PeriodicGrid(int dim, int per_axis, Real length);

    int dim() const { return dim_; }
    int per_axis() const { return per_axis_; }
    Real length() const { return length_; }
    Real spacing() const { return length_ / per_axis_; }
    std::size_t size() const { return size_; }

    /// Coordinates of node `idx`, optionally shifted by half a cell along `half_axis`.
    Vec coords(std::size_t idx, int half_axis = -1) const;

    /// Node reached from `idx` by `offset` steps along `axis`, with wrap-around.
    std::size_t shift(std::size_t idx, int axis, int offset) const;

    std::size_t stride(int axis) const { return strides_[axis]; }

    bool operator==(const PeriodicGrid&) const = default;

private:
    int dim_ = 0;
    int per_axis_ = 0;
    Real length_ = 0.0;
    std::size_t size_ = 0;
    std::array<std::size_t, kMaxBaseDim> strides_{};
};

/// Precomputed periodic neighbours: plus[a][i] = i + e_a, minus[a][i] = i - e_a.
struct NeighbourTable {
    NeighbourTable() = default;
    explicit NeighbourTable(const PeriodicGrid& grid);

    std::vector<std::vector<std::size_t>> plus;
    std::vector<std::vector<std::size_t>> minus;
};

/// Finite-difference stencils on a periodic grid. Fields are flattened as
/// field[node * comps + c].
namespace stencil {

/// 2nd-order central first derivative.
inline Real d1(std::span<const Real> f, const PeriodicGrid& g, std::size_t node, int axis, int comps, int c) {
    const std::size_t ip = g.shift(node, axis, 1);
    const std::size_t im = g.shift(node, axis, -1);
    return (f[ip * comps + c] - f[im * comps + c]) / (2.0 * g.spacing());
}

/// 4th-order central first derivative.
inline Real d1_4(std::span<const Real> f, const PeriodicGrid& g, std::size_t node, int axis, int comps, int c) {
    const Real fp1 = f[g.shift(node, axis, 1) * comps + c];
    const Real fm1 = f[g.shift(node, axis, -1) * comps + c];
    const Real fp2 = f[g.shift(node, axis, 2) * comps + c];
    const Real fm2 = f[g.shift(node, axis, -2) * comps + c];
    return (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * g.spacing());
}

/// Compact 2nd-order second derivative.
inline Real d2(std::span<const Real> f, const PeriodicGrid& g, std::size_t node, int axis, int comps, int c) {
    const Real h = g.spacing();
    return (f[g.shift(node, axis, 1) * comps + c] - 2.0 * f[node * comps + c] +
            f[g.shift(node, axis, -1) * comps + c]) /
           (h * h);
}

/// 4th-order second derivative; mixed axes use the product of 4th-order first derivatives.
Real d2_4(std::span<const Real> f, const PeriodicGrid& g, std::size_t node, int axis_a, int axis_b, int comps, int c);

/// Flat Laplacian with the compact stencil.
inline Real laplacian(std::span<const Real> f, const PeriodicGrid& g, std::size_t node, int comps, int c) {
    Real s = 0.0;
    for (int a = 0; a < g.dim(); ++a) s += d2(f, g, node, a, comps, c);
    return s;
}

}  // namespace stencil

/// Root-mean-square difference of two fields on the same grid.
Real l2_error(std::span<const Real> a, std::span<const Real> b);

}  // namespace hjfield
