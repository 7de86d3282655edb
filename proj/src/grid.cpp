#include "hjfield/grid.hpp"

#include <cmath>
#include <string>

namespace hjfield {

PeriodicGrid::PeriodicGrid(int dim, int per_axis, Real length)
    : dim_(dim), per_axis_(per_axis), length_(length) {
    if (dim < 1 || dim > kMaxBaseDim - 1) {
        throw ContractError("grid dimension must be in [1, " + std::to_string(kMaxBaseDim - 1) + "]");
    }
    if (per_axis < 4) throw ContractError("grid needs at least 4 nodes per axis");
    if (!(length > 0) || !std::isfinite(length)) throw ContractError("grid length must be positive");
    size_ = 1;
    for (int a = 0; a < dim; ++a) {
        strides_[a] = size_;
        size_ *= static_cast<std::size_t>(per_axis);
    }
}

Vec PeriodicGrid::coords(std::size_t idx, int half_axis) const {
    Vec z(dim_);
    const Real h = spacing();
    for (int a = 0; a < dim_; ++a) {
        const std::size_t j = (idx / strides_[a]) % per_axis_;
        z[a] = h * static_cast<Real>(j) + (a == half_axis ? 0.5 * h : 0.0);
    }
    return z;
}

std::size_t PeriodicGrid::shift(std::size_t idx, int axis, int offset) const {
    const auto n = static_cast<std::ptrdiff_t>(per_axis_);
    const auto j = static_cast<std::ptrdiff_t>((idx / strides_[axis]) % per_axis_);
    std::ptrdiff_t moved = (j + offset) % n;
    if (moved < 0) moved += n;
    return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) +
                                    (moved - j) * static_cast<std::ptrdiff_t>(strides_[axis]));
}

NeighbourTable::NeighbourTable(const PeriodicGrid& grid) : plus(grid.dim()), minus(grid.dim()) {
    for (int a = 0; a < grid.dim(); ++a) {
        plus[a].resize(grid.size());
        minus[a].resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            plus[a][i] = grid.shift(i, a, 1);
            minus[a][i] = grid.shift(i, a, -1);
        }
    }
}

namespace stencil {

Real d2_4(std::span<const Real> f, const PeriodicGrid& g, std::size_t node, int axis_a, int axis_b, int comps, int c) {
    const Real h = g.spacing();
    if (axis_a == axis_b) {
        auto at = [&](int o) { return f[g.shift(node, axis_a, o) * comps + c]; };
        return (-at(2) + 16.0 * at(1) - 30.0 * at(0) + 16.0 * at(-1) - at(-2)) / (12.0 * h * h);
    }
    const int weights[4] = {-2, -1, 1, 2};
    const Real coeff[4] = {1.0, -8.0, 8.0, -1.0};
    Real s = 0.0;
    for (int i = 0; i < 4; ++i) {
        const std::size_t na = g.shift(node, axis_a, weights[i]);
        for (int j = 0; j < 4; ++j) {
            s += coeff[i] * coeff[j] * f[g.shift(na, axis_b, weights[j]) * comps + c];
        }
    }
    return s / (144.0 * h * h);
}

}  // namespace stencil

Real l2_error(std::span<const Real> a, std::span<const Real> b) {
    if (a.size() != b.size()) {
        throw ContractError("l2_error: shape mismatch (" + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()) + ")");
    }
    if (a.empty()) return 0.0;
    Real s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Real d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<Real>(a.size()));
}

}  // namespace hjfield
