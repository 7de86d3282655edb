#pragma once

#include "hjfield/characteristics.hpp"
#include "hjfield/geometry.hpp"
#include "hjfield/initdata.hpp"
#include "hjfield/model.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace hjfield::testing {

inline constexpr Real kTwoPi = 2.0 * std::numbers::pi;

inline std::vector<Real> default_signature(int n) {
    std::vector<Real> s(n, 1.0);
    s[n - 1] = -1.0;
    return s;
}

inline ModelPtr free_scalar(int n, Real mu) {
    FreeScalarParams p;
    p.n = n;
    p.mu = mu;
    p.signature = default_signature(n);
    return make_free_scalar(p);
}

inline Vec unit(int n, int axis) {
    Vec v = Vec::Zero(n);
    v[axis] = 1.0;
    return v;
}

/// Graph surface x^n = 0 with X = d/dx^n.
inline InitialPair standard_pair(int n) {
    return InitialPair{InitialSurface::graph(n), TransverseField::constant(unit(n, n - 1))};
}

inline AdaptedChart make_chart(const InitialPair& pair, int per_axis, Real xi_max = 1.0, int steps = 200,
                               Real length = kTwoPi) {
    const int n = pair.field.dim();
    return AdaptedChart(pair, xi_max, steps, PeriodicGrid(n - 1, per_axis, length));
}

inline InitialData::Fn constant_fn(Real v) {
    return [v](const Vec&) {
        Vec out(1);
        out[0] = v;
        return out;
    };
}

inline InitialData cosine_data(Real k) {
    return InitialData{[k](const Vec& z) {
                           Vec out(1);
                           out[0] = std::cos(k * z[0]);
                           return out;
                       },
                       constant_fn(0.0)};
}

inline SolverConfig solver(Real xi_max, int steps, int store_every = 1) {
    SolverConfig cfg;
    cfg.xi_max = xi_max;
    cfg.steps = steps;
    cfg.store_every = store_every;
    return cfg;
}

/// Hand-rolled generator for property tests; fixed seeds keep runs reproducible.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    Real uniform(Real lo, Real hi) { return std::uniform_real_distribution<Real>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    Vec vec(int size, Real lo, Real hi) {
        Vec v(size);
        for (int i = 0; i < size; ++i) v[i] = uniform(lo, hi);
        return v;
    }

    PhasePoint point(int n, int r, Real lo = -2.0, Real hi = 2.0) {
        PhasePoint pt(n, r);
        pt.x = vec(n, lo, hi);
        pt.y = vec(r, lo, hi);
        pt.p = vec(n * r, lo, hi);
        return pt;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline Real max_abs_diff(const std::vector<Real>& a, const std::vector<Real>& b) {
    Real m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace hjfield::testing
