#pragma once

#include "hjfield/characteristics.hpp"
#include "hjfield/grid.hpp"

#include <string>
#include <vector>

namespace hjfield {

/// State of the second-order form d2y/dxi2 - Laplacian y = mu^2 y, with v = dy/dxi.
struct DirectState {
    Real xi = 0.0;
    std::vector<Real> y;  ///< nodes x r
    std::vector<Real> v;  ///< nodes x r
};

struct DirectTrajectory {
    PeriodicGrid grid;
    int r = 1;
    std::vector<DirectState> states;
};

struct DirectRates {
    std::vector<Real> dy;
    std::vector<Real> dv;
};

/// dy/dxi = v, dv/dxi = Laplacian y + mu^2 y with the compact 2nd-order
/// Laplacian on the periodic grid; components are independent.
DirectRates direct_rhs(const PeriodicGrid& grid, const DirectState& state, Real mu, int r = 1);

/// RK4 in xi with the same step, storage and blow-up conventions as integrate_pde.
DirectTrajectory integrate_direct(const PeriodicGrid& grid, std::vector<Real> y0, std::vector<Real> v0, Real mu,
                                  const SolverConfig& cfg, int r = 1);

enum class ExactKind { exp_growing, exp_decaying, cosine_mode };

ExactKind parse_exact_kind(const std::string& name);

struct ExactParams {
    Real C = 1.0;   ///< amplitude of the exponential branches
    Real mu = 1.0;
    Real k = 2.0;   ///< wavenumber of the cosine mode along z^1
};

/// Closed-form free-scalar solutions:
///   exp_growing  C e^{mu xi},  exp_decaying  C e^{-mu xi},
///   cosine_mode  cos(k z^1) cos(sqrt(k^2 - mu^2) xi).
/// Throws ConfigError for a cosine mode with k^2 <= mu^2.
Real exact_scalar(ExactKind kind, const ExactParams& params, Real xi, const Vec& z);

/// exact_scalar sampled on every grid node.
std::vector<Real> exact_field(ExactKind kind, const ExactParams& params, const PeriodicGrid& grid, Real xi);

}  // namespace hjfield
