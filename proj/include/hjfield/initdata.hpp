#pragma once

#include "hjfield/gauge.hpp"
#include "hjfield/geometry.hpp"
#include "hjfield/model.hpp"
#include "hjfield/newton.hpp"

#include <functional>
#include <span>
#include <vector>

namespace hjfield {

/// Field values psi^i(z) and transverse derivatives psi_hat^i(z) = dy^i/dx^mu n^mu on N.
struct InitialData {
    using Fn = std::function<Vec(const Vec& z)>;
    Fn psi;
    Fn psi_hat;
};

/// How the tangential gauge k is fixed on xi = 0.
enum class GaugeMode {
    prescribed,  ///< k = h from the gauge choice (ODE mode)
    closure,     ///< k solved from the embeddability condition (PDE mode)
};

/// The phase-space initial surface: per node y0, u0, p0 = (u0 + Ahat) X + k0 F,
/// the Hamiltonian row H0 = -H, and the tangential gauge k0 it was built with.
struct PhaseInitialData {
    int n = 0;
    int r = 0;
    std::vector<Real> y0;  ///< nodes x r
    std::vector<Real> u0;  ///< nodes x r
    std::vector<Real> p0;  ///< nodes x n r
    std::vector<Real> H0;  ///< nodes
    std::vector<Real> k0;  ///< nodes x (n-1) r
    std::vector<int> newton_iterations;

    std::size_t nodes() const { return H0.size(); }
    PhasePoint phase_point(std::size_t node, const Vec& x) const;
};

/// Evaluates psi on the grid nodes (flattened nodes x r).
std::vector<Real> sample_psi(const InitialData& data, const PeriodicGrid& grid, int r);

/// Per-node Newton solve of psi_hat^i = dH/dp^mu_i(x, psi, u X + A) n^mu for u,
/// with the gauge A^mu_i given per node (nodes x n r). Starts from u = 0; the
/// Jacobian is the Hessian contracted with n and X.
std::vector<Real> solve_initial_momenta(const HamiltonianModel& model, const AdaptedChart& chart,
                                        const InitialData& data, std::span<const Real> gauge_a,
                                        const NewtonOptions& opts = {},
                                        std::vector<int>* iterations = nullptr);

/// Assembles B. In closure mode u0 and k0 are solved jointly: the normal
/// derivative condition together with the embeddability condition on N, whose
/// tangential derivatives of psi use the solver's central differences.
PhaseInitialData build_initial_surface_B(const HamiltonianModel& model, const AdaptedChart& chart,
                                         const InitialData& data, const GaugeChoice& gauge, GaugeMode mode,
                                         const NewtonOptions& opts = {});

}  // namespace hjfield
