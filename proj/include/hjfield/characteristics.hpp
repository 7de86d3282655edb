#pragma once

#include "hjfield/gauge.hpp"
#include "hjfield/geometry.hpp"
#include "hjfield/initdata.hpp"
#include "hjfield/model.hpp"
#include "hjfield/newton.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace hjfield {

enum class SolveMode { ode, pde };

struct GridState;

struct SolverConfig {
    Real xi_max = 1.0;
    int steps = 200;        ///< fixed RK4 steps; the step is xi_max / steps
    int store_every = 1;    ///< keep every k-th state (the last is always kept)
    int keep_last = 0;      ///< if positive, only the most recent stored states are retained
    std::function<void(const GridState&)> observer;  ///< if set, called with every stored state
    NewtonOptions newton;
    Real blowup_guard = 1e150;

    Real step() const { return xi_max / steps; }
    void validate() const;
};

/// Solution slice at one xi. y, u are nodes x r; phi is per node; k holds the
/// tangential gauge (solved k in PDE mode, prescribed h in ODE mode), nodes x (n-1) r.
struct GridState {
    Real xi = 0.0;
    std::vector<Real> y;
    std::vector<Real> u;
    std::vector<Real> phi;
    std::vector<Real> k;
};

struct Trajectory {
    SolveMode mode = SolveMode::pde;
    PeriodicGrid grid;
    int n = 0;
    int r = 0;
    Real stored_step = 0.0;  ///< xi spacing between consecutive stored states
    std::vector<GridState> states;
};

struct NodeRates {
    Vec dy;
    Vec du;
    Real dphi = 0.0;
};

/// Right-hand side of the bicharacteristic system at one node for a fixed gauge:
///   dy/dxi = dH/dp^mu_i X^mu,  du_i/dxi = -div A_i - dH/dy^i,  dphi/dxi = -dH/dp^mu_i X^mu u_i
/// with p = (u + Ahat) X + h F and div A_i = dAhat_i/dxi + dh^A_i/dz^A.
NodeRates ode_rhs(const HamiltonianModel& model, const ChartPoint& cp, const Vec& y, const Vec& u,
                  const Vec& a_hat, const Vec& a_hat_rate, const Vec& h, const Vec& div_h);

/// Node-by-node RK4 with z frozen and the gauge prescribed. Does not enforce embeddability.
Trajectory integrate_ode(const HamiltonianModel& model, const AdaptedChart& chart, const GaugeChoice& gauge,
                         const PhaseInitialData& initial, const SolverConfig& cfg);

/// Solves the tangential embeddability condition
///   dy^i/dz^A = dH/dp^mu_i(x, y, (u + Ahat) X + k^B F_B) F^mu_A
/// for k by Newton from k = 0. The Jacobian is the Hessian pulled back to the frame.
Vec solve_k(const HamiltonianModel& model, const ChartPoint& cp, const Vec& y, const Vec& grad_y, const Vec& u,
            const Vec& a_hat, const NewtonOptions& opts = {}, std::ptrdiff_t node = -1, Real xi = 0.0);

/// The closed system for (y, u) in normal form with respect to xi.
///
/// Tangential derivatives are 2nd-order central differences on the periodic
/// z-grid. k is solved at every node from the central gradient (used in f and
/// stored), and at every half-node face along each axis from the compact
/// one-cell gradient; the gauge divergence dk^A/dz^A is the compact difference
/// of the face values. The gauge-divergence term enters g_i with a minus sign,
/// matching the bicharacteristic equation for u_i.
class ClosedSystem {
public:
    ClosedSystem(const HamiltonianModel& model, const AdaptedChart& chart, const GaugeChoice& gauge,
                 NewtonOptions opts = {});

    struct Rates {
        std::vector<Real> dy;
        std::vector<Real> du;
        std::vector<Real> dphi;
    };

    /// Rates at `xi`. Calls must be made with non-decreasing xi (the chart is
    /// advanced forward only). If `node_k` is non-null it receives the node k.
    void rhs(Real xi, const std::vector<Real>& y, const std::vector<Real>& u, Rates& out,
             std::vector<Real>* node_k = nullptr);

    /// k at every node from the central gradient of y.
    std::vector<Real> solve_node_k(Real xi, const std::vector<Real>& y, const std::vector<Real>& u);

private:
    struct Linear;

    Vec solve_at(const ChartPoint& cp, const Vec& y, const Vec& grad, const Vec& u, const Vec& a_hat,
                 std::size_t node, Real xi) const;
    void advance(Real xi);
    void general_rhs(Real xi, const std::vector<Real>& y, const std::vector<Real>& u, Rates& out,
                     std::vector<Real>& k);

    const HamiltonianModel* model_;
    const AdaptedChart* chart_;
    const GaugeChoice* gauge_;
    NewtonOptions opts_;
    int n_;
    int r_;
    ChartTrack nodes_;
    std::vector<ChartTrack> faces_;
    std::shared_ptr<const Linear> linear_;  ///< set when the k-solve is a fixed linear map
    std::vector<Real> a_hat_;               ///< scratch: Ahat at nodes
    std::vector<Real> face_a_hat_;          ///< scratch: Ahat at faces, axis-major
    std::vector<Real> face_flux_;           ///< scratch: k^A_i on faces, axis-major
    std::vector<Real> node_k_;
    std::vector<Real> grad_;                 ///< scratch: central gradient of y at nodes
    NeighbourTable neighbours_;
};

/// Rates of the closed system for a single state (convenience wrapper).
ClosedSystem::Rates pde_rhs(const HamiltonianModel& model, const AdaptedChart& chart, const GaugeChoice& gauge,
                            const GridState& state, const NewtonOptions& opts = {});

/// RK4 in xi over the closed system; phi is integrated alongside and k is stored per kept state.
Trajectory integrate_pde(const HamiltonianModel& model, const AdaptedChart& chart, const GaugeChoice& gauge,
                         const PhaseInitialData& initial, const SolverConfig& cfg);

/// phi on every stored slice (integrated alongside y and u from phi(0) = 0).
std::vector<std::vector<Real>> accumulate_phi(const Trajectory& traj);

}  // namespace hjfield
