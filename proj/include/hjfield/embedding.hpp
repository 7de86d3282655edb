#pragma once

#include "hjfield/characteristics.hpp"

#include <deque>
#include <functional>
#include <vector>

namespace hjfield {

/// One stored slice with the reconstructed phase-space data.
struct ReconstructedSlice {
    Real xi = 0.0;
    std::vector<Real> x;        ///< nodes x n
    std::vector<Real> p;        ///< nodes x n r, p = u X + A
    std::vector<Real> S;        ///< nodes x n, S = phi X + A y
    std::vector<Real> minus_H;  ///< nodes
};

struct ReconstructedSolution {
    SolveMode mode = SolveMode::pde;
    PeriodicGrid grid;
    int n = 0;
    int r = 0;
    Real stored_step = 0.0;
    std::vector<GridState> states;  ///< y, u, phi and the tangential gauge k
    std::vector<ReconstructedSlice> slices;
};

/// Assembles p^mu_i = u_i X^mu + A^mu_i with A = Ahat X + k F, the potentials
/// S^mu = phi X^mu + A^mu_i y^i and the row -H at every stored node.
ReconstructedSolution reconstruct(const Trajectory& traj, const GaugeChoice& gauge, const AdaptedChart& chart,
                                  const HamiltonianModel& model);

struct ResidualReport {
    Real linf = 0.0;
    Real l2 = 0.0;  ///< root mean square over evaluated entries
    std::ptrdiff_t max_node = -1;
    Real max_xi = 0.0;
    std::vector<Real> profile_xi;    ///< evaluated slices
    std::vector<Real> profile_linf;  ///< max residual on each evaluated slice
};

/// Both halves of the field equations:
///   dy^i/dx^mu - dH/dp^mu_i = 0   and   dp^mu_i/dx^mu + dH/dy^i = 0.
struct FieldEquationReport {
    ResidualReport gradient;
    ResidualReport divergence;
};

/// Evaluates the field equations on the interior stored slices. Derivatives
/// along z use 4th-order central differences; along xi 4th-order central
/// differences, falling back to 2nd order next to the first and last slice.
/// Chart derivatives are mapped to x through the inverse of [X | frame].
/// Throws ContractError with fewer than 3 stored slices or a non-uniform xi spacing.
FieldEquationReport field_equation_residual(const ReconstructedSolution& sol, const HamiltonianModel& model,
                                            const AdaptedChart& chart);

/// max over (A, i) of |D0_A y^i - dH/dp^mu_i F^mu_A| at every stored node,
/// where D0 is the central difference also used by the closure.
/// Result is states x nodes.
std::vector<Real> embeddability_residual(const ReconstructedSolution& sol, const HamiltonianModel& model,
                                         const AdaptedChart& chart);

/// Summary of a per-node residual field laid out states x nodes.
ResidualReport summarize(const ReconstructedSolution& sol, const std::vector<Real>& per_node);

/// xi-component of the embeddability condition, |dy/dxi - dH/dp^mu_i X^mu|,
/// with dy/dxi from the stored slices (stencils as in field_equation_residual).
ResidualReport hj_ansatz_residual(const ReconstructedSolution& sol, const HamiltonianModel& model,
                                  const AdaptedChart& chart);

/// Residual of the wave relation satisfied by the tangential gauge,
///   sum_B d2 h_B / dz^A dz^B - d2 h_A / dxi2 + sigma mu^2 h_A,  sigma = +1,
/// with h = k from the stored states (scalar fields only). Substituting
/// h_A = dy/dz^A of a solution of d2y/dxi2 - Laplacian y = mu^2 y makes it vanish,
/// which fixes sigma. 4th-order stencils; slices within two of either end are skipped.
/// Result is per evaluated slice x nodes, the maximum over A.
struct HConsistency {
    std::vector<Real> xi;
    std::vector<Real> residual;
    ResidualReport report;
};
HConsistency h_consistency_residual(const ReconstructedSolution& sol, Real mu);

/// Streaming form of h_consistency_residual for runs too large to store.
/// Consecutive states (xi spacing `spacing`) are pushed as they are produced;
/// each full window of five evaluates the residual on its middle slice.
class HConsistencyMonitor {
public:
    HConsistencyMonitor(PeriodicGrid grid, int n, Real spacing, Real mu);

    void push(const GridState& state);
    const ResidualReport& report() const { return report_; }

private:
    struct Slice {
        Real xi;
        std::vector<Real> k;
    };

    PeriodicGrid grid_;
    NeighbourTable neighbours_;
    int t_;
    Real spacing_;
    Real mu_;
    std::deque<Slice> window_;
    std::vector<Real> res_;
    std::vector<Real> scratch_;
    ResidualReport report_;
    Real sum_sq_ = 0.0;
    std::size_t count_ = 0;
};

/// Divergence d = dh^A/dz^A of the gauge along one characteristic, as a
/// constant or as a function of xi.
class ScalarDivergence {
public:
    static ScalarDivergence constant(Real value);
    static ScalarDivergence function(std::function<Real(Real)> fn, int panels = 256);

    bool is_constant() const { return !fn_; }
    Real value() const { return value_; }
    Real operator()(Real xi) const { return fn_ ? fn_(xi) : value_; }
    int panels() const { return panels_; }

private:
    Real value_ = 0.0;
    std::function<Real(Real)> fn_;
    int panels_ = 256;
};

/// Coefficient of the linear term of phi = 1/2 mu y^2 + a y + b, solving
/// da/dxi = mu a - d with a(0) = alpha:
///   a = alpha e^{mu xi} - e^{mu xi} int_0^xi e^{-mu s} d(s) ds.
/// Composite Simpson for non-constant d. Requires mu > 0.
Real scalar_a(Real alpha, const ScalarDivergence& d, Real mu, Real xi);

/// beta = e^{mu xi} y + int_0^xi a(s) e^{mu s} ds.
Real scalar_beta(Real y, Real alpha, const ScalarDivergence& d, Real mu, Real xi);

/// Inverse of scalar_beta in y.
Real scalar_y_from_beta(Real beta, Real alpha, const ScalarDivergence& d, Real mu, Real xi);

/// d phi / dy d alpha = e^{mu xi}.
Real essentiality_det(Real mu, Real xi);

struct FirstIntegralReport {
    Real max_alpha_rate = 0.0;  ///< max |d alpha / d xi| by finite differences of stored slices
    Real max_beta_rate = 0.0;
    Real alpha_drift = 0.0;  ///< max |alpha(xi) - alpha(0)|
    Real beta_drift = 0.0;
};

/// Recovers alpha = (u - mu y) e^{-mu xi} + int_0^xi e^{-mu s} d ds and beta
/// at every stored slice of a scalar trajectory and measures their variation.
/// d is the divergence of the gauge h at each node (zero for the default gauge).
FirstIntegralReport check_first_integrals(const Trajectory& traj, Real mu, const GaugeChoice& gauge);

}  // namespace hjfield
