#pragma once

#include "hjfield/grid.hpp"
#include "hjfield/model.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hjfield {

/// A vector field X^mu(x) on the base manifold.
class TransverseField {
public:
    using Fn = std::function<Vec(const Vec& x)>;

    static TransverseField constant(const Vec& value);
    static TransverseField from_function(int n, Fn fn);

    int dim() const { return n_; }
    bool is_constant() const { return constant_; }
    Vec operator()(const Vec& x) const;

    /// dX^mu/dx^nu; zero for constant fields, central differences otherwise.
    Mat jacobian(const Vec& x) const;

private:
    int n_ = 0;
    bool constant_ = false;
    Vec value_;
    Fn fn_;
};

/// Codimension-one surface x^mu = phi^mu(z) with a transverse normal n^mu.
class InitialSurface {
public:
    using Fn = std::function<Vec(const Vec& z)>;

    /// The slice x^n = 0 with x^A = z^A and normal d/dx^n.
    static InitialSurface graph(int n);
    /// General parametrization; the tangent frame comes from central differences.
    static InitialSurface from_functions(int n, Fn point, Fn normal);

    int dim() const { return n_; }
    bool is_graph() const { return graph_; }
    Vec point(const Vec& z) const;
    /// Columns are dx/dz^A.
    Mat frame(const Vec& z) const;
    Vec normal(const Vec& z) const;

private:
    int n_ = 0;
    bool graph_ = false;
    Fn point_;
    Fn normal_;
};

struct InitialPair {
    InitialSurface surface;
    TransverseField field;
};

/// Chart data at one (xi, z) location.
struct ChartPoint {
    Vec z;
    Vec x;
    Mat frame;  ///< dx/dz^A as columns
    Vec field;  ///< X(x) = dx/dxi
};

class AdaptedChart;

/// Chart values for a fixed set of z points, advanced monotonically in xi.
class ChartTrack {
public:
    ChartTrack(const AdaptedChart& chart, std::vector<Vec> zs);

    Real xi() const { return xi_; }
    std::size_t size() const { return points_.size(); }
    const ChartPoint& operator[](std::size_t i) const { return points_[i]; }

    /// Flows every point forward to `xi` (>= current xi).
    void advance_to(Real xi);

private:
    const AdaptedChart* chart_;
    Real xi_ = 0.0;
    std::vector<ChartPoint> points_;
};

/// Adapted coordinates (xi, z) built from the flow of X through the surface.
/// Samples are produced on demand; nothing proportional to steps x nodes is stored.
class AdaptedChart {
public:
    AdaptedChart(InitialPair pair, Real xi_max, int steps, PeriodicGrid zgrid);

    const InitialPair& pair() const { return pair_; }
    int base_dim() const { return pair_.field.dim(); }
    Real xi_max() const { return xi_max_; }
    int steps() const { return steps_; }
    Real step() const { return xi_max_ / steps_; }
    const PeriodicGrid& zgrid() const { return zgrid_; }

    /// x(xi, z) integrated with RK4 from phi(z).
    ChartPoint sample(Real xi, const Vec& z) const;

    /// Track over grid nodes, optionally shifted half a cell along `half_axis`.
    ChartTrack node_track(int half_axis = -1) const;

    /// One RK4 flow step of size h for a single chart point (position and frame).
    void flow_step(ChartPoint& pt, Real h) const;

private:
    InitialPair pair_;
    Real xi_max_;
    int steps_;
    PeriodicGrid zgrid_;
};

/// |det[dx/dz^1 ... dx/dz^(n-1) | X]|, nonzero iff X is transverse to the frame.
Real transversality(const Mat& frame, const Vec& field);

/// Builds the chart, verifying transversality on the grid and that the flow
/// stays finite on [0, xi_max].
AdaptedChart flow_chart(const InitialPair& pair, Real xi_max, int steps, const PeriodicGrid& zgrid,
                        Real threshold = 1e-10);

/// max |dX^mu/dx^mu| over the sample points, central differences with step 1e-5.
Real check_divergence_free(const TransverseField& field, std::span<const Vec> sample);

/// Contractions of the pair Hessian used by the regularity conditions.
namespace contract {

/// M_ij = H_(mu i)(nu j) a^mu b^nu, r x r.
Mat vectors(const Mat& hess, const Vec& a, const Vec& b, int r);
/// M_(A i)(B j) = H_(mu i)(nu j) F^mu_A F^nu_B, (n-1)r square.
Mat pullback(const Mat& hess, const Mat& frame, int r);
/// M_i(B j) = H_(mu i)(nu j) a^mu F^nu_B, r x (n-1)r.
Mat vector_frame(const Mat& hess, const Vec& a, const Mat& frame, int r);

}  // namespace contract

/// Inverse of the Hessian pulled back to the tangent frame, pair ordering (A, i) -> A*r + i.
Mat lambda_inverse(const HamiltonianModel& model, const PhasePoint& pt, const Mat& frame,
                   Real threshold = 1e-10, std::ptrdiff_t node = -1);

/// The matrix df^i/du_j of the closed system: H_XX - H_X.F Lambda H_F.X.
Mat solution_condition_matrix(const Mat& hess, const Vec& field, const Mat& frame, int r, const Mat& lambda);

struct DeterminantSummary {
    Real min_abs = 0.0;
    Real value_at_min = 0.0;
    std::ptrdiff_t node = -1;
};

struct RegularityReport {
    DeterminantSummary hamiltonian;     ///< det d2H/dp dp
    DeterminantSummary momentum;        ///< det(d2H/dp dp X n)
    DeterminantSummary surface;         ///< det of the pullback to the tangent frame
    DeterminantSummary solution;        ///< det(df/du)
    DeterminantSummary transversality;  ///< det[frame | X]
    Mat lambda_sample;                  ///< Lambda at node 0 (empty if singular there)
    Real divergence_max = 0.0;
    bool divergence_warning = false;
    Real threshold = 1e-10;
    bool pass = false;
    std::string failing_condition;
    std::ptrdiff_t failing_node = -1;
    std::size_t nodes = 0;
};

/// Evaluates the four determinants that make an initial pair regular, and
/// transversality at every node. `samples[i]` is the phase point at node i on xi = 0.
RegularityReport regularity_report(const HamiltonianModel& model, const AdaptedChart& chart,
                                   std::span<const PhasePoint> samples, Real threshold = 1e-10);

}  // namespace hjfield
