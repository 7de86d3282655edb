#include "hjfield/geometry.hpp"

#include "hjfield/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace hjfield {

namespace {

constexpr Real kGeometryStep = 1e-5;
constexpr Real kDivergenceWarn = 1e-8;

void update_summary(DeterminantSummary& s, Real value, std::ptrdiff_t node) {
    const Real a = std::abs(value);
    if (s.node < 0 || a < s.min_abs || std::isnan(value)) {
        s.min_abs = std::isnan(value) ? 0.0 : a;
        s.value_at_min = value;
        s.node = node;
    }
}

}  // namespace

TransverseField TransverseField::constant(const Vec& value) {
    TransverseField f;
    f.n_ = static_cast<int>(value.size());
    f.constant_ = true;
    f.value_ = value;
    return f;
}

TransverseField TransverseField::from_function(int n, Fn fn) {
    TransverseField f;
    f.n_ = n;
    f.fn_ = std::move(fn);
    return f;
}

Vec TransverseField::operator()(const Vec& x) const {
    if (constant_) return value_;
    Vec v = fn_(x);
    if (v.size() != n_) throw ContractError("vector field returned wrong dimension");
    return v;
}

Mat TransverseField::jacobian(const Vec& x) const {
    Mat j = Mat::Zero(n_, n_);
    if (constant_) return j;
    Vec xp = x;
    for (int nu = 0; nu < n_; ++nu) {
        xp[nu] = x[nu] + kGeometryStep;
        const Vec fp = (*this)(xp);
        xp[nu] = x[nu] - kGeometryStep;
        const Vec fm = (*this)(xp);
        xp[nu] = x[nu];
        j.col(nu) = (fp - fm) / (2.0 * kGeometryStep);
    }
    return j;
}

InitialSurface InitialSurface::graph(int n) {
    InitialSurface s;
    s.n_ = n;
    s.graph_ = true;
    return s;
}

InitialSurface InitialSurface::from_functions(int n, Fn point, Fn normal) {
    InitialSurface s;
    s.n_ = n;
    s.point_ = std::move(point);
    s.normal_ = std::move(normal);
    return s;
}

Vec InitialSurface::point(const Vec& z) const {
    if (z.size() != n_ - 1) throw ContractError("surface parameter has wrong dimension");
    if (graph_) {
        Vec x = Vec::Zero(n_);
        x.head(n_ - 1) = z;
        return x;
    }
    return point_(z);
}

Mat InitialSurface::frame(const Vec& z) const {
    Mat f = Mat::Zero(n_, n_ - 1);
    if (graph_) {
        for (int a = 0; a < n_ - 1; ++a) f(a, a) = 1.0;
        return f;
    }
    Vec zp = z;
    for (int a = 0; a < n_ - 1; ++a) {
        zp[a] = z[a] + kGeometryStep;
        const Vec xp = point(zp);
        zp[a] = z[a] - kGeometryStep;
        const Vec xm = point(zp);
        zp[a] = z[a];
        f.col(a) = (xp - xm) / (2.0 * kGeometryStep);
    }
    return f;
}

Vec InitialSurface::normal(const Vec& z) const {
    if (graph_) {
        Vec nrm = Vec::Zero(n_);
        nrm[n_ - 1] = 1.0;
        return nrm;
    }
    return normal_(z);
}

ChartTrack::ChartTrack(const AdaptedChart& chart, std::vector<Vec> zs) : chart_(&chart) {
    const InitialPair& pair = chart.pair();
    points_.resize(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) {
        ChartPoint& p = points_[i];
        p.z = std::move(zs[i]);
        p.x = pair.surface.point(p.z);
        p.frame = pair.surface.frame(p.z);
        p.field = pair.field(p.x);
    }
}

void ChartTrack::advance_to(Real xi) {
    const Real distance = xi - xi_;
    if (distance < 0) throw ContractError("chart track can only move forward in xi");
    if (distance == 0) return;
    const InitialPair& pair = chart_->pair();
    if (pair.field.is_constant()) {
        // Exact flow: x = phi(z) + xi X, frame unchanged.
        const Vec field = pair.field(Vec::Zero(chart_->base_dim()));
        for (auto& p : points_) p.x = pair.surface.point(p.z) + xi * field;
        xi_ = xi;
        return;
    }
    const int substeps = std::max(1, static_cast<int>(std::ceil(distance / chart_->step() - 1e-9)));
    const Real h = distance / substeps;
    parallel_for(points_.size(), [&](std::size_t i) {
        for (int s = 0; s < substeps; ++s) chart_->flow_step(points_[i], h);
    });
    xi_ = xi;
}

AdaptedChart::AdaptedChart(InitialPair pair, Real xi_max, int steps, PeriodicGrid zgrid)
    : pair_(std::move(pair)), xi_max_(xi_max), steps_(steps), zgrid_(std::move(zgrid)) {
    if (steps < 1) throw ContractError("chart needs at least one step");
    if (!(xi_max > 0)) throw ContractError("chart needs xi_max > 0");
    if (pair_.surface.dim() != pair_.field.dim()) throw ContractError("surface and field dimensions differ");
    if (zgrid_.dim() != pair_.field.dim() - 1) throw ContractError("z-grid dimension must be n - 1");
}

void AdaptedChart::flow_step(ChartPoint& pt, Real h) const {
    const TransverseField& X = pair_.field;
    if (X.is_constant()) {
        pt.x += h * pt.field;
        return;
    }
    auto rate_x = [&](const Vec& x) { return X(x); };
    auto rate_f = [&](const Vec& x, const Mat& f) { return Mat(X.jacobian(x) * f); };
    const Vec k1 = rate_x(pt.x);
    const Mat m1 = rate_f(pt.x, pt.frame);
    const Vec x2 = pt.x + 0.5 * h * k1;
    const Mat f2 = pt.frame + 0.5 * h * m1;
    const Vec k2 = rate_x(x2);
    const Mat m2 = rate_f(x2, f2);
    const Vec x3 = pt.x + 0.5 * h * k2;
    const Mat f3 = pt.frame + 0.5 * h * m2;
    const Vec k3 = rate_x(x3);
    const Mat m3 = rate_f(x3, f3);
    const Vec x4 = pt.x + h * k3;
    const Mat f4 = pt.frame + h * m3;
    const Vec k4 = rate_x(x4);
    const Mat m4 = rate_f(x4, f4);
    pt.x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    pt.frame += h / 6.0 * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
    pt.field = X(pt.x);
}

ChartPoint AdaptedChart::sample(Real xi, const Vec& z) const {
    ChartTrack t(*this, {z});
    t.advance_to(xi);
    return t[0];
}

ChartTrack AdaptedChart::node_track(int half_axis) const {
    std::vector<Vec> zs(zgrid_.size());
    for (std::size_t i = 0; i < zs.size(); ++i) zs[i] = zgrid_.coords(i, half_axis);
    return ChartTrack(*this, std::move(zs));
}

Real transversality(const Mat& frame, const Vec& field) {
    const int n = static_cast<int>(field.size());
    Mat m(n, n);
    m.leftCols(n - 1) = frame;
    m.col(n - 1) = field;
    return m.determinant();
}

AdaptedChart flow_chart(const InitialPair& pair, Real xi_max, int steps, const PeriodicGrid& zgrid, Real threshold) {
    AdaptedChart chart(pair, xi_max, steps, zgrid);
    ChartTrack track = chart.node_track();
    for (std::size_t i = 0; i < track.size(); ++i) {
        if (std::abs(transversality(track[i].frame, track[i].field)) <= threshold) {
            throw RegularityError("vector field X is not transverse to the initial surface",
                                  static_cast<std::ptrdiff_t>(i));
        }
    }
    if (!pair.field.is_constant()) {
        for (int s = 1; s <= steps; ++s) {
            const Real xi = xi_max * s / steps;
            track.advance_to(xi);
            for (std::size_t i = 0; i < track.size(); ++i) {
                if (!track[i].x.allFinite() || !track[i].frame.allFinite()) {
                    throw SolverError("flow of X is not finite", static_cast<std::ptrdiff_t>(i), xi);
                }
            }
        }
    }
    return chart;
}

Real check_divergence_free(const TransverseField& field, std::span<const Vec> sample) {
    if (sample.empty()) throw ContractError("check_divergence_free: empty sample");
    Real worst = 0.0;
    for (const Vec& x : sample) {
        worst = std::max(worst, std::abs(field.jacobian(x).trace()));
    }
    return worst;
}

namespace contract {

Mat vectors(const Mat& hess, const Vec& a, const Vec& b, int r) {
    const int n = static_cast<int>(a.size());
    Mat m = Mat::Zero(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            for (int mu = 0; mu < n; ++mu)
                for (int nu = 0; nu < n; ++nu)
                    m(i, j) += hess(pair_index(mu, i, r), pair_index(nu, j, r)) * a[mu] * b[nu];
    return m;
}

Mat pullback(const Mat& hess, const Mat& frame, int r) {
    const int n = static_cast<int>(frame.rows());
    const int t = static_cast<int>(frame.cols());
    Mat m = Mat::Zero(t * r, t * r);
    for (int A = 0; A < t; ++A)
        for (int i = 0; i < r; ++i)
            for (int B = 0; B < t; ++B)
                for (int j = 0; j < r; ++j) {
                    Real s = 0.0;
                    for (int mu = 0; mu < n; ++mu) {
                        const Real fa = frame(mu, A);
                        if (fa == 0.0) continue;
                        for (int nu = 0; nu < n; ++nu)
                            s += hess(pair_index(mu, i, r), pair_index(nu, j, r)) * fa * frame(nu, B);
                    }
                    m(A * r + i, B * r + j) = s;
                }
    return m;
}

Mat vector_frame(const Mat& hess, const Vec& a, const Mat& frame, int r) {
    const int n = static_cast<int>(frame.rows());
    const int t = static_cast<int>(frame.cols());
    Mat m = Mat::Zero(r, t * r);
    for (int i = 0; i < r; ++i)
        for (int B = 0; B < t; ++B)
            for (int j = 0; j < r; ++j) {
                Real s = 0.0;
                for (int mu = 0; mu < n; ++mu)
                    for (int nu = 0; nu < n; ++nu)
                        s += hess(pair_index(mu, i, r), pair_index(nu, j, r)) * a[mu] * frame(nu, B);
                m(i, B * r + j) = s;
            }
    return m;
}

}  // namespace contract

Mat lambda_inverse(const HamiltonianModel& model, const PhasePoint& pt, const Mat& frame, Real threshold,
                   std::ptrdiff_t node) {
    const Derivatives d = eval_derivatives(model, pt);
    if (frame.rows() != model.base_dim() || frame.cols() != model.base_dim() - 1) {
        throw ContractError("lambda_inverse: frame must be n x (n-1)");
    }
    const Mat p = contract::pullback(d.hess_pp, frame, model.field_dim());
    Eigen::PartialPivLU<Mat> lu(p);
    if (!(std::abs(lu.determinant()) > threshold)) {
        throw RegularityError("surface regularity violated: Hessian pullback to the tangent frame is singular", node);
    }
    return lu.inverse();
}

Mat solution_condition_matrix(const Mat& hess, const Vec& field, const Mat& frame, int r, const Mat& lambda) {
    const Mat hxx = contract::vectors(hess, field, field, r);
    const Mat cross = contract::vector_frame(hess, field, frame, r);
    return hxx - cross * lambda * cross.transpose();
}

RegularityReport regularity_report(const HamiltonianModel& model, const AdaptedChart& chart,
                                   std::span<const PhasePoint> samples, Real threshold) {
    const PeriodicGrid& grid = chart.zgrid();
    if (samples.size() != grid.size()) throw ContractError("regularity_report: one sample per grid node required");
    const int r = model.field_dim();
    const InitialPair& pair = chart.pair();

    struct NodeValues {
        Real hamiltonian, momentum, surface, solution, transversal;
        Mat lambda;
    };
    std::vector<NodeValues> values(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
        const PhasePoint& pt = samples[i];
        const Vec z = grid.coords(i);
        const Mat frame = pair.surface.frame(z);
        const Vec nrm = pair.surface.normal(z);
        const Vec X = pair.field(pt.x);
        const Derivatives d = eval_derivatives(model, pt);
        NodeValues& v = values[i];
        v.hamiltonian = d.hess_pp.determinant();
        v.momentum = contract::vectors(d.hess_pp, X, nrm, r).determinant();
        const Mat pb = contract::pullback(d.hess_pp, frame, r);
        Eigen::PartialPivLU<Mat> lu(pb);
        v.surface = lu.determinant();
        if (std::abs(v.surface) > threshold) {
            v.lambda = lu.inverse();
            v.solution = solution_condition_matrix(d.hess_pp, X, frame, r, v.lambda).determinant();
        } else {
            v.solution = 0.0;
        }
        v.transversal = transversality(frame, X);
    });

    RegularityReport rep;
    rep.threshold = threshold;
    rep.nodes = samples.size();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto node = static_cast<std::ptrdiff_t>(i);
        update_summary(rep.hamiltonian, values[i].hamiltonian, node);
        update_summary(rep.momentum, values[i].momentum, node);
        update_summary(rep.surface, values[i].surface, node);
        update_summary(rep.solution, values[i].solution, node);
        update_summary(rep.transversality, values[i].transversal, node);
    }
    if (!values.empty()) rep.lambda_sample = values[0].lambda;

    std::vector<Vec> xs(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) xs[i] = samples[i].x;
    if (!xs.empty()) rep.divergence_max = check_divergence_free(pair.field, xs);
    rep.divergence_warning = rep.divergence_max > kDivergenceWarn;

    const std::pair<const char*, const DeterminantSummary*> checks[] = {
        {"hamiltonian_regularity", &rep.hamiltonian},
        {"momentum_solvability", &rep.momentum},
        {"surface_regularity", &rep.surface},
        {"solution_condition", &rep.solution},
        {"transversality", &rep.transversality},
    };
    rep.pass = !values.empty();
    for (const auto& [name, summary] : checks) {
        if (!(summary->min_abs > threshold)) {
            rep.pass = false;
            if (rep.failing_condition.empty()) {
                rep.failing_condition = name;
                rep.failing_node = summary->node;
            }
        }
    }
    return rep;
}

}  // namespace hjfield
