#include "hjfield/initdata.hpp"

#include "hjfield/parallel.hpp"

#include <string>

namespace hjfield {

namespace {

// Columns map (u, k) to p: the u_j column is X (x) e_j, the k_Bj column F_B (x) e_j.
Mat lift_matrix(const Vec& lead, const Mat& frame, int r) {
    const int n = static_cast<int>(lead.size());
    Mat t = Mat::Zero(n * r, n * r);
    for (int j = 0; j < r; ++j) {
        for (int mu = 0; mu < n; ++mu) {
            t(pair_index(mu, j, r), j) = lead[mu];
            for (int b = 0; b < n - 1; ++b) t(pair_index(mu, j, r), r + b * r + j) = frame(mu, b);
        }
    }
    return t;
}

void raise_for(const NewtonResult& res, std::size_t node, const char* what) {
    const auto idx = static_cast<std::ptrdiff_t>(node);
    if (res.status == NewtonStatus::singular) {
        throw RegularityError(std::string(what) + ": singular Jacobian", idx);
    }
    if (res.status == NewtonStatus::not_converged) {
        throw SolverError(std::string(what) + ": Newton did not converge (residual " +
                              std::to_string(res.residual) + ")",
                          idx, 0.0);
    }
}

}  // namespace

PhasePoint PhaseInitialData::phase_point(std::size_t node, const Vec& x) const {
    PhasePoint pt(n, r);
    pt.x = x;
    for (int i = 0; i < r; ++i) pt.y[i] = y0[node * r + i];
    for (int a = 0; a < n * r; ++a) pt.p[a] = p0[node * n * r + a];
    return pt;
}

std::vector<Real> sample_psi(const InitialData& data, const PeriodicGrid& grid, int r) {
    std::vector<Real> out(grid.size() * r);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Vec v = data.psi(grid.coords(i));
        if (v.size() != r) throw ContractError("initial data psi has wrong number of components");
        for (int c = 0; c < r; ++c) out[i * r + c] = v[c];
    }
    return out;
}

std::vector<Real> solve_initial_momenta(const HamiltonianModel& model, const AdaptedChart& chart,
                                        const InitialData& data, std::span<const Real> gauge_a,
                                        const NewtonOptions& opts, std::vector<int>* iterations) {
    const int n = model.base_dim();
    const int r = model.field_dim();
    const PeriodicGrid& grid = chart.zgrid();
    if (gauge_a.size() != grid.size() * n * r) throw ContractError("solve_initial_momenta: gauge size mismatch");
    const ChartTrack track = chart.node_track();
    std::vector<Real> u0(grid.size() * r);
    if (iterations) iterations->assign(grid.size(), 0);

    parallel_for(grid.size(), [&](std::size_t node) {
        const ChartPoint& cp = track[node];
        const Vec nrm = chart.pair().surface.normal(cp.z);
        const Vec psi = data.psi(cp.z);
        const Vec psi_hat = data.psi_hat(cp.z);
        if (psi.size() != r || psi_hat.size() != r) throw ContractError("initial data has wrong number of components");
        Vec a(n * r);
        for (int c = 0; c < n * r; ++c) a[c] = gauge_a[node * n * r + c];

        PhasePoint pt(n, r);
        pt.x = cp.x;
        pt.y = psi;
        Derivatives d;
        auto eval = [&](const Vec& u, Vec& res, Mat* jac) {
            for (int mu = 0; mu < n; ++mu)
                for (int i = 0; i < r; ++i) pt.p[pair_index(mu, i, r)] = u[i] * cp.field[mu] + a[pair_index(mu, i, r)];
            model.derivatives(pt, d);
            res.resize(r);
            for (int i = 0; i < r; ++i) {
                Real s = 0.0;
                for (int mu = 0; mu < n; ++mu) s += d.grad_p[pair_index(mu, i, r)] * nrm[mu];
                res[i] = s - psi_hat[i];
            }
            if (jac) *jac = contract::vectors(d.hess_pp, nrm, cp.field, r);
        };
        Vec u = Vec::Zero(r);
        const NewtonResult res = newton_solve(u, eval, opts);
        raise_for(res, node, "initial momentum solve");
        for (int i = 0; i < r; ++i) u0[node * r + i] = u[i];
        if (iterations) (*iterations)[node] = res.iterations;
    });
    return u0;
}

PhaseInitialData build_initial_surface_B(const HamiltonianModel& model, const AdaptedChart& chart,
                                         const InitialData& data, const GaugeChoice& gauge, GaugeMode mode,
                                         const NewtonOptions& opts) {
    const int n = model.base_dim();
    const int r = model.field_dim();
    const int t = n - 1;
    const PeriodicGrid& grid = chart.zgrid();
    const std::size_t nodes = grid.size();
    const ChartTrack track = chart.node_track();

    PhaseInitialData b;
    b.n = n;
    b.r = r;
    b.y0 = sample_psi(data, grid, r);
    b.u0.assign(nodes * r, 0.0);
    b.p0.assign(nodes * n * r, 0.0);
    b.H0.assign(nodes, 0.0);
    b.k0.assign(nodes * t * r, 0.0);
    b.newton_iterations.assign(nodes, 0);

    if (mode == GaugeMode::prescribed) {
        std::vector<Real> gauge_a(nodes * n * r);
        for (std::size_t node = 0; node < nodes; ++node) {
            const ChartPoint& cp = track[node];
            const Vec k = gauge.h(0.0, cp.z, n, r);
            const Vec a = compose_gauge(cp.field, cp.frame, gauge.a_hat(0.0, cp.z, r), k, r);
            for (int c = 0; c < n * r; ++c) gauge_a[node * n * r + c] = a[c];
            for (int c = 0; c < t * r; ++c) b.k0[node * t * r + c] = k[c];
        }
        b.u0 = solve_initial_momenta(model, chart, data, gauge_a, opts, &b.newton_iterations);
    } else {
        const std::span<const Real> psi_grid(b.y0);
        parallel_for(nodes, [&](std::size_t node) {
            const ChartPoint& cp = track[node];
            const Vec nrm = chart.pair().surface.normal(cp.z);
            const Vec psi_hat = data.psi_hat(cp.z);
            if (psi_hat.size() != r) throw ContractError("initial data psi_hat has wrong number of components");
            const Vec a_hat = gauge.a_hat(0.0, cp.z, r);
            Vec grad(t * r);
            for (int a = 0; a < t; ++a)
                for (int i = 0; i < r; ++i) grad[a * r + i] = stencil::d1(psi_grid, grid, node, a, r, i);
            const Mat lift = lift_matrix(cp.field, cp.frame, r);
            const Mat test = lift_matrix(nrm, cp.frame, r);

            PhasePoint pt(n, r);
            pt.x = cp.x;
            for (int i = 0; i < r; ++i) pt.y[i] = b.y0[node * r + i];
            Derivatives d;
            auto eval = [&](const Vec& w, Vec& res, Mat* jac) {
                pt.p = assemble_momentum(cp.field, cp.frame, w.head(r) + a_hat, w.tail(t * r), r);
                model.derivatives(pt, d);
                // Rows: normal derivative condition, then embeddability along each z^A.
                res = test.transpose() * d.grad_p;
                res.head(r) -= psi_hat;
                res.tail(t * r) -= grad;
                if (jac) *jac = test.transpose() * d.hess_pp * lift;
            };
            Vec w = Vec::Zero(n * r);
            const NewtonResult res = newton_solve(w, eval, opts);
            raise_for(res, node, "initial momentum and gauge solve");
            for (int i = 0; i < r; ++i) b.u0[node * r + i] = w[i];
            for (int c = 0; c < t * r; ++c) b.k0[node * t * r + c] = w[r + c];
            b.newton_iterations[node] = res.iterations;
        });
    }

    for (std::size_t node = 0; node < nodes; ++node) {
        const ChartPoint& cp = track[node];
        Vec u(r), k(t * r);
        for (int i = 0; i < r; ++i) u[i] = b.u0[node * r + i];
        for (int c = 0; c < t * r; ++c) k[c] = b.k0[node * t * r + c];
        const Vec p = assemble_momentum(cp.field, cp.frame, u + gauge.a_hat(0.0, cp.z, r), k, r);
        for (int c = 0; c < n * r; ++c) b.p0[node * n * r + c] = p[c];
        b.H0[node] = -eval_H(model, b.phase_point(node, cp.x));
    }
    return b;
}

}  // namespace hjfield
