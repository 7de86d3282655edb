#include "hjfield/embedding.hpp"

#include <array>

#include "hjfield/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace hjfield {

namespace {

Real uniform_spacing(const ReconstructedSolution& sol, std::size_t min_slices, const char* what) {
    const std::size_t m = sol.states.size();
    if (m < min_slices) {
        throw ContractError(std::string(what) + ": needs at least " + std::to_string(min_slices) + " stored slices");
    }
    const Real d = sol.states[1].xi - sol.states[0].xi;
    for (std::size_t s = 1; s < m; ++s) {
        const Real ds = sol.states[s].xi - sol.states[s - 1].xi;
        if (std::abs(ds - d) > 1e-9 * std::max<Real>(1.0, std::abs(d))) {
            throw ContractError(std::string(what) + ": stored slices are not uniformly spaced in xi");
        }
    }
    if (!(d > 0)) throw ContractError(std::string(what) + ": stored slices must increase in xi");
    return d;
}

// d/dxi of component c of a per-slice field at slice s (1 <= s <= m-2).
template <class Get>
Real xi_derivative(Get&& get, std::size_t s, std::size_t m, Real d) {
    if (s >= 2 && s + 2 < m) {
        return (8.0 * (get(s + 1) - get(s - 1)) - (get(s + 2) - get(s - 2))) / (12.0 * d);
    }
    return (get(s + 1) - get(s - 1)) / (2.0 * d);
}

// Ordering of chart coordinates: (z^1 .. z^{n-1}, xi).
Mat chart_jacobian(const ChartPoint& cp) {
    const int n = static_cast<int>(cp.field.size());
    Mat j(n, n);
    j.leftCols(n - 1) = cp.frame;
    j.col(n - 1) = cp.field;
    return j;
}

template <class F>
Real simpson(F&& f, Real a, Real b, int panels) {
    if (panels < 2) panels = 2;
    if (panels % 2) ++panels;
    const Real h = (b - a) / panels;
    Real s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

void require_mu(Real mu) {
    if (!(mu > 0)) throw ContractError("scalar complete integral requires mu > 0");
}

// int_0^xi e^{-mu s} d(s) ds
Real decay_integral(const ScalarDivergence& d, Real mu, Real xi) {
    if (d.is_constant()) return d.value() * (1.0 - std::exp(-mu * xi)) / mu;
    return simpson([&](Real s) { return std::exp(-mu * s) * d(s); }, 0.0, xi, d.panels());
}

// int_0^xi a(s) e^{mu s} ds
Real growth_integral(Real alpha, const ScalarDivergence& d, Real mu, Real xi) {
    const Real e1 = std::exp(mu * xi);
    const Real e2 = e1 * e1;
    if (d.is_constant()) {
        const Real dv = d.value();
        return alpha * (e2 - 1.0) / (2.0 * mu) - (dv / mu) * ((e2 - 1.0) / (2.0 * mu) - (e1 - 1.0) / mu);
    }
    return simpson([&](Real s) { return scalar_a(alpha, d, mu, s) * std::exp(mu * s); }, 0.0, xi, d.panels());
}

void fill_report(ResidualReport& rep, Real sum_sq, std::size_t count) {
    rep.l2 = count ? std::sqrt(sum_sq / static_cast<Real>(count)) : 0.0;
}

}  // namespace

ReconstructedSolution reconstruct(const Trajectory& traj, const GaugeChoice& gauge, const AdaptedChart& chart,
                                  const HamiltonianModel& model) {
    const int n = traj.n;
    const int r = traj.r;
    const int t = n - 1;
    if (n != model.base_dim() || r != model.field_dim()) throw ContractError("reconstruct: model does not match");
    if (!(traj.grid == chart.zgrid())) throw ContractError("reconstruct: chart grid does not match the trajectory");
    const std::size_t nodes = traj.grid.size();

    ReconstructedSolution sol;
    sol.mode = traj.mode;
    sol.grid = traj.grid;
    sol.n = n;
    sol.r = r;
    sol.stored_step = traj.stored_step;
    sol.states = traj.states;
    sol.slices.resize(traj.states.size());

    ChartTrack track = chart.node_track();
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        const GridState& st = traj.states[s];
        track.advance_to(st.xi);
        ReconstructedSlice& out = sol.slices[s];
        out.xi = st.xi;
        out.x.resize(nodes * n);
        out.p.resize(nodes * n * r);
        out.S.resize(nodes * n);
        out.minus_H.resize(nodes);
        parallel_for(nodes, [&](std::size_t i) {
            const ChartPoint& cp = track[i];
            Vec k = Vec::Zero(t * r);
            if (!st.k.empty()) {
                for (int c = 0; c < t * r; ++c) k[c] = st.k[i * t * r + c];
            }
            const Vec a = compose_gauge(cp.field, cp.frame, gauge.a_hat(st.xi, cp.z, r), k, r);
            PhasePoint pt(n, r);
            pt.x = cp.x;
            for (int c = 0; c < r; ++c) pt.y[c] = st.y[i * r + c];
            for (int mu = 0; mu < n; ++mu) {
                Real sm = st.phi[i] * cp.field[mu];
                for (int c = 0; c < r; ++c) {
                    const int q = pair_index(mu, c, r);
                    pt.p[q] = st.u[i * r + c] * cp.field[mu] + a[q];
                    sm += a[q] * pt.y[c];
                }
                out.S[i * n + mu] = sm;
                out.x[i * n + mu] = cp.x[mu];
            }
            for (int q = 0; q < n * r; ++q) out.p[i * n * r + q] = pt.p[q];
            out.minus_H[i] = -model.value(pt);
        });
    }
    return sol;
}

FieldEquationReport field_equation_residual(const ReconstructedSolution& sol, const HamiltonianModel& model,
                                            const AdaptedChart& chart) {
    const Real d = uniform_spacing(sol, 3, "field_equation_residual");
    const int n = sol.n;
    const int r = sol.r;
    const int t = n - 1;
    const int nr = n * r;
    const PeriodicGrid& grid = sol.grid;
    if (grid.per_axis() < 3) throw ContractError("field_equation_residual: needs at least 3 nodes per axis");
    const std::size_t nodes = grid.size();
    const std::size_t m = sol.states.size();

    FieldEquationReport rep;
    Real sum_g = 0.0, sum_d = 0.0;
    std::size_t count = 0;
    ChartTrack track = chart.node_track();
    std::vector<Real> res_g(nodes), res_d(nodes);
    for (std::size_t s = 1; s + 1 < m; ++s) {
        track.advance_to(sol.states[s].xi);
        const std::span<const Real> y(sol.states[s].y);
        const std::span<const Real> p(sol.slices[s].p);
        parallel_for(nodes, [&](std::size_t i) {
            const ChartPoint& cp = track[i];
            const Mat jac = chart_jacobian(cp);
            const Eigen::PartialPivLU<Mat> lu(jac);
            const Mat jinv = lu.inverse();
            PhasePoint pt(n, r);
            pt.x = cp.x;
            for (int c = 0; c < r; ++c) pt.y[c] = y[i * r + c];
            for (int q = 0; q < nr; ++q) pt.p[q] = p[i * nr + q];
            Derivatives der;
            model.derivatives(pt, der);

            Real worst_g = 0.0;
            for (int c = 0; c < r; ++c) {
                Vec w(n);
                for (int a = 0; a < t; ++a) w[a] = stencil::d1_4(y, grid, i, a, r, c);
                w[t] = xi_derivative([&](std::size_t q) { return sol.states[q].y[i * r + c]; }, s, m, d);
                const Vec g = jinv.transpose() * w;  // dy/dx^mu
                for (int mu = 0; mu < n; ++mu) {
                    worst_g = std::max(worst_g, std::abs(g[mu] - der.grad_p[pair_index(mu, c, r)]));
                }
            }
            Real worst_d = 0.0;
            for (int c = 0; c < r; ++c) {
                Real div = 0.0;
                for (int mu = 0; mu < n; ++mu) {
                    const int q = pair_index(mu, c, r);
                    for (int a = 0; a < t; ++a) div += stencil::d1_4(p, grid, i, a, nr, q) * jinv(a, mu);
                    div += xi_derivative([&](std::size_t h) { return sol.slices[h].p[i * nr + q]; }, s, m, d) *
                           jinv(t, mu);
                }
                worst_d = std::max(worst_d, std::abs(div + der.grad_y[c]));
            }
            res_g[i] = worst_g;
            res_d[i] = worst_d;
        });
        Real slice_g = 0.0, slice_d = 0.0;
        for (std::size_t i = 0; i < nodes; ++i) {
            sum_g += res_g[i] * res_g[i];
            sum_d += res_d[i] * res_d[i];
            if (res_g[i] > rep.gradient.linf) {
                rep.gradient.linf = res_g[i];
                rep.gradient.max_node = static_cast<std::ptrdiff_t>(i);
                rep.gradient.max_xi = sol.states[s].xi;
            }
            if (res_d[i] > rep.divergence.linf) {
                rep.divergence.linf = res_d[i];
                rep.divergence.max_node = static_cast<std::ptrdiff_t>(i);
                rep.divergence.max_xi = sol.states[s].xi;
            }
            slice_g = std::max(slice_g, res_g[i]);
            slice_d = std::max(slice_d, res_d[i]);
        }
        count += nodes;
        rep.gradient.profile_xi.push_back(sol.states[s].xi);
        rep.gradient.profile_linf.push_back(slice_g);
        rep.divergence.profile_xi.push_back(sol.states[s].xi);
        rep.divergence.profile_linf.push_back(slice_d);
    }
    fill_report(rep.gradient, sum_g, count);
    fill_report(rep.divergence, sum_d, count);
    return rep;
}

std::vector<Real> embeddability_residual(const ReconstructedSolution& sol, const HamiltonianModel& model,
                                         const AdaptedChart& chart) {
    const int n = sol.n;
    const int r = sol.r;
    const int t = n - 1;
    const int nr = n * r;
    const PeriodicGrid& grid = sol.grid;
    const std::size_t nodes = grid.size();
    std::vector<Real> out(sol.states.size() * nodes, 0.0);
    ChartTrack track = chart.node_track();
    for (std::size_t s = 0; s < sol.states.size(); ++s) {
        track.advance_to(sol.states[s].xi);
        const std::span<const Real> y(sol.states[s].y);
        parallel_for(nodes, [&](std::size_t i) {
            const ChartPoint& cp = track[i];
            PhasePoint pt(n, r);
            pt.x = cp.x;
            for (int c = 0; c < r; ++c) pt.y[c] = y[i * r + c];
            for (int q = 0; q < nr; ++q) pt.p[q] = sol.slices[s].p[i * nr + q];
            Derivatives der;
            model.derivatives(pt, der);
            Real worst = 0.0;
            for (int a = 0; a < t; ++a) {
                for (int c = 0; c < r; ++c) {
                    Real rhs = 0.0;
                    for (int mu = 0; mu < n; ++mu) rhs += der.grad_p[pair_index(mu, c, r)] * cp.frame(mu, a);
                    worst = std::max(worst, std::abs(stencil::d1(y, grid, i, a, r, c) - rhs));
                }
            }
            out[s * nodes + i] = worst;
        });
    }
    return out;
}

ResidualReport summarize(const ReconstructedSolution& sol, const std::vector<Real>& per_node) {
    const std::size_t nodes = sol.grid.size();
    if (per_node.size() != sol.states.size() * nodes) throw ContractError("summarize: residual has wrong size");
    ResidualReport rep;
    Real sum = 0.0;
    for (std::size_t s = 0; s < sol.states.size(); ++s) {
        Real slice = 0.0;
        for (std::size_t i = 0; i < nodes; ++i) {
            const Real v = per_node[s * nodes + i];
            sum += v * v;
            slice = std::max(slice, v);
            if (v > rep.linf) {
                rep.linf = v;
                rep.max_node = static_cast<std::ptrdiff_t>(i);
                rep.max_xi = sol.states[s].xi;
            }
        }
        rep.profile_xi.push_back(sol.states[s].xi);
        rep.profile_linf.push_back(slice);
    }
    fill_report(rep, sum, per_node.size());
    return rep;
}

ResidualReport hj_ansatz_residual(const ReconstructedSolution& sol, const HamiltonianModel& model,
                                  const AdaptedChart& chart) {
    const Real d = uniform_spacing(sol, 3, "hj_ansatz_residual");
    const int n = sol.n;
    const int r = sol.r;
    const int nr = n * r;
    const std::size_t nodes = sol.grid.size();
    const std::size_t m = sol.states.size();
    ResidualReport rep;
    Real sum = 0.0;
    std::size_t count = 0;
    ChartTrack track = chart.node_track();
    std::vector<Real> res(nodes);
    for (std::size_t s = 1; s + 1 < m; ++s) {
        track.advance_to(sol.states[s].xi);
        parallel_for(nodes, [&](std::size_t i) {
            const ChartPoint& cp = track[i];
            PhasePoint pt(n, r);
            pt.x = cp.x;
            for (int c = 0; c < r; ++c) pt.y[c] = sol.states[s].y[i * r + c];
            for (int q = 0; q < nr; ++q) pt.p[q] = sol.slices[s].p[i * nr + q];
            Derivatives der;
            model.derivatives(pt, der);
            Real worst = 0.0;
            for (int c = 0; c < r; ++c) {
                const Real dy = xi_derivative([&](std::size_t q) { return sol.states[q].y[i * r + c]; }, s, m, d);
                Real f = 0.0;
                for (int mu = 0; mu < n; ++mu) f += der.grad_p[pair_index(mu, c, r)] * cp.field[mu];
                worst = std::max(worst, std::abs(dy - f));
            }
            res[i] = worst;
        });
        Real slice = 0.0;
        for (std::size_t i = 0; i < nodes; ++i) {
            sum += res[i] * res[i];
            slice = std::max(slice, res[i]);
            if (res[i] > rep.linf) {
                rep.linf = res[i];
                rep.max_node = static_cast<std::ptrdiff_t>(i);
                rep.max_xi = sol.states[s].xi;
            }
        }
        count += nodes;
        rep.profile_xi.push_back(sol.states[s].xi);
        rep.profile_linf.push_back(slice);
    }
    fill_report(rep, sum, count);
    return rep;
}

namespace {

// Residual of the h wave relation at the middle of five consecutive gauge
// slices w[0..4] with xi spacing d; one value per node, the maximum over A.
// The mixed terms d2 h_B / dz^A dz^B (B != A) are the tensor product of 4th-order
// first differences, evaluated as D_A of q = sum_{B != A} D_B h_B.
void h_window_residual(const std::array<const std::vector<Real>*, 5>& w, const PeriodicGrid& grid,
                       const NeighbourTable& nb, int t, Real d, Real mu, std::vector<Real>& res,
                       std::vector<Real>& scratch) {
    const std::vector<Real>& h = *w[2];
    const std::size_t nodes = grid.size();
    const Real dz = grid.spacing();
    // 4th-order first difference of component c along axis a.
    auto d1 = [&](const std::vector<Real>& f, std::size_t i, int a, int c) {
        const std::size_t p1 = nb.plus[a][i], m1 = nb.minus[a][i];
        const std::size_t p2 = nb.plus[a][p1], m2 = nb.minus[a][m1];
        return (8.0 * (f[p1 * t + c] - f[m1 * t + c]) - (f[p2 * t + c] - f[m2 * t + c])) / (12.0 * dz);
    };
    scratch.resize(nodes * t);
    parallel_for(nodes, [&](std::size_t i) {
        for (int b = 0; b < t; ++b) scratch[i * t + b] = d1(h, i, b, b);
    });
    parallel_for(nodes, [&](std::size_t i) {
        Real worst = 0.0;
        for (int a = 0; a < t; ++a) {
            const std::size_t p1 = nb.plus[a][i], m1 = nb.minus[a][i];
            const std::size_t p2 = nb.plus[a][p1], m2 = nb.minus[a][m1];
            Real v = (-h[p2 * t + a] + 16.0 * h[p1 * t + a] - 30.0 * h[i * t + a] + 16.0 * h[m1 * t + a] -
                      h[m2 * t + a]) /
                     (12.0 * dz * dz);
            for (int b = 0; b < t; ++b) {
                if (b != a) v += d1(scratch, i, a, b);
            }
            auto at = [&](int s) { return (*w[s])[i * t + a]; };
            const Real hxx = (-at(4) + 16.0 * at(3) - 30.0 * at(2) + 16.0 * at(1) - at(0)) / (12.0 * d * d);
            v += -hxx + mu * mu * at(2);
            worst = std::max(worst, std::abs(v));
        }
        res[i] = worst;
    });
}

}  // namespace

HConsistency h_consistency_residual(const ReconstructedSolution& sol, Real mu) {
    if (sol.r != 1) throw ContractError("h_consistency_residual: scalar fields only");
    const Real d = uniform_spacing(sol, 5, "h_consistency_residual");
    const int t = sol.n - 1;
    const PeriodicGrid& grid = sol.grid;
    const std::size_t nodes = grid.size();
    const std::size_t m = sol.states.size();
    for (const auto& st : sol.states) {
        if (st.k.size() != nodes * t) throw ContractError("h_consistency_residual: states carry no gauge history");
    }
    HConsistency out;
    Real sum = 0.0;
    std::vector<Real> res(nodes), scratch;
    const NeighbourTable nb(grid);
    for (std::size_t s = 2; s + 2 < m; ++s) {
        h_window_residual({&sol.states[s - 2].k, &sol.states[s - 1].k, &sol.states[s].k, &sol.states[s + 1].k,
                           &sol.states[s + 2].k},
                          grid, nb, t, d, mu, res, scratch);
        Real slice = 0.0;
        for (std::size_t i = 0; i < nodes; ++i) {
            out.residual.push_back(res[i]);
            sum += res[i] * res[i];
            slice = std::max(slice, res[i]);
            if (res[i] > out.report.linf) {
                out.report.linf = res[i];
                out.report.max_node = static_cast<std::ptrdiff_t>(i);
                out.report.max_xi = sol.states[s].xi;
            }
        }
        out.xi.push_back(sol.states[s].xi);
        out.report.profile_xi.push_back(sol.states[s].xi);
        out.report.profile_linf.push_back(slice);
    }
    fill_report(out.report, sum, out.residual.size());
    return out;
}

HConsistencyMonitor::HConsistencyMonitor(PeriodicGrid grid, int n, Real spacing, Real mu)
    : grid_(std::move(grid)), neighbours_(grid_), t_(n - 1), spacing_(spacing), mu_(mu), res_(grid_.size()) {
    if (!(spacing > 0)) throw ContractError("HConsistencyMonitor: spacing must be positive");
}

void HConsistencyMonitor::push(const GridState& state) {
    const std::size_t nodes = grid_.size();
    if (state.k.size() != nodes * t_) throw ContractError("HConsistencyMonitor: state carries no gauge");
    if (!window_.empty()) {
        const Real ds = state.xi - window_.back().xi;
        if (std::abs(ds - spacing_) > 1e-9 * std::max<Real>(1.0, spacing_)) {
            throw ContractError("HConsistencyMonitor: states are not uniformly spaced in xi");
        }
    }
    if (window_.size() == 5) window_.pop_front();
    window_.push_back({state.xi, state.k});
    if (window_.size() < 5) return;

    h_window_residual({&window_[0].k, &window_[1].k, &window_[2].k, &window_[3].k, &window_[4].k}, grid_,
                      neighbours_, t_, spacing_, mu_, res_, scratch_);
    Real slice = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
        sum_sq_ += res_[i] * res_[i];
        slice = std::max(slice, res_[i]);
        if (res_[i] > report_.linf) {
            report_.linf = res_[i];
            report_.max_node = static_cast<std::ptrdiff_t>(i);
            report_.max_xi = window_[2].xi;
        }
    }
    count_ += nodes;
    report_.profile_xi.push_back(window_[2].xi);
    report_.profile_linf.push_back(slice);
    fill_report(report_, sum_sq_, count_);
}

ScalarDivergence ScalarDivergence::constant(Real value) {
    ScalarDivergence d;
    d.value_ = value;
    return d;
}

ScalarDivergence ScalarDivergence::function(std::function<Real(Real)> fn, int panels) {
    ScalarDivergence d;
    d.fn_ = std::move(fn);
    d.panels_ = panels;
    return d;
}

Real scalar_a(Real alpha, const ScalarDivergence& d, Real mu, Real xi) {
    require_mu(mu);
    return std::exp(mu * xi) * (alpha - decay_integral(d, mu, xi));
}

Real scalar_beta(Real y, Real alpha, const ScalarDivergence& d, Real mu, Real xi) {
    require_mu(mu);
    return std::exp(mu * xi) * y + growth_integral(alpha, d, mu, xi);
}

Real scalar_y_from_beta(Real beta, Real alpha, const ScalarDivergence& d, Real mu, Real xi) {
    require_mu(mu);
    return std::exp(-mu * xi) * (beta - growth_integral(alpha, d, mu, xi));
}

Real essentiality_det(Real mu, Real xi) { return std::exp(mu * xi); }

FirstIntegralReport check_first_integrals(const Trajectory& traj, Real mu, const GaugeChoice& gauge) {
    require_mu(mu);
    if (traj.r != 1) throw ContractError("check_first_integrals: scalar fields only");
    const std::size_t m = traj.states.size();
    FirstIntegralReport rep;
    if (m == 0) return rep;
    if (traj.states.front().xi != 0.0) throw ContractError("check_first_integrals: the first stored state must be at xi = 0");
    const PeriodicGrid& grid = traj.grid;
    const std::size_t nodes = grid.size();
    const int n = traj.n;

    std::vector<Real> alpha_rate(nodes, 0.0), beta_rate(nodes, 0.0), alpha_drift(nodes, 0.0),
        beta_drift(nodes, 0.0);
    parallel_for(nodes, [&](std::size_t i) {
        const Vec z = grid.coords(i);
        auto dfun = [&](Real s) { return gauge.h_is_zero() ? 0.0 : gauge.h_divergence(s, z, n, 1)[0]; };
        auto decay = [&](Real s) { return std::exp(-mu * s) * dfun(s); };
        std::vector<Real> alpha(m), beta(m);
        Real I = 0.0, K = 0.0;
        for (std::size_t s = 0; s < m; ++s) {
            const Real xi = traj.states[s].xi;
            if (s > 0 && !gauge.h_is_zero()) {
                const Real x0 = traj.states[s - 1].xi;
                const Real xm = 0.5 * (x0 + xi);
                const Real i0 = I;
                const Real im = I + simpson(decay, x0, xm, 2);
                const Real i1 = I + simpson(decay, x0, xi, 2);
                K += (xi - x0) / 6.0 *
                     (std::exp(2.0 * mu * x0) * i0 + 4.0 * std::exp(2.0 * mu * xm) * im + std::exp(2.0 * mu * xi) * i1);
                I = i1;
            }
            const Real y = traj.states[s].y[i];
            const Real u = traj.states[s].u[i];
            const Real e1 = std::exp(mu * xi);
            alpha[s] = (u - mu * y) / e1 + I;
            beta[s] = e1 * y + alpha[s] * (e1 * e1 - 1.0) / (2.0 * mu) - K;
        }
        for (std::size_t s = 0; s < m; ++s) {
            alpha_drift[i] = std::max(alpha_drift[i], std::abs(alpha[s] - alpha[0]));
            beta_drift[i] = std::max(beta_drift[i], std::abs(beta[s] - beta[0]));
            if (m < 2) continue;
            const std::size_t lo = s == 0 ? 0 : s - 1;
            const std::size_t hi = s + 1 == m ? s : s + 1;
            const Real dx = traj.states[hi].xi - traj.states[lo].xi;
            alpha_rate[i] = std::max(alpha_rate[i], std::abs(alpha[hi] - alpha[lo]) / dx);
            beta_rate[i] = std::max(beta_rate[i], std::abs(beta[hi] - beta[lo]) / dx);
        }
    });
    rep.max_alpha_rate = *std::max_element(alpha_rate.begin(), alpha_rate.end());
    rep.max_beta_rate = *std::max_element(beta_rate.begin(), beta_rate.end());
    rep.alpha_drift = *std::max_element(alpha_drift.begin(), alpha_drift.end());
    rep.beta_drift = *std::max_element(beta_drift.begin(), beta_drift.end());
    return rep;
}

}  // namespace hjfield
