#include "hjfield/characteristics.hpp"

#include "hjfield/parallel.hpp"

#include <cmath>
#include <string>

namespace hjfield {

namespace {

using Rates = ClosedSystem::Rates;

void resize_rates(Rates& out, std::size_t nodes, int r) {
    out.dy.resize(nodes * r);
    out.du.resize(nodes * r);
    out.dphi.resize(nodes);
}

// Index of the first node whose y or u is non-finite or beyond the guard, or -1.
std::ptrdiff_t first_blowup(const GridState& s, int r, Real guard) {
    for (std::size_t c = 0; c < s.y.size(); ++c) {
        const Real y = s.y[c];
        const Real u = s.u[c];
        if (!std::isfinite(y) || !std::isfinite(u) || std::abs(y) > guard || std::abs(u) > guard) {
            return static_cast<std::ptrdiff_t>(c / r);
        }
    }
    return -1;
}

// Classical RK4 over (y, u, phi). `rates(xi, y, u, out, k)` evaluates the
// right-hand side and, when k is non-null, writes the gauge k used at that state.
template <class RatesFn>
Trajectory drive(SolveMode mode, const PeriodicGrid& grid, int n, int r, const PhaseInitialData& init,
                 const SolverConfig& cfg, RatesFn&& rates) {
    cfg.validate();
    const std::size_t nodes = grid.size();
    if (init.y0.size() != nodes * r || init.u0.size() != nodes * r) {
        throw ContractError("initial data does not match the grid");
    }
    const Real h = cfg.step();

    Trajectory traj;
    traj.mode = mode;
    traj.grid = grid;
    traj.n = n;
    traj.r = r;
    traj.stored_step = h * cfg.store_every;

    GridState cur;
    cur.xi = 0.0;
    cur.y = init.y0;
    cur.u = init.u0;
    cur.phi.assign(nodes, 0.0);

    Rates k1, k2, k3, k4;
    for (Rates* k : {&k1, &k2, &k3, &k4}) resize_rates(*k, nodes, r);
    std::vector<Real> ys(nodes * r), us(nodes * r);

    auto stage = [&](const Rates& k, Real scale) {
        for (std::size_t c = 0; c < ys.size(); ++c) {
            ys[c] = cur.y[c] + scale * k.dy[c];
            us[c] = cur.u[c] + scale * k.du[c];
        }
    };

    for (int s = 0; s < cfg.steps; ++s) {
        // Stage abscissae derive from the same end point the next step starts
        // from, so the chart is never asked to move backwards by a rounding error.
        const Real xi = cur.xi;
        const Real next = (s + 1 == cfg.steps) ? cfg.xi_max : (s + 1) * h;
        const Real mid = xi + 0.5 * (next - xi);
        const bool store = s % cfg.store_every == 0;
        rates(xi, cur.y, cur.u, k1, store ? &cur.k : nullptr);
        if (store) {
            if (cfg.keep_last > 0 && traj.states.size() == static_cast<std::size_t>(cfg.keep_last)) {
                traj.states.erase(traj.states.begin());
            }
            traj.states.push_back(cur);
            if (cfg.observer) cfg.observer(cur);
        }
        stage(k1, 0.5 * h);
        rates(mid, ys, us, k2, nullptr);
        stage(k2, 0.5 * h);
        rates(mid, ys, us, k3, nullptr);
        stage(k3, h);
        rates(next, ys, us, k4, nullptr);
        const Real w = h / 6.0;
        for (std::size_t c = 0; c < cur.y.size(); ++c) {
            cur.y[c] += w * (k1.dy[c] + 2.0 * k2.dy[c] + 2.0 * k3.dy[c] + k4.dy[c]);
            cur.u[c] += w * (k1.du[c] + 2.0 * k2.du[c] + 2.0 * k3.du[c] + k4.du[c]);
        }
        for (std::size_t c = 0; c < nodes; ++c) {
            cur.phi[c] += w * (k1.dphi[c] + 2.0 * k2.dphi[c] + 2.0 * k3.dphi[c] + k4.dphi[c]);
        }
        cur.xi = next;
        const std::ptrdiff_t bad = first_blowup(cur, r, cfg.blowup_guard);
        if (bad >= 0) {
            throw SolverError("solution blew up (|y| or |u| exceeded the guard or became non-finite)", bad, cur.xi);
        }
    }
    rates(cur.xi, cur.y, cur.u, k1, &cur.k);
    if (cfg.keep_last > 0 && traj.states.size() == static_cast<std::size_t>(cfg.keep_last)) {
        traj.states.erase(traj.states.begin());
    }
    if (cfg.observer) cfg.observer(cur);
    traj.states.push_back(std::move(cur));
    return traj;
}


// Inputs of the closed-system right-hand side when the k-solve is a fixed
// linear map (see ClosedSystem::Linear). Matrices are row major.
struct LinearKernel {
    std::size_t nodes = 0;
    int n = 0;
    int r = 0;
    Real xi = 0.0;
    Real dz = 0.0;
    const HamiltonianModel* model = nullptr;
    const Real* pinv = nullptr;
    const Real* pinv_c = nullptr;
    const Real* cross = nullptr;
    const Real* xx = nullptr;
    const Real* x0 = nullptr;
    const Real* field = nullptr;
    const std::vector<std::size_t>* plus = nullptr;
    const std::vector<std::size_t>* minus = nullptr;
    const Real* y = nullptr;
    const Real* u = nullptr;
    const Real* a_hat = nullptr;       // nodes x r
    const Real* face_a_hat = nullptr;  // axis-major, (n-1) x nodes x r
    Real* grad = nullptr;
    Real* flux = nullptr;  // axis-major, (n-1) x nodes x r
    Real* k = nullptr;
    Real* dy = nullptr;
    Real* du = nullptr;
    Real* dphi = nullptr;
};

// R and T fix r and n-1 at compile time when positive.
template <int R, int T>
void run_linear_kernel(const LinearKernel& a) {
    const int r = R > 0 ? R : a.r;
    const int t = T > 0 ? T : a.n - 1;
    const int n = t + 1;
    const int tr = t * r;
    const std::size_t nodes = a.nodes;
    const Real inv_dz = 1.0 / a.dz;
    const Real* y = a.y;
    const Real* u = a.u;

    parallel_for(nodes, [&](std::size_t i) {
        for (int b = 0; b < t; ++b) {
            const std::size_t ip = a.plus[b][i];
            const std::size_t im = a.minus[b][i];
            for (int c = 0; c < r; ++c) a.grad[i * tr + b * r + c] = 0.5 * inv_dz * (y[ip * r + c] - y[im * r + c]);
        }
    });

    parallel_for(nodes, [&](std::size_t i) {
        Real lead[kMaxFields];
        for (int c = 0; c < r; ++c) lead[c] = u[i * r + c] + a.a_hat[i * r + c];
        const Real* g = a.grad + i * tr;
        Real* k = a.k + i * tr;
        for (int row = 0; row < tr; ++row) {
            Real s = 0.0;
            for (int col = 0; col < tr; ++col) s += a.pinv[row * tr + col] * g[col];
            for (int c = 0; c < r; ++c) s -= a.pinv_c[row * r + c] * lead[c];
            k[row] = s;
        }
        Vec x(n), yv(r), gy;
        for (int mu = 0; mu < n; ++mu) x[mu] = a.x0[i * n + mu] + a.xi * a.field[mu];
        for (int c = 0; c < r; ++c) yv[c] = y[i * r + c];
        a.model->potential_gradient(x, yv, gy);
        Real dphi = 0.0;
        for (int c = 0; c < r; ++c) {
            Real f = 0.0;
            for (int j = 0; j < r; ++j) f += a.xx[c * r + j] * lead[j];
            for (int col = 0; col < tr; ++col) f += a.cross[c * tr + col] * k[col];
            a.dy[i * r + c] = f;
            a.du[i * r + c] = -gy[c];
            dphi -= f * u[i * r + c];
        }
        a.dphi[i] = dphi;
    });

    // Face k along axis b: compact difference across the face, averaged central
    // differences along the other axes, averaged u. Only component b is needed.
    for (int b = 0; b < t; ++b) {
        const std::size_t* next = a.plus[b].data();
        const Real* fa = a.face_a_hat + b * nodes * r;
        Real* flux = a.flux + b * nodes * r;
        parallel_for(nodes, [&](std::size_t i) {
            const std::size_t j = next[i];
            for (int c = 0; c < r; ++c) {
                const Real* prow = a.pinv + (b * r + c) * tr;
                const Real* crow = a.pinv_c + (b * r + c) * r;
                Real s = 0.0;
                for (int e = 0; e < t; ++e) {
                    for (int m = 0; m < r; ++m) {
                        const Real g = e == b ? inv_dz * (y[j * r + m] - y[i * r + m])
                                              : 0.5 * (a.grad[i * tr + e * r + m] + a.grad[j * tr + e * r + m]);
                        s += prow[e * r + m] * g;
                    }
                }
                for (int m = 0; m < r; ++m) s -= crow[m] * (0.5 * (u[i * r + m] + u[j * r + m]) + fa[i * r + m]);
                flux[i * r + c] = s;
            }
        });
    }

    parallel_for(nodes, [&](std::size_t i) {
        for (int b = 0; b < t; ++b) {
            const Real* flux = a.flux + b * nodes * r;
            const std::size_t m = a.minus[b][i];
            for (int c = 0; c < r; ++c) a.du[i * r + c] -= inv_dz * (flux[i * r + c] - flux[m * r + c]);
        }
    });
}

void run_linear(const LinearKernel& a) {
    if (a.r == 1) {
        switch (a.n) {
            case 2: return run_linear_kernel<1, 1>(a);
            case 3: return run_linear_kernel<1, 2>(a);
            case 4: return run_linear_kernel<1, 3>(a);
            default: break;
        }
    }
    run_linear_kernel<0, 0>(a);
}

}  // namespace

void SolverConfig::validate() const {
    if (!(xi_max > 0) || !std::isfinite(xi_max)) throw ConfigError("xi_max must be positive and finite");
    if (steps < 1) throw ConfigError("the number of xi steps must be at least 1");
    if (store_every < 1) throw ConfigError("store_every must be at least 1");
    if (keep_last < 0) throw ConfigError("keep_last must be non-negative");
    if (!(blowup_guard > 0)) throw ConfigError("blow-up guard must be positive");
}

NodeRates ode_rhs(const HamiltonianModel& model, const ChartPoint& cp, const Vec& y, const Vec& u,
                  const Vec& a_hat, const Vec& a_hat_rate, const Vec& h, const Vec& div_h) {
    const int n = model.base_dim();
    const int r = model.field_dim();
    PhasePoint pt(n, r);
    pt.x = cp.x;
    pt.y = y;
    pt.p = assemble_momentum(cp.field, cp.frame, u + a_hat, h, r);
    Derivatives d;
    model.derivatives(pt, d);
    NodeRates out{Vec(r), Vec(r), 0.0};
    for (int i = 0; i < r; ++i) {
        Real f = 0.0;
        for (int mu = 0; mu < n; ++mu) f += d.grad_p[pair_index(mu, i, r)] * cp.field[mu];
        out.dy[i] = f;
        out.du[i] = -a_hat_rate[i] - div_h[i] - d.grad_y[i];
        out.dphi -= f * u[i];
    }
    return out;
}

Trajectory integrate_ode(const HamiltonianModel& model, const AdaptedChart& chart, const GaugeChoice& gauge,
                         const PhaseInitialData& initial, const SolverConfig& cfg) {
    const int n = model.base_dim();
    const int r = model.field_dim();
    const int t = n - 1;
    const PeriodicGrid& grid = chart.zgrid();
    ChartTrack track = chart.node_track();

    auto rates = [&](Real xi, const std::vector<Real>& y, const std::vector<Real>& u, Rates& out,
                     std::vector<Real>* k) {
        track.advance_to(xi);
        if (k) k->resize(grid.size() * t * r);
        parallel_for(grid.size(), [&](std::size_t node) {
            const ChartPoint& cp = track[node];
            Vec yv(r), uv(r);
            for (int i = 0; i < r; ++i) {
                yv[i] = y[node * r + i];
                uv[i] = u[node * r + i];
            }
            const Vec hv = gauge.h(xi, cp.z, n, r);
            const NodeRates nr = ode_rhs(model, cp, yv, uv, gauge.a_hat(xi, cp.z, r), gauge.a_hat_rate(xi, cp.z, r),
                                         hv, gauge.h_divergence(xi, cp.z, n, r));
            for (int i = 0; i < r; ++i) {
                out.dy[node * r + i] = nr.dy[i];
                out.du[node * r + i] = nr.du[i];
            }
            out.dphi[node] = nr.dphi;
            if (k) {
                for (int c = 0; c < t * r; ++c) (*k)[node * t * r + c] = hv[c];
            }
        });
    };
    return drive(SolveMode::ode, grid, n, r, initial, cfg, rates);
}

Vec solve_k(const HamiltonianModel& model, const ChartPoint& cp, const Vec& y, const Vec& grad_y, const Vec& u,
            const Vec& a_hat, const NewtonOptions& opts, std::ptrdiff_t node, Real xi) {
    const int n = model.base_dim();
    const int r = model.field_dim();
    const int t = n - 1;
    if (grad_y.size() != t * r) throw ContractError("solve_k: gradient has wrong size");
    PhasePoint pt(n, r);
    pt.x = cp.x;
    pt.y = y;
    const Vec lead = u + a_hat;
    Derivatives d;
    auto eval = [&](const Vec& k, Vec& res, Mat* jac) {
        pt.p = assemble_momentum(cp.field, cp.frame, lead, k, r);
        model.derivatives(pt, d);
        res.resize(t * r);
        for (int a = 0; a < t; ++a) {
            for (int i = 0; i < r; ++i) {
                Real s = 0.0;
                for (int mu = 0; mu < n; ++mu) s += d.grad_p[pair_index(mu, i, r)] * cp.frame(mu, a);
                res[a * r + i] = s - grad_y[a * r + i];
            }
        }
        if (jac) *jac = contract::pullback(d.hess_pp, cp.frame, r);
    };
    Vec k = Vec::Zero(t * r);
    const NewtonResult res = newton_solve(k, eval, opts);
    if (res.status == NewtonStatus::singular) {
        throw RegularityError("k closure: Hessian pulled back to the surface is singular", node);
    }
    if (res.status == NewtonStatus::not_converged) {
        throw SolverError("k closure: Newton did not converge (residual " + std::to_string(res.residual) + ")", node,
                          xi);
    }
    return k;
}

// Cached data for models with quadratic kinetic term on an affine chart. With
// grad_p = Q p the closure is k = Pinv (grad - C^T (u + Ahat)) where P is the
// pullback of Q and C = Q contracted with X and the frame; f = Q_XX (u + Ahat) + C k.
struct ClosedSystem::Linear {
    int t = 0;
    int r = 0;
    Vec field;
    std::vector<Real> x0;      // nodes x n
    std::vector<Real> pinv;    // (t r) x (t r), row major
    std::vector<Real> pinv_c;  // Pinv C^T, (t r) x r, row major
    std::vector<Real> cross;   // C, r x (t r), row major
    std::vector<Real> xx;      // Q_XX, r x r, row major
};

ClosedSystem::ClosedSystem(const HamiltonianModel& model, const AdaptedChart& chart, const GaugeChoice& gauge,
                           NewtonOptions opts)
    : model_(&model),
      chart_(&chart),
      gauge_(&gauge),
      opts_(opts),
      n_(model.base_dim()),
      r_(model.field_dim()),
      nodes_(chart.node_track()) {
    if (chart.base_dim() != n_) throw ContractError("chart and model dimensions differ");
    const int t = n_ - 1;
    const PeriodicGrid& grid = chart.zgrid();
    const InitialPair& pair = chart.pair();
    if (model.quadratic_kinetic() && pair.field.is_constant() && pair.surface.is_graph()) {
        auto lin = std::make_shared<Linear>();
        lin->t = t;
        lin->r = r_;
        const ChartPoint& cp = nodes_[0];
        lin->field = cp.field;
        PhasePoint pt(n_, r_);
        pt.x = cp.x;
        Derivatives d;
        model.derivatives(pt, d);
        const Mat& q = d.hess_pp;
        const Mat pull = contract::pullback(q, cp.frame, r_);
        Eigen::PartialPivLU<Mat> lu(pull);
        if (!(std::abs(lu.determinant()) > opts_.singular_threshold)) {
            throw RegularityError("k closure: Hessian pulled back to the surface is singular", 0);
        }
        const Mat pinv = lu.inverse();
        const Mat cross = contract::vector_frame(q, cp.field, cp.frame, r_);
        const Mat pinv_c = pinv * cross.transpose();
        const Mat xx = contract::vectors(q, cp.field, cp.field, r_);
        auto flat = [](const Mat& m) {
            std::vector<Real> v(m.rows() * m.cols());
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                for (Eigen::Index j = 0; j < m.cols(); ++j) v[i * m.cols() + j] = m(i, j);
            return v;
        };
        lin->pinv = flat(pinv);
        lin->pinv_c = flat(pinv_c);
        lin->cross = flat(cross);
        lin->xx = flat(xx);
        lin->x0.resize(grid.size() * n_);
        for (std::size_t i = 0; i < grid.size(); ++i)
            for (int mu = 0; mu < n_; ++mu) lin->x0[i * n_ + mu] = nodes_[i].x[mu];
        linear_ = std::move(lin);
    } else {
        faces_.reserve(t);
        for (int a = 0; a < t; ++a) faces_.push_back(chart.node_track(a));
    }
    neighbours_ = NeighbourTable(grid);
    a_hat_.assign(grid.size() * r_, 0.0);
    face_a_hat_.assign(grid.size() * t * r_, 0.0);
    face_flux_.assign(grid.size() * t * r_, 0.0);
}

void ClosedSystem::advance(Real xi) {
    if (linear_) return;
    nodes_.advance_to(xi);
    for (auto& f : faces_) f.advance_to(xi);
}

Vec ClosedSystem::solve_at(const ChartPoint& cp, const Vec& y, const Vec& grad, const Vec& u, const Vec& a_hat,
                           std::size_t node, Real xi) const {
    return solve_k(*model_, cp, y, grad, u, a_hat, opts_, static_cast<std::ptrdiff_t>(node), xi);
}

void ClosedSystem::rhs(Real xi, const std::vector<Real>& y, const std::vector<Real>& u, Rates& out,
                       std::vector<Real>* node_k) {
    const PeriodicGrid& grid = chart_->zgrid();
    const std::size_t nodes = grid.size();
    const int n = n_;
    const int r = r_;
    const int t = n - 1;
    const int tr = t * r;
    if (y.size() != nodes * r || u.size() != nodes * r) throw ContractError("pde_rhs: state does not match the grid");
    resize_rates(out, nodes, r);
    advance(xi);
    const Real dz = grid.spacing();

    const bool has_a_hat = !gauge_->a_hat_is_zero();
    if (has_a_hat) {
        parallel_for(nodes, [&](std::size_t i) {
            const Vec v = gauge_->a_hat(xi, grid.coords(i), r);
            for (int c = 0; c < r; ++c) a_hat_[i * r + c] = v[c];
            for (int a = 0; a < t; ++a) {
                const Vec f = gauge_->a_hat(xi, grid.coords(i, a), r);
                for (int c = 0; c < r; ++c) face_a_hat_[(a * nodes + i) * r + c] = f[c];
            }
        });
    }

    std::vector<Real>& kn = node_k ? *node_k : node_k_;
    kn.resize(nodes * tr);
    grad_.resize(nodes * tr);

    if (linear_) {
        LinearKernel lk;
        lk.nodes = nodes;
        lk.n = n;
        lk.r = r;
        lk.xi = xi;
        lk.dz = dz;
        lk.model = model_;
        lk.pinv = linear_->pinv.data();
        lk.pinv_c = linear_->pinv_c.data();
        lk.cross = linear_->cross.data();
        lk.xx = linear_->xx.data();
        lk.x0 = linear_->x0.data();
        lk.field = linear_->field.data();
        lk.plus = neighbours_.plus.data();
        lk.minus = neighbours_.minus.data();
        lk.y = y.data();
        lk.u = u.data();
        lk.a_hat = a_hat_.data();
        lk.face_a_hat = face_a_hat_.data();
        lk.grad = grad_.data();
        lk.flux = face_flux_.data();
        lk.k = kn.data();
        lk.dy = out.dy.data();
        lk.du = out.du.data();
        lk.dphi = out.dphi.data();
        run_linear(lk);
    } else {
        general_rhs(xi, y, u, out, kn);
    }

    if (has_a_hat) {
        parallel_for(nodes, [&](std::size_t i) {
            const Vec rate = gauge_->a_hat_rate(xi, grid.coords(i), r);
            for (int c = 0; c < r; ++c) out.du[i * r + c] -= rate[c];
        });
    }
}

void ClosedSystem::general_rhs(Real xi, const std::vector<Real>& y, const std::vector<Real>& u, Rates& out,
                               std::vector<Real>& kn) {
    const PeriodicGrid& grid = chart_->zgrid();
    const std::size_t nodes = grid.size();
    const int n = n_;
    const int r = r_;
    const int t = n - 1;
    const int tr = t * r;
    const Real dz = grid.spacing();
    std::vector<Real>& grad = grad_;

    parallel_for(nodes, [&](std::size_t i) {
        for (int a = 0; a < t; ++a) {
            const std::size_t ip = neighbours_.plus[a][i];
            const std::size_t im = neighbours_.minus[a][i];
            for (int c = 0; c < r; ++c) grad[i * tr + a * r + c] = (y[ip * r + c] - y[im * r + c]) / (2.0 * dz);
        }
    });

    parallel_for(nodes, [&](std::size_t i) {
        const ChartPoint& cp = nodes_[i];
        Vec yv(r), uv(r), ah(r), g(tr);
        for (int c = 0; c < r; ++c) {
            yv[c] = y[i * r + c];
            uv[c] = u[i * r + c];
            ah[c] = a_hat_[i * r + c];
        }
        for (int c = 0; c < tr; ++c) g[c] = grad[i * tr + c];
        const Vec k = solve_at(cp, yv, g, uv, ah, i, xi);
        for (int c = 0; c < tr; ++c) kn[i * tr + c] = k[c];
        PhasePoint pt(n, r);
        pt.x = cp.x;
        pt.y = yv;
        pt.p = assemble_momentum(cp.field, cp.frame, uv + ah, k, r);
        Derivatives d;
        model_->derivatives(pt, d);
        Real dphi = 0.0;
        for (int c = 0; c < r; ++c) {
            Real f = 0.0;
            for (int mu = 0; mu < n; ++mu) f += d.grad_p[pair_index(mu, c, r)] * cp.field[mu];
            out.dy[i * r + c] = f;
            out.du[i * r + c] = -d.grad_y[c];
            dphi -= f * uv[c];
        }
        out.dphi[i] = dphi;
    });

    // Face solves along each axis; the divergence of k is the compact difference of face fluxes.
    for (int a = 0; a < t; ++a) {
        const Real* fa = face_a_hat_.data() + a * nodes * r;
        Real* flux = face_flux_.data();
        parallel_for(nodes, [&](std::size_t i) {
            const std::size_t j = neighbours_.plus[a][i];
            const ChartPoint& cp = faces_[a][i];
            Vec yv(r), uv(r), ah(r), gv(tr);
            for (int c = 0; c < r; ++c) {
                yv[c] = 0.5 * (y[i * r + c] + y[j * r + c]);
                uv[c] = 0.5 * (u[i * r + c] + u[j * r + c]);
                ah[c] = fa[i * r + c];
            }
            for (int b = 0; b < t; ++b) {
                for (int c = 0; c < r; ++c) {
                    gv[b * r + c] = b == a ? (y[j * r + c] - y[i * r + c]) / dz
                                           : 0.5 * (grad[i * tr + b * r + c] + grad[j * tr + b * r + c]);
                }
            }
            const Vec k = solve_at(cp, yv, gv, uv, ah, i, xi);
            for (int c = 0; c < r; ++c) flux[i * r + c] = k[a * r + c];
        });
        parallel_for(nodes, [&](std::size_t i) {
            const std::size_t m = neighbours_.minus[a][i];
            for (int c = 0; c < r; ++c) out.du[i * r + c] -= (flux[i * r + c] - flux[m * r + c]) / dz;
        });
    }
}

std::vector<Real> ClosedSystem::solve_node_k(Real xi, const std::vector<Real>& y, const std::vector<Real>& u) {
    Rates scratch;
    std::vector<Real> k;
    rhs(xi, y, u, scratch, &k);
    return k;
}

ClosedSystem::Rates pde_rhs(const HamiltonianModel& model, const AdaptedChart& chart, const GaugeChoice& gauge,
                            const GridState& state, const NewtonOptions& opts) {
    ClosedSystem sys(model, chart, gauge, opts);
    Rates out;
    sys.rhs(state.xi, state.y, state.u, out);
    return out;
}

Trajectory integrate_pde(const HamiltonianModel& model, const AdaptedChart& chart, const GaugeChoice& gauge,
                         const PhaseInitialData& initial, const SolverConfig& cfg) {
    ClosedSystem sys(model, chart, gauge, cfg.newton);
    auto rates = [&](Real xi, const std::vector<Real>& y, const std::vector<Real>& u, Rates& out,
                     std::vector<Real>* k) { sys.rhs(xi, y, u, out, k); };
    return drive(SolveMode::pde, chart.zgrid(), model.base_dim(), model.field_dim(), initial, cfg, rates);
}

std::vector<std::vector<Real>> accumulate_phi(const Trajectory& traj) {
    std::vector<std::vector<Real>> out;
    out.reserve(traj.states.size());
    for (const auto& s : traj.states) out.push_back(s.phi);
    return out;
}

}  // namespace hjfield
