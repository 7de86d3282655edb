#include "hjfield/reference.hpp"

#include "hjfield/parallel.hpp"

#include <cmath>

namespace hjfield {

namespace {

void direct_rates(const PeriodicGrid& grid, const NeighbourTable& nb, const std::vector<Real>& y,
                  const std::vector<Real>& v, Real mu, int r, DirectRates& out) {
    const std::size_t nodes = grid.size();
    const Real inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    const Real m2 = mu * mu;
    out.dy = v;
    out.dv.resize(nodes * r);
    parallel_for(nodes, [&](std::size_t i) {
        for (int c = 0; c < r; ++c) {
            const Real yc = y[i * r + c];
            Real lap = 0.0;
            for (int a = 0; a < grid.dim(); ++a) {
                lap += y[nb.plus[a][i] * r + c] - 2.0 * yc + y[nb.minus[a][i] * r + c];
            }
            out.dv[i * r + c] = lap * inv_h2 + m2 * yc;
        }
    });
}

}  // namespace

DirectRates direct_rhs(const PeriodicGrid& grid, const DirectState& state, Real mu, int r) {
    if (state.y.size() != grid.size() * r || state.v.size() != grid.size() * r) {
        throw ContractError("direct_rhs: state does not match the grid");
    }
    DirectRates out;
    direct_rates(grid, NeighbourTable(grid), state.y, state.v, mu, r, out);
    return out;
}

DirectTrajectory integrate_direct(const PeriodicGrid& grid, std::vector<Real> y0, std::vector<Real> v0, Real mu,
                                  const SolverConfig& cfg, int r) {
    cfg.validate();
    const std::size_t size = grid.size() * r;
    if (y0.size() != size || v0.size() != size) throw ContractError("integrate_direct: state does not match the grid");
    const NeighbourTable nb(grid);
    const Real h = cfg.step();

    DirectTrajectory traj;
    traj.grid = grid;
    traj.r = r;
    DirectState cur{0.0, std::move(y0), std::move(v0)};
    DirectRates k1, k2, k3, k4;
    std::vector<Real> ys(size), vs(size);
    auto stage = [&](const DirectRates& k, Real scale) {
        for (std::size_t c = 0; c < size; ++c) {
            ys[c] = cur.y[c] + scale * k.dy[c];
            vs[c] = cur.v[c] + scale * k.dv[c];
        }
    };
    for (int s = 0; s < cfg.steps; ++s) {
        if (s % cfg.store_every == 0) traj.states.push_back(cur);
        direct_rates(grid, nb, cur.y, cur.v, mu, r, k1);
        stage(k1, 0.5 * h);
        direct_rates(grid, nb, ys, vs, mu, r, k2);
        stage(k2, 0.5 * h);
        direct_rates(grid, nb, ys, vs, mu, r, k3);
        stage(k3, h);
        direct_rates(grid, nb, ys, vs, mu, r, k4);
        const Real w = h / 6.0;
        for (std::size_t c = 0; c < size; ++c) {
            cur.y[c] += w * (k1.dy[c] + 2.0 * k2.dy[c] + 2.0 * k3.dy[c] + k4.dy[c]);
            cur.v[c] += w * (k1.dv[c] + 2.0 * k2.dv[c] + 2.0 * k3.dv[c] + k4.dv[c]);
        }
        cur.xi = (s + 1 == cfg.steps) ? cfg.xi_max : (s + 1) * h;
        for (std::size_t c = 0; c < size; ++c) {
            if (!std::isfinite(cur.y[c]) || !std::isfinite(cur.v[c]) || std::abs(cur.y[c]) > cfg.blowup_guard ||
                std::abs(cur.v[c]) > cfg.blowup_guard) {
                throw SolverError("direct solution blew up", static_cast<std::ptrdiff_t>(c / r), cur.xi);
            }
        }
    }
    traj.states.push_back(std::move(cur));
    return traj;
}

ExactKind parse_exact_kind(const std::string& name) {
    if (name == "exp_growing") return ExactKind::exp_growing;
    if (name == "exp_decaying") return ExactKind::exp_decaying;
    if (name == "cosine_mode") return ExactKind::cosine_mode;
    throw ConfigError("unknown exact solution '" + name + "'");
}

Real exact_scalar(ExactKind kind, const ExactParams& params, Real xi, const Vec& z) {
    switch (kind) {
        case ExactKind::exp_growing:
            return params.C * std::exp(params.mu * xi);
        case ExactKind::exp_decaying:
            return params.C * std::exp(-params.mu * xi);
        case ExactKind::cosine_mode: {
            const Real w2 = params.k * params.k - params.mu * params.mu;
            if (!(w2 > 0)) throw ConfigError("cosine mode needs k^2 > mu^2 (the mode is not oscillatory otherwise)");
            if (z.size() < 1) throw ContractError("cosine mode needs at least one z coordinate");
            return std::cos(params.k * z[0]) * std::cos(std::sqrt(w2) * xi);
        }
    }
    throw ContractError("unknown exact solution kind");
}

std::vector<Real> exact_field(ExactKind kind, const ExactParams& params, const PeriodicGrid& grid, Real xi) {
    std::vector<Real> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = exact_scalar(kind, params, xi, grid.coords(i));
    return out;
}

}  // namespace hjfield
