#include "hjfield/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hjfield {

namespace {

// Coordinates of the differentiated variables: y first, then p.
Real& coordinate(PhasePoint& pt, int idx, int r) {
    return idx < r ? pt.y[idx] : pt.p[idx - r];
}

// Central second difference of H along coordinates a and b.
Real second_difference(const HamiltonianModel& model, PhasePoint pt, int a, int b, int r, Real h) {
    if (a == b) {
        const Real base = model.value(pt);
        Real& c = coordinate(pt, a, r);
        const Real c0 = c;
        c = c0 + h;
        const Real fp = model.value(pt);
        c = c0 - h;
        const Real fm = model.value(pt);
        return (fp - 2.0 * base + fm) / (h * h);
    }
    const Real ca = coordinate(pt, a, r);
    const Real cb = coordinate(pt, b, r);
    auto at = [&](Real sa, Real sb) {
        coordinate(pt, a, r) = ca + sa * h;
        coordinate(pt, b, r) = cb + sb * h;
        return model.value(pt);
    };
    return (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
}

Real first_difference(const HamiltonianModel& model, PhasePoint pt, int a, int r, Real h) {
    Real& c = coordinate(pt, a, r);
    const Real c0 = c;
    c = c0 + h;
    const Real fp = model.value(pt);
    c = c0 - h;
    const Real fm = model.value(pt);
    return (fp - fm) / (2.0 * h);
}

std::vector<Real> checked_signature(const FreeScalarParams& params) {
    if (params.n < 2 || params.n > kMaxBaseDim) {
        throw ConfigError("free scalar: base dimension must be in [2, " + std::to_string(kMaxBaseDim) + "]");
    }
    if (static_cast<int>(params.signature.size()) != params.n) {
        throw ConfigError("free scalar: signature needs " + std::to_string(params.n) + " entries");
    }
    for (Real s : params.signature) {
        if (s != 1.0 && s != -1.0) {
            throw ConfigError("free scalar: signature entries must be +1 or -1");
        }
    }
    if (!std::isfinite(params.mu)) {
        throw ConfigError("free scalar: mass parameter must be finite");
    }
    return params.signature;
}

}  // namespace

HamiltonianModel::HamiltonianModel(int n, int r) : n_(n), r_(r) {
    if (n < 1 || n > kMaxBaseDim || r < 1 || r > kMaxFields) {
        throw ConfigError("model dimensions out of range: n=" + std::to_string(n) + ", r=" + std::to_string(r));
    }
}

void HamiltonianModel::potential_gradient(const Vec& x, const Vec& y, Vec& out) const {
    PhasePoint pt(n_, r_);
    pt.x = x;
    pt.y = y;
    Derivatives d;
    derivatives(pt, d);
    out = d.grad_y;
}

void HamiltonianModel::derivatives(const PhasePoint& pt, Derivatives& out) const {
    const int r = r_;
    const int np = pair_dim();
    const Real h = kFallbackStep;
    out.grad_y.resize(r);
    out.grad_p.resize(np);
    out.hess_pp.resize(np, np);
    for (int i = 0; i < r; ++i) out.grad_y[i] = first_difference(*this, pt, i, r, h);
    for (int a = 0; a < np; ++a) out.grad_p[a] = first_difference(*this, pt, r + a, r, h);
    // Second differences lose ~eps/h^2 to cancellation, so they use a wider step.
    const Real h2 = 100.0 * h;
    for (int a = 0; a < np; ++a) {
        for (int b = a; b < np; ++b) {
            const Real v = second_difference(*this, pt, r + a, r + b, r, h2);
            out.hess_pp(a, b) = v;
            out.hess_pp(b, a) = v;
        }
    }
}

void HamiltonianModel::check_point(const PhasePoint& pt) const {
    if (pt.x.size() != n_ || pt.y.size() != r_ || pt.p.size() != pair_dim()) {
        throw ContractError("phase point dimensions (" + std::to_string(pt.x.size()) + ", " +
                            std::to_string(pt.y.size()) + ", " + std::to_string(pt.p.size()) +
                            ") do not match model (n=" + std::to_string(n_) + ", r=" + std::to_string(r_) + ")");
    }
    if (!pt.x.allFinite() || !pt.y.allFinite() || !pt.p.allFinite()) {
        throw ContractError("phase point has non-finite entries");
    }
}

Real eval_H(const HamiltonianModel& model, const PhasePoint& pt) {
    model.check_point(pt);
    return model.value(pt);
}

Derivatives eval_derivatives(const HamiltonianModel& model, const PhasePoint& pt) {
    model.check_point(pt);
    Derivatives d;
    model.derivatives(pt, d);
    return d;
}

Real fd_validate_derivatives(const HamiltonianModel& model, const PhasePoint& pt, Real h) {
    if (!(h > 0)) throw ContractError("fd_validate_derivatives: step must be positive");
    const Derivatives d = eval_derivatives(model, pt);
    const int r = model.field_dim();
    const int np = model.pair_dim();
    Real worst = 0.0;
    auto compare = [&worst](Real approx, Real exact) {
        worst = std::max(worst, std::abs(approx - exact) / std::max(1.0, std::abs(exact)));
    };
    for (int i = 0; i < r; ++i) compare(first_difference(model, pt, i, r, h), d.grad_y[i]);
    for (int a = 0; a < np; ++a) compare(first_difference(model, pt, r + a, r, h), d.grad_p[a]);
    const Real h2 = 100.0 * h;
    for (int a = 0; a < np; ++a) {
        for (int b = 0; b < np; ++b) {
            const Real coarse = second_difference(model, pt, r + a, r + b, r, 2.0 * h2);
            const Real fine = second_difference(model, pt, r + a, r + b, r, h2);
            compare((4.0 * fine - coarse) / 3.0, d.hess_pp(a, b));
        }
    }
    return worst;
}

FreeScalarModel::FreeScalarModel(const FreeScalarParams& params)
    : HamiltonianModel(params.n, 1), mu_(params.mu), eta_(checked_signature(params)) {}

Real FreeScalarModel::value(const PhasePoint& pt) const {
    Real kinetic = 0.0;
    for (int m = 0; m < base_dim(); ++m) kinetic += eta_[m] * pt.p[m] * pt.p[m];
    return 0.5 * kinetic + 0.5 * mu_ * mu_ * pt.y[0] * pt.y[0];
}

void FreeScalarModel::derivatives(const PhasePoint& pt, Derivatives& out) const {
    const int n = base_dim();
    out.grad_y.resize(1);
    out.grad_y[0] = mu_ * mu_ * pt.y[0];
    out.grad_p.resize(n);
    out.hess_pp.setZero(n, n);
    for (int m = 0; m < n; ++m) {
        out.grad_p[m] = eta_[m] * pt.p[m];
        out.hess_pp(m, m) = eta_[m];
    }
}

void FreeScalarModel::potential_gradient(const Vec&, const Vec& y, Vec& out) const {
    out.resize(1);
    out[0] = mu_ * mu_ * y[0];
}

ModelPtr make_free_scalar(const FreeScalarParams& params) {
    return std::make_shared<FreeScalarModel>(params);
}

QuarticScalarModel::QuarticScalarModel(const QuarticScalarParams& params)
    : HamiltonianModel(params.base.n, 1),
      mu_(params.base.mu),
      lambda_(params.lambda),
      gamma_(params.gamma),
      eta_(checked_signature(params.base)) {
    if (!std::isfinite(lambda_) || !std::isfinite(gamma_)) {
        throw ConfigError("quartic scalar: coefficients must be finite");
    }
}

Real QuarticScalarModel::value(const PhasePoint& pt) const {
    Real s = 0.0;
    for (int m = 0; m < base_dim(); ++m) s += eta_[m] * pt.p[m] * pt.p[m];
    const Real y = pt.y[0];
    return 0.5 * s + 0.5 * mu_ * mu_ * y * y + 0.25 * lambda_ * y * y * y * y + 0.25 * gamma_ * s * s;
}

void QuarticScalarModel::derivatives(const PhasePoint& pt, Derivatives& out) const {
    const int n = base_dim();
    Real s = 0.0;
    for (int m = 0; m < n; ++m) s += eta_[m] * pt.p[m] * pt.p[m];
    const Real y = pt.y[0];
    const Real scale = 1.0 + gamma_ * s;
    out.grad_y.resize(1);
    out.grad_y[0] = mu_ * mu_ * y + lambda_ * y * y * y;
    out.grad_p.resize(n);
    out.hess_pp.resize(n, n);
    for (int m = 0; m < n; ++m) out.grad_p[m] = eta_[m] * pt.p[m] * scale;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const Real outer = 2.0 * gamma_ * eta_[a] * pt.p[a] * eta_[b] * pt.p[b];
            out.hess_pp(a, b) = (a == b ? eta_[a] * scale : 0.0) + outer;
        }
    }
}

ModelPtr make_quartic_scalar(const QuarticScalarParams& params) {
    return std::make_shared<QuarticScalarModel>(params);
}

}  // namespace hjfield
