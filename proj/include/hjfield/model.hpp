#pragma once

#include "hjfield/types.hpp"

#include <memory>
#include <vector>

namespace hjfield {

/// A point (x^mu, y^i, p^mu_i) of the phase space. p is flattened by
/// pair_index(mu, i, r).
struct PhasePoint {
    Vec x;
    Vec y;
    Vec p;

    PhasePoint() = default;
    PhasePoint(int n, int r) : x(Vec::Zero(n)), y(Vec::Zero(r)), p(Vec::Zero(n * r)) {}
};

/// First derivatives in y and p, and the p-p Hessian in pair ordering.
struct Derivatives {
    Vec grad_y;
    Vec grad_p;
    Mat hess_pp;
};

/// Evaluation contract for a Hamiltonian H(x, y, p).
///
/// Subclasses implement value(); they either override derivatives() with
/// analytic expressions or inherit the central-difference fallback. Models
/// are immutable after construction and every call is reentrant.
class HamiltonianModel {
public:
    HamiltonianModel(int n, int r);
    virtual ~HamiltonianModel() = default;

    int base_dim() const { return n_; }
    int field_dim() const { return r_; }
    int pair_dim() const { return n_ * r_; }

    virtual Real value(const PhasePoint& pt) const = 0;
    virtual void derivatives(const PhasePoint& pt, Derivatives& out) const;

    /// True when H = 1/2 p.Q.p + V(x, y) with a constant matrix Q. Then
    /// grad_p = Q p, hess_pp = Q and grad_y does not depend on p, which lets
    /// the solver replace Newton iterations by cached linear solves.
    virtual bool quadratic_kinetic() const { return false; }

    /// dH/dy at (x, y) for models with quadratic_kinetic(); the default
    /// evaluates derivatives() at p = 0.
    virtual void potential_gradient(const Vec& x, const Vec& y, Vec& out) const;

    virtual std::string name() const = 0;

    void check_point(const PhasePoint& pt) const;

    /// Step of the central-difference fallback.
    static constexpr Real kFallbackStep = 1e-5;

private:
    int n_;
    int r_;
};

using ModelPtr = std::shared_ptr<const HamiltonianModel>;

/// Evaluates H after checking the point's dimensions.
Real eval_H(const HamiltonianModel& model, const PhasePoint& pt);

/// Evaluates all derivatives after checking the point's dimensions.
Derivatives eval_derivatives(const HamiltonianModel& model, const PhasePoint& pt);

/// Maximum relative discrepancy between the model's derivatives and central
/// differences of eval_H. The denominator of each entry is max(1, |analytic|).
/// First derivatives use step h; second derivatives use a Richardson-extrapolated
/// central second difference with step 100h, which keeps cancellation error
/// well below the first-derivative truncation error.
Real fd_validate_derivatives(const HamiltonianModel& model, const PhasePoint& pt, Real h = 1e-5);

struct FreeScalarParams {
    int n = 4;
    Real mu = 1.0;
    std::vector<Real> signature{1.0, 1.0, 1.0, -1.0};
};

/// H = 1/2 eta_{mu nu} p^mu p^nu + 1/2 mu^2 y^2 with a diagonal signature eta.
class FreeScalarModel final : public HamiltonianModel {
public:
    explicit FreeScalarModel(const FreeScalarParams& params);

    Real value(const PhasePoint& pt) const override;
    void derivatives(const PhasePoint& pt, Derivatives& out) const override;
    bool quadratic_kinetic() const override { return true; }
    void potential_gradient(const Vec& x, const Vec& y, Vec& out) const override;
    std::string name() const override { return "free_scalar"; }

    Real mass() const { return mu_; }
    const std::vector<Real>& signature() const { return eta_; }

private:
    Real mu_;
    std::vector<Real> eta_;
};

ModelPtr make_free_scalar(const FreeScalarParams& params);

struct QuarticScalarParams {
    FreeScalarParams base;
    Real lambda = 0.0;  ///< coefficient of y^4 / 4
    Real gamma = 0.0;   ///< coefficient of (eta p p)^2 / 4
};

/// Free scalar plus lambda/4 y^4 + gamma/4 (eta_{mu nu} p^mu p^nu)^2.
/// Its Legendre map is nonlinear in p, so the Newton inversions actually iterate.
class QuarticScalarModel final : public HamiltonianModel {
public:
    explicit QuarticScalarModel(const QuarticScalarParams& params);

    Real value(const PhasePoint& pt) const override;
    void derivatives(const PhasePoint& pt, Derivatives& out) const override;
    std::string name() const override { return "quartic_scalar"; }

private:
    Real mu_;
    Real lambda_;
    Real gamma_;
    std::vector<Real> eta_;
};

ModelPtr make_quartic_scalar(const QuarticScalarParams& params);

}  // namespace hjfield
