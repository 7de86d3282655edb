#pragma once

#include "hjfield/types.hpp"

#include <cmath>

namespace hjfield {

struct NewtonOptions {
    Real tol = 1e-12;      ///< absolute infinity-norm of the residual
    int max_iter = 50;
    int max_halvings = 30;
    Real singular_threshold = 1e-10;  ///< |det J| at or below this counts as singular
};

enum class NewtonStatus { converged, singular, not_converged };

struct NewtonResult {
    NewtonStatus status = NewtonStatus::not_converged;
    int iterations = 0;
    Real residual = 0.0;
};

/// Dense LU solve used by default; reports singularity through the determinant.
struct LuSolve {
    Real threshold;
    bool operator()(const Mat& jac, const Vec& rhs, Vec& out) const {
        Eigen::PartialPivLU<Mat> lu(jac);
        if (!(std::abs(lu.determinant()) > threshold)) return false;
        out = lu.solve(rhs);
        return true;
    }
};

/// Newton iteration with half-step backtracking on the residual infinity-norm.
/// `eval(w, residual, jac)` fills the residual and, when `jac` is non-null,
/// the Jacobian. `solve(J, rhs, out)` returns false on a singular system.
template <class Eval, class Solve>
NewtonResult newton_solve(Vec& w, Eval&& eval, Solve&& solve, const NewtonOptions& opt) {
    NewtonResult res;
    Vec r;
    Mat jac;
    eval(w, r, &jac);
    Real norm = r.template lpNorm<Eigen::Infinity>();
    Vec step;
    Vec trial;
    Vec r_trial;
    while (!(norm < opt.tol)) {
        if (res.iterations == opt.max_iter || !std::isfinite(norm)) {
            res.status = NewtonStatus::not_converged;
            res.residual = norm;
            return res;
        }
        if (!solve(jac, Vec(-r), step)) {
            res.status = NewtonStatus::singular;
            res.residual = norm;
            return res;
        }
        Real scale = 1.0;
        trial = w + step;
        eval(trial, r_trial, nullptr);
        Real trial_norm = r_trial.template lpNorm<Eigen::Infinity>();
        for (int h = 0; h < opt.max_halvings && !(trial_norm < norm) && !(trial_norm < opt.tol); ++h) {
            scale *= 0.5;
            trial = w + scale * step;
            eval(trial, r_trial, nullptr);
            trial_norm = r_trial.template lpNorm<Eigen::Infinity>();
        }
        w = trial;
        ++res.iterations;
        if (trial_norm < opt.tol) {
            norm = trial_norm;
            break;
        }
        eval(w, r, &jac);
        norm = r.template lpNorm<Eigen::Infinity>();
    }
    res.status = NewtonStatus::converged;
    res.residual = norm;
    return res;
}

template <class Eval>
NewtonResult newton_solve(Vec& w, Eval&& eval, const NewtonOptions& opt) {
    return newton_solve(w, eval, LuSolve{opt.singular_threshold}, opt);
}

}  // namespace hjfield
