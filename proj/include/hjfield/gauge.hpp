#pragma once

#include "hjfield/types.hpp"

#include <functional>

namespace hjfield {

/// Gauge fields A_i = Ahat_i d/dxi + k^B_i d/dz^B written in adapted coordinates.
///
/// Ahat is always user-chosen (zero by default). The tangential part k is
/// solved by the closure in PDE mode; in ODE mode a prescribed field h is used
/// in its place. Component ordering of k and h is (B, i) -> B*r + i.
class GaugeChoice {
public:
    using Fn = std::function<Vec(Real xi, const Vec& z)>;

    GaugeChoice() = default;

    GaugeChoice& with_a_hat(Fn fn);
    GaugeChoice& with_h(Fn fn);

    bool a_hat_is_zero() const { return !a_hat_; }
    bool h_is_zero() const { return !h_; }

    Vec a_hat(Real xi, const Vec& z, int r) const;
    /// dAhat/dxi by central differences (exactly zero for the default gauge).
    Vec a_hat_rate(Real xi, const Vec& z, int r) const;

    Vec h(Real xi, const Vec& z, int n, int r) const;
    /// dh^A_i/dz^A by central differences.
    Vec h_divergence(Real xi, const Vec& z, int n, int r) const;

    static constexpr Real kStep = 1e-5;

private:
    Fn a_hat_;
    Fn h_;
};

/// p^mu_i = (u_i + Ahat_i) X^mu + k^B_i F^mu_B, flattened by pair_index.
Vec assemble_momentum(const Vec& field, const Mat& frame, const Vec& u_plus_ahat, const Vec& k, int r);

/// A^mu_i = Ahat_i X^mu + k^B_i F^mu_B.
inline Vec compose_gauge(const Vec& field, const Mat& frame, const Vec& a_hat, const Vec& k, int r) {
    return assemble_momentum(field, frame, a_hat, k, r);
}

struct GaugeComponents {
    Vec a_hat;
    Vec k;
};

/// Inverse of compose_gauge in the adapted basis [X | F].
GaugeComponents decompose_gauge(const Vec& field, const Mat& frame, const Vec& a, int r);

}  // namespace hjfield
