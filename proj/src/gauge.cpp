#include "hjfield/gauge.hpp"

#include <utility>

namespace hjfield {

GaugeChoice& GaugeChoice::with_a_hat(Fn fn) {
    a_hat_ = std::move(fn);
    return *this;
}

GaugeChoice& GaugeChoice::with_h(Fn fn) {
    h_ = std::move(fn);
    return *this;
}

Vec GaugeChoice::a_hat(Real xi, const Vec& z, int r) const {
    if (!a_hat_) return Vec::Zero(r);
    Vec v = a_hat_(xi, z);
    if (v.size() != r) throw ContractError("gauge Ahat has wrong number of components");
    return v;
}

Vec GaugeChoice::a_hat_rate(Real xi, const Vec& z, int r) const {
    if (!a_hat_) return Vec::Zero(r);
    return (a_hat(xi + kStep, z, r) - a_hat(xi - kStep, z, r)) / (2.0 * kStep);
}

Vec GaugeChoice::h(Real xi, const Vec& z, int n, int r) const {
    const int size = (n - 1) * r;
    if (!h_) return Vec::Zero(size);
    Vec v = h_(xi, z);
    if (v.size() != size) throw ContractError("gauge h has wrong number of components");
    return v;
}

Vec GaugeChoice::h_divergence(Real xi, const Vec& z, int n, int r) const {
    Vec div = Vec::Zero(r);
    if (!h_) return div;
    Vec zp = z;
    for (int a = 0; a < n - 1; ++a) {
        zp[a] = z[a] + kStep;
        const Vec hp = h(xi, zp, n, r);
        zp[a] = z[a] - kStep;
        const Vec hm = h(xi, zp, n, r);
        zp[a] = z[a];
        for (int i = 0; i < r; ++i) div[i] += (hp[a * r + i] - hm[a * r + i]) / (2.0 * kStep);
    }
    return div;
}

Vec assemble_momentum(const Vec& field, const Mat& frame, const Vec& u_plus_ahat, const Vec& k, int r) {
    const int n = static_cast<int>(field.size());
    const int t = static_cast<int>(frame.cols());
    Vec p(n * r);
    for (int mu = 0; mu < n; ++mu) {
        for (int i = 0; i < r; ++i) {
            Real s = u_plus_ahat[i] * field[mu];
            for (int b = 0; b < t; ++b) s += k[b * r + i] * frame(mu, b);
            p[pair_index(mu, i, r)] = s;
        }
    }
    return p;
}

GaugeComponents decompose_gauge(const Vec& field, const Mat& frame, const Vec& a, int r) {
    const int n = static_cast<int>(field.size());
    Mat basis(n, n);
    basis.leftCols(n - 1) = frame;
    basis.col(n - 1) = field;
    Eigen::PartialPivLU<Mat> lu(basis);
    GaugeComponents out{Vec(r), Vec((n - 1) * r)};
    for (int i = 0; i < r; ++i) {
        Vec column(n);
        for (int mu = 0; mu < n; ++mu) column[mu] = a[pair_index(mu, i, r)];
        const Vec coeff = lu.solve(column);
        out.a_hat[i] = coeff[n - 1];
        for (int b = 0; b < n - 1; ++b) out.k[b * r + i] = coeff[b];
    }
    return out;
}

}  // namespace hjfield
