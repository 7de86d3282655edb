#include "support.hpp"

#include <doctest.h>

using namespace hjfield;
using namespace hjfield::testing;

TEST_SUITE("gauge") {
    TEST_CASE("default gauge is zero") {
        const GaugeChoice g;
        CHECK(g.a_hat_is_zero());
        CHECK(g.h_is_zero());
        const Vec z = Vec::Zero(3);
        CHECK(g.a_hat(0.5, z, 2).isZero());
        CHECK(g.a_hat_rate(0.5, z, 2).isZero());
        CHECK(g.h(0.5, z, 4, 2).size() == 6);
        CHECK(g.h(0.5, z, 4, 2).isZero());
        CHECK(g.h_divergence(0.5, z, 4, 1).isZero());
    }

    TEST_CASE("rates and divergence by central differences") {
        GaugeChoice g;
        g.with_a_hat([](Real xi, const Vec& z) {
            Vec v(1);
            v[0] = std::sin(xi) * z[0];
            return v;
        });
        g.with_h([](Real xi, const Vec& z) {
            Vec v(2);
            v << xi * z[0] * z[0], std::cos(z[1]);
            return v;
        });
        Vec z(2);
        z << 0.7, 0.2;
        CHECK(g.a_hat_rate(0.3, z, 1)[0] == doctest::Approx(std::cos(0.3) * 0.7).epsilon(1e-8));
        CHECK(g.h_divergence(0.4, z, 3, 1)[0] == doctest::Approx(2.0 * 0.4 * 0.7 - std::sin(0.2)).epsilon(1e-8));
        CHECK_THROWS_AS(g.a_hat(0.0, z, 2), ContractError);
        CHECK_THROWS_AS(g.h(0.0, z, 4, 1), ContractError);
    }

    TEST_CASE("compose and decompose are inverse") {
        Gen gen(8);
        for (int t = 0; t < 50; ++t) {
            const int n = gen.integer(2, 4);
            const int r = gen.integer(1, 3);
            const Vec field = gen.vec(n, -1, 1);
            Mat frame(n, n - 1);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n - 1; ++j) frame(i, j) = gen.uniform(-1, 1);
            Mat basis(n, n);
            basis.leftCols(n - 1) = frame;
            basis.col(n - 1) = field;
            if (std::abs(basis.determinant()) < 1e-2) continue;
            const Vec a_hat = gen.vec(r, -2, 2);
            const Vec k = gen.vec((n - 1) * r, -2, 2);
            const Vec a = compose_gauge(field, frame, a_hat, k, r);
            CHECK(a.size() == n * r);
            const GaugeComponents back = decompose_gauge(field, frame, a, r);
            CHECK((back.a_hat - a_hat).norm() < 1e-10);
            CHECK((back.k - k).norm() < 1e-10);
        }
    }

    TEST_CASE("momentum assembly in pair order") {
        Vec field(2), uplus(2), k(2);
        field << 0.0, 1.0;
        uplus << 3.0, 4.0;
        k << 5.0, 6.0;
        const Vec p = assemble_momentum(field, Mat::Identity(2, 1), uplus, k, 2);
        CHECK(p[pair_index(0, 0, 2)] == 5.0);
        CHECK(p[pair_index(0, 1, 2)] == 6.0);
        CHECK(p[pair_index(1, 0, 2)] == 3.0);
        CHECK(p[pair_index(1, 1, 2)] == 4.0);
    }
}
