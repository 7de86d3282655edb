#include "support.hpp"

#include <hjfield/reference.hpp>

#include <doctest.h>

using namespace hjfield;
using namespace hjfield::testing;

namespace {

std::vector<Real> cosine_on(const PeriodicGrid& g, Real k) {
    std::vector<Real> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = std::cos(k * g.coords(i)[0]);
    return out;
}

}  // namespace

TEST_SUITE("reference") {
    TEST_CASE("direct rates") {
        const PeriodicGrid g(1, 32, kTwoPi);
        DirectState st;
        st.y = cosine_on(g, 2.0);
        st.v.assign(g.size(), 0.5);
        const DirectRates r = direct_rhs(g, st, 1.0);
        const Real dz = g.spacing();
        const Real lam = std::pow(2.0 * std::sin(dz) / dz, 2);
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(r.dy[i] == 0.5);
            CHECK(r.dv[i] == doctest::Approx((1.0 - lam) * st.y[i]).epsilon(1e-10));
        }

        DirectState flat;
        flat.y.assign(g.size(), 2.0);
        flat.v.assign(g.size(), 0.0);
        for (Real dv : direct_rhs(g, flat, 3.0).dv) CHECK(dv == doctest::Approx(18.0));

        flat.v.pop_back();
        CHECK_THROWS_AS(direct_rhs(g, flat, 1.0), ContractError);
    }

    TEST_CASE("direct integration of the exponential and cosine modes") {
        const PeriodicGrid g(3, 4, kTwoPi);
        const DirectTrajectory t = integrate_direct(g, std::vector<Real>(g.size(), 1.0), std::vector<Real>(g.size(), 1.0),
                                                    1.0, solver(1.0, 1000, 100));
        CHECK(t.states.size() == 11);
        for (Real y : t.states.back().y) CHECK(std::abs(y - std::numbers::e) < 1e-10);

        const PeriodicGrid g1(1, 64, kTwoPi);
        const DirectTrajectory c =
            integrate_direct(g1, cosine_on(g1, 2.0), std::vector<Real>(g1.size(), 0.0), 1.0, solver(1.0, 200, 200));
        const std::vector<Real> exact = exact_field(ExactKind::cosine_mode, ExactParams{}, g1, 1.0);
        CHECK(l2_error(c.states.back().y, exact) < 5e-3);

        // Two independent components.
        std::vector<Real> y2(2 * g1.size()), v2(2 * g1.size(), 0.0);
        for (std::size_t i = 0; i < g1.size(); ++i) {
            y2[2 * i] = 1.0;
            y2[2 * i + 1] = std::cos(2.0 * g1.coords(i)[0]);
            v2[2 * i] = 1.0;
        }
        const DirectTrajectory two = integrate_direct(g1, y2, v2, 1.0, solver(1.0, 200, 200), 2);
        for (std::size_t i = 0; i < g1.size(); ++i) {
            CHECK(two.states.back().y[2 * i] == doctest::Approx(std::numbers::e).epsilon(1e-9));
            CHECK(two.states.back().y[2 * i + 1] == doctest::Approx(c.states.back().y[i]).epsilon(1e-12));
        }

        CHECK_THROWS_AS(integrate_direct(g1, {1.0}, {1.0}, 1.0, solver(1.0, 10)), ContractError);
        SolverConfig guard = solver(1.0, 100);
        guard.blowup_guard = 2.0;
        CHECK_THROWS_AS(integrate_direct(g, std::vector<Real>(g.size(), 1.0), std::vector<Real>(g.size(), 1.0), 1.0, guard),
                        SolverError);
    }

    TEST_CASE("pde and direct integrators agree on the cosine mode") {
        const auto m = free_scalar(2, 1.0);
        const AdaptedChart chart = make_chart(standard_pair(2), 32, 1.0, 200);
        const PhaseInitialData B = build_initial_surface_B(*m, chart, cosine_data(2.0), GaugeChoice{}, GaugeMode::closure);
        const Trajectory pde = integrate_pde(*m, chart, GaugeChoice{}, B, solver(1.0, 200, 200));
        const DirectTrajectory dir = integrate_direct(chart.zgrid(), cosine_on(chart.zgrid(), 2.0),
                                                      std::vector<Real>(chart.zgrid().size(), 0.0), 1.0,
                                                      solver(1.0, 200, 200));
        // The same compact Laplacian drives both; only the time stepping of the
        // first-order split differs.
        CHECK(l2_error(pde.states.back().y, dir.states.back().y) < 1e-8);
    }

    TEST_CASE("closed forms") {
        ExactParams p;
        p.C = 2.0;
        p.mu = 0.5;
        const Vec z = Vec::Zero(1);
        CHECK(exact_scalar(ExactKind::exp_growing, p, 2.0, z) == doctest::Approx(2.0 * std::numbers::e));
        CHECK(exact_scalar(ExactKind::exp_decaying, p, 2.0, z) == doctest::Approx(2.0 / std::numbers::e));
        p.mu = 1.0;
        p.k = 2.0;
        Vec z1(1);
        z1 << 0.3;
        CHECK(exact_scalar(ExactKind::cosine_mode, p, 0.7, z1) ==
              doctest::Approx(std::cos(0.6) * std::cos(std::sqrt(3.0) * 0.7)));
        p.k = 1.0;
        CHECK_THROWS_AS(exact_scalar(ExactKind::cosine_mode, p, 0.0, z1), ConfigError);
        p.k = 2.0;
        CHECK_THROWS_AS(exact_scalar(ExactKind::cosine_mode, p, 0.0, Vec(0)), ContractError);

        CHECK(parse_exact_kind("exp_growing") == ExactKind::exp_growing);
        CHECK(parse_exact_kind("exp_decaying") == ExactKind::exp_decaying);
        CHECK(parse_exact_kind("cosine_mode") == ExactKind::cosine_mode);
        CHECK_THROWS_AS(parse_exact_kind("soliton"), ConfigError);

        const PeriodicGrid g(2, 8, kTwoPi);
        const std::vector<Real> f = exact_field(ExactKind::cosine_mode, p, g, 0.0);
        CHECK(f.size() == g.size());
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(f[i] == doctest::Approx(std::cos(2.0 * g.coords(i)[0])));
        CHECK(l2_error(f, f) == 0.0);
    }
}
