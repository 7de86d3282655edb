#include "support.hpp"

#include <hjfield/embedding.hpp>

#include <doctest.h>

using namespace hjfield;
using namespace hjfield::testing;

namespace {

constexpr Real kMu = 1.0;
constexpr Real kWave = 2.0;

// y = cos(k z) cos(w xi) in n = 2 with u = -dy/dxi, k = dy/dz and phi = int u^2.
Trajectory exact_cosine(const PeriodicGrid& grid, Real xi_max, int slices, Real u_sign = 1.0) {
    const Real w = std::sqrt(kWave * kWave - kMu * kMu);
    Trajectory t;
    t.grid = grid;
    t.n = 2;
    t.r = 1;
    t.stored_step = xi_max / (slices - 1);
    for (int s = 0; s < slices; ++s) {
        GridState st;
        st.xi = s * t.stored_step;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const Real z = grid.coords(i)[0];
            const Real c = std::cos(kWave * z);
            st.y.push_back(c * std::cos(w * st.xi));
            st.u.push_back(u_sign * w * c * std::sin(w * st.xi));
            st.k.push_back(-kWave * std::sin(kWave * z) * std::cos(w * st.xi));
            st.phi.push_back(w * w * c * c * (st.xi / 2.0 - std::sin(2.0 * w * st.xi) / (4.0 * w)));
        }
        t.states.push_back(std::move(st));
    }
    return t;
}

Trajectory solved_cosine(const AdaptedChart& chart, int steps, int store_every, GaugeMode mode = GaugeMode::closure,
                         const GaugeChoice& gauge = GaugeChoice{}) {
    const auto m = free_scalar(2, kMu);
    const PhaseInitialData B = build_initial_surface_B(*m, chart, cosine_data(kWave), gauge, mode);
    const SolverConfig cfg = solver(chart.xi_max(), steps, store_every);
    return mode == GaugeMode::closure ? integrate_pde(*m, chart, gauge, B, cfg) : integrate_ode(*m, chart, gauge, B, cfg);
}

Real max_of(const std::vector<Real>& v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

TEST_SUITE("embedding") {
    TEST_CASE("reconstruction of p, S and -H") {
        const auto m = free_scalar(4, kMu);
        const AdaptedChart chart = make_chart(standard_pair(4), 4, 1.0, 100);
        GaugeChoice gauge;
        gauge.with_a_hat([](Real, const Vec&) {
            Vec v(1);
            v[0] = 0.25;
            return v;
        });
        const PhaseInitialData B = build_initial_surface_B(
            *m, chart, InitialData{constant_fn(0.6), constant_fn(0.6)}, gauge, GaugeMode::closure);
        const Trajectory t = integrate_pde(*m, chart, gauge, B, solver(1.0, 100, 25));
        const ReconstructedSolution sol = reconstruct(t, gauge, chart, *m);
        REQUIRE(sol.slices.size() == t.states.size());
        for (std::size_t s = 0; s < sol.slices.size(); ++s) {
            const GridState& st = t.states[s];
            const ReconstructedSlice& sl = sol.slices[s];
            for (std::size_t i = 0; i < chart.zgrid().size(); ++i) {
                CHECK(sl.x[i * 4 + 3] == doctest::Approx(st.xi));
                for (int mu = 0; mu < 3; ++mu) {
                    CHECK(sl.p[i * 4 + mu] == 0.0);
                    CHECK(sl.S[i * 4 + mu] == 0.0);
                }
                const Real p4 = st.u[i] + 0.25;
                CHECK(sl.p[i * 4 + 3] == doctest::Approx(p4));
                CHECK(sl.S[i * 4 + 3] == doctest::Approx(st.phi[i] + 0.25 * st.y[i]));
                CHECK(sl.minus_H[i] == doctest::Approx(0.5 * p4 * p4 - 0.5 * st.y[i] * st.y[i]));
            }
        }
        // y = 0.6 e^{xi} exactly on the growing branch.
        CHECK(t.states.back().y[0] == doctest::Approx(0.6 * std::numbers::e).epsilon(1e-8));

        const auto other = free_scalar(2, kMu);
        CHECK_THROWS_AS(reconstruct(t, gauge, chart, *other), ContractError);
    }

    TEST_CASE("field equations on the exact cosine mode") {
        const auto m = free_scalar(2, kMu);
        const AdaptedChart chart = make_chart(standard_pair(2), 64, 1.0, 100);
        const Trajectory exact = exact_cosine(chart.zgrid(), 1.0, 101);
        const ReconstructedSolution sol = reconstruct(exact, GaugeChoice{}, chart, *m);
        const FieldEquationReport rep = field_equation_residual(sol, *m, chart);
        CHECK(rep.gradient.linf < 1e-4);
        CHECK(rep.divergence.linf < 5e-4);
        CHECK(hj_ansatz_residual(sol, *m, chart).linf < 1e-4);
        CHECK(rep.divergence.profile_xi.size() == rep.divergence.profile_linf.size());

        // Flipping the sign of u breaks both the ansatz and the divergence equation.
        const ReconstructedSolution bad = reconstruct(exact_cosine(chart.zgrid(), 1.0, 101, -1.0), GaugeChoice{}, chart, *m);
        CHECK(field_equation_residual(bad, *m, chart).divergence.linf > 0.5);
        CHECK(hj_ansatz_residual(bad, *m, chart).linf > 0.5);
    }

    TEST_CASE("field equations on solved runs") {
        const auto m = free_scalar(2, kMu);
        std::vector<Real> grad, div;
        for (int per_axis : {32, 64}) {
            const AdaptedChart chart = make_chart(standard_pair(2), per_axis, 1.0, 200);
            const ReconstructedSolution sol = reconstruct(solved_cosine(chart, 200, 2), GaugeChoice{}, chart, *m);
            const FieldEquationReport rep = field_equation_residual(sol, *m, chart);
            grad.push_back(rep.gradient.linf);
            div.push_back(rep.divergence.linf);
        }
        // The node k comes from the 2nd-order central gradient, so both halves are O(dz^2).
        CHECK(grad[1] < 2e-2);
        CHECK(div[1] < 2e-2);
        CHECK(grad[0] / grad[1] > 3.5);
        CHECK(div[0] / div[1] > 3.0);

        const AdaptedChart vac = make_chart(standard_pair(4), 4, 1.0, 50);
        const PhaseInitialData B = build_initial_surface_B(*free_scalar(4, kMu), vac,
                                                           InitialData{constant_fn(0), constant_fn(0)}, GaugeChoice{},
                                                           GaugeMode::closure);
        const auto m4 = free_scalar(4, kMu);
        const ReconstructedSolution vsol =
            reconstruct(integrate_pde(*m4, vac, GaugeChoice{}, B, solver(1.0, 50, 5)), GaugeChoice{}, vac, *m4);
        const FieldEquationReport vrep = field_equation_residual(vsol, *m4, vac);
        CHECK(vrep.gradient.linf == 0.0);
        CHECK(vrep.divergence.linf == 0.0);

        const AdaptedChart short_chart = make_chart(standard_pair(2), 8, 1.0, 2);
        const ReconstructedSolution two = reconstruct(solved_cosine(short_chart, 2, 2), GaugeChoice{}, short_chart, *m);
        CHECK_THROWS_AS(field_equation_residual(two, *m, short_chart), ContractError);
    }

    TEST_CASE("embeddability holds in PDE mode and fails for a mismatched h") {
        const auto m = free_scalar(2, kMu);
        const AdaptedChart chart = make_chart(standard_pair(2), 32, 1.0, 200);
        const ReconstructedSolution pde = reconstruct(solved_cosine(chart, 200, 10), GaugeChoice{}, chart, *m);
        CHECK(summarize(pde, embeddability_residual(pde, *m, chart)).linf < 1e-8);

        GaugeChoice h;
        h.with_h([](Real, const Vec&) {
            Vec v(1);
            v[0] = 0.5;
            return v;
        });
        const Trajectory ode = solved_cosine(chart, 200, 10, GaugeMode::prescribed, h);
        const ReconstructedSolution osol = reconstruct(ode, h, chart, *m);
        const ResidualReport rep = summarize(osol, embeddability_residual(osol, *m, chart));
        CHECK(rep.linf > 1e-2);
        CHECK(rep.max_node >= 0);
        CHECK(rep.l2 <= rep.linf);
        CHECK_THROWS_AS(summarize(osol, std::vector<Real>(3)), ContractError);
    }

    TEST_CASE("scalar complete integral examples") {
        const Real mu = 1.0;
        const ScalarDivergence d = ScalarDivergence::constant(mu);
        for (Real xi : {0.0, 0.3, 1.0, 2.0}) CHECK(scalar_a(0.0, d, mu, xi) == doctest::Approx(1.0 - std::exp(mu * xi)));

        // The growing branch y = C e^{mu xi} has alpha = -2 mu C and beta = C for d = 0.
        const ScalarDivergence zero = ScalarDivergence::constant(0.0);
        const Real C = 0.7;
        for (Real xi : {0.0, 0.5, 1.5}) {
            CHECK(scalar_beta(C * std::exp(mu * xi), -2.0 * mu * C, zero, mu, xi) == doctest::Approx(C));
            CHECK(scalar_a(-2.0 * mu * C, zero, mu, xi) == doctest::Approx(-2.0 * mu * C * std::exp(mu * xi)));
        }
        CHECK(essentiality_det(2.0, 0.5) == doctest::Approx(std::numbers::e));
        CHECK(essentiality_det(1.0, 0.0) == 1.0);
        CHECK_THROWS_AS(scalar_a(0.0, zero, 0.0, 1.0), ContractError);
        CHECK_THROWS_AS(scalar_beta(0.0, 0.0, zero, -1.0, 1.0), ContractError);
    }

    TEST_CASE("Simpson quadrature agrees with the closed form for constant d") {
        const ScalarDivergence c = ScalarDivergence::constant(0.4);
        const ScalarDivergence f = ScalarDivergence::function([](Real) { return 0.4; });
        CHECK(f.panels() == 256);
        CHECK_FALSE(f.is_constant());
        Gen gen(5);
        for (int t = 0; t < 50; ++t) {
            const Real mu = gen.uniform(0.1, 2.0), xi = gen.uniform(0.0, 2.0), alpha = gen.uniform(-1, 1);
            const Real y = gen.uniform(-1, 1);
            CHECK(scalar_a(alpha, f, mu, xi) == doctest::Approx(scalar_a(alpha, c, mu, xi)).epsilon(1e-7));
            CHECK(scalar_beta(y, alpha, f, mu, xi) == doctest::Approx(scalar_beta(y, alpha, c, mu, xi)).epsilon(1e-7));
        }
    }

    TEST_CASE("y_from_beta inverts beta") {
        Gen gen(6);
        const ScalarDivergence fn = ScalarDivergence::function([](Real s) { return std::sin(3.0 * s); });
        for (int t = 0; t < 200; ++t) {
            const Real mu = gen.uniform(0.1, 2.0), xi = gen.uniform(0.0, 2.0), alpha = gen.uniform(-2, 2);
            const Real y = gen.uniform(-2, 2);
            const ScalarDivergence d = t % 2 ? fn : ScalarDivergence::constant(gen.uniform(-1, 1));
            const Real beta = scalar_beta(y, alpha, d, mu, xi);
            CHECK(scalar_y_from_beta(beta, alpha, d, mu, xi) == doctest::Approx(y).epsilon(1e-10));
        }
    }

    TEST_CASE("first integrals are constant along the characteristics") {
        const Real mu = 1.0;
        const auto m = free_scalar(2, mu);
        const AdaptedChart chart = make_chart(standard_pair(2), 8, 1.0, 1000);

        auto run = [&](const InitialData& data, const GaugeChoice& gauge) {
            const PhaseInitialData B = build_initial_surface_B(*m, chart, data, gauge, GaugeMode::prescribed);
            return integrate_ode(*m, chart, gauge, B, solver(1.0, 1000, 10));
        };

        FirstIntegralReport rep = check_first_integrals(run(InitialData{constant_fn(0.9), constant_fn(0.9)}, {}), mu, {});
        CHECK(rep.alpha_drift < 1e-10);
        CHECK(rep.beta_drift < 1e-10);
        CHECK(rep.max_alpha_rate < 1e-8);

        rep = check_first_integrals(run(InitialData{constant_fn(0), constant_fn(0)}, {}), mu, {});
        CHECK(rep.alpha_drift == 0.0);
        CHECK(rep.beta_drift == 0.0);

        rep = check_first_integrals(run(cosine_data(kWave), {}), mu, {});
        CHECK(rep.alpha_drift < 1e-10);
        CHECK(rep.beta_drift < 1e-10);

        // h = 0.3 z gives the constant divergence d = 0.3.
        GaugeChoice h;
        h.with_h([](Real, const Vec& z) {
            Vec v(1);
            v[0] = 0.3 * z[0];
            return v;
        });
        const Trajectory th = run(InitialData{constant_fn(0.2), constant_fn(-0.1)}, h);
        rep = check_first_integrals(th, mu, h);
        CHECK(rep.alpha_drift < 1e-8);
        CHECK(rep.beta_drift < 1e-8);
        CHECK(check_first_integrals(th, mu, {}).alpha_drift > 0.1);

        Trajectory corrupted = run(InitialData{constant_fn(0.9), constant_fn(0.9)}, {});
        corrupted.states[50].y[3] += 0.1;
        rep = check_first_integrals(corrupted, mu, {});
        CHECK(rep.beta_drift > 0.05);
        CHECK(rep.max_beta_rate > 1.0);

        Trajectory late = corrupted;
        late.states.erase(late.states.begin());
        CHECK_THROWS_AS(check_first_integrals(late, mu, {}), ContractError);
        CHECK_THROWS_AS(check_first_integrals(corrupted, 0.0, {}), ContractError);
    }

    TEST_CASE("h consistency") {
        const AdaptedChart chart = make_chart(standard_pair(2), 32, 1.0, 200);
        const auto m = free_scalar(2, kMu);
        const ReconstructedSolution sol = reconstruct(solved_cosine(chart, 200, 1), GaugeChoice{}, chart, *m);
        const HConsistency hc = h_consistency_residual(sol, kMu);
        CHECK(hc.xi.size() == sol.states.size() - 4);
        CHECK(hc.residual.size() == hc.xi.size() * chart.zgrid().size());
        CHECK(hc.report.linf < 0.15);

        ReconstructedSolution noise = sol;
        Gen gen(9);
        for (auto& st : noise.states)
            for (Real& k : st.k) k = gen.uniform(-1, 1);
        CHECK(h_consistency_residual(noise, kMu).report.linf > 1.0);

        // The streaming monitor reproduces the batch evaluation.
        HConsistencyMonitor mon(chart.zgrid(), 2, sol.stored_step, kMu);
        for (const auto& st : sol.states) mon.push(st);
        CHECK(mon.report().linf == doctest::Approx(hc.report.linf).epsilon(1e-12));
        CHECK(mon.report().l2 == doctest::Approx(hc.report.l2).epsilon(1e-12));
        CHECK(mon.report().profile_xi.size() == hc.xi.size());

        GridState off = sol.states.back();
        off.xi += 0.5 * sol.stored_step;
        CHECK_THROWS_AS(mon.push(off), ContractError);
        GridState bare = sol.states.back();
        bare.k.clear();
        CHECK_THROWS_AS(mon.push(bare), ContractError);

        const AdaptedChart vac = make_chart(standard_pair(2), 16, 1.0, 50);
        const PhaseInitialData B =
            build_initial_surface_B(*m, vac, InitialData{constant_fn(0), constant_fn(0)}, GaugeChoice{}, GaugeMode::closure);
        const ReconstructedSolution vsol =
            reconstruct(integrate_pde(*m, vac, GaugeChoice{}, B, solver(1.0, 50, 1)), GaugeChoice{}, vac, *m);
        CHECK(h_consistency_residual(vsol, kMu).report.linf == 0.0);
    }

    TEST_CASE("h consistency converges at second order") {
        const auto m = free_scalar(2, kMu);
        std::vector<Real> linf;
        for (int per_axis : {16, 32, 64}) {
            const AdaptedChart chart = make_chart(standard_pair(2), per_axis, 1.0, 400);
            const ReconstructedSolution sol = reconstruct(solved_cosine(chart, 400, 1), GaugeChoice{}, chart, *m);
            linf.push_back(h_consistency_residual(sol, kMu).report.linf);
        }
        CHECK(linf[0] / linf[1] > 3.0);
        CHECK(linf[1] / linf[2] > 3.0);
        CHECK(max_of(linf) < 0.5);
    }
}
