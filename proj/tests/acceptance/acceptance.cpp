// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is nonzero if any criterion fails.

#include <hjfield/characteristics.hpp>
#include <hjfield/embedding.hpp>
#include <hjfield/geometry.hpp>
#include <hjfield/initdata.hpp>
#include <hjfield/model.hpp>
#include <hjfield/parallel.hpp>
#include <hjfield/reference.hpp>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace hjfield;

namespace {

using Clock = std::chrono::steady_clock;

constexpr Real kTwoPi = 2.0 * std::numbers::pi;

Real seconds_since(Clock::time_point t0) { return std::chrono::duration<Real>(Clock::now() - t0).count(); }

ModelPtr free_scalar(int n, Real mu) {
    FreeScalarParams p;
    p.n = n;
    p.mu = mu;
    p.signature.assign(n, 1.0);
    p.signature[n - 1] = -1.0;
    return make_free_scalar(p);
}

InitialPair standard_pair(int n) {
    Vec x = Vec::Zero(n);
    x[n - 1] = 1.0;
    return InitialPair{InitialSurface::graph(n), TransverseField::constant(x)};
}

InitialData::Fn constant_fn(Real v) {
    return [v](const Vec&) {
        Vec out(1);
        out[0] = v;
        return out;
    };
}

InitialData cosine_data(Real k) {
    return InitialData{[k](const Vec& z) {
                           Vec out(1);
                           out[0] = std::cos(k * z[0]);
                           return out;
                       },
                       constant_fn(0.0)};
}

SolverConfig solver(Real xi_max, int steps, int store_every) {
    SolverConfig cfg;
    cfg.xi_max = xi_max;
    cfg.steps = steps;
    cfg.store_every = store_every;
    return cfg;
}

Real max_abs_diff(const std::vector<Real>& a, const std::vector<Real>& b) {
    Real m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

int failures = 0;

void report(const char* id, bool pass, const std::string& what) {
    std::printf("%s %s  %s\n", id, pass ? "PASS" : "FAIL", what.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ---------------------------------------------------------------------------
// Cosine mode k = 2, mu = 1, xi in [0, 1], 200 steps (dxi = 5e-3).

constexpr Real kMu = 1.0;
constexpr Real kWave = 2.0;
constexpr int kSteps = 200;
constexpr int kSnapshotEvery = 40;

struct CosineRun {
    int n = 0;
    int per_axis = 0;
    Real hj_vs_direct = 0.0;
    Real hj_vs_exact = 0.0;
    Real direct_vs_exact = 0.0;
    Real embeddability = 0.0;
    Real h_consistency = 0.0;
    Real seconds = 0.0;  ///< PDE and direct integration
};

CosineRun cosine_run(int n, int per_axis) {
    CosineRun out;
    out.n = n;
    out.per_axis = per_axis;
    const auto model = free_scalar(n, kMu);
    const AdaptedChart chart(standard_pair(n), 1.0, kSteps, PeriodicGrid(n - 1, per_axis, kTwoPi));
    const PeriodicGrid& grid = chart.zgrid();

    const auto t0 = Clock::now();
    const PhaseInitialData B = build_initial_surface_B(*model, chart, cosine_data(kWave), GaugeChoice{}, GaugeMode::closure);

    // Every state streams through the h-consistency monitor; a few are kept
    // for the embeddability audit.
    HConsistencyMonitor monitor(grid, n, 1.0 / kSteps, kMu);
    std::vector<GridState> snapshots;
    int seen = 0;
    SolverConfig cfg = solver(1.0, kSteps, 1);
    cfg.keep_last = 1;
    cfg.observer = [&](const GridState& s) {
        monitor.push(s);
        if (seen++ % kSnapshotEvery == 0) snapshots.push_back(s);
    };
    const Trajectory pde = integrate_pde(*model, chart, GaugeChoice{}, B, cfg);
    const DirectTrajectory direct = integrate_direct(grid, B.y0, std::vector<Real>(grid.size(), 0.0), kMu,
                                                     solver(1.0, kSteps, kSteps));
    out.seconds = seconds_since(t0);

    const std::vector<Real>& y = pde.states.back().y;
    const std::vector<Real>& yd = direct.states.back().y;
    ExactParams ep;
    ep.mu = kMu;
    ep.k = kWave;
    const std::vector<Real> exact = exact_field(ExactKind::cosine_mode, ep, grid, 1.0);
    out.hj_vs_direct = l2_error(y, yd);
    out.hj_vs_exact = l2_error(y, exact);
    out.direct_vs_exact = l2_error(yd, exact);
    out.h_consistency = monitor.report().linf;

    Trajectory snap;
    snap.mode = SolveMode::pde;
    snap.grid = grid;
    snap.n = n;
    snap.r = 1;
    snap.stored_step = static_cast<Real>(kSnapshotEvery) / kSteps;
    snap.states = std::move(snapshots);
    const ReconstructedSolution sol = reconstruct(snap, GaugeChoice{}, chart, *model);
    out.embeddability = summarize(sol, embeddability_residual(sol, *model, chart)).linf;

    std::printf("    n = %d, N_z = %3d: hj-direct %.3e  hj-exact %.3e  direct-exact %.3e  embed %.3e  h-cons %.3e  %.1f s\n",
                n, per_axis, out.hj_vs_direct, out.hj_vs_exact, out.direct_vs_exact, out.embeddability,
                out.h_consistency, out.seconds);
    std::fflush(stdout);
    return out;
}

bool in_band(Real ratio) { return ratio >= 3.2 && ratio <= 4.8; }

// ---------------------------------------------------------------------------

void criterion_1() {
    const auto t0 = Clock::now();
    const auto model = free_scalar(4, kMu);
    const AdaptedChart chart(standard_pair(4), 1.0, 200, PeriodicGrid(3, 16, kTwoPi));
    const PhaseInitialData B =
        build_initial_surface_B(*model, chart, cosine_data(kWave), GaugeChoice{}, GaugeMode::closure);
    std::vector<PhasePoint> samples;
    for (std::size_t i = 0; i < B.nodes(); ++i) {
        samples.push_back(B.phase_point(i, chart.pair().surface.point(chart.zgrid().coords(i))));
    }
    const RegularityReport rep = regularity_report(*model, chart, samples);
    const Real secs = seconds_since(t0);
    const Real v[4] = {rep.hamiltonian.value_at_min, rep.momentum.value_at_min, rep.surface.value_at_min,
                       rep.solution.value_at_min};
    // Every node must carry the same four values, so min |det| and the value there agree.
    const bool exact = v[0] == -1.0 && v[1] == -1.0 && v[2] == 1.0 && v[3] == -1.0 &&
                       rep.hamiltonian.min_abs == 1.0 && rep.momentum.min_abs == 1.0 && rep.surface.min_abs == 1.0 &&
                       rep.solution.min_abs == 1.0;
    report("C1", rep.pass && exact && secs < 1.0,
           fmt("regularity audit, X = d/dx^4 on x^4 = 0: determinants (%g, %g, %g, %g), %s, %.3f s (< 1 s)", v[0], v[1],
               v[2], v[3], rep.pass ? "PASS" : "FAIL", secs));
}

void criterion_2() {
    const auto t0 = Clock::now();
    const auto model = free_scalar(4, kMu);
    const AdaptedChart chart(standard_pair(4), 1.0, 1000, PeriodicGrid(3, 4, kTwoPi));
    const PhaseInitialData B = build_initial_surface_B(*model, chart, InitialData{constant_fn(1.0), constant_fn(kMu)},
                                                       GaugeChoice{}, GaugeMode::prescribed);
    const Trajectory t = integrate_ode(*model, chart, GaugeChoice{}, B, solver(1.0, 1000, 1000));
    const Real secs = seconds_since(t0);
    Real err = 0.0;
    for (Real y : t.states.back().y) err = std::max(err, std::abs(y - std::numbers::e));
    report("C2", err < 1e-6 && secs < 1.0 && t.states.back().xi == 1.0,
           fmt("exponential branch, ODE mode, dxi = 1e-3: max |y(1) - e| = %.3e (< 1e-6), %.3f s (< 1 s)", err, secs));
}

void criterion_3(const CosineRun& r4, const CosineRun& r2) {
    auto ok = [](const CosineRun& r) {
        return r.hj_vs_direct < 5e-3 && r.hj_vs_exact < 5e-3 && r.direct_vs_exact < 5e-3;
    };
    report("C3", ok(r4) && ok(r2) && r4.seconds < 60.0,
           fmt("PDE vs direct vs exact, N_z = 64, dxi = 5e-3, one worker: n = 4 L2 %.3e / %.3e / %.3e, "
               "n = 2 L2 %.3e / %.3e / %.3e (each < 5e-3); n = 4 runtime %.1f s (< 60 s)",
               r4.hj_vs_direct, r4.hj_vs_exact, r4.direct_vs_exact, r2.hj_vs_direct, r2.hj_vs_exact,
               r2.direct_vs_exact, r4.seconds));
}

void criterion_4(const std::vector<CosineRun>& n4, const std::vector<CosineRun>& n2) {
    const Real a = n4[0].hj_vs_exact / n4[1].hj_vs_exact, b = n4[1].hj_vs_exact / n4[2].hj_vs_exact;
    const Real c = n2[0].hj_vs_exact / n2[1].hj_vs_exact, d = n2[1].hj_vs_exact / n2[2].hj_vs_exact;
    report("C4", in_band(a) && in_band(b) && in_band(c) && in_band(d),
           fmt("spatial convergence vs exact, N_z 16 -> 32 -> 64: n = 4 ratios %.3f, %.3f; n = 2 ratios %.3f, %.3f "
               "(each in [3.2, 4.8])",
               a, b, c, d));
}

void criterion_5(const std::vector<CosineRun>& runs) {
    Real worst = 0.0;
    for (const auto& r : runs) worst = std::max(worst, r.embeddability);

    // Negative control: ODE mode with the fixed h = 0.5 on the same data.
    const auto model = free_scalar(4, kMu);
    const AdaptedChart chart(standard_pair(4), 1.0, kSteps, PeriodicGrid(3, 32, kTwoPi));
    GaugeChoice h;
    h.with_h([](Real, const Vec&) { return Vec::Constant(3, 0.5); });
    const PhaseInitialData B = build_initial_surface_B(*model, chart, cosine_data(kWave), h, GaugeMode::prescribed);
    const Trajectory t = integrate_ode(*model, chart, h, B, solver(1.0, kSteps, kSnapshotEvery));
    const ReconstructedSolution sol = reconstruct(t, h, chart, *model);
    const Real control = summarize(sol, embeddability_residual(sol, *model, chart)).linf;
    report("C5", worst < 1e-8 && control > 1e-2,
           fmt("embeddability: PDE stored states max %.3e (< 1e-8); ODE with h = 0.5 gives %.3e (> 1e-2)", worst,
               control));
}

void criterion_6() {
    const auto model = free_scalar(4, kMu);
    const AdaptedChart chart(standard_pair(4), 1.0, 1000, PeriodicGrid(3, 8, kTwoPi));
    Real alpha = 0.0, beta = 0.0;
    const InitialData cases[] = {InitialData{constant_fn(1.0), constant_fn(kMu)},
                                 InitialData{constant_fn(0.7), constant_fn(-0.4)}, cosine_data(kWave)};
    for (const auto& data : cases) {
        const PhaseInitialData B = build_initial_surface_B(*model, chart, data, GaugeChoice{}, GaugeMode::prescribed);
        const Trajectory t = integrate_ode(*model, chart, GaugeChoice{}, B, solver(1.0, 1000, 10));
        const FirstIntegralReport fi = check_first_integrals(t, kMu, GaugeChoice{});
        alpha = std::max(alpha, fi.alpha_drift);
        beta = std::max(beta, fi.beta_drift);
    }
    report("C6", alpha < 1e-7 && beta < 1e-7,
           fmt("first integrals along ODE trajectories, xi in [0, 1], dxi = 1e-3: alpha drift %.3e, beta drift %.3e "
               "(< 1e-7)",
               alpha, beta));
}

void criterion_7() {
    std::mt19937_64 rng(20261016);
    std::uniform_real_distribution<Real> u(-2.0, 2.0);
    auto point = [&](int n) {
        PhasePoint pt(n, 1);
        for (int i = 0; i < n; ++i) pt.x[i] = u(rng);
        pt.y[0] = u(rng);
        for (int i = 0; i < n; ++i) pt.p[i] = u(rng);
        return pt;
    };
    QuarticScalarParams qp;
    qp.lambda = 0.1;
    qp.gamma = 0.05;
    const auto quartic = make_quartic_scalar(qp);
    const auto free4 = free_scalar(4, kMu);
    const auto free2 = free_scalar(2, kMu);
    Real worst_free = 0.0, worst_quartic = 0.0;
    for (int i = 0; i < 100; ++i) {
        worst_free = std::max(worst_free, fd_validate_derivatives(*free4, point(4)));
        worst_free = std::max(worst_free, fd_validate_derivatives(*free2, point(2)));
        worst_quartic = std::max(worst_quartic, fd_validate_derivatives(*quartic, point(4)));
    }
    report("C7", worst_free < 1e-6 && worst_quartic < 1e-6,
           fmt("derivative validation at 100 random points in [-2, 2]: free scalar %.3e, quartic scalar %.3e (< 1e-6)",
               worst_free, worst_quartic));
}

void criterion_8() {
    const auto model = free_scalar(4, kMu);
    const AdaptedChart chart(standard_pair(4), 1.0, 1000, PeriodicGrid(3, 4, kTwoPi));
    const InitialData data{constant_fn(0.8), constant_fn(0.3)};
    const SolverConfig cfg = solver(1.0, 1000, 1);
    const Trajectory pde = integrate_pde(
        *model, chart, GaugeChoice{}, build_initial_surface_B(*model, chart, data, GaugeChoice{}, GaugeMode::closure), cfg);
    const Trajectory ode = integrate_ode(
        *model, chart, GaugeChoice{}, build_initial_surface_B(*model, chart, data, GaugeChoice{}, GaugeMode::prescribed),
        cfg);
    Real worst = pde.states.size() == ode.states.size() ? 0.0 : INFINITY;
    for (std::size_t s = 0; s < std::min(pde.states.size(), ode.states.size()); ++s) {
        worst = std::max(worst, max_abs_diff(pde.states[s].y, ode.states[s].y));
        worst = std::max(worst, max_abs_diff(pde.states[s].u, ode.states[s].u));
        worst = std::max(worst, max_abs_diff(pde.states[s].phi, ode.states[s].phi));
    }
    report("C8", worst < 1e-12,
           fmt("reduction identity on homogeneous data: max node-wise |PDE - ODE| over %zu steps = %.3e (< 1e-12)",
               pde.states.size() - 1, worst));
}

void criterion_9(const std::vector<CosineRun>& n4, const std::vector<CosineRun>& n2) {
    const Real a = n4[0].h_consistency / n4[1].h_consistency, b = n4[1].h_consistency / n4[2].h_consistency;
    const Real c = n2[0].h_consistency / n2[1].h_consistency, d = n2[1].h_consistency / n2[2].h_consistency;
    report("C9", in_band(a) && in_band(b) && in_band(c) && in_band(d),
           fmt("h-consistency (sigma = +1) on cosine-mode output, N_z 16 -> 32 -> 64: n = 4 ratios %.3f, %.3f; "
               "n = 2 ratios %.3f, %.3f (each in [3.2, 4.8])",
               a, b, c, d));
}

}  // namespace

int main() {
    set_worker_count(1);
    std::printf("acceptance run on one worker\n");
    criterion_1();
    criterion_2();

    std::printf("  cosine-mode runs:\n");
    std::vector<CosineRun> n4, n2;
    for (int per_axis : {16, 32, 64}) n2.push_back(cosine_run(2, per_axis));
    for (int per_axis : {16, 32, 64}) n4.push_back(cosine_run(4, per_axis));
    criterion_3(n4.back(), n2.back());
    criterion_4(n4, n2);
    std::vector<CosineRun> all = n4;
    all.insert(all.end(), n2.begin(), n2.end());
    criterion_5(all);

    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9(n4, n2);

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
