#include "hjfield/cli/commands.hpp"

#include "hjfield/characteristics.hpp"
#include "hjfield/initdata.hpp"
#include "hjfield/reference.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace hjfield::cli {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

fs::path output_dir(const RunConfig& cfg) {
    const fs::path dir(cfg.output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + cfg.output + "': " + ec.message());
    return dir;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

// NaN and infinities have no JSON representation; they become null.
json number(Real v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json summary_json(const DeterminantSummary& s) {
    return {{"min_abs", number(s.min_abs)}, {"value_at_min", number(s.value_at_min)}, {"node", s.node}};
}

std::vector<Real> sample_component(const InitialData::Fn& fn, const PeriodicGrid& grid) {
    std::vector<Real> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = fn(grid.coords(i))[0];
    return out;
}

GaugeMode gauge_mode(SolveMode mode) { return mode == SolveMode::pde ? GaugeMode::closure : GaugeMode::prescribed; }

RegularityReport audit(const Problem& pb, const AdaptedChart& chart, SolveMode mode) {
    const HamiltonianModel& model = *pb.model;
    const PeriodicGrid& grid = chart.zgrid();
    const InitialSurface& surface = pb.pair.surface;
    std::vector<PhasePoint> samples(grid.size());
    bool from_b = true;
    try {
        const PhaseInitialData B =
            build_initial_surface_B(model, chart, pb.data, pb.gauge, gauge_mode(mode), pb.solver.newton);
        for (std::size_t i = 0; i < grid.size(); ++i) samples[i] = B.phase_point(i, surface.point(grid.coords(i)));
    } catch (const RegularityError&) {
        from_b = false;
    } catch (const SolverError&) {
        from_b = false;
    }
    if (!from_b) {
        const int r = model.field_dim();
        const std::vector<Real> psi = sample_psi(pb.data, grid, r);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            PhasePoint pt(model.base_dim(), r);
            pt.x = surface.point(grid.coords(i));
            for (int c = 0; c < r; ++c) pt.y[c] = psi[i * r + c];
            samples[i] = pt;
        }
    }
    return regularity_report(model, chart, samples);
}

void print_regularity(const RegularityReport& rep, std::ostream& log) {
    const std::pair<const char*, const DeterminantSummary*> rows[] = {
        {"hamiltonian_regularity", &rep.hamiltonian}, {"momentum_solvability", &rep.momentum},
        {"surface_regularity", &rep.surface},         {"solution_condition", &rep.solution},
        {"transversality", &rep.transversality},
    };
    for (const auto& [name, s] : rows) {
        log << "  " << name << ": det = " << s->value_at_min << " (min |det| " << s->min_abs << " at node " << s->node
            << ")\n";
    }
    if (rep.divergence_warning) log << "  warning: X is not divergence-free (max |div X| " << rep.divergence_max << ")\n";
    if (rep.pass) {
        log << "regularity: PASS\n";
    } else {
        log << "regularity: FAIL (" << rep.failing_condition << " at node " << rep.failing_node << ")\n";
    }
}

json residuals_json(const ReconstructedSolution& sol, const Problem& pb, const AdaptedChart& chart) {
    const HamiltonianModel& model = *pb.model;
    json j;
    j["embeddability"] = to_json(summarize(sol, embeddability_residual(sol, model, chart)));
    try {
        const FieldEquationReport fe = field_equation_residual(sol, model, chart);
        j["field_equations"] = {{"gradient", to_json(fe.gradient)}, {"divergence", to_json(fe.divergence)}};
        j["hj_ansatz"] = to_json(hj_ansatz_residual(sol, model, chart));
    } catch (const ContractError& e) {
        j["field_equations"] = {{"skipped", e.what()}};
        j["hj_ansatz"] = {{"skipped", e.what()}};
    }
    if (has_reference_oracles(pb) && sol.states.size() >= 5) {
        j["h_consistency"] = to_json(h_consistency_residual(sol, pb.config.model.mu).report);
    } else {
        j["h_consistency"] = {{"skipped", "needs the free scalar with X = d/dx^n and at least 5 stored slices"}};
    }
    return j;
}

struct Breach {
    bool any = false;
};

json check_entry(const std::string& name, Real value, Real threshold, bool pass, std::ostream& log, Breach& breach) {
    log << (pass ? "PASS " : "FAIL ") << name << ": " << value << " (threshold " << threshold << ")\n";
    if (!pass) breach.any = true;
    return {{"name", name}, {"value", number(value)}, {"threshold", threshold}, {"pass", pass}};
}

json band_entry(const std::string& name, Real value, std::ostream& log, Breach& breach) {
    const bool pass = value >= kRatioLow && value <= kRatioHigh;
    log << (pass ? "PASS " : "FAIL ") << name << ": " << value << " (band [" << kRatioLow << ", " << kRatioHigh
        << "])\n";
    if (!pass) breach.any = true;
    return {{"name", name}, {"value", number(value)}, {"band", {kRatioLow, kRatioHigh}}, {"pass", pass}};
}

// One PDE run and one direct run of the same problem, compared at xi_max. The
// h-consistency residual is taken over the whole run, every step.
struct OracleRow {
    int per_axis = 0;
    Real hj_vs_direct = 0.0;
    Real hj_vs_exact = NAN;
    Real direct_vs_exact = NAN;
    Real embeddability = 0.0;
    Real h_consistency = NAN;
};

OracleRow oracle_row(const Problem& pb) {
    const HamiltonianModel& model = *pb.model;
    SolverConfig sc = pb.solver;
    sc.store_every = 1;
    sc.keep_last = 5;
    HConsistencyMonitor monitor(pb.grid, model.base_dim(), sc.step(), pb.config.model.mu);
    sc.observer = [&monitor](const GridState& state) { monitor.push(state); };
    const AdaptedChart chart(pb.pair, sc.xi_max, sc.steps, pb.grid);
    const PhaseInitialData B = build_initial_surface_B(model, chart, pb.data, pb.gauge, GaugeMode::closure, sc.newton);
    const Trajectory traj = integrate_pde(model, chart, pb.gauge, B, sc);
    const ReconstructedSolution sol = reconstruct(traj, pb.gauge, chart, model);

    SolverConfig dc = pb.solver;
    dc.store_every = dc.steps;
    const DirectTrajectory direct = integrate_direct(pb.grid, sample_component(pb.data.psi, pb.grid),
                                                     sample_component(pb.data.psi_hat, pb.grid), pb.config.model.mu, dc);

    OracleRow row;
    row.per_axis = pb.grid.per_axis();
    const std::vector<Real>& y_hj = traj.states.back().y;
    const std::vector<Real>& y_direct = direct.states.back().y;
    row.hj_vs_direct = l2_error(y_hj, y_direct);
    if (pb.exact) {
        const std::vector<Real> exact = exact_field(*pb.exact, pb.exact_params, pb.grid, traj.states.back().xi);
        row.hj_vs_exact = l2_error(y_hj, exact);
        row.direct_vs_exact = l2_error(y_direct, exact);
    }
    row.embeddability = summarize(sol, embeddability_residual(sol, model, chart)).linf;
    if (!monitor.report().profile_xi.empty()) row.h_consistency = monitor.report().linf;
    return row;
}

json row_json(const OracleRow& row) {
    return {{"N_z", row.per_axis},
            {"hj_vs_direct_l2", number(row.hj_vs_direct)},
            {"hj_vs_exact_l2", number(row.hj_vs_exact)},
            {"direct_vs_exact_l2", number(row.direct_vs_exact)},
            {"embeddability_linf", number(row.embeddability)},
            {"h_consistency_linf", number(row.h_consistency)}};
}

std::string fixed(Real v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

}  // namespace

json to_json(const RegularityReport& report) {
    json lambda = json::array();
    for (Eigen::Index i = 0; i < report.lambda_sample.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < report.lambda_sample.cols(); ++c) row.push_back(number(report.lambda_sample(i, c)));
        lambda.push_back(row);
    }
    return {{"pass", report.pass},
            {"threshold", report.threshold},
            {"nodes", report.nodes},
            {"failing_condition", report.failing_condition.empty() ? json(nullptr) : json(report.failing_condition)},
            {"failing_node", report.failing_node},
            {"determinants",
             {{"hamiltonian_regularity", summary_json(report.hamiltonian)},
              {"momentum_solvability", summary_json(report.momentum)},
              {"surface_regularity", summary_json(report.surface)},
              {"solution_condition", summary_json(report.solution)},
              {"transversality", summary_json(report.transversality)}}},
            {"lambda_sample", lambda},
            {"divergence_max", number(report.divergence_max)},
            {"divergence_warning", report.divergence_warning}};
}

json to_json(const ResidualReport& report) {
    json profile = json::array();
    for (std::size_t s = 0; s < report.profile_xi.size(); ++s) {
        profile.push_back({{"xi", report.profile_xi[s]}, {"linf", number(report.profile_linf[s])}});
    }
    return {{"linf", number(report.linf)},
            {"l2", number(report.l2)},
            {"max_node", report.max_node},
            {"max_xi", report.max_xi},
            {"profile", profile}};
}

bool has_reference_oracles(const Problem& pb) {
    const int n = pb.config.model.n;
    if (pb.config.model.name != "free_scalar" || !pb.pair.surface.is_graph() || !pb.pair.field.is_constant()) {
        return false;
    }
    const Vec x = pb.pair.field(Vec::Zero(n));
    for (int c = 0; c < n; ++c) {
        if (x[c] != (c + 1 == n ? 1.0 : 0.0)) return false;
    }
    const auto& sig = pb.config.model.signature;
    for (std::size_t c = 0; c < sig.size(); ++c) {
        if (sig[c] != (static_cast<int>(c) + 1 == n ? -1.0 : 1.0)) return false;
    }
    return true;
}

void write_solution_csv(const std::string& path, const ReconstructedSolution& sol, int output_every) {
    if (output_every < 1) throw ContractError("output_every must be at least 1");
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ConfigError("cannot write '" + path + "'");
    const int n = sol.n;
    const int r = sol.r;
    std::string header = "xi";
    for (int a = 1; a < n; ++a) header += ",z" + std::to_string(a);
    for (int i = 1; i <= r; ++i) header += ",y_" + std::to_string(i);
    for (int i = 1; i <= r; ++i) header += ",u_" + std::to_string(i);
    for (int mu = 1; mu <= n; ++mu) {
        for (int i = 1; i <= r; ++i) header += ",p" + std::to_string(mu) + "_" + std::to_string(i);
    }
    header += ",phi\n";
    std::fputs(header.c_str(), f);

    const std::size_t nodes = sol.grid.size();
    const std::size_t last = sol.states.size() - 1;
    for (std::size_t s = 0; s < sol.states.size(); ++s) {
        if (s % static_cast<std::size_t>(output_every) != 0 && s != last) continue;
        const GridState& st = sol.states[s];
        const ReconstructedSlice& sl = sol.slices[s];
        for (std::size_t i = 0; i < nodes; ++i) {
            std::fprintf(f, "%.17g", st.xi);
            const Vec z = sol.grid.coords(i);
            for (int a = 0; a + 1 < n; ++a) std::fprintf(f, ",%.17g", z[a]);
            for (int c = 0; c < r; ++c) std::fprintf(f, ",%.17g", st.y[i * r + c]);
            for (int c = 0; c < r; ++c) std::fprintf(f, ",%.17g", st.u[i * r + c]);
            for (int c = 0; c < n * r; ++c) std::fprintf(f, ",%.17g", sl.p[i * n * r + c]);
            std::fprintf(f, ",%.17g\n", st.phi[i]);
        }
    }
    if (std::fclose(f) != 0) throw ConfigError("error while writing '" + path + "'");
}

CheckOutcome run_check(const RunConfig& cfg, std::ostream& log) {
    const Problem pb = build_problem(cfg);
    const AdaptedChart chart(pb.pair, pb.solver.xi_max, pb.solver.steps, pb.grid);
    CheckOutcome out;
    out.report = audit(pb, chart, cfg.mode);
    out.json = {{"command", "check"},
                {"config", to_json(cfg)},
                {"regularity", to_json(out.report)},
                {"status", out.report.pass ? "pass" : "regularity_failure"}};
    out.exit_code = out.report.pass ? exit_ok : exit_regularity;
    print_regularity(out.report, log);
    write_json(output_dir(cfg) / "report.json", out.json);
    return out;
}

int run_solve(const RunConfig& cfg, std::ostream& log) {
    const Problem pb = build_problem(cfg);
    const HamiltonianModel& model = *pb.model;
    const fs::path dir = output_dir(cfg);
    const AdaptedChart chart(pb.pair, pb.solver.xi_max, pb.solver.steps, pb.grid);

    json report = {{"command", "solve"}, {"config", to_json(cfg)}};
    const RegularityReport reg = audit(pb, chart, cfg.mode);
    report["regularity"] = to_json(reg);
    print_regularity(reg, log);
    if (!reg.pass) {
        report["status"] = "regularity_failure";
        write_json(dir / "report.json", report);
        return exit_regularity;
    }

    Trajectory traj;
    PhaseInitialData B;
    try {
        B = build_initial_surface_B(model, chart, pb.data, pb.gauge, gauge_mode(cfg.mode), pb.solver.newton);
        traj = cfg.mode == SolveMode::pde ? integrate_pde(model, chart, pb.gauge, B, pb.solver)
                                          : integrate_ode(model, chart, pb.gauge, B, pb.solver);
    } catch (const RegularityError& e) {
        report["status"] = "regularity_failure";
        report["error"] = {{"message", e.what()}, {"node", e.node()}};
        write_json(dir / "report.json", report);
        log << "error: " << e.what() << '\n';
        return exit_regularity;
    } catch (const SolverError& e) {
        report["status"] = "solver_failure";
        report["error"] = {{"message", e.what()}, {"node", e.node()}, {"xi", e.xi()}};
        write_json(dir / "report.json", report);
        log << "error: " << e.what() << '\n';
        return exit_failure;
    }

    const ReconstructedSolution sol = reconstruct(traj, pb.gauge, chart, model);
    const json residuals = residuals_json(sol, pb, chart);
    write_json(dir / "residuals.json", residuals);
    write_solution_csv((dir / "solution.csv").string(), sol, cfg.grid.output_every);

    int max_iterations = 0;
    for (int it : B.newton_iterations) max_iterations = std::max(max_iterations, it);
    report["status"] = "ok";
    report["mode"] = mode_name(cfg.mode);
    report["stored_slices"] = traj.states.size();
    report["final_xi"] = traj.states.back().xi;
    report["initial_newton_iterations_max"] = max_iterations;
    if (pb.exact && has_reference_oracles(pb)) {
        const std::vector<Real>& y = traj.states.back().y;
        const std::vector<Real> exact = exact_field(*pb.exact, pb.exact_params, pb.grid, traj.states.back().xi);
        Real linf = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) linf = std::max(linf, std::abs(y[i] - exact[i]));
        report["exact_final"] = {{"linf", number(linf)}, {"l2", number(l2_error(y, exact))}};
        log << "final slice vs closed form: L-inf " << fixed(linf) << '\n';
    }
    write_json(dir / "report.json", report);
    log << "solve: " << traj.states.size() << " slices, embeddability residual "
        << fixed(residuals["embeddability"]["linf"].is_null() ? NAN : residuals["embeddability"]["linf"].get<Real>())
        << '\n';
    return exit_ok;
}

int run_verify(const RunConfig& cfg, std::ostream& log) {
    const Problem pb = build_problem(cfg);
    if (!has_reference_oracles(pb)) {
        throw ConfigError("verify needs the free scalar with X = d/dx^n on the graph surface and the default signature");
    }
    const fs::path dir = output_dir(cfg);
    const Real mu = cfg.model.mu;
    json out = {{"command", "verify"}, {"config", to_json(cfg)}};

    const AdaptedChart chart(pb.pair, pb.solver.xi_max, pb.solver.steps, pb.grid);
    const RegularityReport reg = audit(pb, chart, SolveMode::pde);
    out["regularity"] = to_json(reg);
    print_regularity(reg, log);
    if (!reg.pass) {
        out["status"] = "regularity_failure";
        write_json(dir / "verify.json", out);
        return exit_regularity;
    }

    Breach breach;
    json checks = json::array();
    try {
        // A convergence table needs a closed form that varies along z.
        const bool table = pb.exact && *pb.exact == ExactKind::cosine_mode;
        std::vector<OracleRow> rows;
        if (table) {
            for (int per_axis : kConvergenceGrids) {
                log << "oracle run N_z = " << per_axis << '\n';
                rows.push_back(oracle_row(with_resolution(pb, per_axis)));
            }
        } else {
            rows.push_back(oracle_row(pb));
        }
        json table_json = json::array();
        for (const auto& row : rows) table_json.push_back(row_json(row));
        out["oracle_runs"] = table_json;

        const OracleRow& head = rows.back();
        const std::string at = " (N_z = " + std::to_string(head.per_axis) + ")";
        checks.push_back(check_entry("hj_vs_direct_l2" + at, head.hj_vs_direct, kOracleTolerance,
                                     head.hj_vs_direct < kOracleTolerance, log, breach));
        if (pb.exact) {
            checks.push_back(check_entry("hj_vs_exact_l2" + at, head.hj_vs_exact, kOracleTolerance,
                                         head.hj_vs_exact < kOracleTolerance, log, breach));
            checks.push_back(check_entry("direct_vs_exact_l2" + at, head.direct_vs_exact, kOracleTolerance,
                                         head.direct_vs_exact < kOracleTolerance, log, breach));
        }
        checks.push_back(check_entry("embeddability_linf" + at, head.embeddability, kEmbeddabilityTolerance,
                                     head.embeddability < kEmbeddabilityTolerance, log, breach));
        if (table) {
            for (std::size_t i = 1; i < rows.size(); ++i) {
                const std::string step = std::to_string(rows[i - 1].per_axis) + "->" + std::to_string(rows[i].per_axis);
                checks.push_back(band_entry("convergence_ratio " + step, rows[i - 1].hj_vs_exact / rows[i].hj_vs_exact,
                                            log, breach));
                checks.push_back(band_entry("h_consistency_ratio " + step,
                                            rows[i - 1].h_consistency / rows[i].h_consistency, log, breach));
            }
        }

        if (mu > 0) {
            SolverConfig sc = pb.solver;
            sc.steps = std::max(sc.steps, static_cast<int>(std::ceil(sc.xi_max / kFirstIntegralStep - 1e-9)));
            sc.store_every = std::max(1, sc.steps / 100);
            sc.keep_last = 0;
            const AdaptedChart ode_chart(pb.pair, sc.xi_max, sc.steps, pb.grid);
            const PhaseInitialData B =
                build_initial_surface_B(*pb.model, ode_chart, pb.data, pb.gauge, GaugeMode::prescribed, sc.newton);
            const Trajectory traj = integrate_ode(*pb.model, ode_chart, pb.gauge, B, sc);
            const FirstIntegralReport fi = check_first_integrals(traj, mu, pb.gauge);
            out["first_integrals"] = {{"step", sc.step()},
                                      {"alpha_drift", number(fi.alpha_drift)},
                                      {"beta_drift", number(fi.beta_drift)},
                                      {"max_alpha_rate", number(fi.max_alpha_rate)},
                                      {"max_beta_rate", number(fi.max_beta_rate)}};
            checks.push_back(check_entry("first_integral_alpha_drift", fi.alpha_drift, kFirstIntegralTolerance,
                                         fi.alpha_drift < kFirstIntegralTolerance, log, breach));
            checks.push_back(check_entry("first_integral_beta_drift", fi.beta_drift, kFirstIntegralTolerance,
                                         fi.beta_drift < kFirstIntegralTolerance, log, breach));
        } else {
            out["first_integrals"] = {{"skipped", "the complete integral needs mu > 0"}};
        }
    } catch (const RegularityError& e) {
        out["status"] = "regularity_failure";
        out["error"] = {{"message", e.what()}, {"node", e.node()}};
        write_json(dir / "verify.json", out);
        log << "error: " << e.what() << '\n';
        return exit_regularity;
    } catch (const SolverError& e) {
        out["status"] = "solver_failure";
        out["error"] = {{"message", e.what()}, {"node", e.node()}, {"xi", e.xi()}};
        write_json(dir / "verify.json", out);
        log << "error: " << e.what() << '\n';
        return exit_failure;
    }

    out["checks"] = checks;
    out["status"] = breach.any ? "breach" : "ok";
    write_json(dir / "verify.json", out);
    log << "verify: " << (breach.any ? "FAIL" : "PASS") << '\n';
    return breach.any ? exit_failure : exit_ok;
}

int run_demo(const RunConfig& cfg, std::ostream& log) {
    const int solved = run_solve(cfg, log);
    if (solved != exit_ok) return solved;
    if (!has_reference_oracles(build_problem(cfg))) {
        log << "verify skipped: no reference oracle for this configuration\n";
        return exit_ok;
    }
    return run_verify(cfg, log);
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hamilton-Jacobi construction of scalar field solutions along characteristics"};
    app.name("hjfield");
    app.require_subcommand(1);

    std::string config_path, output, mode, preset;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--output", output, "Output directory (overrides the config)");
        sub->add_option("--mode", mode, "ode or pde (overrides the config)");
    };
    CLI::App* check = app.add_subcommand("check", "Audit the regularity of the initial pair");
    CLI::App* solve = app.add_subcommand("solve", "Integrate and write solution.csv, residuals.json, report.json");
    CLI::App* verify = app.add_subcommand("verify", "Compare against the direct integrator and closed forms");
    CLI::App* demo = app.add_subcommand("demo", "solve followed by verify for a preset or config");
    for (CLI::App* sub : {check, solve, verify}) {
        sub->add_option("--config", config_path, "Path to the JSON configuration")->required();
        add_common(sub);
    }
    auto* demo_config = demo->add_option("--config", config_path, "Path to the JSON configuration");
    auto* demo_preset = demo->add_option("--preset", preset, "vacuum, homogeneous_exp or cosine_mode");
    demo_config->excludes(demo_preset);
    demo_preset->excludes(demo_config);
    add_common(demo);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        RunConfig cfg;
        if (demo->parsed() && config_path.empty()) {
            if (preset.empty()) throw ConfigError("demo needs --preset or --config");
            cfg = preset_config(preset);
        } else {
            cfg = load_config(config_path);
        }
        if (!output.empty()) cfg.output = output;
        if (!mode.empty()) cfg.mode = parse_mode(mode);

        if (check->parsed()) return run_check(cfg, out).exit_code;
        if (solve->parsed()) return run_solve(cfg, out);
        if (verify->parsed()) return run_verify(cfg, out);
        return run_demo(cfg, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const EvaluationError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const RegularityError& e) {
        err << "regularity failure: " << e.what() << '\n';
        return exit_regularity;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return exit_failure;
    }
}

}  // namespace hjfield::cli
