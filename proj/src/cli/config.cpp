#include "hjfield/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hjfield::cli {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

Real get_number(const json& j, const char* key, const std::string& where, Real fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    const Real x = v.get<Real>();
    if (!std::isfinite(x)) throw ConfigError(where + "." + key + " must be finite");
    return x;
}

int get_int(const json& j, const char* key, const std::string& where, int fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
    return v.get<int>();
}

std::string get_string(const json& j, const char* key, const std::string& where, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
    return v.get<std::string>();
}

// A number or an expression string, kept as canonical text.
std::string get_expression_text(const json& v, const std::string& where) {
    if (v.is_number()) {
        const Real x = v.get<Real>();
        if (!std::isfinite(x)) throw ConfigError(where + " must be finite");
        std::ostringstream os;
        os.precision(17);
        os << x;
        return os.str();
    }
    if (v.is_string()) return v.get<std::string>();
    throw ConfigError(where + " must be a number or an expression string");
}

std::set<std::string> z_identifiers(int n, bool with_xi) {
    std::set<std::string> ids{"k", "mu", "pi"};
    for (int a = 1; a < n; ++a) ids.insert("z" + std::to_string(a));
    if (with_xi) ids.insert("xi");
    return ids;
}

std::set<std::string> x_identifiers(int n) {
    std::set<std::string> ids{"mu", "pi"};
    for (int a = 1; a <= n; ++a) ids.insert("x" + std::to_string(a));
    return ids;
}

Expression parse_in(const std::string& src, const std::set<std::string>& ids, const std::string& where) {
    try {
        return Expression::parse(src, ids);
    } catch (const ExpressionError& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

Bindings z_bindings(const Vec& z, Real xi, Real mu, Real k) {
    Bindings b;
    for (Eigen::Index a = 0; a < z.size(); ++a) b.set("z" + std::to_string(a + 1), z[a]);
    b.set("xi", xi).set("mu", mu).set("k", k);
    return b;
}

std::vector<Real> default_signature(int n) {
    std::vector<Real> s(n, 1.0);
    s[n - 1] = -1.0;
    return s;
}

}  // namespace

SolveMode parse_mode(const std::string& name) {
    if (name == "pde") return SolveMode::pde;
    if (name == "ode") return SolveMode::ode;
    throw ConfigError("mode must be 'ode' or 'pde', got '" + name + "'");
}

std::string mode_name(SolveMode mode) { return mode == SolveMode::pde ? "pde" : "ode"; }

RunConfig parse_config(const json& j) {
    check_keys(j, {"model", "pair", "grid", "initial_data", "gauge", "mode", "output"}, "config");
    RunConfig cfg;

    if (!j.contains("model")) throw ConfigError("config.model is required");
    {
        const json& m = j.at("model");
        check_keys(m, {"name", "n", "mu", "signature", "lambda", "gamma"}, "model");
        cfg.model.name = get_string(m, "name", "model", cfg.model.name);
        if (cfg.model.name != "free_scalar" && cfg.model.name != "quartic_scalar") {
            throw ConfigError("model.name must be 'free_scalar' or 'quartic_scalar'");
        }
        cfg.model.n = get_int(m, "n", "model", cfg.model.n);
        if (cfg.model.n < 2 || cfg.model.n > kMaxBaseDim) throw ConfigError("model.n must be 2, 3 or 4");
        cfg.model.mu = get_number(m, "mu", "model", cfg.model.mu);
        if (cfg.model.mu < 0) throw ConfigError("model.mu must be non-negative");
        if (m.contains("signature")) {
            const json& s = m.at("signature");
            if (!s.is_array()) throw ConfigError("model.signature must be an array");
            for (const auto& e : s) {
                if (!e.is_number()) throw ConfigError("model.signature entries must be numbers");
                cfg.model.signature.push_back(e.get<Real>());
            }
            if (static_cast<int>(cfg.model.signature.size()) != cfg.model.n) {
                throw ConfigError("model.signature must have n entries");
            }
        }
        cfg.model.lambda = get_number(m, "lambda", "model", 0.0);
        cfg.model.gamma = get_number(m, "gamma", "model", 0.0);
        if (cfg.model.name == "free_scalar" && (cfg.model.lambda != 0.0 || cfg.model.gamma != 0.0)) {
            throw ConfigError("model.lambda and model.gamma only apply to quartic_scalar");
        }
    }
    const int n = cfg.model.n;

    if (j.contains("pair")) {
        const json& p = j.at("pair");
        check_keys(p, {"surface", "X"}, "pair");
        cfg.pair.surface = get_string(p, "surface", "pair", cfg.pair.surface);
        if (cfg.pair.surface != "graph") throw ConfigError("pair.surface must be 'graph'");
        if (p.contains("X")) {
            const json& x = p.at("X");
            if (!x.is_array() || static_cast<int>(x.size()) != n) throw ConfigError("pair.X must be an array of n entries");
            for (std::size_t c = 0; c < x.size(); ++c) {
                const std::string where = "pair.X[" + std::to_string(c) + "]";
                cfg.pair.field.push_back(get_expression_text(x[c], where));
                parse_in(cfg.pair.field.back(), x_identifiers(n), where);
            }
        }
    }

    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, {"L", "N_z", "xi_max", "xi_steps", "store_every", "output_every"}, "grid");
        cfg.grid.L = get_number(g, "L", "grid", cfg.grid.L);
        cfg.grid.N_z = get_int(g, "N_z", "grid", cfg.grid.N_z);
        cfg.grid.xi_max = get_number(g, "xi_max", "grid", cfg.grid.xi_max);
        cfg.grid.xi_steps = get_int(g, "xi_steps", "grid", cfg.grid.xi_steps);
        cfg.grid.store_every = get_int(g, "store_every", "grid", cfg.grid.store_every);
        cfg.grid.output_every = get_int(g, "output_every", "grid", cfg.grid.output_every);
    }
    if (!(cfg.grid.L > 0)) throw ConfigError("grid.L must be positive");
    if (cfg.grid.N_z < 4) throw ConfigError("grid.N_z must be at least 4");
    if (!(cfg.grid.xi_max > 0)) throw ConfigError("grid.xi_max must be positive");
    if (cfg.grid.xi_steps < 1) throw ConfigError("grid.xi_steps must be at least 1");
    if (cfg.grid.store_every < 1) throw ConfigError("grid.store_every must be at least 1");
    if (cfg.grid.output_every < 1) throw ConfigError("grid.output_every must be at least 1");

    if (!j.contains("initial_data")) throw ConfigError("config.initial_data is required");
    {
        const json& d = j.at("initial_data");
        if (!d.is_object()) throw ConfigError("initial_data must be a JSON object");
        auto& b = cfg.initial_data;
        b.preset = get_string(d, "preset", "initial_data", b.preset);
        if (b.preset == "vacuum") {
            check_keys(d, {"preset"}, "initial_data (vacuum)");
        } else if (b.preset == "homogeneous_exp") {
            check_keys(d, {"preset", "C", "branch"}, "initial_data (homogeneous_exp)");
            b.C = get_number(d, "C", "initial_data", b.C);
            b.branch = get_string(d, "branch", "initial_data", b.branch);
            if (b.branch != "growing" && b.branch != "decaying") {
                throw ConfigError("initial_data.branch must be 'growing' or 'decaying'");
            }
        } else if (b.preset == "cosine_mode") {
            check_keys(d, {"preset", "k"}, "initial_data (cosine_mode)");
            b.k = get_number(d, "k", "initial_data", b.k);
            if (!(b.k * b.k > cfg.model.mu * cfg.model.mu)) {
                throw ConfigError("initial_data.k must satisfy k^2 > mu^2 for the cosine mode");
            }
        } else if (b.preset == "custom") {
            check_keys(d, {"preset", "psi", "psi_hat", "k"}, "initial_data (custom)");
            if (!d.contains("psi") || !d.contains("psi_hat")) {
                throw ConfigError("initial_data.psi and initial_data.psi_hat are required for the custom preset");
            }
            b.psi = get_expression_text(d.at("psi"), "initial_data.psi");
            b.psi_hat = get_expression_text(d.at("psi_hat"), "initial_data.psi_hat");
            b.k = get_number(d, "k", "initial_data", b.k);
            parse_in(b.psi, z_identifiers(n, false), "initial_data.psi");
            parse_in(b.psi_hat, z_identifiers(n, false), "initial_data.psi_hat");
        } else {
            throw ConfigError("initial_data.preset must be vacuum, homogeneous_exp, cosine_mode or custom");
        }
    }

    if (j.contains("gauge")) {
        const json& g = j.at("gauge");
        check_keys(g, {"A_hat", "h"}, "gauge");
        if (g.contains("A_hat")) cfg.gauge.a_hat = get_expression_text(g.at("A_hat"), "gauge.A_hat");
        parse_in(cfg.gauge.a_hat, z_identifiers(n, true), "gauge.A_hat");
        if (g.contains("h")) {
            const json& h = g.at("h");
            if (!h.is_array() || static_cast<int>(h.size()) != n - 1) {
                throw ConfigError("gauge.h must be an array of n - 1 entries");
            }
            for (std::size_t c = 0; c < h.size(); ++c) {
                const std::string where = "gauge.h[" + std::to_string(c) + "]";
                cfg.gauge.h.push_back(get_expression_text(h[c], where));
                parse_in(cfg.gauge.h.back(), z_identifiers(n, true), where);
            }
        }
    }

    if (j.contains("mode")) cfg.mode = parse_mode(get_string(j, "mode", "config", "pde"));
    cfg.output = get_string(j, "output", "config", cfg.output);
    if (cfg.output.empty()) throw ConfigError("output must not be empty");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& cfg) {
    json j;
    j["model"] = {{"name", cfg.model.name},
                  {"n", cfg.model.n},
                  {"mu", cfg.model.mu},
                  {"signature", cfg.model.signature.empty() ? default_signature(cfg.model.n) : cfg.model.signature}};
    if (cfg.model.name == "quartic_scalar") {
        j["model"]["lambda"] = cfg.model.lambda;
        j["model"]["gamma"] = cfg.model.gamma;
    }
    json x = json::array();
    if (cfg.pair.field.empty()) {
        for (int c = 0; c < cfg.model.n; ++c) x.push_back(c + 1 == cfg.model.n ? "1" : "0");
    } else {
        for (const auto& e : cfg.pair.field) x.push_back(e);
    }
    j["pair"] = {{"surface", cfg.pair.surface}, {"X", x}};
    j["grid"] = {{"L", cfg.grid.L},
                 {"N_z", cfg.grid.N_z},
                 {"xi_max", cfg.grid.xi_max},
                 {"xi_steps", cfg.grid.xi_steps},
                 {"store_every", cfg.grid.store_every},
                 {"output_every", cfg.grid.output_every}};
    const auto& d = cfg.initial_data;
    json id = {{"preset", d.preset}};
    if (d.preset == "homogeneous_exp") {
        id["C"] = d.C;
        id["branch"] = d.branch;
    } else if (d.preset == "cosine_mode") {
        id["k"] = d.k;
    } else if (d.preset == "custom") {
        id["psi"] = d.psi;
        id["psi_hat"] = d.psi_hat;
        id["k"] = d.k;
    }
    j["initial_data"] = id;
    j["gauge"] = {{"A_hat", cfg.gauge.a_hat}};
    if (!cfg.gauge.h.empty()) j["gauge"]["h"] = cfg.gauge.h;
    j["mode"] = mode_name(cfg.mode);
    j["output"] = cfg.output;
    return j;
}

RunConfig preset_config(const std::string& name) {
    RunConfig cfg;
    cfg.output = "hjfield-" + name;
    if (name == "vacuum") {
        cfg.initial_data.preset = "vacuum";
    } else if (name == "homogeneous_exp") {
        cfg.initial_data.preset = "homogeneous_exp";
        cfg.grid.N_z = 4;
        cfg.grid.xi_steps = 1000;
        cfg.grid.store_every = 10;
    } else if (name == "cosine_mode") {
        cfg.initial_data.preset = "cosine_mode";
        cfg.grid.store_every = 10;
    } else {
        throw ConfigError("unknown preset '" + name + "' (vacuum, homogeneous_exp, cosine_mode)");
    }
    return cfg;
}

Problem build_problem(const RunConfig& cfg) {
    Problem p;
    p.config = cfg;
    const int n = cfg.model.n;
    const Real mu = cfg.model.mu;

    FreeScalarParams fp;
    fp.n = n;
    fp.mu = mu;
    fp.signature = cfg.model.signature.empty() ? default_signature(n) : cfg.model.signature;
    if (cfg.model.name == "free_scalar") {
        p.model = make_free_scalar(fp);
    } else {
        QuarticScalarParams qp;
        qp.base = fp;
        qp.lambda = cfg.model.lambda;
        qp.gamma = cfg.model.gamma;
        p.model = make_quartic_scalar(qp);
    }

    // X: constant when no component references x.
    std::vector<Expression> comps;
    bool constant = true;
    for (int c = 0; c < n; ++c) {
        const std::string text = cfg.pair.field.empty() ? (c + 1 == n ? "1" : "0") : cfg.pair.field[c];
        comps.push_back(parse_in(text, x_identifiers(n), "pair.X"));
        for (const auto& id : comps.back().identifiers()) {
            if (id[0] == 'x') constant = false;
        }
    }
    if (constant) {
        Vec v(n);
        Bindings b;
        b.set("mu", mu);
        for (int c = 0; c < n; ++c) v[c] = comps[c].eval(b);
        p.pair = InitialPair{InitialSurface::graph(n), TransverseField::constant(v)};
    } else {
        p.pair = InitialPair{InitialSurface::graph(n), TransverseField::from_function(n, [comps, mu, n](const Vec& x) {
                                 Bindings b;
                                 b.set("mu", mu);
                                 for (int c = 0; c < n; ++c) b.set("x" + std::to_string(c + 1), x[c]);
                                 Vec v(n);
                                 for (int c = 0; c < n; ++c) v[c] = comps[c].eval(b);
                                 return v;
                             })};
    }

    p.grid = PeriodicGrid(n - 1, cfg.grid.N_z, cfg.grid.L);

    const auto& d = cfg.initial_data;
    auto constant_fn = [](Real value) {
        return [value](const Vec&) {
            Vec v(1);
            v[0] = value;
            return v;
        };
    };
    p.exact_params.mu = mu;
    if (d.preset == "vacuum") {
        p.data = InitialData{constant_fn(0.0), constant_fn(0.0)};
        p.exact = ExactKind::exp_growing;
        p.exact_params.C = 0.0;
    } else if (d.preset == "homogeneous_exp") {
        const bool growing = d.branch == "growing";
        p.data = InitialData{constant_fn(d.C), constant_fn(growing ? mu * d.C : -mu * d.C)};
        p.exact = growing ? ExactKind::exp_growing : ExactKind::exp_decaying;
        p.exact_params.C = d.C;
    } else if (d.preset == "cosine_mode") {
        const Real k = d.k;
        p.data = InitialData{[k](const Vec& z) {
                                 Vec v(1);
                                 v[0] = std::cos(k * z[0]);
                                 return v;
                             },
                             constant_fn(0.0)};
        p.exact = ExactKind::cosine_mode;
        p.exact_params.k = k;
    } else {
        const Expression psi = parse_in(d.psi, z_identifiers(n, false), "initial_data.psi");
        const Expression psi_hat = parse_in(d.psi_hat, z_identifiers(n, false), "initial_data.psi_hat");
        const Real k = d.k;
        auto fn = [mu, k](Expression e) {
            return [e, mu, k](const Vec& z) {
                Vec v(1);
                v[0] = e.eval(z_bindings(z, 0.0, mu, k));
                return v;
            };
        };
        p.data = InitialData{fn(psi), fn(psi_hat)};
    }

    const Real k = d.k;
    const Expression a_hat = parse_in(cfg.gauge.a_hat, z_identifiers(n, true), "gauge.A_hat");
    if (!a_hat.is_zero_literal()) {
        p.gauge.with_a_hat([a_hat, mu, k](Real xi, const Vec& z) {
            Vec v(1);
            v[0] = a_hat.eval(z_bindings(z, xi, mu, k));
            return v;
        });
    }
    std::vector<Expression> h;
    bool h_zero = true;
    for (const auto& text : cfg.gauge.h) {
        h.push_back(parse_in(text, z_identifiers(n, true), "gauge.h"));
        h_zero = h_zero && h.back().is_zero_literal();
    }
    if (!h.empty() && !h_zero) {
        p.gauge.with_h([h, mu, k](Real xi, const Vec& z) {
            Vec v(static_cast<Eigen::Index>(h.size()));
            const Bindings b = z_bindings(z, xi, mu, k);
            for (std::size_t a = 0; a < h.size(); ++a) v[static_cast<Eigen::Index>(a)] = h[a].eval(b);
            return v;
        });
    }

    p.solver.xi_max = cfg.grid.xi_max;
    p.solver.steps = cfg.grid.xi_steps;
    p.solver.store_every = cfg.grid.store_every;
    return p;
}

Problem with_resolution(const Problem& base, int per_axis) {
    RunConfig cfg = base.config;
    cfg.grid.N_z = per_axis;
    return build_problem(cfg);
}

}  // namespace hjfield::cli
