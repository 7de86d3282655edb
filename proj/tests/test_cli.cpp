#include <hjfield/cli/commands.hpp>

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace hjfield;
using namespace hjfield::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Workspace {
public:
    Workspace() : dir_(fs::temp_directory_path() / "hjfield_cli_test") {
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    ~Workspace() { fs::remove_all(dir_); }

    std::string config(const std::string& name, json j) {
        if (!j.contains("output")) j["output"] = out(name);
        const fs::path p = dir_ / (name + ".json");
        std::ofstream(p) << j.dump(2);
        return p.string();
    }
    std::string out(const std::string& name) const { return (dir_ / ("out_" + name)).string(); }

private:
    fs::path dir_;
};

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "hjfield");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

json homogeneous(Real mu, int steps = 1000) {
    return json{{"model", {{"name", "free_scalar"}, {"n", 4}, {"mu", mu}}},
                {"grid", {{"N_z", 4}, {"xi_steps", steps}, {"store_every", 10}}},
                {"initial_data", {{"preset", "homogeneous_exp"}, {"C", 1.0}}},
                {"mode", "ode"}};
}

json vacuum() {
    return json{{"model", {{"name", "free_scalar"}, {"n", 4}}},
                {"grid", {{"N_z", 4}, {"xi_steps", 50}}},
                {"initial_data", {{"preset", "vacuum"}}}};
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("check passes for the standard pair and fails for a tangent X") {
        Workspace ws;
        Run r = run({"check", "--config", ws.config("good", vacuum())});
        CHECK(r.code == exit_ok);
        const json rep = read_json(fs::path(ws.out("good")) / "report.json");
        CHECK(rep["status"] == "pass");
        CHECK(rep["command"] == "check");

        json bad = vacuum();
        bad["pair"] = {{"X", {1, 0, 0, 0}}};
        r = run({"check", "--config", ws.config("bad", bad)});
        CHECK(r.code == exit_regularity);
        CHECK(read_json(fs::path(ws.out("bad")) / "report.json")["status"] == "regularity_failure");
        CHECK(run({"solve", "--config", ws.config("bad", bad)}).code == exit_regularity);
    }

    TEST_CASE("configuration errors exit with 1") {
        Workspace ws;
        json j = vacuum();
        j["grid"]["Nz"] = 4;
        Run r = run({"check", "--config", ws.config("unknown", j)});
        CHECK(r.code == exit_config);
        CHECK(r.err.find("unknown key 'Nz'") != std::string::npos);

        CHECK(run({"check", "--config", "/nonexistent/config.json"}).code == exit_config);
        CHECK(run({"check"}).code == exit_config);
        CHECK(run({}).code == exit_config);
        CHECK(run({"frobnicate"}).code == exit_config);
        CHECK(run({"check", "--config", ws.config("mode", vacuum()), "--mode", "sde"}).code == exit_config);
        CHECK(run({"demo", "--preset", "vacuum", "--config", ws.config("both", vacuum())}).code == exit_config);
        CHECK(run({"demo", "--preset", "nothing"}).code == exit_config);

        j = vacuum();
        j["initial_data"] = {{"preset", "custom"}, {"psi", "1 / (z1 - z1)"}, {"psi_hat", 0}};
        CHECK(run({"solve", "--config", ws.config("eval", j)}).code == exit_config);

        const fs::path broken = fs::path(ws.out("x")).parent_path() / "broken.json";
        std::ofstream(broken) << "{\"model\": [";
        CHECK(run({"check", "--config", broken.string()}).code == exit_config);

        // verify is only defined for the reference setting.
        j = vacuum();
        j["model"]["signature"] = {1, 1, -1, -1};
        CHECK(run({"verify", "--config", ws.config("sig", j)}).code == exit_config);

        CHECK(run({"--help"}).code == exit_ok);
    }

    TEST_CASE("solver blow-up exits with 3 and a diagnostic report") {
        Workspace ws;
        const Run r = run({"solve", "--config", ws.config("blowup", homogeneous(400.0))});
        CHECK(r.code == exit_failure);
        const json rep = read_json(fs::path(ws.out("blowup")) / "report.json");
        CHECK(rep["status"] == "solver_failure");
        CHECK(rep["error"]["xi"].get<Real>() > 0.0);
    }

    TEST_CASE("homogeneous run reproduces the exponential branch") {
        Workspace ws;
        REQUIRE(run({"solve", "--config", ws.config("hom", homogeneous(1.0))}).code == exit_ok);
        std::ifstream csv(fs::path(ws.out("hom")) / "solution.csv");
        std::string header, line, last;
        std::getline(csv, header);
        CHECK(header == "xi,z1,z2,z3,y_1,u_1,p1_1,p2_1,p3_1,p4_1,phi");
        std::size_t rows = 0;
        while (std::getline(csv, line)) {
            last = line;
            ++rows;
        }
        CHECK(rows == 101 * 64);
        std::vector<Real> cols;
        std::stringstream ss(last);
        for (std::string cell; std::getline(ss, cell, ',');) cols.push_back(std::stod(cell));
        REQUIRE(cols.size() == 11);
        CHECK(cols[0] == 1.0);
        CHECK(std::abs(cols[4] - std::numbers::e) < 1e-6);
        CHECK(cols[5] == doctest::Approx(-std::numbers::e));
        CHECK(cols[9] == doctest::Approx(cols[5]));

        const json rep = read_json(fs::path(ws.out("hom")) / "report.json");
        CHECK(rep["exact_final"]["linf"].get<Real>() < 1e-6);
        CHECK(rep["mode"] == "ode");
    }

    TEST_CASE("vacuum residuals vanish") {
        Workspace ws;
        REQUIRE(run({"solve", "--config", ws.config("vac", vacuum())}).code == exit_ok);
        const json res = read_json(fs::path(ws.out("vac")) / "residuals.json");
        for (const char* key : {"embeddability", "hj_ansatz"}) {
            CHECK(res[key]["linf"].get<Real>() == 0.0);
            CHECK(res[key]["l2"].get<Real>() == 0.0);
        }
        for (const char* half : {"gradient", "divergence"}) {
            CHECK(res["field_equations"][half]["linf"].get<Real>() == 0.0);
        }
    }

    TEST_CASE("identical configurations give byte-identical outputs") {
        Workspace ws;
        json j = vacuum();
        j["initial_data"] = {{"preset", "custom"}, {"psi", "0.3 * cos(z1) * sin(z2)"}, {"psi_hat", "0.1 * cos(z3)"}};
        j["grid"] = {{"N_z", 8}, {"xi_steps", 40}, {"store_every", 4}};
        const std::string path = ws.config("det", j);
        const fs::path dir = ws.out("det");
        std::vector<std::string> first;
        REQUIRE(run({"solve", "--config", path}).code == exit_ok);
        for (const char* f : {"solution.csv", "residuals.json", "report.json"}) first.push_back(slurp(dir / f));
        REQUIRE(run({"solve", "--config", path}).code == exit_ok);
        int i = 0;
        for (const char* f : {"solution.csv", "residuals.json", "report.json"}) CHECK(slurp(dir / f) == first[i++]);
        CHECK_FALSE(first[0].empty());
    }

    TEST_CASE("output directory and mode overrides") {
        Workspace ws;
        const std::string other = ws.out("elsewhere");
        REQUIRE(run({"solve", "--config", ws.config("ovr", homogeneous(1.0, 100)), "--output", other, "--mode", "pde"})
                    .code == exit_ok);
        CHECK(read_json(fs::path(other) / "report.json")["mode"] == "pde");
        CHECK_FALSE(fs::exists(ws.out("ovr")));
    }

    TEST_CASE("verify and demo") {
        Workspace ws;
        Run r = run({"demo", "--preset", "homogeneous_exp", "--output", ws.out("demo")});
        CHECK(r.code == exit_ok);
        CHECK(r.out.find("verify: PASS") != std::string::npos);
        const json v = read_json(fs::path(ws.out("demo")) / "verify.json");
        CHECK(v["status"] == "ok");
        CHECK(v["first_integrals"]["alpha_drift"].get<Real>() < kFirstIntegralTolerance);
        CHECK(fs::exists(fs::path(ws.out("demo")) / "solution.csv"));

        // One RK4 step over [0, 1] misses e by about 1e-2: a breach of the oracle tolerance.
        json coarse = homogeneous(1.0, 1);
        coarse["grid"]["store_every"] = 1;
        r = run({"verify", "--config", ws.config("coarse", coarse)});
        CHECK(r.code == exit_failure);
        CHECK(read_json(fs::path(ws.out("coarse")) / "verify.json")["status"] == "breach");
    }

    TEST_CASE("csv slice selection") {
        Workspace ws;
        json j = homogeneous(1.0, 100);
        j["grid"]["store_every"] = 1;
        j["grid"]["output_every"] = 30;
        REQUIRE(run({"solve", "--config", ws.config("every", j)}).code == exit_ok);
        std::ifstream csv(fs::path(ws.out("every")) / "solution.csv");
        std::string line;
        std::getline(csv, line);
        std::vector<std::string> xis;
        while (std::getline(csv, line)) {
            const std::string xi = line.substr(0, line.find(','));
            if (xis.empty() || xis.back() != xi) xis.push_back(xi);
        }
        // Slices 0, 30, 60, 90 and the last one.
        REQUIRE(xis.size() == 5);
        CHECK(std::stod(xis[1]) == doctest::Approx(0.3));
        CHECK(xis.back() == "1");
    }
}
