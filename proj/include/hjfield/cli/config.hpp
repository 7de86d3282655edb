#pragma once

#include "hjfield/characteristics.hpp"
#include "hjfield/cli/expression.hpp"
#include "hjfield/geometry.hpp"
#include "hjfield/initdata.hpp"
#include "hjfield/model.hpp"
#include "hjfield/reference.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace hjfield::cli {

struct ModelBlock {
    std::string name = "free_scalar";
    int n = 4;
    Real mu = 1.0;
    std::vector<Real> signature;  ///< empty: diag(1, ..., 1, -1)
    Real lambda = 0.0;
    Real gamma = 0.0;
};

struct PairBlock {
    std::string surface = "graph";
    /// Components of X; each is a number or an expression in x1..x4 (plus mu, pi).
    std::vector<std::string> field;  ///< empty: d/dx^n
};

struct GridBlock {
    Real L = 2.0 * 3.14159265358979323846;
    int N_z = 16;
    Real xi_max = 1.0;
    int xi_steps = 200;
    int store_every = 1;
    int output_every = 1;  ///< stored slices written to solution.csv: every k-th plus the last
};

struct InitialDataBlock {
    std::string preset = "vacuum";  ///< vacuum | homogeneous_exp | cosine_mode | custom
    Real C = 1.0;
    std::string branch = "growing";  ///< homogeneous_exp: growing | decaying
    Real k = 2.0;
    std::string psi;      ///< custom
    std::string psi_hat;  ///< custom
};

struct GaugeBlock {
    std::string a_hat = "0";     ///< expression in xi, z, mu, k
    std::vector<std::string> h;  ///< ODE-mode tangential gauge, one expression per z axis; empty: 0
};

struct RunConfig {
    ModelBlock model;
    PairBlock pair;
    GridBlock grid;
    InitialDataBlock initial_data;
    GaugeBlock gauge;
    SolveMode mode = SolveMode::pde;
    std::string output = "hjfield-out";
};

/// Parses and validates a configuration. Unknown keys, wrong types and
/// out-of-range values raise ConfigError (expressions raise ExpressionError).
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Canonical JSON form of a configuration (all defaults filled in).
nlohmann::json to_json(const RunConfig& cfg);

/// Built-in configurations: vacuum, homogeneous_exp, cosine_mode.
RunConfig preset_config(const std::string& name);

SolveMode parse_mode(const std::string& name);
std::string mode_name(SolveMode mode);

/// Objects assembled from a configuration.
struct Problem {
    RunConfig config;
    ModelPtr model;
    InitialPair pair;
    PeriodicGrid grid;
    InitialData data;
    GaugeChoice gauge;
    SolverConfig solver;
    std::optional<ExactKind> exact;  ///< closed form available for the initial data
    ExactParams exact_params;
};

Problem build_problem(const RunConfig& cfg);

/// Same problem on a different grid resolution.
Problem with_resolution(const Problem& base, int per_axis);

}  // namespace hjfield::cli
