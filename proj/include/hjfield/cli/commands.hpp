#pragma once

#include "hjfield/cli/config.hpp"
#include "hjfield/embedding.hpp"
#include "hjfield/geometry.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace hjfield::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_config = 1,
    exit_regularity = 2,
    exit_failure = 3,  ///< solver failure or a verification breach
};

struct CheckOutcome {
    RegularityReport report;
    nlohmann::json json;
    int exit_code = exit_ok;
};

/// Audits the regularity conditions of the configured initial pair on the
/// z-grid and writes report.json. Samples come from the initial surface B; if
/// B cannot be built (e.g. the momentum equation is singular) the audit falls
/// back to samples with p = 0.
CheckOutcome run_check(const RunConfig& cfg, std::ostream& log);

/// check, build B, integrate in the configured mode, reconstruct; writes
/// solution.csv, residuals.json and report.json.
int run_solve(const RunConfig& cfg, std::ostream& log);

/// Oracle comparison for the free scalar with X = d/dx^n on x^n = 0:
/// HJ vs direct integrator vs closed form, an N_z in {16, 32, 64} convergence
/// table, first-integral drift along ODE trajectories and the h-consistency
/// residual. Writes verify.json; exit_failure on any breach.
int run_verify(const RunConfig& cfg, std::ostream& log);

/// solve followed by verify in the same output directory.
int run_demo(const RunConfig& cfg, std::ostream& log);

/// Convergence table resolutions and the accepted band for successive error ratios.
inline const std::vector<int> kConvergenceGrids{16, 32, 64};
inline constexpr Real kRatioLow = 3.2;
inline constexpr Real kRatioHigh = 4.8;

/// Thresholds applied by run_verify.
inline constexpr Real kOracleTolerance = 5e-3;      ///< HJ vs direct and vs exact, L2
inline constexpr Real kEmbeddabilityTolerance = 1e-8;
inline constexpr Real kFirstIntegralTolerance = 1e-7;
inline constexpr Real kFirstIntegralStep = 1e-3;

/// Whether the problem is the free scalar with X = d/dx^n on the graph surface
/// and the default signature, the setting of the reference oracles.
bool has_reference_oracles(const Problem& problem);

/// Writes solution.csv: one row per (written slice, node) with columns
/// xi, z1.., y_1.., u_1.., p^mu_i in pair order, phi. Every `output_every`-th
/// stored slice is written, and always the last one.
void write_solution_csv(const std::string& path, const ReconstructedSolution& sol, int output_every);

nlohmann::json to_json(const RegularityReport& report);
nlohmann::json to_json(const ResidualReport& report);

/// Entry point of the hjfield executable; returns the process exit code.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hjfield::cli
