#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "lattice/config.hpp"
#include "lattice/error.hpp"

namespace lattice::experiment {

/// Process exit codes of the CLI.
enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kConfigError = 2,   // parse errors, out-of-range parameters, nonlinearity registration
    kDivergence = 3,    // integration blow-up or reference boundary contamination
    kIoError = 4,
};

[[nodiscard]] int exit_code_for(ErrorKind kind) noexcept;

enum class LogLevel { Quiet, Info, Debug };

/// Parses the LATTICE_LOG value; unknown or empty values mean Info.
[[nodiscard]] LogLevel parse_log_level(const char* value) noexcept;

struct RunContext {
    std::filesystem::path out_dir = ".";
    LogLevel level = LogLevel::Info;
    std::ostream* log = nullptr;     // diagnostics (stderr in the CLI)
    std::ostream* console = nullptr; // one-line verdicts (stdout in the CLI)
};

/// Result of one subcommand. `report` follows schema version kSchemaVersion and is also
/// written to <out_dir>/<command>_report.json.
struct RunResult {
    int exit_code = kOk;
    nlohmann::json report;
    std::vector<std::filesystem::path> artifacts;
};

inline constexpr int kSchemaVersion = 1;

/// trajectory.csv (t,u_-n..u_n) and norms.csv (t,norm_sq) for the periodic n-system.
[[nodiscard]] RunResult cmd_simulate(const ExperimentConfig& cfg, const RunContext& ctx);
/// Operator identities, equivariance, nonlinearity contract, cocycle defect, energy decay.
[[nodiscard]] RunResult cmd_verify(const ExperimentConfig& cfg, const RunContext& ctx);
/// cloud.csv (one row per point, columns u_-W..u_W) and tail_report.json.
[[nodiscard]] RunResult cmd_attractor(const ExperimentConfig& cfg, const RunContext& ctx);
/// convergence.csv (n,beta_n_to_ref,beta_ref_to_n,runtime_s).
[[nodiscard]] RunResult cmd_converge(const ExperimentConfig& cfg, const RunContext& ctx);

/// Formats with 17 significant digits.
[[nodiscard]] std::string format_number(double x);

[[nodiscard]] nlohmann::json config_to_json(const ExperimentConfig& cfg);

}  // namespace lattice::experiment
