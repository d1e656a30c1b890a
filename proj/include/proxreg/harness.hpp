#pragma once

#include "proxreg/algorithms.hpp"
#include "proxreg/kernels.hpp"
#include "proxreg/serialization.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace proxreg {

enum class Algorithm { proximal, randomized, barycentric };

std::string_view to_string(Algorithm algorithm);

struct EstimationSettings {
    double radius = 0.0;
    std::size_t n_samples = 10000;
};

struct VerificationSettings {
    double gamma_bar = 0.0;
    std::optional<double> kappa_bar;
    std::size_t n_trials = 1000;
};

/// A fully validated experiment. Defaults (max_iters 1000, residual_tol
/// 1e-10, seed 0, constant lambda 1) are filled in by parse_config and echoed
/// by to_json.
struct ExperimentConfig {
    std::vector<MonotoneOperator> operators;
    Vector x0;
    std::optional<Vector> center;
    Algorithm algorithm = Algorithm::proximal;
    RunConfig run;
    std::optional<EstimationSettings> estimation;
    std::optional<VerificationSettings> verification;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig config_from_json(const Json& j);
Json to_json(const ExperimentConfig& config);

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitConfigError = 2 };

struct CommandOptions {
    std::filesystem::path out_dir = ".";
    /// Fixed report timestamp (for reproducible files); current UTC time if empty.
    std::optional<std::string> timestamp;
    kernels::Execution exec = kernels::Execution::parallel;
};

struct CommandResult {
    int exit_code = kExitPass;
    Json report;          // null when the command failed before producing one
    std::string message;  // human-readable error for non-zero exit codes
};

/// Runs the configured algorithm; writes trace.csv and report.json.
CommandResult cmd_run(const ExperimentConfig& config, const CommandOptions& options);

/// Subregularity estimates per operator (with spectral oracles where they
/// exist) and kappa for the collection; writes report.json.
CommandResult cmd_estimate(const ExperimentConfig& config, const CommandOptions& options);

/// Rate verification; exit code 0 when every assertion passes, 1 otherwise,
/// 2 for configuration errors including a violated rate assumption.
CommandResult cmd_verify(const ExperimentConfig& config, const CommandOptions& options);

std::string_view version();

} // namespace proxreg
