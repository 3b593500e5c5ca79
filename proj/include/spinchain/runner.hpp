#pragma once

// Executes run configurations and writes their artifacts:
//   <name>.csv        t, re_c1, im_c1, ..., P_1..P_N, P_channel, P_total, fidelity
//   <name>.json       run metadata (resolved config, diagnostics, wall time)
//   <name>.crosscheck.json   deviation report (cross-check backend only)
// Sweeps add <name>.summary.csv / <name>.summary.json.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spinchain/config.hpp"
#include "spinchain/errors.hpp"

namespace spinchain {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// From SPINCHAIN_LOG (error|warn|info|debug); warn when unset.
LogLevel log_level_from_env();
void log_message(LogLevel level, std::string_view msg);

inline constexpr std::string_view kMetadataSchemaTag = "spinchain.run-metadata/1";
inline constexpr double kPseudomodeCrossCheckTolerance = 1e-6;
inline constexpr double kVolterraCrossCheckTolerance = 1e-4;

struct RunOutcome {
    RunConfig config;
    Backend backend = Backend::Laplace;
    Trajectory trajectory;
    nlohmann::json diagnostics = nlohmann::json::object();
    nlohmann::json cross_check;  // null unless backend is cross-check
    std::vector<std::string> warnings;
    double wall_seconds = 0.0;
};

RunOutcome execute(const RunConfig& cfg);

// Shortest text with 17 significant digits, '.' decimal, locale-free.
std::string format_double(double x);

std::string trajectory_csv(const Trajectory& traj);
nlohmann::json run_metadata(const RunOutcome& outcome);

// Writes to a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);

struct RunFiles {
    std::filesystem::path csv;
    std::filesystem::path metadata;
    std::filesystem::path cross_check;  // empty unless written
};

RunFiles write_run(const RunOutcome& outcome, const std::filesystem::path& dir, const std::string& name);

struct SweepPoint {
    std::size_t index = 0;
    double value = 0.0;
    std::string status = "ok";  // "ok" or the error kind
    std::string message;
    std::string stem;
    double p_total_end = 0.0;
    double max_fidelity = 0.0;
    double argmax_t = 0.0;
};

struct SweepResult {
    std::string axis;
    std::vector<SweepPoint> points;  // in value order

    std::size_t failures() const noexcept;
};

// Runs one configuration per value on `jobs` workers. Errors at a point are
// recorded and the sweep continues; UnknownAxis is thrown up front.
SweepResult run_sweep(const RunConfig& base, std::string_view axis, std::span<const double> values,
                      unsigned jobs, const std::filesystem::path& dir);

std::string sweep_summary_csv(const SweepResult& sweep);
nlohmann::json sweep_summary_json(const SweepResult& sweep);

// "1,2,3" or "start:stop:step" (inclusive of stop within rounding).
std::vector<double> parse_value_list(std::string_view text);

// "config-error", "io-error" or "solver-error" for the given kind.
std::string error_status(ErrorKind kind);
int exit_code_for(ErrorKind kind);
nlohmann::json error_report(const Error& e);

}  // namespace spinchain
