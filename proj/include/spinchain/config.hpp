#pragma once

// Run configuration: JSON schema, resolution into a validated model, and
// sweep axes.
//
//   {
//     "chain":      {"n_sites": 5, "coupling": 1.0, "omega_eg": 0.0},
//     "reservoirs": {"both": {...}} | {"left": {...}, "right": {...}},
//     "initial":    "first-site" | "last-site" | "center" | "uniform-channel"
//                   | {"amplitudes": [[re, im], ...]},
//     "grid":       {"t_max": 100.0, "n_points": 1001},
//     "backend":    "laplace" | "volterra" | "pseudomode" | "cross-check",
//     "inversion":  {"method", "contour_shift", "n_terms", "euler_depth",
//                    "target_tol", "talbot_nodes"},
//     "volterra":   {"dt", "scheme"},
//     "output":     {"dir", "name"}
//   }
//
// Reservoirs: {"kind": "lorentzian", "g", "gamma", "delta_c", "omega_c"?},
// {"kind": "ohmic", "g", "omega_c", "s_param"}, or {"kind": "tabulated", "g",
// "samples": [[omega, J], ...] | "file": path}. Unknown keys are rejected.
// Only "chain", "reservoirs" and "grid" are required.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spinchain/inversion.hpp"
#include "spinchain/model.hpp"
#include "spinchain/oracle.hpp"

namespace spinchain {

enum class Backend { Laplace, Volterra, Pseudomode, CrossCheck };

std::string to_string(Backend b);
Backend backend_from_string(std::string_view name);

struct InitialDescriptor {
    std::string preset;             // empty when amplitudes are explicit
    std::vector<cplx> amplitudes;
};

struct GridSpec {
    double t_max = 10.0;
    std::size_t n_points = 101;
};

struct OutputSpec {
    std::string dir = ".";
    std::string name = "run";
};

inline constexpr double kDefaultVolterraStep = 1e-3;

struct RunConfig {
    ChainSpec chain;
    ReservoirSpec left;
    ReservoirSpec right;
    bool shared_reservoir = false;  // written as "both"
    InitialDescriptor initial{"first-site", {}};
    GridSpec grid;
    std::optional<Backend> backend;
    InversionPlan inversion;
    std::optional<double> volterra_dt;  // target step; snapped to the grid lattice
    VolterraScheme volterra_scheme = VolterraScheme::PredictorCorrector2;
    OutputSpec output;
};

// Throws Error(ConfigError) on schema violations. Relative tabulated-density
// file paths are resolved against base_dir. A run-metadata sidecar is
// accepted in place of a config and yields its embedded config.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

// Fully resolved form: defaults filled in, backend chosen, tabulated
// samples embedded. Parsing the result reproduces the same RunConfig.
nlohmann::json to_json(const RunConfig& cfg);

InitialState resolve_initial(const InitialDescriptor& desc, int n_sites);
ValidatedConfig resolve(const RunConfig& cfg);
TimeGrid make_grid(const RunConfig& cfg);

// Lorentzian on both edges -> laplace; otherwise cross-check.
Backend effective_backend(const RunConfig& cfg);
VolterraConfig effective_volterra(const RunConfig& cfg);

// Sets a numeric scalar addressed by a dotted path, e.g. "chain.n_sites",
// "reservoirs.both.g", "reservoirs.left.s_param", "grid.t_max".
// Throws UnknownAxis for paths that do not name a field of this config.
void set_axis(RunConfig& cfg, std::string_view axis, double value);

}  // namespace spinchain
