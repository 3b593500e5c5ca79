// spinchain: run, sweep and validate chain configurations.
//
//   spinchain run <config.json> [--backend B] [--out-dir D] [--tol T]
//   spinchain sweep <config.json> --axis PATH --values LIST [--jobs J] ...
//   spinchain validate <config.json>
//
// On failure a JSON diagnostic {"status", "error", "message"} goes to stdout
// and the exit status is nonzero (2 config, 3 solver, 4 io).

#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "spinchain/config.hpp"
#include "spinchain/errors.hpp"
#include "spinchain/runner.hpp"

namespace {

using nlohmann::json;
using namespace spinchain;

struct CommonOptions {
    std::string config_path;
    std::string backend;
    std::string out_dir;
    std::optional<double> tol;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("config", opts.config_path, "run configuration (JSON) or metadata sidecar")->required();
    cmd->add_option("--backend", opts.backend, "laplace | volterra | pseudomode | cross-check");
    cmd->add_option("--out-dir", opts.out_dir, "output directory (overrides output.dir)");
    cmd->add_option("--tol", opts.tol, "inversion target tolerance");
}

RunConfig load_with_overrides(const CommonOptions& opts) {
    RunConfig cfg = load_run_config(opts.config_path);
    if (!opts.backend.empty()) cfg.backend = backend_from_string(opts.backend);
    if (!opts.out_dir.empty()) cfg.output.dir = opts.out_dir;
    if (opts.tol) {
        cfg.inversion.target_tol = *opts.tol;
        cfg.inversion.validate();
    }
    return cfg;
}

int report_failure(const Error& e) {
    std::cout << error_report(e).dump() << '\n';
    log_message(LogLevel::Error, e.what());
    return exit_code_for(e.kind());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-excitation dynamics of an XX spin chain between two structured reservoirs"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    CLI::App* run = app.add_subcommand("run", "execute one configuration");
    add_common(run, run_opts);

    CommonOptions sweep_opts;
    std::string axis;
    std::string values;
    unsigned jobs = 1;
    CLI::App* sweep = app.add_subcommand("sweep", "execute one configuration per axis value");
    add_common(sweep, sweep_opts);
    sweep->add_option("--axis", axis, "dotted parameter path, e.g. reservoirs.both.g")->required();
    sweep->add_option("--values", values, "comma list or start:stop:step")->required();
    sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    CommonOptions validate_opts;
    CLI::App* validate_cmd = app.add_subcommand("validate", "check a configuration without running it");
    add_common(validate_cmd, validate_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run) {
            const RunConfig cfg = load_with_overrides(run_opts);
            const RunOutcome outcome = execute(cfg);
            const RunFiles files = write_run(outcome, cfg.output.dir, cfg.output.name);
            json ok = {{"status", "ok"},
                       {"backend", to_string(outcome.backend)},
                       {"csv", files.csv.string()},
                       {"metadata", files.metadata.string()}};
            if (!files.cross_check.empty()) ok["cross_check"] = files.cross_check.string();
            std::cout << ok.dump() << '\n';
            return 0;
        }
        if (*sweep) {
            const RunConfig cfg = load_with_overrides(sweep_opts);
            const std::vector<double> list = parse_value_list(values);
            const SweepResult res = run_sweep(cfg, axis, list, jobs, cfg.output.dir);
            std::cout << json{{"status", "ok"},
                              {"points", res.points.size()},
                              {"failures", res.failures()},
                              {"summary", (std::filesystem::path(cfg.output.dir) / (cfg.output.name + ".summary.csv")).string()}}
                             .dump()
                      << '\n';
            return 0;
        }
        const RunConfig cfg = load_with_overrides(validate_opts);
        const ValidatedConfig model = resolve(cfg);
        make_grid(cfg);
        std::cout << json{{"status", "ok"}, {"config", to_json(cfg)}, {"warnings", model.warnings}}.dump(2) << '\n';
        return 0;
    } catch (const Error& e) {
        return report_failure(e);
    } catch (const std::exception& e) {
        std::cout << json{{"status", "internal-error"}, {"error", "InternalError"}, {"message", e.what()}}.dump() << '\n';
        return 1;
    }
}
