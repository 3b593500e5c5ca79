#include "spinchain/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "spinchain/inversion.hpp"
#include "spinchain/observables.hpp"
#include "spinchain/oracle.hpp"

namespace spinchain {
namespace {

using nlohmann::json;

double max_deviation(const Trajectory& a, const Trajectory& b) {
    double w = 0.0;
    for (std::size_t i = 0; i < a.amplitudes.size(); ++i) w = std::max(w, std::abs(a.amplitudes[i] - b.amplitudes[i]));
    return w;
}

double max_population_deviation(const Trajectory& a, const Trajectory& b) {
    double w = 0.0;
    for (std::size_t i = 0; i < a.amplitudes.size(); ++i) {
        w = std::max(w, std::abs(std::norm(a.amplitudes[i]) - std::norm(b.amplitudes[i])));
    }
    return w;
}

json inversion_diagnostics(const InversionResult& r) {
    const auto& d = r.diagnostics;
    return {{"evaluations", d.evaluations},
            {"points_over_tolerance", d.points_over_tolerance},
            {"contour_retries", d.contour_retries},
            {"talbot_fallbacks", d.talbot_fallbacks},
            {"max_error_estimate", d.max_error},
            {"max_terms_used", d.max_terms_used},
            {"tolerance_met", d.tolerance_met()}};
}

std::mutex& log_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

LogLevel log_level_from_env() {
    const char* v = std::getenv("SPINCHAIN_LOG");
    if (!v) return LogLevel::Warn;
    const std::string_view s(v);
    if (s == "error") return LogLevel::Error;
    if (s == "info") return LogLevel::Info;
    if (s == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
}

void log_message(LogLevel level, std::string_view msg) {
    static const LogLevel threshold = log_level_from_env();
    if (level > threshold) return;
    static constexpr std::string_view names[] = {"error", "warn", "info", "debug"};
    std::lock_guard lock(log_mutex());
    std::cerr << "spinchain [" << names[static_cast<int>(level)] << "] " << msg << '\n';
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

RunOutcome execute(const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    RunOutcome out;
    out.config = cfg;
    out.backend = effective_backend(cfg);
    const ValidatedConfig model = resolve(cfg);
    out.warnings = model.warnings;
    for (const auto& w : model.warnings) log_message(LogLevel::Warn, w);
    const TimeGrid grid = make_grid(cfg);
    const LaplaceState state(model);

    auto run_laplace = [&] {
        InversionResult r = invert(state, cfg.inversion, grid);
        out.diagnostics["inversion"] = inversion_diagnostics(r);
        if (!r.diagnostics.tolerance_met()) {
            const std::string w = "ToleranceNotMet: " + std::to_string(r.diagnostics.points_over_tolerance) +
                                  " time points above target_tol " + format_double(cfg.inversion.target_tol);
            out.warnings.push_back(w);
            log_message(LogLevel::Warn, w);
        }
        return std::move(r.trajectory);
    };
    auto run_volterra = [&] {
        const VolterraConfig vc = effective_volterra(cfg);
        out.diagnostics["volterra"] = {{"dt", vc.dt}, {"scheme", to_string(vc.scheme)}};
        return solve_volterra(state, vc, grid);
    };
    auto run_pseudomode = [&] {
        out.diagnostics["pseudomode"] = {{"abs_tol", kPseudomodeAbsTol}, {"rel_tol", kPseudomodeRelTol}};
        return solve_pseudomode(PseudomodeSystem::from(state), grid);
    };

    switch (out.backend) {
        case Backend::Laplace: out.trajectory = run_laplace(); break;
        case Backend::Volterra: out.trajectory = run_volterra(); break;
        case Backend::Pseudomode: out.trajectory = run_pseudomode(); break;
        case Backend::CrossCheck: {
            out.trajectory = run_laplace();
            const bool lorentzian = state.meromorphic();
            const Trajectory oracle = lorentzian ? run_pseudomode() : run_volterra();
            const double tol = lorentzian ? kPseudomodeCrossCheckTolerance : kVolterraCrossCheckTolerance;
            const double dev = max_deviation(out.trajectory, oracle);
            out.cross_check = {{"reference", to_string(out.trajectory.provenance)},
                               {"oracle", to_string(oracle.provenance)},
                               {"max_amplitude_deviation", dev},
                               {"max_population_deviation", max_population_deviation(out.trajectory, oracle)},
                               {"tolerance", tol},
                               {"within_tolerance", dev < tol}};
            if (!(dev < tol)) {
                log_message(LogLevel::Warn, "cross-check deviation " + format_double(dev) + " exceeds " + format_double(tol));
            }
            break;
        }
    }

    const double peak = max_total_population(out.trajectory);
    out.diagnostics["max_total_population"] = peak;
    if (peak > 1.0 + kLeakageTolerance) {
        const std::string w = "total population exceeds 1 by " + format_double(peak - 1.0);
        out.warnings.push_back(w);
        log_message(LogLevel::Warn, w);
    }
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::string trajectory_csv(const Trajectory& traj) {
    const std::size_t n = traj.n_sites;
    const Populations pops = populations(traj);
    const ObservableSeries fid = fidelity(traj);
    std::string s = "t";
    for (std::size_t i = 1; i <= n; ++i) s += ",re_c" + std::to_string(i) + ",im_c" + std::to_string(i);
    for (std::size_t i = 1; i <= n; ++i) s += ",P_" + std::to_string(i);
    s += ",P_channel,P_total,fidelity\n";
    for (std::size_t ti = 0; ti < traj.grid.size(); ++ti) {
        s += format_double(traj.grid[ti]);
        for (std::size_t i = 0; i < n; ++i) {
            const cplx c = traj.amplitude(ti, i);
            s += ',' + format_double(c.real()) + ',' + format_double(c.imag());
        }
        for (std::size_t i = 0; i < n; ++i) s += ',' + format_double(pops.sites[i].values[ti]);
        s += ',' + format_double(pops.channel.values[ti]);
        s += ',' + format_double(pops.total.values[ti]);
        s += ',' + format_double(fid.values[ti]);
        s += '\n';
    }
    return s;
}

json run_metadata(const RunOutcome& o) {
    json j;
    j["schema"] = kMetadataSchemaTag;
    j["config"] = to_json(o.config);
    j["backend"] = to_string(o.backend);
    j["provenance"] = to_string(o.trajectory.provenance);
    j["warnings"] = o.warnings;
    j["diagnostics"] = o.diagnostics;
    if (!o.trajectory.error_estimate.empty()) j["error_estimate"] = o.trajectory.error_estimate;
    if (!o.cross_check.is_null()) j["cross_check"] = o.cross_check;
    j["wall_time_s"] = o.wall_seconds;
    return j;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorKind::IoError, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) fail(ErrorKind::IoError, "cannot open " + tmp.string() + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) fail(ErrorKind::IoError, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(ErrorKind::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

RunFiles write_run(const RunOutcome& outcome, const std::filesystem::path& dir, const std::string& name) {
    RunFiles files{dir / (name + ".csv"), dir / (name + ".json"), {}};
    write_atomic(files.csv, trajectory_csv(outcome.trajectory));
    if (!outcome.cross_check.is_null()) {
        files.cross_check = dir / (name + ".crosscheck.json");
        write_atomic(files.cross_check, outcome.cross_check.dump(2) + "\n");
    }
    write_atomic(files.metadata, run_metadata(outcome).dump(2) + "\n");
    return files;
}

std::size_t SweepResult::failures() const noexcept {
    return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const SweepPoint& p) { return p.status != "ok"; }));
}

SweepResult run_sweep(const RunConfig& base, std::string_view axis, std::span<const double> values,
                      unsigned jobs, const std::filesystem::path& dir) {
    {
        RunConfig probe = base;
        set_axis(probe, axis, 1.0);  // throws UnknownAxis
    }
    SweepResult result{std::string(axis), std::vector<SweepPoint>(values.size())};
    const std::size_t width = std::max<std::size_t>(3, std::to_string(values.size()).size());

    auto run_point = [&](std::size_t i) {
        SweepPoint& p = result.points[i];
        p.index = i;
        p.value = values[i];
        std::string idx = std::to_string(i);
        p.stem = base.output.name + "_" + std::string(width - idx.size(), '0') + idx;
        try {
            RunConfig cfg = base;
            set_axis(cfg, axis, values[i]);
            cfg.output.name = p.stem;
            const RunOutcome o = execute(cfg);
            write_run(o, dir, p.stem);
            const Populations pops = populations(o.trajectory);
            const ObservableSeries fid = fidelity(o.trajectory);
            const Peak peak = refined_maximum(o.trajectory.grid, fid.values);
            p.p_total_end = pops.total.values.back();
            p.max_fidelity = peak.value;
            p.argmax_t = peak.time;
        } catch (const Error& e) {
            p.status = std::string(e.kind_name());
            p.message = e.what();
            log_message(LogLevel::Warn, "sweep point " + std::to_string(i) + " failed: " + p.message);
        } catch (const std::exception& e) {
            p.status = "InternalError";
            p.message = e.what();
            log_message(LogLevel::Error, "sweep point " + std::to_string(i) + " failed: " + p.message);
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(values.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) run_point(i);
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }

    write_atomic(dir / (base.output.name + ".summary.csv"), sweep_summary_csv(result));
    write_atomic(dir / (base.output.name + ".summary.json"), sweep_summary_json(result).dump(2) + "\n");
    return result;
}

std::string sweep_summary_csv(const SweepResult& sweep) {
    std::string s = "index,value,status,P_total_end,max_fidelity,argmax_t,stem\n";
    for (const auto& p : sweep.points) {
        const bool ok = p.status == "ok";
        s += std::to_string(p.index) + ',' + format_double(p.value) + ',' + p.status + ',';
        s += (ok ? format_double(p.p_total_end) : "nan") + ',';
        s += (ok ? format_double(p.max_fidelity) : "nan") + ',';
        s += (ok ? format_double(p.argmax_t) : "nan") + ',';
        s += p.stem + '\n';
    }
    return s;
}

json sweep_summary_json(const SweepResult& sweep) {
    json pts = json::array();
    for (const auto& p : sweep.points) {
        json row = {{"index", p.index}, {"value", p.value}, {"status", p.status}, {"stem", p.stem}};
        if (p.status == "ok") {
            row["P_total_end"] = p.p_total_end;
            row["max_fidelity"] = p.max_fidelity;
            row["argmax_t"] = p.argmax_t;
        } else {
            row["message"] = p.message;
        }
        pts.push_back(std::move(row));
    }
    return {{"axis", sweep.axis}, {"points", std::move(pts)}, {"failures", sweep.failures()}};
}

std::vector<double> parse_value_list(std::string_view text) {
    auto number = [&](std::string_view tok) {
        while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
        while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
        double v = 0.0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || tok.empty()) {
            fail(ErrorKind::ConfigError, "bad number '" + std::string(tok) + "' in value list");
        }
        return v;
    };
    std::vector<double> out;
    if (text.find_first_not_of(' ') == std::string_view::npos) return out;
    if (text.find(':') != std::string_view::npos) {
        const auto c1 = text.find(':');
        const auto c2 = text.find(':', c1 + 1);
        if (c2 == std::string_view::npos) fail(ErrorKind::ConfigError, "range must be start:stop:step");
        const double a = number(text.substr(0, c1));
        const double b = number(text.substr(c1 + 1, c2 - c1 - 1));
        const double step = number(text.substr(c2 + 1));
        if (!(step > 0.0) || b < a) fail(ErrorKind::ConfigError, "range needs step > 0 and stop >= start");
        const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * step);
        return out;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto end = comma == std::string_view::npos ? text.size() : comma;
        out.push_back(number(text.substr(pos, end - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string error_status(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ConfigError:
        case ErrorKind::DimensionError:
        case ErrorKind::NormError:
        case ErrorKind::ParamError:
        case ErrorKind::UnknownAxis:
        case ErrorKind::KindError:
        case ErrorKind::StepError:
            return "config-error";
        case ErrorKind::IoError:
            return "io-error";
        default:
            return "solver-error";
    }
}

int exit_code_for(ErrorKind kind) {
    const std::string s = error_status(kind);
    if (s == "config-error") return 2;
    if (s == "io-error") return 4;
    return 3;
}

json error_report(const Error& e) {
    return {{"status", error_status(e.kind())}, {"error", std::string(e.kind_name())}, {"message", e.what()}};
}

}  // namespace spinchain
