#include "spinchain/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "spinchain/errors.hpp"
#include "spinchain/kernels.hpp"

namespace spinchain {
namespace {

using nlohmann::json;

constexpr std::string_view kMetadataSchema = "spinchain.run-metadata/1";

[[noreturn]] void config_error(const std::string& msg) { fail(ErrorKind::ConfigError, msg); }

// Reads an object's fields and rejects whatever was not asked for.
class Fields {
public:
    Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) config_error(where_ + " must be a JSON object");
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& require(const std::string& key) {
        const json* v = find(key);
        if (!v) config_error(where_ + ": missing required key '" + key + "'");
        return *v;
    }

    double number(const std::string& key, double fallback) {
        const json* v = find(key);
        return v ? as_number(*v, key) : fallback;
    }

    double required_number(const std::string& key) { return as_number(require(key), key); }

    std::optional<double> optional_number(const std::string& key) {
        const json* v = find(key);
        if (!v || v->is_null()) return std::nullopt;
        return as_number(*v, key);
    }

    long long integer(const std::string& key, long long fallback) {
        const json* v = find(key);
        return v ? as_integer(*v, key) : fallback;
    }

    long long required_integer(const std::string& key) { return as_integer(require(key), key); }

    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_string()) config_error(where_ + "." + key + " must be a string");
        return v->get<std::string>();
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) config_error(where_ + ": unknown key '" + key + "'");
        }
    }

    const std::string& where() const noexcept { return where_; }

private:
    double as_number(const json& v, const std::string& key) const {
        if (!v.is_number()) config_error(where_ + "." + key + " must be a number");
        return v.get<double>();
    }

    long long as_integer(const json& v, const std::string& key) const {
        if (!v.is_number()) config_error(where_ + "." + key + " must be an integer");
        const double d = v.get<double>();
        if (d != std::floor(d) || std::abs(d) > 1e15) config_error(where_ + "." + key + " must be an integer");
        return static_cast<long long>(d);
    }

    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

std::vector<std::pair<double, double>> read_pairs(const json& j, const std::string& where) {
    if (!j.is_array()) config_error(where + " must be an array of [x, y] pairs");
    std::vector<std::pair<double, double>> out;
    out.reserve(j.size());
    for (const auto& item : j) {
        if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number()) {
            config_error(where + " entries must be [number, number]");
        }
        out.emplace_back(item[0].get<double>(), item[1].get<double>());
    }
    return out;
}

ReservoirSpec parse_reservoir(const json& j, const std::string& where, const std::filesystem::path& base_dir) {
    Fields f(j, where);
    const std::string kind = f.string("kind", "");
    const double g = f.required_number("g");
    ReservoirSpec res;
    if (kind == "lorentzian") {
        const double gamma = f.required_number("gamma");
        const double delta_c = f.number("delta_c", 0.0);
        res = ReservoirSpec::lorentzian(g, gamma, delta_c, f.optional_number("omega_c"));
    } else if (kind == "ohmic") {
        res = ReservoirSpec::ohmic(g, f.number("omega_c", 1.0), f.number("s_param", 1.0));
    } else if (kind == "tabulated") {
        const json* samples = f.find("samples");
        const json* file = f.find("file");
        if ((samples == nullptr) == (file == nullptr)) {
            config_error(where + ": tabulated reservoir needs exactly one of 'samples' or 'file'");
        }
        TabulatedParams tab;
        if (samples) {
            for (const auto& [w, d] : read_pairs(*samples, where + ".samples")) {
                tab.omega.push_back(w);
                tab.density.push_back(d);
            }
        } else {
            if (!file->is_string()) config_error(where + ".file must be a string");
            std::filesystem::path p = file->get<std::string>();
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            tab = load_tabulated_density(p);
        }
        res = ReservoirSpec::tabulated(g, std::move(tab.omega), std::move(tab.density));
    } else {
        config_error(where + ".kind must be one of lorentzian, ohmic, tabulated");
    }
    f.finish();
    return res;
}

json reservoir_to_json(const ReservoirSpec& r) {
    json j;
    j["g"] = r.g;
    if (const auto* l = std::get_if<LorentzianParams>(&r.params)) {
        j["kind"] = "lorentzian";
        j["gamma"] = l->gamma;
        j["delta_c"] = l->delta_c;
        if (l->omega_c) j["omega_c"] = *l->omega_c;
    } else if (const auto* o = std::get_if<OhmicParams>(&r.params)) {
        j["kind"] = "ohmic";
        j["omega_c"] = o->omega_c;
        j["s_param"] = o->s_param;
    } else {
        const auto& t = std::get<TabulatedParams>(r.params);
        j["kind"] = "tabulated";
        json samples = json::array();
        for (std::size_t i = 0; i < t.omega.size(); ++i) samples.push_back({t.omega[i], t.density[i]});
        j["samples"] = std::move(samples);
    }
    return j;
}

InversionPlan parse_inversion(const json& j) {
    Fields f(j, "inversion");
    InversionPlan p;
    p.method = inversion_method_from_string(f.string("method", to_string(p.method)));
    p.contour_shift = f.number("contour_shift", p.contour_shift);
    p.n_terms = static_cast<int>(f.integer("n_terms", p.n_terms));
    p.euler_depth = static_cast<int>(f.integer("euler_depth", p.euler_depth));
    p.target_tol = f.number("target_tol", p.target_tol);
    p.talbot_nodes = static_cast<int>(f.integer("talbot_nodes", p.talbot_nodes));
    f.finish();
    p.validate();
    return p;
}

void check_preset(const std::string& name) {
    for (const char* known : {"first-site", "last-site", "center", "uniform-channel"}) {
        if (name == known) return;
    }
    config_error("unknown initial preset '" + name + "'");
}

InitialDescriptor parse_initial(const json& j) {
    if (j.is_string()) {
        check_preset(j.get<std::string>());
        return {j.get<std::string>(), {}};
    }
    Fields f(j, "initial");
    InitialDescriptor d;
    if (const json* preset = f.find("preset")) {
        if (!preset->is_string()) config_error("initial.preset must be a string");
        d.preset = preset->get<std::string>();
        check_preset(d.preset);
    }
    if (const json* amps = f.find("amplitudes")) {
        if (!d.preset.empty()) config_error("initial: give either 'preset' or 'amplitudes', not both");
        for (const auto& [re, im] : read_pairs(*amps, "initial.amplitudes")) d.amplitudes.emplace_back(re, im);
    }
    f.finish();
    if (d.preset.empty() && d.amplitudes.empty()) config_error("initial: needs 'preset' or 'amplitudes'");
    return d;
}

RunConfig parse_body(const json& root, const std::filesystem::path& base_dir) {
    Fields top(root, "config");
    RunConfig cfg;

    {
        Fields f(top.require("chain"), "chain");
        const long long n = f.required_integer("n_sites");
        if (n > 100000 || n < -100000) config_error("chain.n_sites out of range");
        cfg.chain.n_sites = static_cast<int>(n);
        cfg.chain.coupling = f.number("coupling", 1.0);
        cfg.chain.omega_eg = f.number("omega_eg", 0.0);
        f.finish();
    }
    {
        Fields f(top.require("reservoirs"), "reservoirs");
        const json* both = f.find("both");
        const json* left = f.find("left");
        const json* right = f.find("right");
        if (both && (left || right)) config_error("reservoirs: 'both' excludes 'left'/'right'");
        if (both) {
            cfg.left = cfg.right = parse_reservoir(*both, "reservoirs.both", base_dir);
            cfg.shared_reservoir = true;
        } else {
            if (!left || !right) config_error("reservoirs: need 'both' or both of 'left' and 'right'");
            cfg.left = parse_reservoir(*left, "reservoirs.left", base_dir);
            cfg.right = parse_reservoir(*right, "reservoirs.right", base_dir);
        }
        f.finish();
    }
    if (const json* init = top.find("initial")) cfg.initial = parse_initial(*init);
    {
        Fields f(top.require("grid"), "grid");
        cfg.grid.t_max = f.required_number("t_max");
        const long long pts = f.required_integer("n_points");
        if (pts < 1) config_error("grid.n_points must be at least 1");
        cfg.grid.n_points = static_cast<std::size_t>(pts);
        f.finish();
        if (!(cfg.grid.t_max >= 0.0) || !std::isfinite(cfg.grid.t_max)) config_error("grid.t_max must be >= 0");
        if (cfg.grid.t_max > 0.0 && cfg.grid.n_points < 2) config_error("grid.n_points must be >= 2 when t_max > 0");
    }
    if (const json* b = top.find("backend")) {
        if (!b->is_string()) config_error("backend must be a string");
        cfg.backend = backend_from_string(b->get<std::string>());
    }
    if (const json* inv = top.find("inversion")) cfg.inversion = parse_inversion(*inv);
    if (const json* vol = top.find("volterra")) {
        Fields f(*vol, "volterra");
        cfg.volterra_dt = f.optional_number("dt");
        cfg.volterra_scheme = volterra_scheme_from_string(f.string("scheme", to_string(cfg.volterra_scheme)));
        f.finish();
    }
    if (const json* out = top.find("output")) {
        Fields f(*out, "output");
        cfg.output.dir = f.string("dir", cfg.output.dir);
        cfg.output.name = f.string("name", cfg.output.name);
        f.finish();
        if (cfg.output.name.empty() || cfg.output.name.find('/') != std::string::npos) {
            config_error("output.name must be a plain file stem");
        }
    }
    top.finish();
    return cfg;
}

double& reservoir_field(ReservoirSpec& r, std::string_view field, std::string_view axis) {
    if (field == "g") return r.g;
    if (auto* l = std::get_if<LorentzianParams>(&r.params)) {
        if (field == "gamma") return l->gamma;
        if (field == "delta_c") return l->delta_c;
        if (field == "omega_c") {
            if (!l->omega_c) l->omega_c = 0.0;
            return *l->omega_c;
        }
    } else if (auto* o = std::get_if<OhmicParams>(&r.params)) {
        if (field == "omega_c") return o->omega_c;
        if (field == "s_param") return o->s_param;
    }
    fail(ErrorKind::UnknownAxis, "axis '" + std::string(axis) + "' does not name a parameter of a " +
                                     to_string(r.kind()) + " reservoir");
}

}  // namespace

std::string to_string(Backend b) {
    switch (b) {
        case Backend::Laplace: return "laplace";
        case Backend::Volterra: return "volterra";
        case Backend::Pseudomode: return "pseudomode";
        case Backend::CrossCheck: return "cross-check";
    }
    return "laplace";
}

Backend backend_from_string(std::string_view name) {
    if (name == "laplace") return Backend::Laplace;
    if (name == "volterra") return Backend::Volterra;
    if (name == "pseudomode") return Backend::Pseudomode;
    if (name == "cross-check") return Backend::CrossCheck;
    config_error("unknown backend '" + std::string(name) + "'");
}

RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir) {
    try {
        if (j.is_object() && j.contains("schema")) {
            if (j["schema"] != kMetadataSchema) config_error("unrecognized schema tag");
            if (!j.contains("config")) config_error("metadata sidecar without a 'config' entry");
            return parse_body(j["config"], base_dir);
        }
        return parse_body(j, base_dir);
    } catch (const json::exception& e) {
        config_error(std::string("malformed config: ") + e.what());
    }
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::IoError, "cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        config_error("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_run_config(j, path.parent_path());
}

json to_json(const RunConfig& cfg) {
    json j;
    j["chain"] = {{"n_sites", cfg.chain.n_sites}, {"coupling", cfg.chain.coupling}, {"omega_eg", cfg.chain.omega_eg}};
    if (cfg.shared_reservoir && cfg.left == cfg.right) {
        j["reservoirs"] = {{"both", reservoir_to_json(cfg.left)}};
    } else {
        j["reservoirs"] = {{"left", reservoir_to_json(cfg.left)}, {"right", reservoir_to_json(cfg.right)}};
    }
    if (!cfg.initial.preset.empty()) {
        j["initial"] = cfg.initial.preset;
    } else {
        json amps = json::array();
        for (const cplx& c : cfg.initial.amplitudes) amps.push_back({c.real(), c.imag()});
        j["initial"] = {{"amplitudes", std::move(amps)}};
    }
    j["grid"] = {{"t_max", cfg.grid.t_max}, {"n_points", cfg.grid.n_points}};
    j["backend"] = to_string(effective_backend(cfg));
    const InversionPlan& p = cfg.inversion;
    j["inversion"] = {{"method", to_string(p.method)},     {"contour_shift", p.contour_shift},
                      {"n_terms", p.n_terms},             {"euler_depth", p.euler_depth},
                      {"target_tol", p.target_tol},       {"talbot_nodes", p.talbot_nodes}};
    j["volterra"] = {{"dt", effective_volterra(cfg).dt}, {"scheme", to_string(cfg.volterra_scheme)}};
    j["output"] = {{"dir", cfg.output.dir}, {"name", cfg.output.name}};
    return j;
}

InitialState resolve_initial(const InitialDescriptor& desc, int n) {
    if (desc.preset.empty()) return InitialState{desc.amplitudes};
    if (n < 1) fail(ErrorKind::DimensionError, "chain needs at least 2 sites");
    if (desc.preset == "first-site") return InitialState::localized(n, 1);
    if (desc.preset == "last-site") return InitialState::localized(n, n);
    if (desc.preset == "center") {
        if (n % 2 == 0) config_error("initial preset 'center' requires an odd number of sites");
        return InitialState::localized(n, (n + 1) / 2);
    }
    if (desc.preset == "uniform-channel") {
        if (n < 3) config_error("initial preset 'uniform-channel' requires at least 3 sites");
        InitialState s{std::vector<cplx>(static_cast<std::size_t>(n), 0.0)};
        const double a = 1.0 / std::sqrt(static_cast<double>(n - 2));
        for (int i = 1; i + 1 < n; ++i) s.amplitudes[static_cast<std::size_t>(i)] = a;
        return s;
    }
    config_error("unknown initial preset '" + desc.preset + "'");
}

ValidatedConfig resolve(const RunConfig& cfg) {
    if (cfg.chain.n_sites < 2) fail(ErrorKind::DimensionError, "chain needs at least 2 sites (got " + std::to_string(cfg.chain.n_sites) + ")");
    return validate(cfg.chain, cfg.left, cfg.right, resolve_initial(cfg.initial, cfg.chain.n_sites));
}

TimeGrid make_grid(const RunConfig& cfg) {
    if (cfg.grid.t_max == 0.0) return TimeGrid({0.0});
    return TimeGrid::uniform(cfg.grid.t_max, cfg.grid.n_points);
}

Backend effective_backend(const RunConfig& cfg) {
    if (cfg.backend) return *cfg.backend;
    const bool lorentzian = cfg.left.kind() == ReservoirKind::Lorentzian && cfg.right.kind() == ReservoirKind::Lorentzian;
    return lorentzian ? Backend::Laplace : Backend::CrossCheck;
}

VolterraConfig effective_volterra(const RunConfig& cfg) {
    const double target = cfg.volterra_dt.value_or(kDefaultVolterraStep / cfg.chain.coupling);
    return {lattice_step(make_grid(cfg), target), cfg.volterra_scheme};
}

void set_axis(RunConfig& cfg, std::string_view axis, double value) {
    auto unknown = [&] { fail(ErrorKind::UnknownAxis, "unknown sweep axis '" + std::string(axis) + "'"); };
    if (axis == "chain.n_sites") {
        if (value != std::floor(value)) fail(ErrorKind::ConfigError, "chain.n_sites values must be integers");
        cfg.chain.n_sites = static_cast<int>(value);
        return;
    }
    if (axis == "chain.coupling") { cfg.chain.coupling = value; return; }
    if (axis == "chain.omega_eg") { cfg.chain.omega_eg = value; return; }
    if (axis == "grid.t_max") { cfg.grid.t_max = value; return; }
    if (axis == "grid.n_points") {
        if (value != std::floor(value) || value < 1) fail(ErrorKind::ConfigError, "grid.n_points values must be positive integers");
        cfg.grid.n_points = static_cast<std::size_t>(value);
        return;
    }
    if (axis == "volterra.dt") { cfg.volterra_dt = value; return; }
    constexpr std::string_view prefix = "reservoirs.";
    if (axis.substr(0, prefix.size()) != prefix) unknown();
    const std::string_view rest = axis.substr(prefix.size());
    const auto dot = rest.find('.');
    if (dot == std::string_view::npos) unknown();
    const std::string_view side = rest.substr(0, dot);
    const std::string_view field = rest.substr(dot + 1);
    if (side == "both") {
        reservoir_field(cfg.left, field, axis) = value;
        reservoir_field(cfg.right, field, axis) = value;
    } else if (side == "left") {
        reservoir_field(cfg.left, field, axis) = value;
        cfg.shared_reservoir = false;
    } else if (side == "right") {
        reservoir_field(cfg.right, field, axis) = value;
        cfg.shared_reservoir = false;
    } else {
        unknown();
    }
}

}  // namespace spinchain
