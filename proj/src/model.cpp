#include "spinchain/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spinchain/errors.hpp"

namespace spinchain {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DimensionError: return "DimensionError";
        case ErrorKind::NormError: return "NormError";
        case ErrorKind::ParamError: return "ParamError";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::ConvergenceError: return "ConvergenceError";
        case ErrorKind::BranchError: return "BranchError";
        case ErrorKind::QuadratureError: return "QuadratureError";
        case ErrorKind::SingularPoint: return "SingularPoint";
        case ErrorKind::ConsistencyError: return "ConsistencyError";
        case ErrorKind::ContourError: return "ContourError";
        case ErrorKind::StepError: return "StepError";
        case ErrorKind::KindError: return "KindError";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::UnknownAxis: return "UnknownAxis";
        case ErrorKind::IoError: return "IoError";
    }
    return "Error";
}

std::string to_string(ReservoirKind kind) {
    switch (kind) {
        case ReservoirKind::Lorentzian: return "lorentzian";
        case ReservoirKind::Ohmic: return "ohmic";
        case ReservoirKind::Tabulated: return "tabulated";
    }
    return "unknown";
}

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::LaplaceInversion: return "LaplaceInversion";
        case Provenance::VolterraOracle: return "VolterraOracle";
        case Provenance::PseudomodeOracle: return "PseudomodeOracle";
    }
    return "unknown";
}

ReservoirKind ReservoirSpec::kind() const noexcept {
    switch (params.index()) {
        case 0: return ReservoirKind::Lorentzian;
        case 1: return ReservoirKind::Ohmic;
        default: return ReservoirKind::Tabulated;
    }
}

ReservoirSpec ReservoirSpec::lorentzian(double g, double gamma, double delta_c,
                                        std::optional<double> omega_c) {
    return ReservoirSpec{g, LorentzianParams{gamma, delta_c, omega_c}};
}

ReservoirSpec ReservoirSpec::ohmic(double g, double omega_c, double s_param) {
    return ReservoirSpec{g, OhmicParams{omega_c, s_param}};
}

ReservoirSpec ReservoirSpec::tabulated(double g, std::vector<double> omega, std::vector<double> density) {
    return ReservoirSpec{g, TabulatedParams{std::move(omega), std::move(density)}};
}

double InitialState::norm_squared() const noexcept {
    double acc = 0.0;
    for (const auto& c : amplitudes) acc += std::norm(c);
    return acc;
}

InitialState InitialState::localized(int n_sites, int site) {
    if (n_sites < 1 || site < 1 || site > n_sites) {
        fail(ErrorKind::DimensionError, "site index out of range for localized initial state");
    }
    InitialState s;
    s.amplitudes.assign(static_cast<std::size_t>(n_sites), cplx{0.0, 0.0});
    s.amplitudes[static_cast<std::size_t>(site - 1)] = 1.0;
    return s;
}

TimeGrid::TimeGrid(std::vector<double> t_values) : t_(std::move(t_values)) {
    for (std::size_t i = 0; i < t_.size(); ++i) {
        if (!std::isfinite(t_[i]) || t_[i] < 0.0) {
            fail(ErrorKind::ParamError, "time grid values must be finite and nonnegative");
        }
        if (i > 0 && !(t_[i] > t_[i - 1])) {
            fail(ErrorKind::ParamError, "time grid must be strictly increasing");
        }
    }
}

TimeGrid TimeGrid::uniform(double t_max, std::size_t n_points) {
    if (n_points == 0) return TimeGrid{};
    if (n_points == 1) return TimeGrid{std::vector<double>{t_max}};
    if (!(t_max > 0.0)) fail(ErrorKind::ParamError, "t_max must be positive");
    std::vector<double> t(n_points);
    const double step = t_max / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) t[i] = step * static_cast<double>(i);
    t.back() = t_max;
    return TimeGrid{std::move(t)};
}

Trajectory::Trajectory(TimeGrid g, std::size_t n, Provenance p)
    : grid(std::move(g)), n_sites(n), amplitudes(grid.size() * n), provenance(p) {}

std::optional<double> lorentzian_peak(const LorentzianParams& p, double omega_eg) {
    if (p.omega_c) return p.omega_c;
    if (omega_eg > 0.0) return omega_eg + p.delta_c;
    return std::nullopt;
}

void validate_reservoir(const ReservoirSpec& res, const char* side) {
    auto bad = [&](const std::string& what) {
        std::ostringstream os;
        os << side << " reservoir: " << what;
        fail(ErrorKind::ParamError, os.str());
    };
    if (!std::isfinite(res.g) || res.g < 0.0) bad("coupling g must be finite and >= 0");

    if (const auto* l = std::get_if<LorentzianParams>(&res.params)) {
        if (!(l->gamma > 0.0) || !std::isfinite(l->gamma)) bad("Lorentzian width gamma must be > 0");
        if (!std::isfinite(l->delta_c)) bad("Lorentzian detuning must be finite");
        if (l->omega_c && !(*l->omega_c > 0.0)) bad("Lorentzian peak frequency omega_c must be > 0");
    } else if (const auto* o = std::get_if<OhmicParams>(&res.params)) {
        if (!(o->omega_c > 0.0) || !std::isfinite(o->omega_c)) bad("Ohmic cutoff omega_c must be > 0");
        if (!(o->s_param > 0.0) || !std::isfinite(o->s_param)) bad("Ohmic exponent s must be > 0");
    } else {
        const auto& t = std::get<TabulatedParams>(res.params);
        if (t.omega.size() != t.density.size()) bad("tabulated omega/density length mismatch");
        if (t.omega.size() < 2) bad("tabulated density needs at least two samples");
        double area = 0.0;
        for (std::size_t i = 0; i < t.omega.size(); ++i) {
            if (!std::isfinite(t.omega[i]) || t.omega[i] < 0.0) bad("tabulated frequencies must be >= 0");
            if (!std::isfinite(t.density[i]) || t.density[i] < 0.0) bad("tabulated density must be >= 0");
            if (i > 0) {
                if (!(t.omega[i] > t.omega[i - 1])) bad("tabulated frequencies must be strictly increasing");
                area += 0.5 * (t.density[i] + t.density[i - 1]) * (t.omega[i] - t.omega[i - 1]);
            }
        }
        if (!(area > 0.0) && res.g > 0.0) bad("tabulated density has zero integral");
    }
}

ValidatedConfig validate(const ChainSpec& chain, const ReservoirSpec& left,
                         const ReservoirSpec& right, const InitialState& init) {
    if (chain.n_sites < 2) {
        fail(ErrorKind::DimensionError,
             "chain needs at least 2 sites, got " + std::to_string(chain.n_sites));
    }
    if (!(chain.coupling > 0.0) || !std::isfinite(chain.coupling)) {
        fail(ErrorKind::ParamError, "chain coupling J must be > 0");
    }
    if (!(chain.omega_eg >= 0.0) || !std::isfinite(chain.omega_eg)) {
        fail(ErrorKind::ParamError, "qubit transition frequency omega_eg must be >= 0");
    }
    validate_reservoir(left, "left");
    validate_reservoir(right, "right");

    if (init.size() != static_cast<std::size_t>(chain.n_sites)) {
        fail(ErrorKind::DimensionError, "initial state has " + std::to_string(init.size()) +
                                            " amplitudes for a chain of " +
                                            std::to_string(chain.n_sites) + " sites");
    }
    for (const auto& c : init.amplitudes) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
            fail(ErrorKind::NormError, "initial amplitudes must be finite");
        }
    }
    const double norm2 = init.norm_squared();
    if (std::abs(norm2 - 1.0) > kNormTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "initial state norm^2 = " << norm2 << ", expected 1";
        fail(ErrorKind::NormError, os.str());
    }

    ValidatedConfig out{chain, left, right, init, {}};
    auto check_extension = [&](const ReservoirSpec& r, const char* side) {
        const auto* l = std::get_if<LorentzianParams>(&r.params);
        if (!l) return;
        const auto peak = lorentzian_peak(*l, chain.omega_eg);
        if (!peak) return;
        if (*peak <= 0.0 || l->gamma > *peak / 5.0) {
            std::ostringstream os;
            os << side << " Lorentzian reservoir: width gamma=" << l->gamma
               << " is not small against peak frequency " << *peak
               << "; extending the frequency integral to negative frequencies is inaccurate";
            out.warnings.push_back(os.str());
        }
    };
    check_extension(left, "left");
    check_extension(right, "right");
    return out;
}

double max_total_population(const Trajectory& traj) {
    double worst = 0.0;
    for (std::size_t ti = 0; ti < traj.grid.size(); ++ti) {
        double p = 0.0;
        for (const auto& c : traj.at(ti)) p += std::norm(c);
        worst = std::max(worst, p);
    }
    return worst;
}

}  // namespace spinchain
