#pragma once

// Domain types shared by every solver path.
//
// Units: the qubit-qubit coupling J is the reference scale, frequencies are
// in units of J and times in units of 1/J. Amplitudes are the rotating-frame
// amplitudes; the global phase exp(-i[w_e + (N-1) w_g] t) is never formed.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace spinchain {

using cplx = std::complex<double>;

struct ChainSpec {
    int n_sites = 2;
    double coupling = 1.0;  // J
    double omega_eg = 0.0;  // w_e - w_g

    // k = 2 / J, the scale of the Laplace-space recursion.
    double k() const noexcept { return 2.0 / coupling; }
};

enum class ReservoirKind { Lorentzian, Ohmic, Tabulated };

std::string to_string(ReservoirKind kind);

// Lorentzian peak, parameterized by its detuning from the qubit transition.
// omega_c is optional: it only feeds the negative-frequency validity warning.
struct LorentzianParams {
    double gamma = 0.0;
    double delta_c = 0.0;
    std::optional<double> omega_c;

    bool operator==(const LorentzianParams&) const = default;
};

struct OhmicParams {
    double omega_c = 1.0;
    double s_param = 1.0;

    bool operator==(const OhmicParams&) const = default;
};

// Piecewise-linear density through the samples, zero outside them. The
// samples fix the shape only; the kernel is rescaled so that its integral
// equals g^2.
struct TabulatedParams {
    std::vector<double> omega;
    std::vector<double> density;

    bool operator==(const TabulatedParams&) const = default;
};

struct ReservoirSpec {
    double g = 0.0;
    std::variant<LorentzianParams, OhmicParams, TabulatedParams> params;

    ReservoirKind kind() const noexcept;

    static ReservoirSpec lorentzian(double g, double gamma, double delta_c,
                                    std::optional<double> omega_c = std::nullopt);
    static ReservoirSpec ohmic(double g, double omega_c, double s_param);
    static ReservoirSpec tabulated(double g, std::vector<double> omega, std::vector<double> density);

    bool operator==(const ReservoirSpec&) const = default;
};

struct InitialState {
    std::vector<cplx> amplitudes;

    std::size_t size() const noexcept { return amplitudes.size(); }
    double norm_squared() const noexcept;

    // Excitation localized on site `site` (1-based).
    static InitialState localized(int n_sites, int site);
};

class TimeGrid {
public:
    TimeGrid() = default;
    explicit TimeGrid(std::vector<double> t_values);

    // n_points evenly spaced values on [0, t_max].
    static TimeGrid uniform(double t_max, std::size_t n_points);

    std::span<const double> values() const noexcept { return t_; }
    std::size_t size() const noexcept { return t_.size(); }
    bool empty() const noexcept { return t_.empty(); }
    double operator[](std::size_t i) const { return t_[i]; }
    double back() const { return t_.back(); }

private:
    std::vector<double> t_;
};

enum class Provenance { LaplaceInversion, VolterraOracle, PseudomodeOracle };

std::string to_string(Provenance p);

// Amplitudes stored time-major: amplitude(ti, site) with 0-based site index.
struct Trajectory {
    TimeGrid grid;
    std::size_t n_sites = 0;
    std::vector<cplx> amplitudes;
    Provenance provenance = Provenance::LaplaceInversion;
    // Per-time-point error estimate (max over sites). Empty for oracle paths.
    std::vector<double> error_estimate;

    Trajectory() = default;
    Trajectory(TimeGrid g, std::size_t n, Provenance p);

    cplx& amplitude(std::size_t ti, std::size_t site) { return amplitudes[ti * n_sites + site]; }
    cplx amplitude(std::size_t ti, std::size_t site) const { return amplitudes[ti * n_sites + site]; }
    std::span<const cplx> at(std::size_t ti) const {
        return {amplitudes.data() + ti * n_sites, n_sites};
    }
};

struct ValidatedConfig {
    ChainSpec chain;
    ReservoirSpec left;   // couples to site 1
    ReservoirSpec right;  // couples to site N
    InitialState initial;
    std::vector<std::string> warnings;
};

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kLeakageTolerance = 1e-6;

// Checks every parameter invariant. Throws Error(DimensionError | NormError |
// ParamError); soft issues land in ValidatedConfig::warnings.
ValidatedConfig validate(const ChainSpec& chain, const ReservoirSpec& left,
                         const ReservoirSpec& right, const InitialState& init);

// Parameter checks for one reservoir, without the chain context.
void validate_reservoir(const ReservoirSpec& res, const char* side);

// Peak frequency of a Lorentzian reservoir if it is known: explicit omega_c,
// or omega_eg + delta_c when the chain carries a transition frequency.
std::optional<double> lorentzian_peak(const LorentzianParams& p, double omega_eg);

// Largest total population over the trajectory, for the leakage invariant.
double max_total_population(const Trajectory& traj);

}  // namespace spinchain
