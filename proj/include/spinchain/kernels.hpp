#pragma once

// Reservoir spectral densities J(w), time-domain memory kernels
//   R(t) = int J(w) exp(-i (w - w_eg) t) dw,
// and their Laplace transforms B(s).

#include <complex>
#include <filesystem>
#include <iosfwd>

#include "spinchain/model.hpp"

namespace spinchain {

inline constexpr double kIntegerExponentTolerance = 1e-9;
inline constexpr double kTabulatedQuadratureTolerance = 1e-10;

class Kernel {
public:
    Kernel(ReservoirSpec spec, double omega_eg);

    ReservoirKind kind() const noexcept { return spec_.kind(); }
    const ReservoirSpec& spec() const noexcept { return spec_; }
    double omega_eg() const noexcept { return omega_eg_; }
    double g() const noexcept { return spec_.g; }

    // J(w). Lorentzian accepts any real w (the density is extended to
    // negative frequencies); Ohmic and tabulated require w >= 0.
    double spectral_density(double omega) const;

    // R(t), t >= 0.
    cplx memory_kernel(double t) const;

    // B(s). Analytic for Re(s) > 0; Lorentzian continues meromorphically to
    // the whole plane, Ohmic throws BranchError across its cut.
    cplx laplace_kernel(cplx s) const;

    // Angular-frequency span over which B(s) has structure along the
    // imaginary axis, measured from the chain's rotating frame.
    double spectral_extent() const noexcept;

    // Ohmic normalization 1 / (w_c^2 Gamma(1 + S)); 0 for other kinds.
    double ohmic_normalization() const noexcept;

    // Integral of the tabulated samples before rescaling to g^2.
    double tabulated_area() const noexcept { return tab_area_; }

private:
    ReservoirSpec spec_;
    double omega_eg_;
    double tab_area_ = 0.0;
    double tab_scale_ = 0.0;  // g^2 / area
};

// Two-column text: "omega density" per line, '#' starts a comment.
TabulatedParams parse_tabulated_density(std::istream& in);
TabulatedParams load_tabulated_density(const std::filesystem::path& path);

}  // namespace spinchain
