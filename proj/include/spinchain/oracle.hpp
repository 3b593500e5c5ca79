#pragma once

// Time-domain solvers used to validate the Laplace route.
//
// Volterra: direct integration of
//   dc_1/dt = -i J/2 c_2 - int_0^t R_1(t - t') c_1(t') dt'
//   dc_i/dt = -i J/2 (c_{i-1} + c_{i+1})
//   dc_N/dt = -i J/2 c_{N-1} - int_0^t R_2(t - t') c_N(t') dt'
// with trapezoidal convolution weights over the full history.
//
// Pseudomode: for R(t) = g^2 exp(-(gamma/2 + i delta_c) t) the memory term is
// generated exactly by one damped auxiliary amplitude b per reservoir,
//   dc/dt = ... - i g b,   db/dt = -i g c - (gamma/2 + i delta_c) b,  b(0) = 0.

#include <string>
#include <string_view>

#include "spinchain/kernels.hpp"
#include "spinchain/laplace.hpp"
#include "spinchain/model.hpp"

namespace spinchain {

enum class VolterraScheme { PredictorCorrector2, Trapezoid };

std::string to_string(VolterraScheme s);
VolterraScheme volterra_scheme_from_string(std::string_view name);

struct VolterraConfig {
    double dt = 1e-3;
    VolterraScheme scheme = VolterraScheme::PredictorCorrector2;
};

// Largest admissible step, in units of 1/J.
inline constexpr double kMaxStepTimesCoupling = 0.1;
// Grid times must sit on the dt lattice to this relative precision.
inline constexpr double kLatticeTolerance = 1e-9;

// Throws StepError if dt is out of range or a grid time is off the dt lattice.
Trajectory solve_volterra(const ChainSpec& chain, const Kernel& left, const Kernel& right,
                          const InitialState& init, const VolterraConfig& cfg, const TimeGrid& grid);
Trajectory solve_volterra(const LaplaceState& state, const VolterraConfig& cfg, const TimeGrid& grid);

// Largest dt <= target that divides every spacing of a uniform grid
// (t_max / (n_points - 1)) into an integer number of steps.
double lattice_step(const TimeGrid& grid, double target);

struct PseudomodeSystem {
    ChainSpec chain;
    InitialState initial;
    double g_left = 0.0;
    double g_right = 0.0;
    cplx decay_left;   // gamma/2 + i delta_c
    cplx decay_right;

    // Throws KindError unless both reservoirs are Lorentzian.
    static PseudomodeSystem from(const ChainSpec& chain, const ReservoirSpec& left,
                                 const ReservoirSpec& right, const InitialState& init);
    static PseudomodeSystem from(const LaplaceState& state);
};

inline constexpr double kPseudomodeAbsTol = 1e-12;
inline constexpr double kPseudomodeRelTol = 1e-10;

Trajectory solve_pseudomode(const PseudomodeSystem& sys, const TimeGrid& grid);

}  // namespace spinchain
