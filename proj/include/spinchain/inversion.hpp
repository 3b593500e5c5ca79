#pragma once

// Numerical inverse Laplace transform of the F_i(s) evaluators.
//
// FourierEuler: trapezoidal rule on the Bromwich line Re(s) = a with step
// pi/t, so that
//   f(t) ~ e^{at}/(2t) [F(a) + sum_{k>=1} (-1)^k (F(a + ik pi/t) + F(a - ik pi/t))],
// accelerated by binomial (Euler) averaging of the partial sums. The
// abscissa is chosen per time point, a = contour_shift / t, which bounds the
// aliasing error by exp(-2 contour_shift) / (1 - exp(-2 contour_shift)) for
// |f| <= 1. With the default shift of 12, rounding (amplified by e^{at})
// and aliasing put the attainable error near 1e-10.
//
// FixedTalbot: deformed contour s(theta) = r theta (cot theta + i), valid only
// when every singularity of F lies inside it, so restricted to meromorphic
// (Lorentzian) configurations; points where the contour would not enclose
// the spectrum fall back to FourierEuler.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "spinchain/laplace.hpp"
#include "spinchain/model.hpp"

namespace spinchain {

enum class InversionMethod { FourierEuler, FixedTalbot };

std::string to_string(InversionMethod m);
InversionMethod inversion_method_from_string(std::string_view name);

struct InversionPlan {
    InversionMethod method = InversionMethod::FourierEuler;
    double contour_shift = 12.0;  // a * t
    int n_terms = 2000;           // cap on series terms per time point
    int euler_depth = 40;
    double target_tol = 1e-9;
    int talbot_nodes = 32;

    // Throws ParamError on out-of-range fields.
    void validate() const;
};

// Writes F(s) for every component into `out`.
using LaplaceEvaluator = std::function<void(cplx s, std::span<cplx> out)>;

struct InversionDiagnostics {
    std::size_t evaluations = 0;
    std::size_t points_over_tolerance = 0;
    std::size_t contour_retries = 0;
    std::size_t talbot_fallbacks = 0;
    double max_error = 0.0;
    int max_terms_used = 0;

    bool tolerance_met() const noexcept { return points_over_tolerance == 0; }
};

struct InversionResult {
    Trajectory trajectory;
    InversionDiagnostics diagnostics;
};

// Inverts every F_i of the state onto the grid. t = 0 returns c(0) exactly.
// Throws ContourError if an evaluation fails twice at the same time point;
// a missed target_tol is reported in the diagnostics, not thrown.
InversionResult invert(const LaplaceState& state, const InversionPlan& plan, const TimeGrid& grid);

// Same engine for an arbitrary evaluator of `dim` components whose
// singularities have |Im s| <= bandwidth. When at_zero is empty, t = 0 uses
// the initial-value theorem s F(s) at large real s.
InversionResult invert_function(std::size_t dim, const LaplaceEvaluator& eval, double bandwidth,
                                bool meromorphic, const InversionPlan& plan, const TimeGrid& grid,
                                std::span<const cplx> at_zero = {});

}  // namespace spinchain
