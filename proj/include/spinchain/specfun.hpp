#pragma once

// Upper incomplete gamma function for real order and complex argument, and
// the exponential integral E1. Principal branch throughout, cut on the
// negative real z axis.

#include <complex>

namespace spinchain::specfun {

using cplx = std::complex<double>;

struct GammaResult {
    cplx value;
    double est_error = 0.0;  // absolute
};

inline constexpr int kMaxIterations = 10000;

// Gamma(a, z). Integer a <= 0 goes through the finite-sum reduction to E1.
GammaResult upper_incomplete_gamma(double a, cplx z);

// exp(z) * Gamma(a, z). Stays finite where Gamma(a, z) itself over- or
// underflows; this is the form the Ohmic kernel consumes.
GammaResult scaled_upper_incomplete_gamma(double a, cplx z);

// E1(z) = Gamma(0, z).
GammaResult exp_integral_e1(cplx z);

// exp(z) * Gamma(-n, z) from the finite sum
//   Gamma(-n, z) = (1/n!) [ e^{-z} z^{-n} sum_{k<n} (-1)^k (n-k-1)! z^k + (-1)^n Gamma(0, z) ].
// Cancellation grows like |z|^n / n!, so the router only uses it for small |z|.
GammaResult scaled_gamma_negative_integer(int n, cplx z);

// Generic evaluation without integer routing (series, continued fraction or
// asymptotic expansion by region). Exposed so the two paths can be compared.
GammaResult scaled_upper_incomplete_gamma_generic(double a, cplx z);

}  // namespace spinchain::specfun
