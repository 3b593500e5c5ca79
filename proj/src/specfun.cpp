#include "spinchain/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "spinchain/errors.hpp"

namespace spinchain::specfun {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kEulerGamma = 0.57721566490153286061;
constexpr double kTiny = 1e-300;

// Distance from a pole of Gamma(a) below which the n0-th series term is
// merged with Gamma(a) analytically.
constexpr double kNearPole = 0.1;
// |z| above which the asymptotic expansion is accurate to double precision.
double asymptotic_radius(double a) { return 40.0 + 2.0 * std::abs(a); }
// Beyond this |z| the finite-sum reduction loses more than ~2 digits.
constexpr double kReductionRadius = 8.0;

// zeta(k), k = 2..kZetaMax, by direct summation plus an Euler-Maclaurin tail.
constexpr int kZetaMax = 40;
const std::array<double, kZetaMax + 1>& zeta_table() {
    static const auto table = [] {
        std::array<double, kZetaMax + 1> z{};
        constexpr int m = 100;
        for (int k = 2; k <= kZetaMax; ++k) {
            double s = 0.0;
            for (int n = m - 1; n >= 1; --n) s += std::pow(static_cast<double>(n), -k);
            const double md = m;
            s += std::pow(md, 1.0 - k) / (k - 1.0) + 0.5 * std::pow(md, -k) +
                 k * std::pow(md, -k - 1.0) / 12.0 -
                 k * (k + 1.0) * (k + 2.0) * std::pow(md, -k - 3.0) / 720.0;
            z[static_cast<std::size_t>(k)] = s;
        }
        return z;
    }();
    return table;
}

// ln Gamma(1 + e) / e for |e| <= kNearPole, accurate in the relative sense.
double lgamma1p_over(double e) {
    const auto& zeta = zeta_table();
    double acc = -kEulerGamma;
    double pw = 1.0;  // e^(k-1)
    for (int k = 2; k <= kZetaMax; ++k) {
        pw *= e;
        const double term = ((k % 2 == 0) ? 1.0 : -1.0) * zeta[static_cast<std::size_t>(k)] * pw / k;
        acc += term;
        if (std::abs(term) < 1e-18 * std::abs(acc)) break;
    }
    return acc;
}

// log1p(x) / x.
double log1p_over(double x) {
    if (std::abs(x) < 1e-4) return 1.0 - x / 2.0 + x * x / 3.0 - x * x * x / 4.0;
    return std::log1p(x) / x;
}

// expm1(w) / w, finite at w = 0.
cplx expm1_over(cplx w) {
    if (std::abs(w) < 0.5) {
        cplx acc = 1.0, term = 1.0;
        for (int k = 2; k < 40; ++k) {
            term *= w / static_cast<double>(k);
            acc += term;
            if (std::abs(term) < 1e-18) break;
        }
        return acc;
    }
    return (std::exp(w) - 1.0) / w;
}

[[noreturn]] void not_converged(const char* method, double a, cplx z, cplx partial, double err) {
    std::ostringstream os;
    os.precision(17);
    os << "incomplete gamma " << method << " did not converge in " << kMaxIterations
       << " iterations for a=" << a << ", z=" << z;
    throw ConvergenceError(os.str(), partial.real(), partial.imag(), err);
}

// exp(z) Gamma(a, z) = exp(z) Gamma(a) - sum_n (-1)^n exp(z) z^(a+n) / (n! (a+n)).
// When a sits within kNearPole of a pole of Gamma(a), the pole term and the
// matching series term are combined in closed form.
GammaResult series(double a, cplx z) {
    const double r = std::abs(z);
    const cplx log_z = std::log(z);
    const cplx base = std::exp(z + a * log_z);  // e^z z^a

    const double nearest = std::round(a);
    const bool near_pole = nearest <= 0.0 && std::abs(a - nearest) < kNearPole;
    const int n0 = near_pole ? static_cast<int>(-nearest) : -1;

    cplx head = 0.0;
    double head_mag = 0.0;
    if (near_pole) {
        const double e = a + n0;
        double l_over = lgamma1p_over(e);
        double inv_fact = 1.0;
        for (int j = 1; j <= n0; ++j) {
            l_over += log1p_over(-e / j) / j;
            inv_fact /= j;
        }
        const double sign = (n0 % 2 == 0) ? 1.0 : -1.0;
        const cplx bracket = l_over * expm1_over(e * l_over) - log_z * expm1_over(e * log_z);
        // e^z z^(a+n0) = e^z z^e; the z^e factor is already inside the bracket.
        head = std::exp(z) * sign * inv_fact * bracket;
        head_mag = std::abs(std::exp(z)) * inv_fact * (std::abs(l_over) + std::abs(log_z) + 1.0);
    } else {
        head = std::exp(z) * std::tgamma(a);
        head_mag = std::abs(head);
    }

    cplx sum = 0.0;
    double sum_mag = 0.0;
    cplx p = base;  // e^z z^a (-z)^n / n!
    int n = 0;
    for (; n < kMaxIterations; ++n) {
        if (n > 0) p *= -z / static_cast<double>(n);
        if (n == n0) continue;
        const cplx term = p / (a + n);
        sum += term;
        sum_mag += std::abs(term);
        if (n > r && std::abs(term) <= kEps * 0.1 * std::abs(sum)) break;
        if (std::abs(term) == 0.0 && n > r) break;
    }
    const cplx value = head - sum;
    const double err = 4.0 * kEps * (head_mag + sum_mag) + std::abs(p) ;
    if (n >= kMaxIterations) not_converged("series", a, z, value, err);
    return {value, err};
}

// Legendre continued fraction, modified Lentz:
// exp(z) Gamma(a, z) = z^a / (z+1-a- 1(1-a)/(z+3-a- 2(2-a)/(z+5-a- ...))).
GammaResult continued_fraction(double a, cplx z) {
    cplx b = z + 1.0 - a;
    cplx c = 1.0 / kTiny;
    cplx d = 1.0 / b;
    cplx h = d;
    int i = 1;
    for (; i < kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const cplx del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    const cplx value = std::exp(a * std::log(z)) * h;
    const double err = 8.0 * kEps * std::abs(value) * std::sqrt(static_cast<double>(i));
    if (i >= kMaxIterations) not_converged("continued fraction", a, z, value, std::abs(value));
    return {value, err};
}

// exp(z) Gamma(a, z) ~ z^(a-1) sum_k (a-1)(a-2)...(a-k) / z^k, |z| large.
// Returns false if the terms start growing before reaching double precision.
bool asymptotic(double a, cplx z, GammaResult& out) {
    cplx sum = 1.0, u = 1.0;
    double prev = 1.0;
    for (int k = 1; k < 500; ++k) {
        u *= (a - k) / z;
        const double mag = std::abs(u);
        sum += u;
        if (mag <= 0.1 * kEps * std::abs(sum)) {
            const cplx value = std::exp((a - 1.0) * std::log(z)) * sum;
            out = {value, 4.0 * kEps * std::abs(value)};
            return true;
        }
        if (mag > prev && k > 2) return false;
        prev = mag;
    }
    return false;
}

}  // namespace

GammaResult scaled_upper_incomplete_gamma_generic(double a, cplx z) {
    if (!std::isfinite(a) || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        fail(ErrorKind::DomainError, "incomplete gamma arguments must be finite");
    }
    const double r = std::abs(z);
    if (r == 0.0) {
        if (a <= 0.0) fail(ErrorKind::DomainError, "Gamma(a, 0) is singular for a <= 0");
        return {std::tgamma(a), kEps * std::tgamma(a)};
    }
    if (r >= asymptotic_radius(a)) {
        GammaResult out;
        if (asymptotic(a, z, out)) return out;
    }
    // r + Re z measures how far z sits from the negative real axis in the
    // sense that matters: the series loses about exp(r + Re z) to cancellation,
    // the continued fraction converges slowly when it is small.
    const double q = r + z.real();
    if (r < std::max(1.0, a + 1.0) || q < 4.0) return series(a, z);
    return continued_fraction(a, z);
}

GammaResult scaled_gamma_negative_integer(int n, cplx z) {
    if (n < 0) fail(ErrorKind::DomainError, "negative-integer reduction needs n >= 0");
    if (z == cplx(0.0, 0.0)) fail(ErrorKind::DomainError, "Gamma(-n, 0) is singular");
    const GammaResult e1 = scaled_upper_incomplete_gamma_generic(0.0, z);
    if (n == 0) return e1;

    // z^-n sum_{k<n} (-1)^k (n-k-1)! z^k, built from the highest power down.
    cplx poly = 0.0;
    double poly_mag = 0.0;
    double fact = 1.0;  // (n-k-1)!
    for (int k = n - 1; k >= 0; --k) {
        if (k < n - 1) fact *= (n - k - 1);
        const cplx term = ((k % 2 == 0) ? 1.0 : -1.0) * fact * std::pow(z, k - n);
        poly += term;
        poly_mag += std::abs(term);
    }
    double nfact = 1.0;
    for (int j = 2; j <= n; ++j) nfact *= j;
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    const cplx value = (poly + sign * e1.value) / nfact;
    const double err = (4.0 * kEps * (poly_mag + std::abs(e1.value)) + e1.est_error) / nfact;
    return {value, err};
}

GammaResult scaled_upper_incomplete_gamma(double a, cplx z) {
    const double nearest = std::round(a);
    if (a == nearest && a <= 0.0 && std::abs(z) <= kReductionRadius) {
        return scaled_gamma_negative_integer(static_cast<int>(-a), z);
    }
    return scaled_upper_incomplete_gamma_generic(a, z);
}

GammaResult upper_incomplete_gamma(double a, cplx z) {
    const GammaResult scaled = scaled_upper_incomplete_gamma(a, z);
    const cplx factor = std::exp(-z);
    return {scaled.value * factor, scaled.est_error * std::abs(factor)};
}

GammaResult exp_integral_e1(cplx z) {
    if (z == cplx(0.0, 0.0)) fail(ErrorKind::DomainError, "E1(0) is singular");
    return upper_incomplete_gamma(0.0, z);
}

}  // namespace spinchain::specfun
