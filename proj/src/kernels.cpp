#include "spinchain/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "spinchain/errors.hpp"
#include "spinchain/specfun.hpp"

namespace spinchain {
namespace {

constexpr cplx kI{0.0, 1.0};

// int_0^1 exp(-i x u) du and int_0^1 u exp(-i x u) du.
void segment_moments(double x, cplx& m0, cplx& m1) {
    if (std::abs(x) < 0.5) {
        m0 = 0.0;
        m1 = 0.0;
        cplx p = 1.0;  // (-i x)^k / k!
        for (int k = 0; k < 30; ++k) {
            if (k > 0) p *= -kI * x / static_cast<double>(k);
            m0 += p / static_cast<double>(k + 1);
            m1 += p / static_cast<double>(k + 2);
        }
        return;
    }
    const cplx e = std::exp(-kI * x);
    m0 = (1.0 - e) / (kI * x);
    m1 = e * (kI / x + 1.0 / (x * x)) - 1.0 / (x * x);
}

}  // namespace

Kernel::Kernel(ReservoirSpec spec, double omega_eg) : spec_(std::move(spec)), omega_eg_(omega_eg) {
    validate_reservoir(spec_, "kernel");
    if (const auto* t = std::get_if<TabulatedParams>(&spec_.params)) {
        for (std::size_t i = 1; i < t->omega.size(); ++i) {
            tab_area_ += 0.5 * (t->density[i] + t->density[i - 1]) * (t->omega[i] - t->omega[i - 1]);
        }
        tab_scale_ = tab_area_ > 0.0 ? spec_.g * spec_.g / tab_area_ : 0.0;
    }
}

double Kernel::ohmic_normalization() const noexcept {
    const auto* o = std::get_if<OhmicParams>(&spec_.params);
    if (!o) return 0.0;
    return 1.0 / (o->omega_c * o->omega_c * std::tgamma(1.0 + o->s_param));
}

double Kernel::spectral_density(double omega) const {
    const double g2 = spec_.g * spec_.g;
    if (const auto* l = std::get_if<LorentzianParams>(&spec_.params)) {
        const double peak = l->omega_c.value_or(omega_eg_ + l->delta_c);
        const double hw = 0.5 * l->gamma;
        const double d = omega - peak;
        return g2 / std::numbers::pi * hw / (d * d + hw * hw);
    }
    if (omega < 0.0) fail(ErrorKind::DomainError, "spectral density requires omega >= 0");
    if (const auto* o = std::get_if<OhmicParams>(&spec_.params)) {
        const double x = omega / o->omega_c;
        if (x == 0.0) return 0.0;
        return ohmic_normalization() * g2 * o->omega_c * std::exp(o->s_param * std::log(x) - x);
    }
    const auto& t = std::get<TabulatedParams>(spec_.params);
    if (omega < t.omega.front() || omega > t.omega.back()) return 0.0;
    const auto it = std::upper_bound(t.omega.begin(), t.omega.end(), omega);
    const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(it - t.omega.begin()), t.omega.size() - 1);
    const std::size_t i = j - 1;
    const double w = (omega - t.omega[i]) / (t.omega[j] - t.omega[i]);
    return tab_scale_ * ((1.0 - w) * t.density[i] + w * t.density[j]);
}

cplx Kernel::memory_kernel(double t) const {
    if (t < 0.0) fail(ErrorKind::DomainError, "memory kernel requires t >= 0");
    const double g2 = spec_.g * spec_.g;
    if (g2 == 0.0) return 0.0;
    if (const auto* l = std::get_if<LorentzianParams>(&spec_.params)) {
        return g2 * std::exp(-(0.5 * l->gamma + kI * l->delta_c) * t);
    }
    if (const auto* o = std::get_if<OhmicParams>(&spec_.params)) {
        return g2 * std::exp(kI * omega_eg_ * t) * std::pow(kI * o->omega_c * t + 1.0, -1.0 - o->s_param);
    }
    // Exact integral of the piecewise-linear density against exp(-i w t).
    const auto& tab = std::get<TabulatedParams>(spec_.params);
    cplx acc = 0.0;
    for (std::size_t i = 1; i < tab.omega.size(); ++i) {
        const double lo = tab.omega[i - 1];
        const double h = tab.omega[i] - lo;
        cplx m0, m1;
        segment_moments(h * t, m0, m1);
        acc += h * std::exp(-kI * lo * t) *
               (tab.density[i - 1] * m0 + (tab.density[i] - tab.density[i - 1]) * m1);
    }
    return tab_scale_ * std::exp(kI * omega_eg_ * t) * acc;
}

cplx Kernel::laplace_kernel(cplx s) const {
    const double g2 = spec_.g * spec_.g;
    if (g2 == 0.0) return 0.0;
    if (const auto* l = std::get_if<LorentzianParams>(&spec_.params)) {
        return g2 / (s + 0.5 * l->gamma + kI * l->delta_c);
    }
    if (const auto* o = std::get_if<OhmicParams>(&spec_.params)) {
        const cplx k = (s - kI * omega_eg_) / o->omega_c;
        const cplx z = -kI * k;
        if (s.real() <= 0.0 && z.real() <= 0.0) {
            std::ostringstream os;
            os.precision(17);
            os << "Ohmic Laplace kernel evaluated on or across its branch cut at s=" << s;
            fail(ErrorKind::BranchError, os.str());
        }
        double order = -o->s_param;
        if (std::abs(o->s_param - std::round(o->s_param)) < kIntegerExponentTolerance) {
            order = -std::round(o->s_param);
        }
        const auto gam = specfun::scaled_upper_incomplete_gamma(order, z);
        // -i^(1-S) = exp(-i pi (1+S)/2) on the principal branch.
        const cplx phase = std::exp(-kI * (0.5 * std::numbers::pi * (1.0 - order)));
        return g2 * phase / o->omega_c * std::exp(-order * std::log(k)) * gam.value;
    }
    if (s.real() <= 0.0) fail(ErrorKind::DomainError, "tabulated Laplace kernel requires Re(s) > 0");
    const auto& tab = std::get<TabulatedParams>(spec_.params);
    cplx acc = 0.0;
    double err_total = 0.0;
    for (std::size_t i = 1; i < tab.omega.size(); ++i) {
        const double lo = tab.omega[i - 1], hi = tab.omega[i];
        const double jl = tab.density[i - 1], jh = tab.density[i];
        if (jl == 0.0 && jh == 0.0) continue;
        auto f = [&](double w) {
            const double frac = (w - lo) / (hi - lo);
            return ((1.0 - frac) * jl + frac * jh) / (s + kI * (w - omega_eg_));
        };
        double err = 0.0;
        acc += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 30, 1e-13, &err);
        err_total += err;
    }
    if (!(tab_scale_ * err_total <= kTabulatedQuadratureTolerance) || !std::isfinite(acc.real())) {
        std::ostringstream os;
        os << "tabulated Laplace kernel quadrature error " << tab_scale_ * err_total << " at s=" << s;
        fail(ErrorKind::QuadratureError, os.str());
    }
    return tab_scale_ * acc;
}

double Kernel::spectral_extent() const noexcept {
    const double g = spec_.g;
    if (const auto* l = std::get_if<LorentzianParams>(&spec_.params)) {
        return std::abs(l->delta_c) + l->gamma + g;
    }
    if (const auto* o = std::get_if<OhmicParams>(&spec_.params)) {
        return omega_eg_ + o->omega_c * (o->s_param + 30.0) + g;
    }
    const auto& t = std::get<TabulatedParams>(spec_.params);
    return std::max(std::abs(t.omega.front() - omega_eg_), std::abs(t.omega.back() - omega_eg_)) + g;
}

TabulatedParams parse_tabulated_density(std::istream& in) {
    TabulatedParams out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        ls.imbue(std::locale::classic());
        double w = 0.0, j = 0.0;
        if (!(ls >> w)) continue;
        if (!(ls >> j)) {
            fail(ErrorKind::ParamError, "tabulated density line " + std::to_string(line_no) + ": expected two columns");
        }
        std::string rest;
        if (ls >> rest) {
            fail(ErrorKind::ParamError, "tabulated density line " + std::to_string(line_no) + ": trailing data");
        }
        out.omega.push_back(w);
        out.density.push_back(j);
    }
    return out;
}

TabulatedParams load_tabulated_density(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::IoError, "cannot open tabulated density file " + path.string());
    return parse_tabulated_density(in);
}

}  // namespace spinchain
