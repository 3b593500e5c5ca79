#pragma once

// Independent numerical oracles shared by the unit and acceptance tests.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "spinchain/model.hpp"

namespace oracle {

using cplx = std::complex<double>;

inline double rel_err(cplx got, cplx want) { return std::abs(got - want) / std::abs(want); }

// exp(z) Gamma(a, z) = int_0^inf (z + u)^(a-1) e^{-u} du, the ray from z to
// infinity parallel to the real axis. Valid away from the negative real axis.
inline cplx scaled_gamma_by_quadrature(double a, cplx z) {
    boost::math::quadrature::exp_sinh<double> q;
    auto part = [&](bool imag) {
        return q.integrate([&](double u) {
            const cplx v = std::exp((a - 1.0) * std::log(z + u) - u);
            return imag ? v.imag() : v.real();
        });
    };
    return {part(false), part(true)};
}

// int_0^inf f(t) e^{-st} dt by 61-point Gauss-Kronrod panels of width <= 1,
// stopped once e^{-Re(s) t} is below 1e-17.
inline cplx laplace_transform(const std::function<cplx(double)>& f, cplx s) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double t_end = 40.0 / s.real();
    const double panel = std::min(1.0, t_end / 64.0);
    cplx acc = 0.0;
    for (double lo = 0.0; lo < t_end; lo += panel) {
        const double hi = lo + panel;
        auto part = [&](bool imag) {
            return GK::integrate(
                [&](double t) {
                    const cplx v = f(t) * std::exp(-s * t);
                    return imag ? v.imag() : v.real();
                },
                lo, hi, 0);
        };
        acc += cplx{part(false), part(true)};
    }
    return acc;
}

// Dense solve of the Laplace-space chain equations
//   (s + B_1) F_1 + i J/2 F_2 = c_1
//   s F_i + i J/2 (F_{i-1} + F_{i+1}) = c_i
//   (s + B_2) F_N + i J/2 F_{N-1} = c_N
inline std::vector<cplx> dense_solve(int n, double coupling, std::span<const cplx> c0, cplx b1, cplx b2,
                                     cplx s) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd rhs(n);
    const cplx hop{0.0, 0.5 * coupling};
    for (int i = 0; i < n; ++i) {
        m(i, i) = s;
        if (i > 0) m(i, i - 1) = hop;
        if (i + 1 < n) m(i, i + 1) = hop;
        rhs(i) = c0[static_cast<std::size_t>(i)];
    }
    m(0, 0) += b1;
    m(n - 1, n - 1) += b2;
    const Eigen::VectorXcd x = m.fullPivLu().solve(rhs);
    return {x.data(), x.data() + n};
}

inline double max_abs_diff(const spinchain::Trajectory& a, const spinchain::Trajectory& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.amplitudes.size(); ++i) {
        worst = std::max(worst, std::abs(a.amplitudes[i] - b.amplitudes[i]));
    }
    return worst;
}

inline spinchain::InitialState random_state(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    spinchain::InitialState s;
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
        s.amplitudes.emplace_back(nd(rng), nd(rng));
        norm += std::norm(s.amplitudes.back());
    }
    for (auto& c : s.amplitudes) c /= std::sqrt(norm);
    return s;
}

}  // namespace oracle
