#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "spinchain/errors.hpp"
#include "spinchain/kernels.hpp"
#include "support.hpp"

using namespace spinchain;
using oracle::rel_err;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::ConfigError;
}

Kernel tabulated_bump(double g) {
    return Kernel(ReservoirSpec::tabulated(g, {0.2, 0.8, 1.0, 1.3, 2.0}, {0.0, 1.5, 2.0, 0.7, 0.0}), 1.0);
}

cplx transform_of(const Kernel& k, cplx s) {
    return oracle::laplace_transform([&](double t) { return k.memory_kernel(t); }, s);
}

}  // namespace

TEST_CASE("Lorentzian density peaks at omega_eg + delta_c with height 2 g^2 / (pi gamma)") {
    const Kernel k(ReservoirSpec::lorentzian(0.3, 0.02, 0.5), 2.0);
    CHECK(k.spectral_density(2.5) == doctest::Approx(2.0 * 0.09 / (std::numbers::pi * 0.02)));
    CHECK(k.spectral_density(2.5) > k.spectral_density(2.49));
    CHECK(k.spectral_density(2.5) > k.spectral_density(2.51));
    // extended below zero frequency
    CHECK(k.spectral_density(-1.0) > 0.0);
}

TEST_CASE("Ohmic density peaks at S omega_c and integrates to g^2") {
    for (double s : {0.5, 1.0, 2.0, 3.0}) {
        const Kernel k(ReservoirSpec::ohmic(0.3, 1.5, s), 1.0);
        const double peak = s * 1.5;
        CHECK(k.spectral_density(peak) > k.spectral_density(peak * 0.99));
        CHECK(k.spectral_density(peak) > k.spectral_density(peak * 1.01));
        boost::math::quadrature::exp_sinh<double> q;
        const double area = q.integrate([&](double w) { return k.spectral_density(w); }, 0.0,
                                        std::numeric_limits<double>::infinity());
        CHECK(area == doctest::Approx(0.09).epsilon(1e-10));
    }
    const Kernel k(ReservoirSpec::ohmic(0.3, 1.0, 1.0), 1.0);
    CHECK(kind_of([&] { k.spectral_density(-0.1); }) == ErrorKind::DomainError);
}

TEST_CASE("memory kernel at t = 0 equals g^2") {
    CHECK(Kernel(ReservoirSpec::lorentzian(0.3, 0.02, 0.0), 0.0).memory_kernel(0.0).real() ==
          doctest::Approx(0.09).epsilon(1e-12));
    for (double s : {0.5, 1.0, 2.5}) {
        const cplx r0 = Kernel(ReservoirSpec::ohmic(0.3, 1.0, s), 1.0).memory_kernel(0.0);
        CHECK(std::abs(r0 - 0.09) < 1e-10);
    }
    const cplx rt = tabulated_bump(0.3).memory_kernel(0.0);
    CHECK(std::abs(rt - 0.09) < 1e-6);
}

TEST_CASE("tabulated kernel equals the Fourier integral of its density") {
    const Kernel k = tabulated_bump(0.4);
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double breaks[] = {0.2, 0.8, 1.0, 1.3, 2.0};
    for (double t : {0.0, 0.3, 2.0, 17.0}) {
        cplx want = 0.0;
        for (int i = 0; i < 4; ++i) {
            auto part = [&](bool imag) {
                return GK::integrate(
                    [&](double w) {
                        const cplx v = k.spectral_density(w) * std::exp(-cplx{0.0, 1.0} * (w - 1.0) * t);
                        return imag ? v.imag() : v.real();
                    },
                    breaks[i], breaks[i + 1], 0);
            };
            want += cplx{part(false), part(true)};
        }
        CAPTURE(t);
        CHECK(std::abs(k.memory_kernel(t) - want) < 1e-12);
    }
}

TEST_CASE("Lorentzian Laplace kernel values") {
    const Kernel k(ReservoirSpec::lorentzian(0.3, 0.02, 0.0), 0.0);
    CHECK(k.laplace_kernel(0.0).real() == doctest::Approx(9.0));
    CHECK(std::abs(k.laplace_kernel(0.0).imag()) < 1e-15);
    const double big = 1e8;
    CHECK(rel_err(k.laplace_kernel(big), 0.09 / big) < 1e-9);
}

TEST_CASE("Lorentzian kernel has a single pole with residue g^2") {
    const Kernel k(ReservoirSpec::lorentzian(0.5, 0.1, 0.3), 0.0);
    const cplx pole{-0.05, -0.3};
    for (double eps : {1e-2, 1e-5, 1e-9}) {
        const cplx s = pole + cplx{eps, eps};
        CHECK(std::abs(k.laplace_kernel(s)) * std::abs(s - pole) == doctest::Approx(0.25).epsilon(1e-12));
    }
}

TEST_CASE("Ohmic kernel at s = 1 matches the transform of its memory kernel") {
    const Kernel k(ReservoirSpec::ohmic(0.3, 1.0, 1.0), 1.0);
    const cplx want = transform_of(k, 1.0);
    CHECK(rel_err(k.laplace_kernel(1.0), want) < 1e-8);
}

TEST_CASE("kernel transform duality for every kind") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> re(0.1, 3.0), im(-4.0, 4.0);
    const Kernel kernels[] = {
        Kernel(ReservoirSpec::lorentzian(0.3, 0.02, 0.1), 0.0),
        Kernel(ReservoirSpec::ohmic(0.3, 1.0, 1.0), 1.0),
        Kernel(ReservoirSpec::ohmic(0.3, 0.7, 2.4), 1.0),
        tabulated_bump(0.3),
    };
    for (const auto& k : kernels) {
        const double tol = k.kind() == ReservoirKind::Tabulated ? 1e-6 : 1e-7;
        for (int i = 0; i < 6; ++i) {
            const cplx s{re(rng), im(rng)};
            CAPTURE(to_string(k.kind()));
            CAPTURE(s);
            CHECK(rel_err(k.laplace_kernel(s), transform_of(k, s)) < tol);
        }
    }
}

TEST_CASE("non-integer exponent near an integer agrees with the integer route") {
    const Kernel exact(ReservoirSpec::ohmic(0.3, 1.0, 2.0), 1.0);
    const Kernel near(ReservoirSpec::ohmic(0.3, 1.0, 2.0 + 1e-7), 1.0);
    const cplx s{0.4, 1.3};
    CHECK(rel_err(near.laplace_kernel(s), exact.laplace_kernel(s)) < 1e-6);
}

TEST_CASE("Ohmic kernel refuses its branch cut") {
    const Kernel k(ReservoirSpec::ohmic(0.3, 1.0, 1.0), 1.0);
    CHECK(kind_of([&] { k.laplace_kernel(cplx{-0.5, 0.0}); }) == ErrorKind::BranchError);
    CHECK_NOTHROW(k.laplace_kernel(cplx{-0.5, 2.0}));
}

TEST_CASE("zero coupling gives identically zero kernels") {
    const Kernel kernels[] = {
        Kernel(ReservoirSpec::lorentzian(0.0, 0.02, 0.0), 0.0),
        Kernel(ReservoirSpec::ohmic(0.0, 1.0, 1.0), 1.0),
        tabulated_bump(0.0),
    };
    for (const auto& k : kernels) {
        CHECK(k.memory_kernel(1.3) == cplx{0.0, 0.0});
        CHECK(k.laplace_kernel(cplx{0.5, 1.0}) == cplx{0.0, 0.0});
    }
}

TEST_CASE("tabulated samples are rescaled to integrate to g^2") {
    const Kernel k = tabulated_bump(0.3);
    CHECK(k.tabulated_area() == doctest::Approx(0.6 * 0.75 + 0.2 * 1.75 + 0.3 * 1.35 + 0.7 * 0.35));
    double area = 0.0;
    const double breaks[] = {0.2, 0.8, 1.0, 1.3, 2.0};
    for (int i = 0; i < 4; ++i) {
        area += 0.5 * (k.spectral_density(breaks[i]) + k.spectral_density(breaks[i + 1])) * (breaks[i + 1] - breaks[i]);
    }
    CHECK(area == doctest::Approx(0.09).epsilon(1e-13));
    CHECK(k.spectral_density(0.1) == 0.0);
    CHECK(k.spectral_density(2.5) == 0.0);
    CHECK(kind_of([&] { k.laplace_kernel(cplx{0.0, 1.0}); }) == ErrorKind::DomainError);
}

TEST_CASE("tabulated density text format") {
    std::istringstream good("# omega J\n0.0 0.0\n\n0.5 1.0  # peak\n1.0 0.0\n");
    const auto p = parse_tabulated_density(good);
    CHECK(p.omega == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(p.density == std::vector<double>{0.0, 1.0, 0.0});

    std::istringstream one_column("0.0 0.0\n0.5\n");
    CHECK(kind_of([&] { parse_tabulated_density(one_column); }) == ErrorKind::ParamError);
    std::istringstream trailing("0.0 0.0 9\n");
    CHECK(kind_of([&] { parse_tabulated_density(trailing); }) == ErrorKind::ParamError);

    CHECK(kind_of([] { load_tabulated_density("/nonexistent/density.txt"); }) == ErrorKind::IoError);
    const auto path = std::filesystem::temp_directory_path() / "spinchain_density_test.txt";
    {
        std::ofstream out(path);
        out << "0 0\n1 2\n2 0\n";
    }
    CHECK(load_tabulated_density(path).omega.size() == 3);
    std::filesystem::remove(path);
}
