#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spinchain/errors.hpp"
#include "spinchain/observables.hpp"
#include "spinchain/oracle.hpp"

using namespace spinchain;

namespace {

constexpr double kPi = std::numbers::pi;

LaplaceState lorentzian_chain(int n, double g, int site) {
    const auto res = ReservoirSpec::lorentzian(g, 0.02, 0.0);
    return LaplaceState(ChainSpec{n, 1.0, 0.0}, Kernel(res, 0.0), Kernel(res, 0.0), InitialState::localized(n, site));
}

}  // namespace

TEST_CASE("fidelity of the transferred amplitude") {
    CHECK(fidelity_from_amplitude(0.0) == 0.5);
    CHECK(fidelity_from_amplitude(1.0) == doctest::Approx(1.0));
    CHECK(fidelity_from_amplitude(0.5) == doctest::Approx(0.5 + 0.25 / 6.0 + 0.5 / 3.0));
}

TEST_CASE("populations split into edges and channel") {
    const auto grid = TimeGrid::uniform(50.0, 101);
    const auto tr = solve_pseudomode(PseudomodeSystem::from(lorentzian_chain(5, 0.3, 1)), grid);
    const auto pops = populations(tr);
    REQUIRE(pops.sites.size() == 5);
    CHECK(pops.sites[2].label() == "P_3");
    CHECK(pops.channel.label() == "P_channel");
    CHECK(pops.total.label() == "P_total");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double sum = pops.sites[0].values[i] + pops.channel.values[i] + pops.sites[4].values[i];
        CHECK(pops.total.values[i] == doctest::Approx(sum).epsilon(1e-14));
        CHECK(pops.channel.values[i] ==
              doctest::Approx(pops.sites[1].values[i] + pops.sites[2].values[i] + pops.sites[3].values[i]).epsilon(1e-14));
        CHECK(pops.total.values[i] <= 1.0 + 1e-9);
    }
    const auto fid = fidelity(tr);
    CHECK(fid.label() == "fidelity");
    for (double f : fid.values) {
        CHECK(f >= 0.5);
        CHECK(f <= 1.0 + 1e-9);
    }
}

TEST_CASE("mirror start gives the mirror populations") {
    const auto grid = TimeGrid::uniform(20.0, 41);
    const auto a = populations(invert(lorentzian_chain(6, 0.4, 1), InversionPlan{}, grid).trajectory);
    const auto b = populations(invert(lorentzian_chain(6, 0.4, 6), InversionPlan{}, grid).trajectory);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(a.sites[0].values[i] - b.sites[5].values[i]) < 1e-9);
        CHECK(std::abs(a.sites[5].values[i] - b.sites[0].values[i]) < 1e-9);
        CHECK(std::abs(a.channel.values[i] - b.channel.values[i]) < 1e-9);
    }
}

TEST_CASE("refined maximum of a coarsely sampled peak") {
    const auto grid = TimeGrid::uniform(3.0, 13);
    std::vector<double> v;
    for (double t : grid.values()) v.push_back(1.0 - (t - 1.37) * (t - 1.37));
    const auto peak = refined_maximum(grid, v);
    CHECK(peak.time == doctest::Approx(1.37).epsilon(1e-12));
    CHECK(peak.value == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> rising(grid.values().begin(), grid.values().end());
    CHECK(refined_maximum(grid, rising).time == 3.0);
    CHECK_THROWS_AS(refined_maximum(grid, std::vector<double>{1.0}), Error);
}

TEST_CASE("dominant frequency of a sampled oscillation") {
    const auto grid = TimeGrid::uniform(100.0, 1001);
    std::vector<double> v;
    for (double t : grid.values()) v.push_back(0.3 + std::cos(1.3 * t) + 0.2 * std::cos(0.4 * t));
    CHECK(dominant_frequency(grid, v) == doctest::Approx(1.3).epsilon(1e-3));

    // isolated pair: P_1 = (1 + cos t) / 2
    const auto none = ReservoirSpec::lorentzian(0.0, 0.1, 0.0);
    const LaplaceState pair(ChainSpec{2, 1.0, 0.0}, Kernel(none, 0.0), Kernel(none, 0.0), InitialState::localized(2, 1));
    const auto p1 = populations(invert(pair, InversionPlan{}, grid).trajectory).sites[0];
    CHECK(dominant_frequency(grid, p1.values) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("maximum fidelity of isolated chains is reached at the perfect-transfer time") {
    const ChainSpec chain{2, 1.0, 0.0};
    const auto none = ReservoirSpec::lorentzian(0.0, 0.1, 0.0);
    const std::vector<int> ns{2, 3};
    const auto peaks = max_fidelity_sweep(chain, none, none, ns, std::nullopt, InversionPlan{});
    REQUIRE(peaks.size() == 2);
    // |c_2| = |sin(t/2)| and |c_3| = (1 - cos(t/sqrt 2)) / 2
    CHECK(peaks[0].n_sites == 2);
    CHECK(peaks[0].max_fidelity == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(peaks[0].argmax_t == doctest::Approx(kPi).epsilon(1e-3));
    CHECK(peaks[1].max_fidelity == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(peaks[1].argmax_t == doctest::Approx(std::sqrt(2.0) * kPi).epsilon(1e-3));
}

TEST_CASE("reservoir coupling lowers the maximum fidelity") {
    const ChainSpec chain{4, 1.0, 0.0};
    const std::vector<int> ns{4};
    const auto weak = max_fidelity_sweep(chain, ReservoirSpec::lorentzian(0.1, 0.5, 0.0),
                                         ReservoirSpec::lorentzian(0.1, 0.5, 0.0), ns, 16.0, InversionPlan{});
    const auto strong = max_fidelity_sweep(chain, ReservoirSpec::lorentzian(0.3, 0.5, 0.0),
                                           ReservoirSpec::lorentzian(0.3, 0.5, 0.0), ns, 16.0, InversionPlan{});
    CHECK(weak[0].max_fidelity > strong[0].max_fidelity);
    CHECK(strong[0].max_fidelity > 0.5);
}
