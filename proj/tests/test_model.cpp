#include <doctest.h>

#include <cmath>

#include "spinchain/errors.hpp"
#include "spinchain/model.hpp"

using namespace spinchain;

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

}  // namespace

TEST_CASE("chain scale k = 2/J") {
    ChainSpec c{5, 0.5, 0.0};
    CHECK(c.k() == doctest::Approx(4.0));
}

TEST_CASE("localized initial state") {
    auto s = InitialState::localized(4, 3);
    REQUIRE(s.size() == 4);
    CHECK(s.amplitudes[2] == cplx{1.0, 0.0});
    CHECK(s.norm_squared() == 1.0);
    CHECK(kind_of([] { InitialState::localized(4, 5); }) == ErrorKind::DimensionError);
    CHECK(kind_of([] { InitialState::localized(4, 0); }) == ErrorKind::DimensionError);
}

TEST_CASE("uniform time grid ends exactly at t_max") {
    auto g = TimeGrid::uniform(3.0, 31);
    REQUIRE(g.size() == 31);
    CHECK(g[0] == 0.0);
    CHECK(g.back() == 3.0);
    CHECK(g[10] == doctest::Approx(1.0));
    CHECK(TimeGrid::uniform(5.0, 0).empty());
    CHECK(kind_of([] { TimeGrid({0.0, 1.0, 1.0}); }) == ErrorKind::ParamError);
    CHECK(kind_of([] { TimeGrid({-1.0}); }) == ErrorKind::ParamError);
}

TEST_CASE("validation rejects bad chains and states") {
    const auto res = ReservoirSpec::lorentzian(0.1, 0.1, 0.0);
    CHECK(kind_of([&] { validate({1, 1.0, 0.0}, res, res, InitialState::localized(1, 1)); }) ==
          ErrorKind::DimensionError);
    CHECK(kind_of([&] { validate({3, 1.0, 0.0}, res, res, InitialState::localized(4, 1)); }) ==
          ErrorKind::DimensionError);
    CHECK(kind_of([&] { validate({3, 0.0, 0.0}, res, res, InitialState::localized(3, 1)); }) ==
          ErrorKind::ParamError);

    InitialState half;
    half.amplitudes = {0.5, 0.5, 0.0};
    CHECK(kind_of([&] { validate({3, 1.0, 0.0}, res, res, half); }) == ErrorKind::NormError);

    InitialState nearly;
    nearly.amplitudes = {std::sqrt(0.5), std::sqrt(0.5), 0.0};
    CHECK_NOTHROW(validate({3, 1.0, 0.0}, res, res, nearly));
}

TEST_CASE("reservoir parameter checks") {
    const ChainSpec chain{3, 1.0, 0.0};
    const auto init = InitialState::localized(3, 1);
    const auto ok = ReservoirSpec::lorentzian(0.1, 0.1, 0.0);
    CHECK(kind_of([&] { validate(chain, ReservoirSpec::lorentzian(0.1, 0.0, 0.0), ok, init); }) ==
          ErrorKind::ParamError);
    CHECK(kind_of([&] { validate(chain, ok, ReservoirSpec::lorentzian(-0.1, 0.1, 0.0), init); }) ==
          ErrorKind::ParamError);
    CHECK(kind_of([&] { validate(chain, ReservoirSpec::ohmic(0.1, 0.0, 1.0), ok, init); }) ==
          ErrorKind::ParamError);
    CHECK(kind_of([&] { validate(chain, ReservoirSpec::ohmic(0.1, 1.0, -1.0), ok, init); }) ==
          ErrorKind::ParamError);
    CHECK(kind_of([&] { validate(chain, ReservoirSpec::tabulated(0.1, {0.0, 1.0}, {1.0}), ok, init); }) ==
          ErrorKind::ParamError);
    CHECK(kind_of([&] { validate(chain, ReservoirSpec::tabulated(0.1, {1.0, 0.5}, {1.0, 1.0}), ok, init); }) ==
          ErrorKind::ParamError);
    CHECK(kind_of([&] { validate(chain, ReservoirSpec::tabulated(0.1, {-1.0, 0.5}, {1.0, 1.0}), ok, init); }) ==
          ErrorKind::ParamError);
    CHECK_NOTHROW(validate(chain, ReservoirSpec::tabulated(0.1, {0.0, 1.0}, {1.0, 0.0}), ok, init));
}

TEST_CASE("broad Lorentzian against its peak frequency produces a warning") {
    const ChainSpec chain{3, 1.0, 0.0};
    const auto init = InitialState::localized(3, 1);
    auto narrow = validate(chain, ReservoirSpec::lorentzian(0.1, 0.1, 0.0, 10.0),
                           ReservoirSpec::lorentzian(0.1, 0.1, 0.0), init);
    CHECK(narrow.warnings.empty());
    auto broad = validate(chain, ReservoirSpec::lorentzian(0.1, 5.0, 0.0, 10.0),
                          ReservoirSpec::lorentzian(0.1, 0.1, 0.0), init);
    CHECK(broad.warnings.size() == 1);
}

TEST_CASE("max total population") {
    Trajectory tr(TimeGrid({0.0, 1.0}), 2, Provenance::LaplaceInversion);
    tr.amplitude(0, 0) = 1.0;
    tr.amplitude(1, 0) = cplx{0.6, 0.0};
    tr.amplitude(1, 1) = cplx{0.0, 0.6};
    CHECK(max_total_population(tr) == doctest::Approx(1.0));
}
