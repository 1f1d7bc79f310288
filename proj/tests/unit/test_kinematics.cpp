#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "spdc/errors.hpp"
#include "spdc/kinematics.hpp"

using namespace spdc;
using Axis = PolarizationAxis;

namespace {
MaterialLibrary const& lib()
{
    static auto const l = MaterialLibrary::load_default();
    return l;
}

CrystalConfig ln(double thickness)
{
    CrystalConfig c;
    c.material = lib().get("mgo_ln");
    c.thickness_m = thickness;
    return c;
}
}  // namespace

TEST_CASE("degenerate collinear mismatch in MgO:LN")
{
    PumpConfig pump;
    pump.center_wavelength_nm = 405.0;
    double const half = 0.5 * pump.angular_frequency();
    auto const dk = mismatch(pump, ln(1e-6), {half, 0.0, Axis::extraordinary}, {half, 0.0, Axis::extraordinary});
    double const expect = 2.0 * oracle::k(oracle::mgo_ln_e, 810.0) - oracle::k(oracle::mgo_ln_e, 405.0);
    CHECK(dk.longitudinal == doctest::Approx(expect).epsilon(1e-10));
    CHECK(dk.transverse == doctest::Approx(0.0));
    auto const lc = coherence_length(dk.longitudinal);
    REQUIRE_FALSE(lc.is_phase_matched());
    CHECK(lc.metres() == doctest::Approx(oracle::pi / std::abs(expect)).epsilon(1e-10));
    CHECK(lc.metres() * 1e6 == doctest::Approx(1.3754).epsilon(1e-4));
}

TEST_CASE("non-collinear mismatch components")
{
    PumpConfig pump;
    double const ws = wavelength_nm_to_angular_frequency(700.0);
    double const wi = pump.angular_frequency() - ws;
    double const ts = 0.05;
    double const ti = -0.03;
    auto const dk = mismatch(pump, ln(1e-6), {ws, ts, Axis::extraordinary}, {wi, ti, Axis::extraordinary});
    double const ks = oracle::k(oracle::mgo_ln_e, 700.0);
    double const ki = oracle::k(oracle::mgo_ln_e, oracle::conjugate_nm(405.0, 700.0));
    double const kp = oracle::k(oracle::mgo_ln_e, 405.0);
    CHECK(dk.longitudinal == doctest::Approx(ks * std::cos(ts) + ki * std::cos(ti) - kp).epsilon(1e-9));
    CHECK(dk.transverse == doctest::Approx(ks * std::sin(ts) + ki * std::sin(ti)).epsilon(1e-9));
}

TEST_CASE("CW pump requires energy conservation")
{
    PumpConfig pump;
    double const w = pump.angular_frequency();
    CHECK_THROWS_AS(mismatch(pump, ln(1e-6), {0.4 * w, 0.0, Axis::extraordinary}, {0.5 * w, 0.0, Axis::extraordinary}),
                    ConfigError);
}

TEST_CASE("phase-matching and pump functions")
{
    CHECK(phase_matching_function(0.0, 1e-3) == doctest::Approx(1.0));
    CHECK(phase_matching_function(2.0 * oracle::pi / 1e-3, 1e-3) == doctest::Approx(0.0).epsilon(1e-24));
    double const x = 1.7;
    CHECK(phase_matching_function(2.0 * x / 1e-3, 1e-3) == doctest::Approx(std::pow(std::sin(x) / x, 2)));
    CHECK(sinc(1e-12) == doctest::Approx(1.0));
    CHECK(pump_function(0.0, 1e-4) == doctest::Approx(1.0));
    CHECK(pump_function(1e4, 1e-4) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("pair probability scales as L^2 when phase matched")
{
    CHECK(pair_probability(2.0, 3e-3, 0.0, 0.0, 1e-4) == doctest::Approx(4.0 * 9e-6));
    CHECK(pair_probability(2.0, 0.0, 1e6, 0.0, 1e-4) == 0.0);
}

TEST_CASE("coherence length phase-matched case")
{
    auto const lc = coherence_length(0.0);
    CHECK(lc.is_phase_matched());
    CHECK_THROWS_AS(lc.metres(), NumericalError);
    CHECK(coherence_length(-oracle::pi).metres() == doctest::Approx(1.0));
}

TEST_CASE("config validation")
{
    PumpConfig pump;
    pump.waist_m = 0.0;
    CHECK_THROWS_AS(pump.validate(), ConfigError);
    pump = PumpConfig{};
    pump.spectral_width = -1.0;
    CHECK_THROWS_AS(pump.validate(), ConfigError);
    CHECK_THROWS_AS(ln(-1.0).validate(), ConfigError);
    CrystalConfig missing;
    CHECK_THROWS_AS(missing.validate(), ConfigError);
}
