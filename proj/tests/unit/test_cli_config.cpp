#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>

#include "config.hpp"
#include "spdc/errors.hpp"
#include "spdc/validation/scenarios.hpp"

using namespace spdc;
using namespace spdc::cli;

namespace {
std::filesystem::path write_temp(std::string const& name, std::string const& text)
{
    auto const path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path;
}

RunConfig preset(char const* name) { return RunConfig::resolve(std::string(name), std::nullopt, std::nullopt); }
}  // namespace

TEST_CASE("every preset resolves")
{
    auto const names = preset_names();
    CHECK(names.size() == 10);
    for (auto const& name : names) {
        CAPTURE(name);
        auto const rc = RunConfig::resolve(name, std::nullopt, std::nullopt);
        CHECK_NOTHROW(rc.crystal().validate());
        if (name.find("map") != std::string::npos)
            CHECK_NOTHROW(rc.spectrum_grid().validate());
        CHECK_NOTHROW(rc.source().validate());
        CHECK_NOTHROW(rc.set_scan().validate());
        CHECK_NOTHROW(rc.sps_efficiency().validate());
    }
}

TEST_CASE("map presets agree with the validation scenarios")
{
    auto const rc1 = preset("ln-lc-map");
    auto const& lib = rc1.materials();
    auto const ln1 = scenarios::ln_map(lib, 1.0);
    CHECK(rc1.crystal().thickness_m == doctest::Approx(ln1.crystal.thickness_m).epsilon(1e-12));
    CHECK(rc1.pump().center_wavelength_nm == ln1.pump.center_wavelength_nm);
    CHECK(rc1.pump().waist_m == doctest::Approx(ln1.pump.waist_m));
    CHECK(rc1.spectrum_grid().wavelength_nm.stop == doctest::Approx(ln1.grid.wavelength_nm.stop));
    CHECK(rc1.spectrum_grid().angle_deg.count == ln1.grid.angle_deg.count);

    auto const ln5 = scenarios::ln_map(lib, 5.0);
    CHECK(preset("ln-5lc-map").crystal().thickness_m == doctest::Approx(ln5.crystal.thickness_m).epsilon(1e-12));

    auto const bbo = scenarios::bbo_map(lib);
    auto const rcb = preset("bbo-map");
    CHECK(rcb.crystal().optic_axis_angle == doctest::Approx(bbo.crystal.optic_axis_angle).epsilon(1e-10));
    CHECK(rcb.crystal().thickness_m == doctest::Approx(bbo.crystal.thickness_m));
    CHECK(rcb.crystal().pump_axis == bbo.crystal.pump_axis);
    CHECK(rcb.crystal().signal_axis == bbo.crystal.signal_axis);
}

TEST_CASE("JSI and SET presets agree with the validation scenarios")
{
    auto const rc = preset("ln-jsi");
    auto const sc = scenarios::ln_jsi(rc.materials());
    CHECK(rc.pump().center_wavelength_nm == sc.pump.center_wavelength_nm);
    CHECK(rc.crystal().thickness_m == doctest::Approx(sc.crystal.thickness_m));
    CHECK(rc.jsi_target_conditional_hz() == doctest::Approx(sc.target_conditional_hz));
    CHECK(rc.jsi_grid().omega_s.start == doctest::Approx(sc.grid.omega_s.start));
    CHECK(rc.jsi_grid().omega_i.stop == doctest::Approx(sc.grid.omega_i.stop));
    CHECK(rc.jsi_sigma_bracket().first == sc.sigma_lo);
    CHECK(rc.jsi_sigma_bracket().second == sc.sigma_hi);

    auto const set = preset("set-telecom");
    CHECK(set.crystal().thickness_m == doctest::Approx(sc.crystal.thickness_m));
    CHECK(set.set_scan().shg_artifact);
}

TEST_CASE("counting presets agree with the validation scenarios")
{
    auto const car = preset("hbt-car1400").source();
    auto const ref = scenarios::car_1400_source();
    CHECK(car.pair_rate == ref.pair_rate);
    CHECK(car.background_rates == ref.background_rates);
    CHECK(car.efficiencies == ref.efficiencies);
    CHECK(car.jitter_sigma_ps == ref.jitter_sigma_ps);
    CHECK(car.duration_s == ref.duration_s);
    CHECK(car.seed == ref.seed);

    auto const sweep = preset("hbt-power-sweep");
    auto const base = scenarios::power_sweep_source();
    CHECK(sweep.source().pair_rate == base.pair_rate);
    CHECK(sweep.source().seed == base.seed);
    CHECK(sweep.powers() == scenarios::power_sweep_powers());
}

TEST_CASE("SPS preset agrees with the validation scenario")
{
    auto const rc = preset("sps-thin-film");
    auto const ref_cfg = scenarios::sps_config(rc.materials());
    auto const cfg = rc.sps();
    CHECK(cfg.n_pairs == ref_cfg.n_pairs);
    CHECK(cfg.seed == ref_cfg.seed);
    CHECK(cfg.jitter_sigma_ps == ref_cfg.jitter_sigma_ps);
    CHECK(cfg.fiber_length_m == ref_cfg.fiber_length_m);

    auto const spectrum = rc.sps_spectrum();
    auto const ref = scenarios::ln_thin_film_spectrum(rc.materials());
    REQUIRE(spectrum.wavelength_nm.size() == ref.wavelength_nm.size());
    CHECK((spectrum.wavelength_nm - ref.wavelength_nm).abs().maxCoeff() < 1e-9);
    CHECK((spectrum.density / spectrum.density.maxCoeff() - ref.density / ref.density.maxCoeff()).abs().maxCoeff() <
          1e-9);

    auto const eff = rc.sps_efficiency();
    auto const ref_eff = scenarios::spad_longpass_efficiency();
    for (double l : {600.0, 650.0, 700.0, 810.0, 950.0, 1050.0, 1200.0})
        CHECK(eff.single(l) == doctest::Approx(ref_eff.single(l)));
}

TEST_CASE("unknown keys and wrong types are rejected")
{
    auto const typo = write_temp("spdc_typo.json", R"({"pump": {"wavelenght_nm": 400}})");
    CHECK_THROWS_AS(RunConfig::resolve(std::nullopt, typo, std::nullopt), ConfigError);
    auto const type = write_temp("spdc_type.json", R"({"counting": {"duration_s": "long"}})");
    CHECK_THROWS_AS(RunConfig::resolve(std::nullopt, type, std::nullopt), ConfigError);
    auto const junk = write_temp("spdc_junk.json", "{not json");
    CHECK_THROWS_AS(RunConfig::resolve(std::nullopt, junk, std::nullopt), ConfigError);
    CHECK_THROWS_AS(RunConfig::resolve(std::string("nope"), std::nullopt, std::nullopt), ConfigError);
    CHECK_THROWS_AS(RunConfig::resolve(std::nullopt, std::filesystem::path("/nonexistent/x.json"), std::nullopt),
                    ConfigError);
}

TEST_CASE("layering order: defaults, preset, file, seed flag")
{
    auto const file = write_temp("spdc_layer.json", R"({"seed": 9, "counting": {"duration_s": 0.5},
        "spectrum": {"wavelength_nm": {"stop": 900.0}}})");
    auto const rc = RunConfig::resolve(std::string("hbt-car1400"), file, std::nullopt);
    CHECK(rc.seed() == 9);
    CHECK(rc.source().duration_s == 0.5);
    CHECK(rc.source().pair_rate == 112000.0);
    CHECK(rc.spectrum_grid().wavelength_nm.stop == 900.0);
    CHECK(RunConfig::resolve(std::string("hbt-car1400"), file, 123).seed() == 123);
    CHECK(RunConfig::resolve(std::nullopt, std::nullopt, std::nullopt).seed() == 1);
}
