#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "oracles.hpp"
#include "spdc/errors.hpp"
#include "spdc/spectra.hpp"

using namespace spdc;
using Axis = PolarizationAxis;

namespace {
MaterialLibrary const& lib()
{
    static auto const l = MaterialLibrary::load_default();
    return l;
}

double ln_lc()
{
    return oracle::pi / std::abs(2.0 * oracle::k(oracle::mgo_ln_e, 810.0) - oracle::k(oracle::mgo_ln_e, 405.0));
}

CrystalConfig ln(double thickness)
{
    CrystalConfig c;
    c.material = lib().get("mgo_ln");
    c.thickness_m = thickness;
    return c;
}

SpectrumGridSpec collinear_strip()
{
    SpectrumGridSpec spec;
    spec.wavelength_nm = {500.0, oracle::conjugate_nm(405.0, 500.0), 512};
    spec.angle_deg = {-1.0, 1.0, 3};
    return spec;
}
}  // namespace

TEST_CASE("collinear spectrum nulls versus thickness")
{
    PumpConfig pump;
    auto const spec = collinear_strip();
    for (auto [multiple, nulls] : {std::pair{1.0, 0}, std::pair{5.0, 2}}) {
        auto const grid = frequency_angular_map(pump, ln(multiple * ln_lc()), spec);
        Eigen::Index const col = nearest_column(grid, 0.0);
        CHECK(grid.angle_deg[col] == doctest::Approx(0.0));
        CHECK(count_nulls(grid.intensity.col(col)) == nulls);
    }
}

TEST_CASE("count_nulls on synthetic profiles")
{
    Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(1001, -3.0 * oracle::pi, 3.0 * oracle::pi);
    Eigen::ArrayXd y = x.sin().square() + 0.1;
    CHECK(count_nulls(y) == 0);
    y = x.sin().square() / (1.0 + x.square());
    CHECK(count_nulls(y) == 5);
}

TEST_CASE("collinear intensity matches the plane-wave sinc^2 for a wide pump")
{
    PumpConfig pump;
    pump.waist_m = 5e-3;
    auto const crystal = ln(3.0 * ln_lc());
    for (double nm : {650.0, 810.0, 900.0}) {
        double const ki = oracle::k(oracle::mgo_ln_e, oracle::conjugate_nm(405.0, nm));
        double const dk = oracle::k(oracle::mgo_ln_e, nm) + ki - oracle::k(oracle::mgo_ln_e, 405.0);
        double const sinc2 = std::pow(std::sin(dk * crystal.thickness_m / 2) / (dk * crystal.thickness_m / 2), 2);
        CHECK(emission_intensity(pump, crystal, nm, 0.0, IdlerIntegration::collinear_pump) ==
              doctest::Approx(sinc2).epsilon(1e-9));
        CHECK(emission_intensity(pump, crystal, nm, 0.0, IdlerIntegration::quadrature, 2001) ==
              doctest::Approx(sinc2).epsilon(1e-3));
    }
}

TEST_CASE("internal-frame cells beyond total internal reflection are masked")
{
    PumpConfig pump;
    SpectrumGridSpec spec;
    spec.wavelength_nm = {800.0, 820.0, 3};
    spec.angle_deg = {0.0, 80.0, 9};
    spec.frame = AngleFrame::internal;
    auto const grid = frequency_angular_map(pump, ln(ln_lc()), spec);
    for (Eigen::Index r = 0; r < grid.intensity.rows(); ++r) {
        double const critical = std::asin(1.0 / oracle::mgo_ln_e.n(grid.wavelength_nm[r])) * 180.0 / oracle::pi;
        for (Eigen::Index c = 0; c < grid.intensity.cols(); ++c) {
            CHECK(grid.masked(r, c) == (grid.angle_deg[c] > critical));
            if (grid.masked(r, c))
                CHECK(grid.intensity(r, c) == 0.0);
        }
    }
}

TEST_CASE("Snell conversions")
{
    double const n = 2.2;
    CHECK(critical_angle(n) == doctest::Approx(std::asin(1.0 / n) * 180.0 / oracle::pi));
    double const ext = 0.4;
    double const in = external_to_internal_angle(ext, n);
    CHECK(std::sin(ext) == doctest::Approx(n * std::sin(in)));
    REQUIRE(internal_to_external_angle(in, n).has_value());
    CHECK(*internal_to_external_angle(in, n) == doctest::Approx(ext));
    CHECK_FALSE(internal_to_external_angle(std::asin(1.0 / n) + 0.01, n).has_value());
}

TEST_CASE("BBO cut angle for a non-collinear degenerate ring")
{
    PumpConfig pump;
    CrystalConfig c;
    c.material = lib().get("bbo");
    c.thickness_m = 1e-3;
    c.pump_axis = Axis::extraordinary;
    c.signal_axis = Axis::ordinary;
    c.idler_axis = Axis::ordinary;
    double const ns = oracle::bbo_o.n(810.0);
    double const ts = std::asin(std::sin(3.0 * oracle::pi / 180.0) / ns);
    double const theta = phase_matching_cut_angle(pump, c, 810.0, ts);

    // k_p = 2 k_s cos(theta_s) fixes the pump index; invert the index ellipse.
    double const np = ns * std::cos(ts);
    double const no = oracle::bbo_o.n(405.0);
    double const ne = oracle::bbo_e.n(405.0);
    double const s2 = (1.0 / (np * np) - 1.0 / (no * no)) / (1.0 / (ne * ne) - 1.0 / (no * no));
    CHECK(theta == doctest::Approx(std::asin(std::sqrt(s2))).epsilon(1e-8));
}

TEST_CASE("thickness scan follows sin^2 of the coherence length")
{
    PumpConfig pump;
    auto const crystal = ln(1e-6);
    double const half = 0.5 * pump.angular_frequency();
    PhotonMode const s{half, 0.0, Axis::extraordinary};
    Eigen::ArrayXd const multiples = Eigen::ArrayXd::LinSpaced(13, 0.0, 6.0);
    double const lc = ln_lc();
    auto const scan = thickness_scan(pump, crystal, multiples * lc, s, s);
    double const peak = scan.rate[2];  // L = L_c
    for (Eigen::Index j = 0; j < multiples.size(); ++j)
        CHECK(scan.rate[j] / peak == doctest::Approx(std::pow(std::sin(oracle::pi * multiples[j] / 2), 2)).epsilon(1e-9));
    CHECK_THROWS_AS(thickness_scan(pump, crystal, -multiples - 1.0, s, s), ConfigError);
}

TEST_CASE("polarization response is sin^2 with a z analyzer")
{
    for (double deg = 0.0; deg <= 180.0; deg += 15.0) {
        CHECK(polarization_response(deg, Analyzer::z) ==
              doctest::Approx(std::pow(std::sin(deg * oracle::pi / 180.0), 2)));
        CHECK(polarization_response(deg, Analyzer::y) == 0.0);
    }
}

TEST_CASE("degenerate cut and CSV header")
{
    PumpConfig pump;
    auto const grid = frequency_angular_map(pump, ln(ln_lc()), collinear_strip());
    auto const cut = degenerate_cut(grid, 405.0);
    CHECK(grid.wavelength_nm[cut.row] == doctest::Approx(810.0).epsilon(3e-3));
    CHECK(grid.angle_deg[cut.column] >= 0.0);
    std::ostringstream out;
    write_spectrum_csv(out, grid);
    CHECK(out.str().rfind("# columns:", 0) == 0);
}

TEST_CASE("pulsed pump is rejected for frequency-angular maps")
{
    PumpConfig pump;
    pump.spectral_width = 1e12;
    CHECK_THROWS_AS(frequency_angular_map(pump, ln(1e-6), collinear_strip()), ConfigError);
}
