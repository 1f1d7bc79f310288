#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "oracles.hpp"
#include "spdc/errors.hpp"
#include "spdc/jsi.hpp"
#include "spdc/validation/scenarios.hpp"

using namespace spdc;

namespace {
MaterialLibrary const& lib()
{
    static auto const l = MaterialLibrary::load_default();
    return l;
}

// |psi|^2 = exp(-(x+y)^2 / (2 a^2) - (x-y)^2 / (2 b^2)) on a symmetric grid.
// For this state both the Schmidt number and the Fedorov ratio equal
// (1 + r^2) / (2 r) with r = a / b.
JointSpectralGrid double_gaussian(double a, double b, Eigen::Index n)
{
    double const scale = 1e12;
    double const centre = 2e15;
    Eigen::ArrayXd const x = Eigen::ArrayXd::LinSpaced(n, -4.0, 4.0);
    JointSpectralGrid g;
    g.omega_s = centre + scale * x;
    g.omega_i = centre + scale * x;
    g.intensity.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
            double const u = x[r] + x[c];
            double const v = x[r] - x[c];
            g.intensity(r, c) = std::exp(-u * u / (2 * a * a) - v * v / (2 * b * b));
        }
    return g;
}
}  // namespace

TEST_CASE("double-Gaussian Schmidt number and Fedorov ratio")
{
    for (double r : {1.0, 2.0, 4.0, 0.25}) {
        double const b = 0.5;
        auto const g = double_gaussian(r * b, b, 401);
        double const expect = (1.0 + r * r) / (2.0 * r);
        CAPTURE(r);
        CHECK(schmidt_number(g) == doctest::Approx(expect).epsilon(1e-3));
        auto const w = widths(g);
        CHECK_FALSE(w.unconditional.range_limited);
        CHECK_FALSE(w.conditional.range_limited);
        CHECK(fedorov_ratio(w.unconditional.fwhm_hz, w.conditional.fwhm_hz) == doctest::Approx(expect).epsilon(2e-3));
    }
}

TEST_CASE("separable state has unit Schmidt number")
{
    JointSpectralGrid g;
    g.omega_s = Eigen::ArrayXd::LinSpaced(64, 1.0e15, 1.1e15);
    g.omega_i = Eigen::ArrayXd::LinSpaced(48, 2.0e15, 2.1e15);
    Eigen::ArrayXd const f = (-(g.omega_s - 1.05e15).square() / 1e26).exp();
    Eigen::ArrayXd const h = (-(g.omega_i - 2.05e15).square() / 2e26).exp();
    g.intensity = (f.matrix() * h.matrix().transpose()).array();
    CHECK(schmidt_number(g) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("conditional width is pump-limited for a thin crystal")
{
    auto const sc = scenarios::ln_jsi(lib(), 512);
    auto pump = sc.pump;
    pump.spectral_width = 1e12;
    auto const g = compute_jsi(pump, sc.crystal, sc.grid);
    // Pump factor exp(-(detuning / sigma)^2 / 2) on the intensity.
    double const expect = 2.0 * std::sqrt(2.0 * std::log(2.0)) * pump.spectral_width / (2.0 * oracle::pi);
    CHECK(widths(g).conditional.fwhm_hz == doctest::Approx(expect).epsilon(1e-2));
    CHECK(g.intensity(100, 200) == doctest::Approx(jsi_value(pump, sc.crystal, g.omega_s[100], g.omega_i[200])));
}

TEST_CASE("seed window grid is centred on the conjugate band")
{
    auto const spec = seed_window_grid(532.0, 1500.0, 1620.0, 13e12, 64, 32);
    double const wp = 2.0 * oracle::pi * oracle::c / 532e-9;
    double const wi_lo = 2.0 * oracle::pi * oracle::c / 1620e-9;
    double const wi_hi = 2.0 * oracle::pi * oracle::c / 1500e-9;
    CHECK(spec.omega_i.start == doctest::Approx(wi_lo));
    CHECK(spec.omega_i.stop == doctest::Approx(wi_hi));
    CHECK(0.5 * (spec.omega_s.start + spec.omega_s.stop) == doctest::Approx(wp - 0.5 * (wi_lo + wi_hi)));
    CHECK(spec.omega_s.stop - spec.omega_s.start == doctest::Approx(2.0 * oracle::pi * 13e12));
}

TEST_CASE("pump width calibration")
{
    auto const f = [](double sigma) { return 0.3 * sigma + 1e9; };
    CHECK(calibrate_pump_width(f, 0.3 * 2.5e12 + 1e9, 1e11, 1e13) == doctest::Approx(2.5e12).epsilon(1e-9));
    CHECK_THROWS_AS(calibrate_pump_width(f, 1e15, 1e11, 1e13), NumericalError);
    CHECK_THROWS_AS(calibrate_pump_width(f, 1e12, 1e13, 1e11), ConfigError);
}

TEST_CASE("CW pump and malformed grids are rejected")
{
    auto const sc = scenarios::ln_jsi(lib(), 16);
    auto pump = sc.pump;
    pump.spectral_width = 0.0;
    CHECK_THROWS_AS(compute_jsi(pump, sc.crystal, sc.grid), ConfigError);
    JointSpectralGrid g;
    g.omega_s = Eigen::ArrayXd::LinSpaced(4, 1.0, 2.0);
    g.omega_i = Eigen::ArrayXd::LinSpaced(3, 1.0, 2.0);
    g.intensity = Eigen::ArrayXXd::Ones(3, 3);
    CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("JSI CSV header")
{
    auto const g = double_gaussian(1.0, 0.5, 8);
    std::ostringstream out;
    write_jsi_csv(out, g);
    CHECK(out.str().rfind("# columns:", 0) == 0);
}
