#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "spdc/errors.hpp"
#include "spdc/profile.hpp"
#include "spdc/sps.hpp"

using namespace spdc;

namespace {
MaterialLibrary const& lib()
{
    static auto const l = MaterialLibrary::load_default();
    return l;
}

SpsConfig fiber(double jitter_ps, double bin_ps, std::uint64_t pairs)
{
    SpsConfig c;
    c.fiber = lib().get("fused_silica");
    c.fiber_length_m = 160.0;
    c.jitter_sigma_ps = jitter_ps;
    c.bin_width_ps = bin_ps;
    c.n_pairs = pairs;
    c.seed = 5;
    return c;
}

double oracle_delay_ps(double nm) { return 1e12 * 160.0 * oracle::fused_silica.group_index(nm) / oracle::c; }

PairSpectrum single_line(double nm)
{
    PairSpectrum s;
    s.pump_wavelength_nm = 405.0;
    s.lines = {{nm, 1.0}};
    return s;
}

Eigen::Index argmax(Eigen::ArrayXd const& a, Eigen::Index lo, Eigen::Index hi)
{
    Eigen::Index k = 0;
    a.segment(lo, hi - lo).maxCoeff(&k);
    return lo + k;
}
}  // namespace

TEST_CASE("fiber delay is L n_g / c")
{
    auto const c = fiber(30.0, 10.0, 1);
    for (double nm : {650.0, 810.0, 1100.0})
        CHECK(fiber_delay_ps(c, nm) == doctest::Approx(oracle_delay_ps(nm)).epsilon(1e-7));
    // Normal dispersion: blue arrives later.
    CHECK(fiber_delay_ps(c, 650.0) > fiber_delay_ps(c, 1100.0));
}

TEST_CASE("a single pair line gives two mirror delay peaks")
{
    double const l1 = 700.0;
    double const l2 = oracle::conjugate_nm(405.0, l1);
    double const dt = oracle_delay_ps(l2) - oracle_delay_ps(l1);
    auto const h = simulate_sps(single_line(l1), {}, fiber(0.5, 1.0, 20000));
    CHECK(h.pairs_detected == 20000);
    Eigen::Index const mid = h.counts.size() / 2;
    Eigen::Index const neg = argmax(h.counts, 0, mid);
    Eigen::Index const pos = argmax(h.counts, mid + 1, h.counts.size());
    CHECK(h.delay_ps[neg] == doctest::Approx(-std::abs(dt)).epsilon(1.0 / std::abs(dt)));
    CHECK(h.delay_ps[pos] == doctest::Approx(std::abs(dt)).epsilon(1.0 / std::abs(dt)));
    double const left = h.counts.head(mid).sum();
    CHECK(std::abs(left - 10000.0) < 5.0 * std::sqrt(5000.0));
}

TEST_CASE("calibration recovers an exact cubic")
{
    Eigen::Vector4d const c_true(3.0, -0.02, 4e-6, -2e-10);
    double const ref = 810.0;
    std::vector<CalibrationPoint> pts;
    for (double t : {-6000.0, -3500.0, -1000.0, 0.0, 800.0, 2500.0, 5200.0})
        pts.push_back({ref + c_true[0] + t * (c_true[1] + t * (c_true[2] + t * c_true[3])), t});
    auto const curve = calibrate(pts, ref);
    CHECK(curve.residual_rms_nm < 1e-9);
    for (int k = 0; k < 4; ++k)
        CHECK(curve.coefficients[k] == doctest::Approx(c_true[k]).epsilon(1e-7));
    for (double t : {-5000.0, 100.0, 4000.0})
        CHECK(curve.wavelength_nm(t) ==
              doctest::Approx(ref + c_true[0] + t * (c_true[1] + t * (c_true[2] + t * c_true[3]))).epsilon(1e-12));
    CHECK(curve.span_lo_ps == -6000.0);
    CHECK(curve.span_hi_ps == 5200.0);

    std::mt19937 g(3);
    for (int rep = 0; rep < 5; ++rep) {
        std::shuffle(pts.begin(), pts.end(), g);
        auto const shuffled = calibrate(pts, ref);
        CHECK(shuffled.coefficients == curve.coefficients);
    }
}

TEST_CASE("calibration rejects degenerate input and flags non-monotonic curves")
{
    std::vector<CalibrationPoint> three{{700, -1}, {800, 0}, {900, 1}};
    CHECK_THROWS_AS(calibrate(three, 810.0), ConfigError);
    std::vector<CalibrationPoint> same{{700, 5}, {800, 5}, {900, 5}, {950, 5}};
    CHECK_THROWS_AS(calibrate(same, 810.0), NumericalError);
    std::vector<CalibrationPoint> parabola;
    for (double t : {-2.0, -1.0, 0.0, 1.0, 2.0})
        parabola.push_back({810.0 + t * t, t});
    CHECK_FALSE(calibrate(parabola, 810.0).monotonic);
}

TEST_CASE("monochromatic pair reconstructs at its wavelengths")
{
    auto const config = fiber(0.5, 1.0, 20000);
    std::vector<double> wl;
    for (double l = 620.0; l <= 1180.0; l += 40.0)
        wl.push_back(l);
    auto const curve = calibrate(model_calibration_points(config, 405.0, wl), 810.0);
    CHECK(curve.monotonic);
    auto const h = simulate_sps(single_line(700.0), {}, config);
    auto const rec = reconstruct_spectrum(h, curve);
    CHECK(rec.excluded_counts == 0.0);
    Eigen::Index const split = std::lower_bound(rec.wavelength_nm.data(), rec.wavelength_nm.data() + rec.wavelength_nm.size(), 810.0) -
                               rec.wavelength_nm.data();
    Eigen::Index const blue = argmax(rec.counts, 0, split);
    Eigen::Index const red = argmax(rec.counts, split, rec.counts.size());
    double const tol = 3.0 * curve.residual_rms_nm + 1.0;
    CHECK(std::abs(rec.wavelength_nm[blue] - 700.0) < tol);
    CHECK(std::abs(rec.wavelength_nm[red] - oracle::conjugate_nm(405.0, 700.0)) < tol);
    // Density integrates back to the counts.
    CHECK((rec.density * rec.bin_width_nm).sum() == doctest::Approx(rec.counts.sum()));
}

TEST_CASE("bins outside the calibration span are excluded")
{
    auto const config = fiber(0.5, 1.0, 5000);
    auto const curve = calibrate(model_calibration_points(config, 405.0, {760.0, 780.0, 800.0, 840.0, 860.0}), 810.0);
    auto const rec = reconstruct_spectrum(simulate_sps(single_line(650.0), {}, config), curve);
    CHECK(rec.excluded_counts == 5000.0);
}

TEST_CASE("Gaussian spectrum width survives the round trip")
{
    auto const config = fiber(30.0, 10.0, 300000);
    std::vector<double> wl;
    for (double l = 640.0; l <= 800.0; l += 20.0)
        wl.push_back(l);
    for (double l : std::vector<double>(wl))
        wl.push_back(oracle::conjugate_nm(405.0, l));
    auto const curve = calibrate(model_calibration_points(config, 405.0, wl), 810.0);
    auto const rec = reconstruct_spectrum(simulate_sps(gaussian_pair_spectrum(405.0, 810.0, 60.0), {}, config), curve);
    auto const w = fwhm(rec.wavelength_nm, rec.density);
    CHECK(w.width == doctest::Approx(60.0).epsilon(0.06));
}

TEST_CASE("efficiency windows")
{
    EfficiencyWindow g;
    g.shape = EfficiencyWindow::Shape::gaussian;
    g.peak = 0.5;
    g.center_nm = 800.0;
    g.fwhm_nm = 100.0;
    CHECK(g.single(800.0) == doctest::Approx(0.5));
    CHECK(g.single(850.0) == doctest::Approx(0.25));
    CHECK(g.pair(800.0, 850.0) == doctest::Approx(0.125));

    std::istringstream table("# columns: wavelength_nm,efficiency\nwavelength_nm,efficiency\n600,0.2\n800,0.6\n");
    auto t = read_efficiency_csv(table);
    CHECK(t.single(700.0) == doctest::Approx(0.4));
    CHECK(t.single(900.0) == 0.0);
    t.passband_min_nm = 650.0;
    CHECK(t.single(620.0) == 0.0);

    std::istringstream bad("600;0.2\n");
    CHECK_THROWS_AS(read_efficiency_csv(bad), ConfigError);
}

TEST_CASE("bandwidth and correlation time")
{
    double const dnu = bandwidth_hz(200.0, 810.0);
    CHECK(dnu == doctest::Approx(oracle::c * 200e-9 / (810e-9 * 810e-9)));
    CHECK(correlation_time(dnu) == doctest::Approx(1.0 / dnu));
    CHECK_THROWS_AS(correlation_time(0.0), ConfigError);
}
