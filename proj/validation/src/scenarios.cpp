#include "spdc/validation/scenarios.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

namespace spdc::scenarios {

std::filesystem::path data_directory()
{
    if (char const* env = std::getenv("SPDC_DATA_DIR"); env != nullptr && *env != '\0')
        return env;
    return SPDC_DEFAULT_DATA_DIR;
}

PumpConfig ln_pump()
{
    PumpConfig p;
    p.center_wavelength_nm = 405.0;
    p.waist_m = 100e-6;
    p.polarization_angle_deg = 90.0;
    return p;
}

CrystalConfig ln_crystal(MaterialLibrary const& lib, double thickness_m)
{
    CrystalConfig c;
    c.material = lib.get("mgo_ln");
    c.thickness_m = thickness_m;
    c.d_eff_pm_per_v = 25.0;
    c.pump_axis = PolarizationAxis::extraordinary;
    c.signal_axis = PolarizationAxis::extraordinary;
    c.idler_axis = PolarizationAxis::extraordinary;
    c.optic_axis_angle = pi / 2;
    return c;
}

std::pair<PhotonMode, PhotonMode> ln_degenerate_modes()
{
    double const half = 0.5 * ln_pump().angular_frequency();
    return {{half, 0.0, PolarizationAxis::extraordinary}, {half, 0.0, PolarizationAxis::extraordinary}};
}

double ln_coherence_length_m(MaterialLibrary const& lib)
{
    auto const [s, i] = ln_degenerate_modes();
    auto const dk = mismatch(ln_pump(), ln_crystal(lib, 1e-6), s, i);
    return coherence_length(dk.longitudinal).metres();
}

MapScenario ln_map(MaterialLibrary const& lib, double coherence_multiple)
{
    MapScenario m;
    m.pump = ln_pump();
    m.crystal = ln_crystal(lib, coherence_multiple * ln_coherence_length_m(lib));
    double const lo = 500.0;
    m.grid.wavelength_nm = {lo, conjugate_wavelength_nm(m.pump.center_wavelength_nm, lo), 512};
    m.grid.angle_deg = {-80.0, 80.0, 512};
    m.grid.frame = AngleFrame::external;
    return m;
}

MapScenario bbo_map(MaterialLibrary const& lib)
{
    MapScenario m;
    m.pump = ln_pump();
    m.crystal.material = lib.get("bbo");
    m.crystal.thickness_m = 1e-3;
    m.crystal.d_eff_pm_per_v = 2.0;
    m.crystal.pump_axis = PolarizationAxis::extraordinary;
    m.crystal.signal_axis = PolarizationAxis::ordinary;
    m.crystal.idler_axis = PolarizationAxis::ordinary;
    double const degenerate = 2.0 * m.pump.center_wavelength_nm;
    double const n_s = refractive_index(*m.crystal.material, PolarizationAxis::ordinary, degenerate);
    double const internal = external_to_internal_angle(degrees_to_radians(bbo_ring_external_deg), n_s);
    m.crystal.optic_axis_angle = phase_matching_cut_angle(m.pump, m.crystal, degenerate, internal);
    double const lo = 700.0;
    m.grid.wavelength_nm = {lo, conjugate_wavelength_nm(m.pump.center_wavelength_nm, lo), 512};
    m.grid.angle_deg = {-6.0, 6.0, 512};
    m.grid.frame = AngleFrame::external;
    return m;
}

JsiScenario ln_jsi(MaterialLibrary const& lib, Eigen::Index nodes)
{
    JsiScenario s;
    s.pump.center_wavelength_nm = 532.0;
    s.pump.waist_m = 100e-6;
    s.crystal = ln_crystal(lib, 5.8e-6);
    s.grid = seed_window_grid(532.0, 1500.0, 1620.0, 13e12, nodes, nodes);
    return s;
}

double calibrate_jsi_sigma(JsiScenario const& scenario)
{
    auto conditional = [&](double sigma) {
        PumpConfig pump = scenario.pump;
        pump.spectral_width = sigma;
        return widths(compute_jsi(pump, scenario.crystal, scenario.grid)).conditional.fwhm_hz;
    };
    return calibrate_pump_width(conditional, scenario.target_conditional_hz, scenario.sigma_lo, scenario.sigma_hi);
}

SourceConfig car_1400_source()
{
    // N1 = N2 = 112000 + 88000 = 2e5/s, N_a = 40/s, N_r = 56000/s.
    SourceConfig s;
    s.pair_rate = 112000.0;
    s.background_rates = {88000.0, 88000.0};
    s.efficiencies = {1.0, 1.0};
    s.jitter_sigma_ps = 50.0;
    s.duration_s = 2.0;
    s.seed = 1400;
    return s;
}

std::vector<SourceConfig> counting_configurations()
{
    auto make = [](double pairs, double b1, double b2, double e1, double e2, double duration, std::uint64_t seed) {
        SourceConfig s;
        s.pair_rate = pairs;
        s.background_rates = {b1, b2};
        s.efficiencies = {e1, e2};
        s.jitter_sigma_ps = 50.0;
        s.duration_s = duration;
        s.seed = seed;
        return s;
    };
    return {
        make(0.0, 1e5, 1e5, 1.0, 1.0, 4.0, 101),
        make(5e4, 5e4, 5e4, 0.5, 0.5, 2.0, 102),
        make(1e5, 2e5, 1e5, 1.0, 0.8, 2.0, 103),
        make(2e4, 1e4, 1e4, 0.3, 0.6, 4.0, 104),
        make(2e5, 0.0, 0.0, 0.7, 0.7, 1.0, 105),
    };
}

double analytic_g2(SourceConfig const& s, double window_s)
{
    double const n1 = s.pair_rate * s.efficiencies[0] + s.background_rates[0];
    double const n2 = s.pair_rate * s.efficiencies[1] + s.background_rates[1];
    // Partner lag is N(0, 2 sigma^2); fraction inside [-T/2, T/2).
    double const half_ps = 0.5 * window_s * 1e12;
    double const inside = s.jitter_sigma_ps > 0.0 ? std::erf(half_ps / (2.0 * s.jitter_sigma_ps)) : 1.0;
    double const real = 0.5 * s.pair_rate * s.efficiencies[0] * s.efficiencies[1] * inside;
    double const accidental = n1 * n2 * window_s;
    return (real + accidental) / accidental;
}

SourceConfig power_sweep_source()
{
    SourceConfig s;
    s.pair_rate = 1e5;
    s.background_rates = {1e5, 1e5};
    s.jitter_sigma_ps = 50.0;
    s.duration_s = 1.0;
    s.seed = 2000;
    return s;
}

std::vector<double> power_sweep_powers()
{
    return {0.25, 0.5, 1.0, 2.0, 4.0};
}

SpsConfig sps_config(MaterialLibrary const& lib)
{
    SpsConfig c;
    c.fiber = lib.get("fused_silica");
    c.fiber_length_m = 160.0;
    c.jitter_sigma_ps = 30.0;
    c.bin_width_ps = 10.0;
    c.n_pairs = 1000000;
    c.seed = 11;
    return c;
}

std::vector<double> sps_calibration_wavelengths(double pump_wavelength_nm)
{
    std::vector<double> out{620.0, 680.0, 750.0, 2.0 * pump_wavelength_nm};
    for (double l : {750.0, 680.0, 620.0})
        out.push_back(conjugate_wavelength_nm(pump_wavelength_nm, l));
    return out;
}

EfficiencyWindow spad_longpass_efficiency()
{
    auto const path = data_directory() / "detectors" / "si_spad_qe.csv";
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open detector table " + path.string());
    EfficiencyWindow w = read_efficiency_csv(in);
    w.passband_min_nm = 645.0;
    return w;
}

PairSpectrum ln_thin_film_spectrum(MaterialLibrary const& lib, Eigen::Index nodes)
{
    PumpConfig const pump = ln_pump();
    CrystalConfig const crystal = ln_crystal(lib, ln_coherence_length_m(lib));
    PairSpectrum s;
    s.pump_wavelength_nm = pump.center_wavelength_nm;
    double const lo = 645.0;
    s.wavelength_nm = Eigen::ArrayXd::LinSpaced(nodes, lo, conjugate_wavelength_nm(pump.center_wavelength_nm, lo));
    s.density.resize(nodes);
    for (Eigen::Index j = 0; j < nodes; ++j)
        s.density[j] = emission_intensity(pump, crystal, s.wavelength_nm[j], 0.0, IdlerIntegration::quadrature);
    return s;
}

SetScanConfig fine_set_scan()
{
    SetScanConfig c;
    c.seed_step_nm = 0.05;
    c.resolution_nm = 0.05;
    c.signal_nodes = 512;
    return c;
}

}  // namespace spdc::scenarios
