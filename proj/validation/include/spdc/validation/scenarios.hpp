#pragma once

#include <filesystem>
#include <vector>

#include "spdc/counting.hpp"
#include "spdc/jsi.hpp"
#include "spdc/set.hpp"
#include "spdc/spectra.hpp"
#include "spdc/sps.hpp"

// Reference configurations shared by the acceptance suite, the `validate`
// command and the shipped presets.
namespace spdc::scenarios {

/// Directory holding detector tables and other non-material data.
std::filesystem::path data_directory();

PumpConfig ln_pump();
/// x-cut MgO:LN, type-0 (eee), thickness in metres.
CrystalConfig ln_crystal(MaterialLibrary const& lib, double thickness_m);
/// Degenerate collinear pair of `ln_pump`.
std::pair<PhotonMode, PhotonMode> ln_degenerate_modes();
double ln_coherence_length_m(MaterialLibrary const& lib);

struct MapScenario
{
    PumpConfig pump;
    CrystalConfig crystal;
    SpectrumGridSpec grid;
};

/// LN map at thickness multiple * L_c over 500 nm .. conjugate, +-80 deg external.
MapScenario ln_map(MaterialLibrary const& lib, double coherence_multiple);

inline constexpr double bbo_ring_external_deg = 3.0;
/// 1 mm BBO type-I (e -> oo), cut so the degenerate pair is phase matched on
/// a 3 deg external cone; 700 nm .. conjugate, +-6 deg external.
MapScenario bbo_map(MaterialLibrary const& lib);

struct JsiScenario
{
    PumpConfig pump;  // spectral_width still to be calibrated
    CrystalConfig crystal;
    JsiGridSpec grid;
    double target_conditional_hz = 0.6e12;
    double sigma_lo = 3e11;
    double sigma_hi = 3e13;
};

/// 5.8 um LN, 532 nm pump, idler 1500-1620 nm, 13 THz signal window.
JsiScenario ln_jsi(MaterialLibrary const& lib, Eigen::Index nodes = 512);

/// Pump sigma that makes the conditional width equal the target.
double calibrate_jsi_sigma(JsiScenario const& scenario);

/// Rate set with analytic CAR = 1400 at T_c = 1 ns.
SourceConfig car_1400_source();

/// Five rate configurations spanning uncorrelated to strongly correlated light.
std::vector<SourceConfig> counting_configurations();

/// Expected g2(0) of a source from its configured rates.
double analytic_g2(SourceConfig const& source, double window_s);

/// Base configuration of the pump power sweep (reference power 1).
SourceConfig power_sweep_source();
std::vector<double> power_sweep_powers();

SpsConfig sps_config(MaterialLibrary const& lib);

/// Filter centres used to calibrate the fiber delay.
std::vector<double> sps_calibration_wavelengths(double pump_wavelength_nm);

/// Silicon SPAD QE table with a 645 nm long-pass filter.
EfficiencyWindow spad_longpass_efficiency();

/// Collinear emission of the L = L_c LN film over the long-pass band.
PairSpectrum ln_thin_film_spectrum(MaterialLibrary const& lib, Eigen::Index nodes = 401);

/// Fine seed step and spectrometer resolution.
SetScanConfig fine_set_scan();

}  // namespace spdc::scenarios
