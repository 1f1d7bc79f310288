#pragma once

#include <Eigen/Core>

#include "spdc/jsi.hpp"

namespace spdc {

// Stimulated-emission tomography scan: a CW seed steps over the idler band
// and the stimulated signal spectrum is recorded for every seed.
struct SetScanConfig
{
    double seed_min_nm = 1500.0;
    double seed_max_nm = 1620.0;
    double seed_step_nm = 0.1;
    double resolution_nm = 1.0;         // spectrometer Gaussian FWHM; 0 is an ideal spectrometer
    double signal_span_hz = 13e12;      // spectrometer window, centred on the conjugate of the seed band
    Eigen::Index signal_nodes = 512;
    bool shg_artifact = false;          // faint line at omega_s = 2 omega_seed
    double artifact_amplitude = 0.05;   // relative to the JSI peak

    void validate() const;
    /// Seed angular frequencies, ascending.
    Eigen::ArrayXd seed_axis() const;
    /// Spectrometer angular frequencies, ascending.
    Eigen::ArrayXd signal_axis(double pump_wavelength_nm) const;
};

/*!
 * Convolves every idler column of `truth` along omega_s with a Gaussian whose
 * FWHM is `resolution_nm` converted to angular frequency at the local signal
 * wavelength. Kernel rows are normalised to unit sum. Linear in `truth`;
 * resolution 0 returns the input.
 */
JointSpectralGrid apply_spectrometer(JointSpectralGrid const& truth, double resolution_nm);

/// Seed scan of the JSI: the JSI on the scan axes, convolved with the
/// spectrometer, plus the optional artifact line.
JointSpectralGrid simulate_set(SetScanConfig const& config, PumpConfig const& pump, CrystalConfig const& crystal);

struct JsiComparison
{
    double rms = 0.0;          // RMS difference of peak-normalised grids over the overlap
    double relative_l2 = 0.0;  // ||a - b|| / ||a|| over the same nodes
    double omega_s_lo = 0.0;
    double omega_s_hi = 0.0;
    double omega_i_lo = 0.0;
    double omega_i_hi = 0.0;
    Eigen::Index nodes = 0;
};

/// Compares on the nodes of `direct` inside the overlap of the two grids,
/// bilinearly interpolating `reconstructed`. Throws ConfigError when the
/// grids do not overlap.
JsiComparison compare_jsi(JointSpectralGrid const& direct, JointSpectralGrid const& reconstructed);

}  // namespace spdc
