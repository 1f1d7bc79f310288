#pragma once

#include <functional>
#include <iosfwd>

#include <Eigen/Core>

#include "spdc/kinematics.hpp"
#include "spdc/profile.hpp"

namespace spdc {

// Joint spectral intensity sampled on a rectangular grid. Rows index the
// signal frequency, columns the idler frequency; both axes in rad/s,
// ascending.
struct JointSpectralGrid
{
    Eigen::ArrayXd omega_s;
    Eigen::ArrayXd omega_i;
    Eigen::ArrayXXd intensity;

    void validate() const;
};

struct JsiGridSpec
{
    UniformAxis omega_s;
    UniformAxis omega_i;

    void validate() const;
};

/*!
 * Grid spanning the idler band [idler_min_nm, idler_max_nm] and a signal band
 * of `signal_span_hz` centred on the conjugate of the idler band centre for
 * the pump centre frequency. This is the stimulated-emission-tomography
 * layout: the idler (seed) axis is wider than the signal axis by the stripe
 * width, so every signal row contains its whole cross-section.
 */
JsiGridSpec seed_window_grid(double pump_wavelength_nm, double idler_min_nm, double idler_max_nm,
                             double signal_span_hz, Eigen::Index signal_nodes, Eigen::Index idler_nodes);

/// F(omega_s, omega_i) = sinc^2(dk_par L/2) exp(-((omega_s + omega_i - omega_p0)/sigma)^2 / 2)
/// for collinear emission. Requires a pulsed pump (sigma > 0).
double jsi_value(PumpConfig const& pump, CrystalConfig const& crystal, double omega_s, double omega_i);

JointSpectralGrid compute_jsi(PumpConfig const& pump, CrystalConfig const& crystal, JsiGridSpec const& spec);

/// Same, on arbitrary strictly ascending axes (rad/s).
JointSpectralGrid compute_jsi(PumpConfig const& pump, CrystalConfig const& crystal, Eigen::ArrayXd omega_s,
                              Eigen::ArrayXd omega_i);

struct WidthEstimate
{
    double fwhm_hz = 0.0;
    bool range_limited = false;
};

struct SpectralWidths
{
    WidthEstimate unconditional;  // Delta: FWHM of the signal marginal
    WidthEstimate conditional;    // delta: FWHM of the idler cross-section through the maximum
};

/// FWHM widths in Hz. A width whose profile does not drop below half
/// maximum inside the grid is flagged and reported as the full axis span.
SpectralWidths widths(JointSpectralGrid const& grid);

/// Delta / delta.
double fedorov_ratio(double unconditional_hz, double conditional_hz);

/// Schmidt number 1/sum p_n^2 of the amplitude sqrt(intensity) with zero
/// phase, p_n the normalised squared singular values.
double schmidt_number(JointSpectralGrid const& grid);

struct EntanglementReport
{
    SpectralWidths widths;
    double fedorov_ratio = 0.0;
    double schmidt_number = 0.0;
};

EntanglementReport entanglement_report(JointSpectralGrid const& grid);

/// Pump spectral width sigma (rad/s) such that conditional_width_hz(sigma)
/// equals target_hz. The width must increase with sigma inside the bracket.
double calibrate_pump_width(std::function<double(double)> const& conditional_width_hz, double target_hz,
                            double sigma_lo, double sigma_hi);

void write_jsi_csv(std::ostream& out, JointSpectralGrid const& grid);

}  // namespace spdc
