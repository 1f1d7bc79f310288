#pragma once

#include <iosfwd>
#include <optional>

#include <Eigen/Core>

#include "spdc/kinematics.hpp"
#include "spdc/profile.hpp"

namespace spdc {

enum class AngleFrame { external, internal };
enum class IdlerIntegration { quadrature, collinear_pump };

char const* to_string(AngleFrame frame);
char const* to_string(IdlerIntegration mode);
AngleFrame angle_frame_from_string(std::string_view text);
IdlerIntegration idler_integration_from_string(std::string_view text);

inline constexpr int default_quadrature_nodes = 512;
// Quadrature window half-width around the transverse root, in units of 1/w.
// The pump function is exp(-36) at the window edge.
inline constexpr double quadrature_half_width = 6.0;

struct SpectrumGridSpec
{
    UniformAxis wavelength_nm{700.0, 960.0, 512};  // signal wavelength
    UniformAxis angle_deg{-10.0, 10.0, 512};      // signal angle in `frame`
    AngleFrame frame = AngleFrame::external;
    IdlerIntegration integration = IdlerIntegration::quadrature;
    int quadrature_nodes = default_quadrature_nodes;

    void validate() const;
};

// Frequency-angular emission map. Rows index wavelength, columns angle.
// Masked cells (signal beyond the critical angle) hold zero intensity.
struct SpectrumGrid
{
    Eigen::ArrayXd wavelength_nm;
    Eigen::ArrayXd angle_deg;
    AngleFrame frame = AngleFrame::external;
    Eigen::ArrayXXd intensity;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> masked;
};

/*!
 * Relative emission density at one signal wavelength and internal angle for a
 * CW pump, with the idler fixed by omega_i = omega_p - omega_s.
 *
 * Quadrature mode integrates F_pm F_p over the idler transverse wavevector
 * q_i = k_i sin(theta_i) (trapezoid, `nodes` points over the window where
 * |dk_perp w| <= quadrature_half_width, clipped to idlers inside their
 * critical angle), normalised by sqrt(pi)/w so that a flat F_pm integrates to
 * itself. Collinear-pump mode evaluates F_pm at the idler angle with
 * dk_perp = 0 and returns zero when that idler cannot leave the crystal.
 */
double emission_intensity(PumpConfig const& pump, CrystalConfig const& crystal, double signal_wavelength_nm,
                          double signal_internal_angle, IdlerIntegration mode,
                          int nodes = default_quadrature_nodes);

SpectrumGrid frequency_angular_map(PumpConfig const& pump, CrystalConfig const& crystal,
                                   SpectrumGridSpec const& spec);

/// asin(1/n) in degrees.
double critical_angle(double n);

/// Snell refraction at the crystal/air boundary, radians.
double external_to_internal_angle(double external_angle, double n);
std::optional<double> internal_to_external_angle(double internal_angle, double n);

/// Internal idler angle that cancels the transverse mismatch, if any.
std::optional<double> transverse_root_idler_angle(double signal_wavenumber, double idler_wavenumber,
                                                  double signal_internal_angle);

/// Smallest non-negative internal signal angle at which the pair at
/// `signal_wavelength_nm` is phase matched (dk_par = 0 with dk_perp = 0).
std::optional<double> phase_matched_signal_angle(PumpConfig const& pump, CrystalConfig const& crystal,
                                                 double signal_wavelength_nm);

/// Optic-axis angle (rad) that phase matches the pair at the given signal
/// wavelength and internal angle. Throws NumericalError if none exists.
double phase_matching_cut_angle(PumpConfig const& pump, CrystalConfig const& crystal, double signal_wavelength_nm,
                                double signal_internal_angle);

struct ThicknessScan
{
    Eigen::ArrayXd thickness_m;
    Eigen::ArrayXd rate;
    Mismatch mismatch;
    CoherenceLength coherence_length = CoherenceLength::phase_matched();
};

/// Relative pair rate versus crystal thickness at fixed modes.
ThicknessScan thickness_scan(PumpConfig const& pump, CrystalConfig const& crystal,
                             Eigen::Ref<Eigen::ArrayXd const> const& thickness_m, PhotonMode const& signal,
                             PhotonMode const& idler);

enum class Analyzer { y, z };

Analyzer analyzer_from_string(std::string_view text);

/// d33-mediated rate for pump polarisation theta from the y axis:
/// z-analysed emission follows sin^2(theta), y-analysed emission vanishes.
double polarization_response(double pump_angle_deg, Analyzer analyzer);

// Cuts through the map at the degenerate wavelength.
struct DegenerateCut
{
    Eigen::Index row = 0;       // row nearest the degenerate wavelength
    Eigen::Index column = 0;    // brightest column of that row with angle >= 0
    double angle_deg = 0.0;
    Fwhm spectral;              // along wavelength at `column`, nm
    Fwhm angular;               // along angle >= 0 at `row`, degrees
};

DegenerateCut degenerate_cut(SpectrumGrid const& grid, double pump_wavelength_nm);

/// Column nearest to `angle_deg`.
Eigen::Index nearest_column(SpectrumGrid const& grid, double angle_deg);

/// Sum over unmasked angle columns with |angle| <= max_abs_angle_deg.
Eigen::ArrayXd angle_integrated_spectrum(SpectrumGrid const& grid, double max_abs_angle_deg);

void write_spectrum_csv(std::ostream& out, SpectrumGrid const& grid);

}  // namespace spdc
