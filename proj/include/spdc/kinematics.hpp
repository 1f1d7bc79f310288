#pragma once

#include <cmath>

#include <Eigen/Core>

#include "spdc/dispersion.hpp"

namespace spdc {

// Pump beam. spectral_width == 0 denotes an ideal CW pump.
struct PumpConfig
{
    double center_wavelength_nm = 405.0;
    double waist_m = 100e-6;
    double spectral_width = 0.0;  // sigma, rad/s
    double power_w = 1.0;         // relative scale
    double polarization_angle_deg = 90.0;  // from the crystal y axis

    void validate() const;
    double angular_frequency() const { return wavelength_nm_to_angular_frequency(center_wavelength_nm); }
    bool is_cw() const { return spectral_width == 0.0; }
};

struct CrystalConfig
{
    double thickness_m = 1e-6;
    double d_eff_pm_per_v = 1.0;
    MaterialPtr material;
    PolarizationAxis pump_axis = PolarizationAxis::extraordinary;
    PolarizationAxis signal_axis = PolarizationAxis::extraordinary;
    PolarizationAxis idler_axis = PolarizationAxis::extraordinary;
    // Angle between the pump propagation direction and the optic axis.
    double optic_axis_angle = pi / 2;

    void validate() const;
};

// One daughter photon: frequency and in-plane internal angle to the pump axis.
struct PhotonMode
{
    double angular_frequency = 0.0;
    double internal_angle = 0.0;
    PolarizationAxis axis = PolarizationAxis::extraordinary;

    void validate() const;
};

struct Mismatch
{
    double longitudinal = 0.0;  // rad/m
    double transverse = 0.0;    // rad/m
};

/*!
 * Wavevector mismatch k_s + k_i - k_p for a pump collinear with the
 * longitudinal axis and in-plane daughter directions:
 *
 *   dk_par  = k_s cos(theta_s) + k_i cos(theta_i) - k_p
 *   dk_perp = k_s sin(theta_s) + k_i sin(theta_i)
 *
 * k_p is evaluated at omega_s + omega_i. For a CW pump the caller must supply
 * modes satisfying omega_s + omega_i = omega_p (checked to 1e-9 relative).
 */
Mismatch mismatch(PumpConfig const& pump, CrystalConfig const& crystal, PhotonMode const& signal,
                  PhotonMode const& idler);

/// Pump wavenumber inside the crystal at `angular_frequency`.
double pump_wavenumber(CrystalConfig const& crystal, double angular_frequency);

/// Daughter wavenumber inside the crystal.
double daughter_wavenumber(CrystalConfig const& crystal, PolarizationAxis axis, double angular_frequency);

template <typename Scalar>
Scalar sinc(Scalar x)
{
    using std::abs;
    using std::sin;
    if (abs(x) < Scalar(1e-8))
        return Scalar(1) - x * x / Scalar(6);
    return sin(x) / x;
}

/// sinc^2(dk L / 2).
template <typename Scalar>
Scalar phase_matching_function(Scalar longitudinal_mismatch, Scalar thickness)
{
    Scalar const s = sinc(longitudinal_mismatch * thickness / Scalar(2));
    return s * s;
}

template <typename Derived>
auto phase_matching_function(Eigen::ArrayBase<Derived> const& longitudinal_mismatch,
                             typename Derived::Scalar thickness)
{
    using Scalar = typename Derived::Scalar;
    return longitudinal_mismatch.unaryExpr(
        [thickness](Scalar dk) { return phase_matching_function(dk, thickness); });
}

/// exp(-(dk_perp w)^2).
template <typename Scalar>
Scalar pump_function(Scalar transverse_mismatch, Scalar waist)
{
    using std::exp;
    Scalar const x = transverse_mismatch * waist;
    return exp(-x * x);
}

template <typename Derived>
auto pump_function(Eigen::ArrayBase<Derived> const& transverse_mismatch, typename Derived::Scalar waist)
{
    return (-(transverse_mismatch * waist).square()).exp();
}

/// Relative pair-emission probability d^2 L^2 F_pm F_p (arbitrary units).
double pair_probability(double d_eff, double thickness, double longitudinal_mismatch, double transverse_mismatch,
                        double waist);

// pi/|dk|, or the phase-matched case when dk vanishes.
class CoherenceLength
{
  public:
    static CoherenceLength phase_matched() { return CoherenceLength(); }
    static CoherenceLength finite(double metres) { return CoherenceLength(metres); }

    bool is_phase_matched() const { return phase_matched_; }
    /// Throws NumericalError in the phase-matched case.
    double metres() const;

  private:
    CoherenceLength() = default;
    explicit CoherenceLength(double metres) : phase_matched_(false), metres_(metres) {}

    bool phase_matched_ = true;
    double metres_ = 0.0;
};

// |dk| below this (rad/m, i.e. L_c beyond ~3000 km) is reported as phase matched.
inline constexpr double phase_matched_tolerance = 1e-6;

CoherenceLength coherence_length(double longitudinal_mismatch);

}  // namespace spdc
