#include "spdc/kinematics.hpp"

#include <cmath>
#include <sstream>

namespace spdc {

void PumpConfig::validate() const
{
    if (!(center_wavelength_nm > 0.0))
        throw ConfigError("pump: center wavelength must be positive");
    if (!(waist_m > 0.0))
        throw ConfigError("pump: waist must be positive");
    if (!(spectral_width >= 0.0))
        throw ConfigError("pump: spectral width must be >= 0");
    if (!(power_w >= 0.0))
        throw ConfigError("pump: power must be >= 0");
    if (!(polarization_angle_deg >= 0.0 && polarization_angle_deg < 360.0))
        throw ConfigError("pump: polarization angle must lie in [0, 360) degrees");
}

void CrystalConfig::validate() const
{
    if (!(thickness_m > 0.0))
        throw ConfigError("crystal: thickness must be positive");
    if (!(d_eff_pm_per_v > 0.0))
        throw ConfigError("crystal: d_eff must be positive");
    if (!material)
        throw ConfigError("crystal: material not set");
}

void PhotonMode::validate() const
{
    if (!(angular_frequency > 0.0))
        throw ConfigError("photon mode: frequency must be positive");
    if (!(std::abs(internal_angle) < pi / 2))
        throw ConfigError("photon mode: |angle| must be below pi/2");
}

double pump_wavenumber(CrystalConfig const& crystal, double angular_frequency)
{
    return wavenumber(*crystal.material, crystal.pump_axis, angular_frequency, crystal.optic_axis_angle);
}

double daughter_wavenumber(CrystalConfig const& crystal, PolarizationAxis axis, double angular_frequency)
{
    return wavenumber(*crystal.material, axis, angular_frequency, crystal.optic_axis_angle);
}

Mismatch mismatch(PumpConfig const& pump, CrystalConfig const& crystal, PhotonMode const& signal,
                  PhotonMode const& idler)
{
    signal.validate();
    idler.validate();
    double const omega_sum = signal.angular_frequency + idler.angular_frequency;
    if (pump.is_cw()) {
        double const omega_p = pump.angular_frequency();
        if (std::abs(omega_sum - omega_p) > 1e-9 * omega_p) {
            std::ostringstream msg;
            msg << "mismatch: CW pump requires omega_s + omega_i = omega_p (got " << omega_sum << " vs " << omega_p
                << " rad/s)";
            throw ConfigError(msg.str());
        }
    }
    double const ks = daughter_wavenumber(crystal, signal.axis, signal.angular_frequency);
    double const ki = daughter_wavenumber(crystal, idler.axis, idler.angular_frequency);
    double const kp = pump_wavenumber(crystal, omega_sum);
    return {
        ks * std::cos(signal.internal_angle) + ki * std::cos(idler.internal_angle) - kp,
        ks * std::sin(signal.internal_angle) + ki * std::sin(idler.internal_angle),
    };
}

double pair_probability(double d_eff, double thickness, double longitudinal_mismatch, double transverse_mismatch,
                        double waist)
{
    return d_eff * d_eff * thickness * thickness * phase_matching_function(longitudinal_mismatch, thickness)
           * pump_function(transverse_mismatch, waist);
}

double CoherenceLength::metres() const
{
    if (phase_matched_)
        throw NumericalError("coherence length is unbounded: process is phase matched");
    return metres_;
}

CoherenceLength coherence_length(double longitudinal_mismatch)
{
    if (std::abs(longitudinal_mismatch) < phase_matched_tolerance)
        return CoherenceLength::phase_matched();
    return CoherenceLength::finite(pi / std::abs(longitudinal_mismatch));
}

}  // namespace spdc
