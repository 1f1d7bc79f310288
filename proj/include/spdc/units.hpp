#pragma once

#include <numbers>

namespace spdc {

inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double pi = std::numbers::pi;

// Conversions used at the library boundary. Internally frequencies are rad/s
// and lengths are metres.

template <typename Scalar>
constexpr Scalar degrees_to_radians(Scalar deg)
{
    return deg * Scalar(pi / 180.0);
}

template <typename Scalar>
constexpr Scalar radians_to_degrees(Scalar rad)
{
    return rad * Scalar(180.0 / pi);
}

template <typename Scalar>
constexpr Scalar wavelength_nm_to_angular_frequency(Scalar wavelength_nm)
{
    return Scalar(2.0 * pi * speed_of_light * 1e9) / wavelength_nm;
}

template <typename Scalar>
constexpr Scalar angular_frequency_to_wavelength_nm(Scalar omega)
{
    return Scalar(2.0 * pi * speed_of_light * 1e9) / omega;
}

template <typename Scalar>
constexpr Scalar angular_frequency_to_hz(Scalar omega)
{
    return omega / Scalar(2.0 * pi);
}

/// Wavelength of the photon that shares a pump photon with `signal_nm`.
template <typename Scalar>
constexpr Scalar conjugate_wavelength_nm(Scalar pump_nm, Scalar signal_nm)
{
    return Scalar(1) / (Scalar(1) / pump_nm - Scalar(1) / signal_nm);
}

}  // namespace spdc
