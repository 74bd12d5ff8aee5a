// units.hpp - Physical constants for the cm^-1 / fs / K unit system

#pragma once

#include <numbers>

namespace bathkit::units {

// Speed of light in cm/fs.
inline constexpr double speed_of_light_cm_per_fs = 2.99792458e-5;

// Boltzmann constant in cm^-1/K.
inline constexpr double boltzmann_cm1_per_k = 0.69503480;

// Converts a wavenumber (cm^-1) to an angular frequency (rad/fs).
inline constexpr double angular_frequency(double omega_cm1) noexcept {
    return 2.0 * std::numbers::pi * speed_of_light_cm_per_fs * omega_cm1;
}

} // namespace bathkit::units
