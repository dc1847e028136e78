#pragma once

// Unit conventions: energies and frequencies in wavenumbers (cm^-1), with
// hbar*omega and omega numerically identical; rates in ps^-1; temperature in K.

#include <cmath>
#include <numbers>

#include "vsc/errors.hpp"

namespace vsc::units {

inline constexpr double kBoltzmannWavenumberPerK = 0.695034800;  // cm^-1 / K
inline constexpr double kSpeedOfLightCmPerPs = 0.0299792458;     // cm / ps
/// Angular frequency (rad/ps) carried by one wavenumber: 2*pi*c.
inline constexpr double kRadPerPsPerWavenumber = 2.0 * std::numbers::pi * kSpeedOfLightCmPerPs;

inline constexpr double kBoltzmannSI = 1.380649e-23;  // J / K
inline constexpr double kPlanckSI = 6.62607015e-34;   // J s
inline constexpr double kGasConstant = 8.314462618;   // J / (mol K)
inline constexpr double kPsPerNs = 1000.0;
inline constexpr double kPerPsToPerS = 1.0e12;

/// E/hbar for an energy in cm^-1, in ps^-1.
template <typename Scalar>
constexpr Scalar wavenumber_to_rate(Scalar wavenumber) {
  return wavenumber * Scalar(kRadPerPsPerWavenumber);
}

template <typename Scalar>
constexpr Scalar rate_to_wavenumber(Scalar rate) {
  return rate / Scalar(kRadPerPsPerWavenumber);
}

template <typename Scalar>
constexpr Scalar thermal_energy(Scalar temperature) {
  return Scalar(kBoltzmannWavenumberPerK) * temperature;
}

/// Inverse temperature 1/(k_B T) in (cm^-1)^-1. An infinite temperature gives 0.
template <typename Scalar>
Scalar thermal_beta(Scalar temperature) {
  if (!(temperature > Scalar(0)))
    throw DomainError("thermal_beta: temperature must be positive");
  return Scalar(1) / thermal_energy(temperature);
}

}  // namespace vsc::units
