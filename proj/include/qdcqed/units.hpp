#pragma once

// Physical constants and unit bridges.
//
// Every rate in the library is an energy in micro-electronvolts with hbar = 1.
// Times handed to the master-equation integrator are therefore in hbar/ueV;
// rate_to_inverse_time() converts to ps^-1 when a wall-clock rate is needed.

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qdcqed {

/// CODATA 2018 values; h, e and c are exact in the SI.
struct PhysicalConstants {
  static constexpr double planck_Js = 6.62607015e-34;
  static constexpr double hbar_Js = planck_Js / (2.0 * std::numbers::pi);
  static constexpr double elementary_charge_C = 1.602176634e-19;
  static constexpr double c_m_per_s = 299792458.0;
  static constexpr double epsilon0_F_per_m = 8.8541878128e-12;
  /// 1 D = 1e-21 / c  C*m
  static constexpr double debye_to_SI = 1e-21 / c_m_per_s;
  /// hbar expressed in ueV*ps (= 658.2119569...)
  static constexpr double hbar_ueV_ps = hbar_Js / elementary_charge_C * 1e6 * 1e12;
  /// hbar expressed in eV*s
  static constexpr double hbar_eV_s = hbar_Js / elementary_charge_C;
};

/// Energy (ueV) of an angular-frequency rate given in s^-1.
constexpr double angular_rate_to_ueV(double rate_per_s) noexcept {
  return rate_per_s * PhysicalConstants::hbar_eV_s * 1e6;
}

/// Angular frequency (s^-1) of a photon/transition energy given in eV.
constexpr double eV_to_angular_rate(double energy_eV) noexcept {
  return energy_eV / PhysicalConstants::hbar_eV_s;
}

constexpr double meV_to_ueV(double e) noexcept { return e * 1e3; }
constexpr double ueV_to_meV(double e) noexcept { return e * 1e-3; }

/// Energy-valued rate (ueV) to an inverse time in ps^-1.
inline double rate_to_inverse_time(double energy_ueV) {
  if (!(energy_ueV >= 0.0)) {
    throw std::invalid_argument("rate_to_inverse_time: energy must be non-negative");
  }
  return energy_ueV / PhysicalConstants::hbar_ueV_ps;
}

}  // namespace qdcqed
