#pragma once

// Cavity loss rates and QD-cavity coupling from geometric and material input.
// Formulas are evaluated in SI and converted to ueV at the end.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "qdcqed/errors.hpp"
#include "qdcqed/units.hpp"

namespace qdcqed {

struct CavityGeometry {
  double d_um = 0.0;         ///< cavity diameter
  double V_um3 = 0.0;        ///< mode volume
  double R_l = 1.0;          ///< left mirror reflectivity
  double R_r = 1.0;          ///< right mirror reflectivity
  double alpha = 0.0;        ///< internal loss per round trip (dimensionless)
  double M_debye = 0.0;      ///< transition dipole moment
  double omega_qd_eV = 0.0;  ///< QD transition energy

  friend bool operator==(const CavityGeometry&, const CavityGeometry&) = default;
};

/// Below this reflectivity the loss formula (a good-cavity expression) is flagged.
inline constexpr double kLowReflectivityWarning = 0.5;

inline CavityGeometry validate(const CavityGeometry& g) {
  auto positive = [](double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw ParamError(name, std::string(name) + " must be positive");
    }
  };
  positive(g.d_um, "d");
  positive(g.V_um3, "V");
  if (!(g.R_l > 0.0 && g.R_l <= 1.0)) throw ParamError("R_l", "R_l must lie in (0, 1]");
  if (!(g.R_r > 0.0 && g.R_r <= 1.0)) throw ParamError("R_r", "R_r must lie in (0, 1]");
  if (!std::isfinite(g.alpha) || g.alpha < 0.0) {
    throw ParamError("alpha", "alpha must be non-negative");
  }
  positive(g.M_debye, "M");
  positive(g.omega_qd_eV, "omega_qd");
  return g;
}

/// Non-fatal diagnostics about the geometry (currently: low mirror reflectivity).
inline std::vector<std::string> geometry_warnings(const CavityGeometry& g) {
  std::vector<std::string> out;
  if (g.R_l < kLowReflectivityWarning || g.R_r < kLowReflectivityWarning) {
    out.push_back(fmt::format(
        "mirror reflectivity below {} (R_l={}, R_r={}): loss formula assumes a good cavity",
        kLowReflectivityWarning, g.R_l, g.R_r));
  }
  return out;
}

namespace detail {
/// pi c d^2 / V in s^-1, with d and V converted from um / um^3.
inline double geometric_prefactor(const CavityGeometry& g) {
  const double d = g.d_um * 1e-6;
  const double V = g.V_um3 * 1e-18;
  return std::numbers::pi * PhysicalConstants::c_m_per_s * d * d / V;
}
}  // namespace detail

/// Total cavity loss kappa = (pi c d^2 / 8V) (1 - sqrt(R_l R_r)) / (R_l R_r)^(1/2), in ueV.
inline double total_loss(const CavityGeometry& geom) {
  validate(geom);
  const double root = std::sqrt(geom.R_l * geom.R_r);
  const double rate = detail::geometric_prefactor(geom) / 8.0 * (1.0 - root) / root;
  return angular_rate_to_ueV(rate);
}

/// Internal loss kappa_in = (pi c d^2 / 4V) alpha, in ueV.
inline double internal_loss(const CavityGeometry& geom) {
  validate(geom);
  return angular_rate_to_ueV(detail::geometric_prefactor(geom) / 4.0 * geom.alpha);
}

/// kappa_out = kappa - kappa_in. Throws ParamError when kappa_in exceeds kappa.
inline double external_loss(const CavityGeometry& geom) {
  const double kappa = total_loss(geom);
  const double kappa_in = internal_loss(geom);
  if (kappa_in > kappa) {
    throw ParamError("alpha", fmt::format("internal loss {} ueV exceeds total loss {} ueV",
                                          kappa_in, kappa));
  }
  return kappa - kappa_in;
}

/// g = (M^2 omega_QD / (2 eps0 hbar V))^(1/2), returned as hbar*g in ueV.
inline double coupling_strength(const CavityGeometry& geom) {
  validate(geom);
  const double M = geom.M_debye * PhysicalConstants::debye_to_SI;
  const double omega = eV_to_angular_rate(geom.omega_qd_eV);
  const double V = geom.V_um3 * 1e-18;
  const double g = std::sqrt(M * M * omega /
                             (2.0 * PhysicalConstants::epsilon0_F_per_m *
                              PhysicalConstants::hbar_Js * V));
  return angular_rate_to_ueV(g);
}

}  // namespace qdcqed
