#pragma once

#include <cmath>
#include <string>

#include "qdcqed/errors.hpp"

namespace qdcqed {

/// Rate-model parameters. All entries are energies in ueV (hbar = 1).
struct SystemParams {
  double g = 0.0;           ///< QD-cavity coupling
  double gamma = 0.0;       ///< QD spontaneous emission
  double gamma_star = 0.0;  ///< pure dephasing
  double kappa_in = 0.0;    ///< cavity internal loss
  double kappa_out = 0.0;   ///< cavity external (useful) loss
  double delta = 0.0;       ///< detuning omega_QD - omega_c, signed
  double pump = 0.0;        ///< incoherent pump

  /// Total cavity loss. Never stored separately.
  constexpr double kappa() const noexcept { return kappa_in + kappa_out; }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

namespace detail {
inline void require_non_negative(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    throw ParamError(name, std::string(name) + " must be non-negative and finite");
  }
}
}  // namespace detail

/// Returns `p` unchanged if every invariant holds, otherwise throws ParamError
/// naming the first offending field.
inline SystemParams validate(const SystemParams& p) {
  detail::require_non_negative(p.g, "g");
  if (!std::isfinite(p.gamma) || p.gamma <= 0.0) {
    throw ParamError("gamma", "gamma must be positive");
  }
  detail::require_non_negative(p.gamma_star, "gamma_star");
  detail::require_non_negative(p.kappa_in, "kappa_in");
  detail::require_non_negative(p.kappa_out, "kappa_out");
  if (!std::isfinite(p.delta)) {
    throw ParamError("delta", "delta must be finite");
  }
  detail::require_non_negative(p.pump, "pump");
  if (p.kappa() <= 0.0) {
    throw ParamError("kappa", "kappa = kappa_in + kappa_out must be positive");
  }
  return p;
}

}  // namespace qdcqed
