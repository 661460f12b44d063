#pragma once

// Closed-form incoherent-regime model: effective QD -> cavity transfer rate,
// single-photon efficiency, generalized Purcell factor, quality factors and
// the two-population rate equations.

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "qdcqed/errors.hpp"
#include "qdcqed/params.hpp"

namespace qdcqed {

/// Total coherence damping Gamma = P + gamma + gamma* + kappa.
inline double total_damping(const SystemParams& p) noexcept {
  return p.pump + p.gamma + p.gamma_star + p.kappa();
}

/// R = (4 g^2 / Gamma) / (1 + (2 delta / Gamma)^2) as a function of Gamma.
inline double transfer_rate_at(double g, double delta, double Gamma) noexcept {
  const double x = 2.0 * delta / Gamma;
  return 4.0 * g * g / Gamma / (1.0 + x * x);
}

/// Effective transfer rate R in ueV. With pump = 0 this is the unpumped form.
inline double effective_rate(const SystemParams& p) {
  validate(p);
  return transfer_rate_at(p.g, p.delta, total_damping(p));
}

/// Out-coupling fraction times the probability that the excitation transfers
/// before being lost, using the supplied transfer rate.
inline double efficiency_with_rate(const SystemParams& p, double R) {
  const double kappa = p.kappa();
  const double x = R * (1.0 / kappa + 1.0 / p.gamma);
  return p.kappa_out / kappa * x / (1.0 + x);
}

/// Single-photon efficiency in [0, 1). Pumped parameters use the pumped R.
inline double efficiency(const SystemParams& p) {
  return efficiency_with_rate(p, effective_rate(p));
}

/// Generalized Purcell factor. There is no pump term: for P = 0 it equals R / gamma.
inline double purcell_factor(const SystemParams& p) {
  validate(p);
  const double damping = p.kappa() + p.gamma + p.gamma_star;
  return transfer_rate_at(p.g, p.delta, damping) / p.gamma;
}

struct GammaStarOptimum {
  /// 2|delta| - kappa - gamma - P, the exact maximizer; empty when negative.
  std::optional<double> gamma_star_opt;
  /// g^2 / |delta|, the exact maximum of R over Gamma.
  double r_max_exact = 0.0;
  /// R evaluated at the rule-of-thumb condition kappa + gamma + gamma* = |delta|
  /// (i.e. Gamma = |delta| + P), which gives 4 g^2 |delta| / (Gamma^2 + 4 delta^2).
  double r_max_approx = 0.0;
  /// gamma* satisfying the rule-of-thumb condition; empty when negative.
  std::optional<double> gamma_star_approx;
};

/// R(Gamma) = 4 g^2 Gamma / (Gamma^2 + 4 delta^2) peaks at Gamma = 2|delta| with value g^2/|delta|.
inline GammaStarOptimum optimal_gamma_star(const SystemParams& p) {
  validate(p);
  if (p.delta == 0.0) {
    throw DomainError("optimal_gamma_star: delta = 0 has no interior maximum (R decreases with Gamma)");
  }
  const double ad = std::abs(p.delta);
  GammaStarOptimum out;
  out.r_max_exact = p.g * p.g / ad;
  const double fixed = p.kappa() + p.gamma + p.pump;
  if (const double gs = 2.0 * ad - fixed; gs >= 0.0) out.gamma_star_opt = gs;
  if (const double gs = ad - p.kappa() - p.gamma; gs >= 0.0) out.gamma_star_approx = gs;
  out.r_max_approx = transfer_rate_at(p.g, p.delta, ad + p.pump);
  return out;
}

/// g^2 / (gamma |delta|), the maximum of the Purcell factor over gamma*.
inline double purcell_max(const SystemParams& p) {
  validate(p);
  if (p.delta == 0.0) {
    throw DomainError("purcell_max: delta = 0 has no interior maximum");
  }
  return p.g * p.g / (p.gamma * std::abs(p.delta));
}

struct QualityFactors {
  double Q_qd;
  double Q_c;
  double Q_eff;
};

/// omega_qd and omega_c in ueV.
inline QualityFactors quality_factors(const SystemParams& p, double omega_qd, double omega_c) {
  validate(p);
  if (!(omega_qd > 0.0) || !(omega_c > 0.0)) {
    throw DomainError("quality_factors: transition and cavity energies must be positive");
  }
  QualityFactors q{};
  q.Q_qd = omega_qd / (p.gamma + p.gamma_star);
  q.Q_c = omega_c / p.kappa();
  q.Q_eff = 1.0 / (1.0 / q.Q_qd + 1.0 / q.Q_c);
  return q;
}

struct RateSolution {
  std::vector<double> t;
  std::vector<double> n_e;
  std::vector<double> n_ph;
  /// Decay constants of the linear system, slow first (ueV).
  double eigenrate_slow = 0.0;
  double eigenrate_fast = 0.0;
};

namespace detail {
/// sinh(x)/x, with the series near zero.
inline double sinhc(double x) noexcept {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0);
  }
  return std::sinh(x) / x;
}
}  // namespace detail

/// Closed-form solution of
///   d n_e / dt  = R n_ph - (gamma + R) n_e
///   d n_ph / dt = R n_e  - (kappa + R) n_ph
/// on the supplied time grid (hbar/ueV). The system matrix A is symmetric, so
/// exp(A t) = e^{m t} [cosh(s t) I + sinh(s t)/s (A - m I)] with m = tr(A)/2 and
/// s the eigenvalue half-gap; s = 0 is the confluent case.
inline RateSolution rate_equation_solution(const SystemParams& p, double n_e0, double n_ph0,
                                           std::span<const double> t_grid) {
  validate(p);
  if (p.pump != 0.0) {
    throw DomainError("rate_equation_solution: rate equations are defined for P = 0 only");
  }
  if (!(n_e0 >= 0.0 && n_e0 <= 1.0)) throw DomainError("n_e0 must lie in [0, 1]");
  if (!(n_ph0 >= 0.0) || !std::isfinite(n_ph0)) throw DomainError("n_ph0 must be non-negative");

  const double R = effective_rate(p);
  const double a11 = -(p.gamma + R);
  const double a22 = -(p.kappa() + R);
  const double a12 = R;
  const double m = 0.5 * (a11 + a22);
  const double h = 0.5 * (a11 - a22);
  const double s = std::sqrt(h * h + a12 * a12);

  RateSolution sol;
  sol.eigenrate_slow = -(m + s);
  sol.eigenrate_fast = -(m - s);
  sol.t.assign(t_grid.begin(), t_grid.end());
  sol.n_e.reserve(t_grid.size());
  sol.n_ph.reserve(t_grid.size());
  for (const double t : t_grid) {
    // e^{mt} cosh(st) and e^{mt} sinh(st)/s written via e^{(m +- s)t} to avoid
    // under/overflow at large t.
    const double slow = std::exp((m + s) * t);
    const double fast = std::exp((m - s) * t);
    const double ch = 0.5 * (slow + fast);
    const double sh = s * t < 1e-4 ? std::exp(m * t) * t * detail::sinhc(s * t)
                                   : 0.5 * (slow - fast) / s;
    // A - mI = [[h, a12], [a12, -h]]
    const double E11 = ch + sh * h;
    const double E22 = ch - sh * h;
    const double E12 = sh * a12;
    sol.n_e.push_back(E11 * n_e0 + E12 * n_ph0);
    sol.n_ph.push_back(E12 * n_e0 + E22 * n_ph0);
  }
  return sol;
}

}  // namespace qdcqed
