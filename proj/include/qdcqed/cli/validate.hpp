#pragma once

// Acceptance checks shared by `qdcqed validate` and the acceptance test binary.
// Each criterion is a list of sub-checks; a criterion passes when all of its
// sub-checks do.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "qdcqed/dephasing.hpp"
#include "qdcqed/geometry.hpp"
#include "qdcqed/lindblad.hpp"
#include "qdcqed/rates.hpp"

namespace qdcqed::cli {

struct SubCheck {
  std::string id;
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int number = 0;
  std::string name;
  std::vector<SubCheck> checks;
  double seconds = 0.0;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const SubCheck& c) { return c.pass; });
  }
};

struct ValidationOptions {
  /// Relative perturbation applied to every transfer-rate evaluation. Nonzero
  /// values exercise the tolerance design of the checks.
  double rate_perturbation = 0.0;
  DephasingTable table = builtin_ingaas();
  std::uint64_t seed = 20240611;
};

/// Sub-checks that fail by construction: at delta = 0, gamma* = 0 the Purcell
/// factor reduces to 4g^2/(gamma(kappa+gamma)), not 4g^2/(kappa gamma).
inline const std::set<std::string>& known_unattainable() {
  static const std::set<std::string> ids{"4b"};
  return ids;
}

namespace detail {

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

class Checker {
 public:
  explicit Checker(const ValidationOptions& opt) : opt_(opt), rng_(opt.seed) {}

  double rate(const SystemParams& p) const { return effective_rate(p) * (1.0 + opt_.rate_perturbation); }
  double rate_at(double g, double delta, double Gamma) const {
    return transfer_rate_at(g, delta, Gamma) * (1.0 + opt_.rate_perturbation);
  }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  const DephasingTable& table() const { return opt_.table; }

  /// g = 50, gamma = 0.02 g, kappa = 5 g with kappa_in = 5.
  SystemParams reference(double T_K, double delta, double pump = 0.0) const {
    return {.g = 50.0, .gamma = 1.0, .gamma_star = opt_.table.gamma_star_at(T_K), .kappa_in = 5.0,
            .kappa_out = 245.0, .delta = delta, .pump = pump};
  }

 private:
  const ValidationOptions& opt_;
  std::mt19937_64 rng_;
};

inline SubCheck sub(std::string id, bool pass, std::string detail) {
  return {std::move(id), pass, std::move(detail)};
}

struct RunSummary {
  lindblad::Trajectory trajectory;
  lindblad::Observables observables;
};

inline RunSummary run(const SystemParams& p, int n_max, double t_max, int points,
                      lindblad::QdState s = lindblad::QdState::excited) {
  const lindblad::HilbertConfig h{.n_max = n_max};
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) t[i] = t_max * i / (points - 1);
  RunSummary out;
  out.trajectory = lindblad::evolve(h, p, lindblad::DensityMatrix::basis_state(h, s, 0), t);
  out.observables = lindblad::expectations(out.trajectory);
  return out;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline Criterion r_max_reproduction(Checker& c) {
  Criterion k{1, "r_max_reproduction", {}};
  const auto p = c.reference(100.0, 500.0);
  const double R = c.rate(p);
  k.checks.push_back(sub("1a", rel(R, 4.0) <= 0.1,
                         fmt::format("R(100 K, delta=10g)={:.6f} ueV vs reported 4.0 rel_dev={:.3e} tol=1e-1",
                                     R, rel(R, 4.0))));
  k.checks.push_back(sub("1b", std::abs(R - 3.85) < 5e-3,
                         fmt::format("R rounds to 3.85 ueV (|R-3.85|={:.3e})", std::abs(R - 3.85))));
  return k;
}

inline Criterion exact_optimality(Checker& c) {
  Criterion k{2, "exact_optimality", {}};
  const double g = 50.0, delta = 500.0;
  const double target = g * g / delta;
  const double at_opt = c.rate_at(g, delta, 2.0 * delta);
  k.checks.push_back(sub("2a", rel(at_opt, target) < 1e-9,
                         fmt::format("R(Gamma=2|delta|)={:.15g} vs g^2/|delta|={} rel={:.3e} tol=1e-9",
                                     at_opt, target, rel(at_opt, target))));

  const int n = 2'000'000;
  const double hi = 20.0 * delta, step = hi / n;
  double best = -1.0, best_G = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double G = i * step;
    if (const double r = c.rate_at(g, delta, G); r > best) {
      best = r;
      best_G = G;
    }
  }
  const bool grid_ok = best <= target * (1.0 + 1e-12) && rel(best, target) < 1e-9 &&
                       std::abs(best_G - 2.0 * delta) <= step;
  k.checks.push_back(sub("2b", grid_ok,
                         fmt::format("grid max {:.15g} at Gamma={} (step {}) rel={:.3e}", best,
                                     best_G, step, rel(best, target))));

  auto p = c.reference(100.0, delta);
  const auto opt = optimal_gamma_star(p);
  p.gamma_star = opt.gamma_star_opt.value_or(0.0);
  const double via_gs = c.rate(p);
  k.checks.push_back(sub("2c", opt.gamma_star_opt && rel(via_gs, target) < 1e-9 &&
                                   rel(opt.r_max_exact, target) < 1e-15,
                         fmt::format("gamma*_opt={} ueV gives R={:.15g} rel={:.3e}; approximate condition "
                                     "kappa+gamma+gamma*=|delta| gives {:.6f}",
                                     p.gamma_star, via_gs, rel(via_gs, target), opt.r_max_approx)));
  return k;
}

inline Criterion half_efficiency(Checker& c) {
  Criterion k{3, "half_efficiency", {}};
  auto E_of = [&](const SystemParams& p, double& x) {
    const double R = c.rate(p);
    x = R * (1.0 / p.kappa() + 1.0 / p.gamma);
    return efficiency_with_rate(p, R);
  };
  const SystemParams ex{.g = 50, .gamma = 0.5, .gamma_star = 40, .kappa_in = 2.5, .kappa_out = 2.5};
  double x = 0.0;
  const double E = E_of(ex, x);
  k.checks.push_back(sub("3a", E > 0.495 && E < 0.5,
                         fmt::format("E={:.6f} at x={:.2f} (kappa_in=kappa_out=2.5 ueV)", E, x)));

  int draws = 0, bad = 0;
  double lo = 1.0, hi = 0.0;
  while (draws < 500) {
    const double half = c.uniform(0.5, 200.0);
    const SystemParams p{.g = c.uniform(5.0, 200.0), .gamma = c.uniform(0.05, 5.0),
                         .gamma_star = c.uniform(0.0, 2000.0), .kappa_in = half,
                         .kappa_out = half, .delta = c.uniform(-1000.0, 1000.0)};
    const double e = E_of(p, x);
    if (!(x > 100.0)) continue;
    ++draws;
    lo = std::min(lo, e);
    hi = std::max(hi, e);
    if (!(e > 0.495 && e < 0.5)) ++bad;
  }
  k.checks.push_back(sub("3b", bad == 0,
                         fmt::format("{} draws with x>100: E in [{:.6f}, {:.6f}], {} outside", draws,
                                     lo, hi, bad)));
  return k;
}

inline Criterion purcell_identities(Checker& c) {
  Criterion k{4, "purcell_identities", {}};
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const SystemParams p{.g = c.uniform(1.0, 200.0), .gamma = c.uniform(0.1, 10.0),
                         .gamma_star = c.uniform(0.0, 5000.0), .kappa_in = c.uniform(0.0, 500.0),
                         .kappa_out = c.uniform(1.0, 500.0), .delta = c.uniform(-2000.0, 2000.0)};
    worst = std::max(worst, rel(purcell_factor(p), c.rate(p) / p.gamma));
  }
  k.checks.push_back(sub("4a", worst < 1e-12,
                         fmt::format("F* = R/gamma over 1000 draws: max rel err {:.3e} tol=1e-12", worst)));

  const SystemParams p{.g = 50, .gamma = 1, .gamma_star = 0, .kappa_in = 5, .kappa_out = 245};
  const double F = purcell_factor(p);
  const double kappa_gamma_form = 4.0 * p.g * p.g / (p.kappa() * p.gamma);
  const double exact_form = 4.0 * p.g * p.g / (p.gamma * (p.kappa() + p.gamma));
  k.checks.push_back(sub("4b", rel(F, kappa_gamma_form) < 1e-12,
                         fmt::format("F*(delta=0,gamma*=0)={:.12g} vs 4g^2/(kappa gamma)={} rel={:.3e} "
                                     "tol=1e-12; gamma/(kappa+gamma)={:.3e}",
                                     F, kappa_gamma_form, rel(F, kappa_gamma_form),
                                     p.gamma / (p.kappa() + p.gamma))));
  k.checks.push_back(sub("4c", rel(F, exact_form) < 1e-12,
                         fmt::format("vs 4g^2/(gamma(kappa+gamma))={:.12g} rel={:.3e}", exact_form,
                                     rel(F, exact_form))));
  return k;
}

inline Criterion vacuum_rabi(Checker&) {
  Criterion k{5, "vacuum_rabi", {}};
  const auto t0 = std::chrono::steady_clock::now();
  const double g = 50.0;
  {
    const auto r = run({.g = g}, 5, 3.0 * std::numbers::pi / g, 601);
    double err = 0.0;
    for (std::size_t i = 0; i < r.observables.t.size(); ++i) {
      const double c = std::cos(g * r.observables.t[i]);
      err = std::max(err, std::abs(r.observables.n_e[i] - c * c));
    }
    k.checks.push_back(sub("5a", err < 1e-6,
                           fmt::format("resonant: max |n_e - cos^2(gt)| = {:.3e} over 3 periods", err)));
  }
  {
    const double delta = 2.0 * g;
    const double W = std::sqrt(4.0 * g * g + delta * delta);
    const auto r = run({.g = g, .delta = delta}, 5, 3.0 * 2.0 * std::numbers::pi / W, 601);
    double err = 0.0;
    for (std::size_t i = 0; i < r.observables.t.size(); ++i) {
      const double s = std::sin(0.5 * W * r.observables.t[i]);
      err = std::max(err, std::abs(r.observables.n_e[i] - (1.0 - 4.0 * g * g / (W * W) * s * s)));
    }
    k.checks.push_back(sub("5b", err < 1e-6,
                           fmt::format("detuned (delta=2g): max error {:.3e} over 3 periods", err)));
  }
  const double dt = seconds_since(t0);
  k.checks.push_back(sub("5c", dt < 1.0, fmt::format("runtime {:.3f} s budget 1 s", dt)));
  return k;
}

inline Criterion adiabatic_elimination(Checker& c) {
  Criterion k{6, "adiabatic_elimination", {}};
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& [id, delta] : {std::pair{"6a", 0.0}, std::pair{"6b", 500.0}}) {
    const auto p = c.reference(100.0, delta);
    const double expected = p.gamma + c.rate(p);
    const auto r = run(p, 5, 12.0 / expected, 600);
    try {
      const double fit = lindblad::fit_decay_rate(r.observables.t, r.observables.n_e);
      k.checks.push_back(sub(id, rel(fit, expected) <= 0.1,
                             fmt::format("delta={}: fitted {:.4f} ueV vs gamma+R={:.4f} rel={:.3e} tol=1e-1",
                                         delta, fit, expected, rel(fit, expected))));
    } catch (const FitError& e) {
      k.checks.push_back(sub(id, false, fmt::format("delta={}: fit failed: {}", delta, e.what())));
    }
  }
  const double dt = seconds_since(t0);
  k.checks.push_back(sub("6c", dt < 5.0, fmt::format("runtime {:.3f} s budget 5 s", dt)));
  return k;
}

inline Criterion conservation(Checker& c) {
  Criterion k{7, "conservation_structure", {}};
  struct Case {
    SystemParams p;
    double t_max;
  };
  const double g = 50.0;
  const std::vector<Case> cases = {
      {{.g = g}, 3.0 * std::numbers::pi / g},
      {{.g = g, .delta = 2.0 * g}, 0.2},
      {c.reference(100.0, 0.0), 0.6},
      {c.reference(100.0, 500.0), 2.5},
      {c.reference(50.0, 0.0, 2.0 * g), 1.0},
      {c.reference(50.0, 500.0, 2.0 * g), 1.0},
      {c.reference(300.0, 500.0, 2.0 * g), 1.0},
  };
  lindblad::StateDiagnostics worst;
  worst.min_eigenvalue = INFINITY;
  double trunc = 0.0;
  for (const auto& cs : cases) {
    const auto a = run(cs.p, 5, cs.t_max, 201);
    const auto w = a.trajectory.worst();
    worst.trace_error = std::max(worst.trace_error, w.trace_error);
    worst.hermiticity_defect = std::max(worst.hermiticity_defect, w.hermiticity_defect);
    worst.min_eigenvalue = std::min(worst.min_eigenvalue, w.min_eigenvalue);
    if (cs.p.kappa() > 0.0) {
      const auto b = run(cs.p, 7, cs.t_max, 201);
      for (std::size_t i = 0; i < a.observables.t.size(); ++i) {
        trunc = std::max({trunc, std::abs(a.observables.n_e[i] - b.observables.n_e[i]),
                          std::abs(a.observables.n_ph[i] - b.observables.n_ph[i])});
      }
    }
  }
  k.checks.push_back(sub("7a", worst.trace_error < 1e-8,
                         fmt::format("{} trajectories: max |Tr rho - 1| = {:.3e}", cases.size(),
                                     worst.trace_error)));
  k.checks.push_back(sub("7b", worst.hermiticity_defect < 1e-10,
                         fmt::format("max hermiticity defect {:.3e}", worst.hermiticity_defect)));
  k.checks.push_back(sub("7c", worst.min_eigenvalue > -1e-8,
                         fmt::format("min eigenvalue {:.3e}", worst.min_eigenvalue)));
  k.checks.push_back(sub("7d", trunc < 1e-6,
                         fmt::format("n_max 5 -> 7 max observable change {:.3e}", trunc)));
  return k;
}

inline Criterion trends(Checker& c) {
  Criterion k{8, "trend_suite", {}};
  const auto nodes = c.table().node_temperatures();
  const double g = 50.0;
  {
    bool ok = true;
    std::string vals;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto p = c.reference(nodes[i], 0.0);
      const double R = c.rate(p), E = efficiency_with_rate(p, R);
      vals += fmt::format("{}{}K:R={:.4f},E={:.6f}", i ? " " : "", nodes[i], R, E);
      if (i > 0) {
        const auto q = c.reference(nodes[i - 1], 0.0);
        const double Rq = c.rate(q);
        ok = ok && R < Rq && E < efficiency_with_rate(q, Rq);
      }
    }
    k.checks.push_back(sub("8a", ok, "delta=0 R and E strictly decrease with T: " + vals));
  }
  {
    const double R100 = c.rate(c.reference(100.0, 10.0 * g));
    bool ok = true;
    std::string vals;
    for (const double T : nodes) {
      const double R = c.rate(c.reference(T, 10.0 * g));
      vals += fmt::format("{}{}K:{:.4f}", vals.empty() ? "" : " ", T, R);
      if (T != 100.0) ok = ok && R < R100;
    }
    k.checks.push_back(sub("8b", ok, "delta=10g R peaks at the 100 K node: " + vals));
  }
  {
    const double off = c.rate(c.reference(50.0, 10.0 * g)), on = c.rate(c.reference(50.0, 10.0 * g, 2.0 * g));
    k.checks.push_back(sub("8c", on > off,
                           fmt::format("delta=10g T=50K: R(P=2g)={:.4f} > R(P=0)={:.4f}", on, off)));
    const double off0 = c.rate(c.reference(50.0, 0.0)), on0 = c.rate(c.reference(50.0, 0.0, 2.0 * g));
    k.checks.push_back(sub("8d", on0 < off0,
                           fmt::format("delta=0 T=50K: R(P=2g)={:.4f} < R(P=0)={:.4f}", on0, off0)));
  }
  {
    bool ok = true;
    std::size_t compared = 0;
    for (const double delta : {0.0, 10.0 * g}) {
      for (const double T : nodes) {
        double prev = INFINITY;
        for (const double gf : {0.01, 0.02, 0.03}) {
          auto p = c.reference(T, delta);
          p.gamma = gf * g;
          const double F = purcell_factor(p);
          ok = ok && F < prev;
          prev = F;
          ++compared;
        }
      }
    }
    k.checks.push_back(sub("8e", ok,
                           fmt::format("F* decreases through gamma = 0.01g, 0.02g, 0.03g at {} points",
                                       compared)));
  }
  return k;
}

inline Criterion geometry_scalings(Checker& c) {
  Criterion k{9, "geometry_scalings", {}};
  const CavityGeometry base{.d_um = 2.0, .V_um3 = 50.0, .R_l = 0.99, .R_r = 0.99, .alpha = 1e-5,
                            .M_debye = 30.0, .omega_qd_eV = 1.3};
  double wV = 0.0, wd = 0.0, wgV = 0.0, wgw = 0.0;
  for (int i = 0; i < 200; ++i) {
    auto a = base, b = base;
    a.V_um3 = c.uniform(1.0, 500.0);
    b.V_um3 = c.uniform(1.0, 500.0);
    const double rv = b.V_um3 / a.V_um3;
    wV = std::max({wV, rel(total_loss(a) / total_loss(b), rv),
                   rel(internal_loss(a) / internal_loss(b), rv)});
    wgV = std::max(wgV, rel(coupling_strength(a) / coupling_strength(b), std::sqrt(rv)));

    auto d1 = base, d2 = base;
    d1.d_um = c.uniform(0.5, 10.0);
    d2.d_um = c.uniform(0.5, 10.0);
    const double rd = (d1.d_um / d2.d_um) * (d1.d_um / d2.d_um);
    wd = std::max({wd, rel(total_loss(d1) / total_loss(d2), rd),
                   rel(internal_loss(d1) / internal_loss(d2), rd)});

    auto w1 = base, w2 = base;
    w1.omega_qd_eV = c.uniform(0.5, 3.0);
    w2.omega_qd_eV = c.uniform(0.5, 3.0);
    wgw = std::max(wgw, rel(coupling_strength(w1) / coupling_strength(w2),
                            std::sqrt(w1.omega_qd_eV / w2.omega_qd_eV)));
  }
  k.checks.push_back(sub("9a", wV < 1e-12, fmt::format("kappa, kappa_in ~ 1/V: max rel {:.3e}", wV)));
  k.checks.push_back(sub("9b", wd < 1e-12, fmt::format("kappa, kappa_in ~ d^2: max rel {:.3e}", wd)));
  k.checks.push_back(sub("9c", wgV < 1e-12, fmt::format("g ~ V^-1/2: max rel {:.3e}", wgV)));
  k.checks.push_back(sub("9d", wgw < 1e-12, fmt::format("g ~ omega^1/2: max rel {:.3e}", wgw)));
  return k;
}

inline Criterion rate_equations(Checker& c) {
  Criterion k{10, "rate_equation_closed_form", {}};
  const std::vector<double> times = {0.0, 1e-3, 0.01, 0.1, 0.5, 1.0, 3.0, 10.0};
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const SystemParams p{.g = c.uniform(0.0, 200.0), .gamma = c.uniform(0.1, 10.0),
                         .gamma_star = c.uniform(0.0, 3000.0), .kappa_in = c.uniform(0.0, 50.0),
                         .kappa_out = c.uniform(1.0, 500.0), .delta = c.uniform(-1000.0, 1000.0)};
    const double ne0 = c.uniform(0.0, 1.0), nph0 = c.uniform(0.0, 2.0);
    const auto sol = rate_equation_solution(p, ne0, nph0, times);
    const double R = effective_rate(p);
    Eigen::Matrix2d A;
    A << -(p.gamma + R), R, R, -(p.kappa() + R);
    for (std::size_t j = 0; j < times.size(); ++j) {
      const Eigen::Matrix2d E = (A * times[j]).exp();
      const Eigen::Vector2d y = E * Eigen::Vector2d(ne0, nph0);
      worst = std::max({worst, std::abs(sol.n_e[j] - y(0)), std::abs(sol.n_ph[j] - y(1))});
    }
  }
  k.checks.push_back(sub("10a", worst < 1e-10,
                         fmt::format("200 draws x {} times vs matrix exponential: max abs err {:.3e}",
                                     times.size(), worst)));
  return k;
}

}  // namespace detail

/// Criterion numbers 1 to 10.
inline Criterion run_criterion(int number, const ValidationOptions& opt = {}) {
  detail::Checker c(opt);
  const auto t0 = std::chrono::steady_clock::now();
  Criterion k;
  switch (number) {
    case 1: k = detail::r_max_reproduction(c); break;
    case 2: k = detail::exact_optimality(c); break;
    case 3: k = detail::half_efficiency(c); break;
    case 4: k = detail::purcell_identities(c); break;
    case 5: k = detail::vacuum_rabi(c); break;
    case 6: k = detail::adiabatic_elimination(c); break;
    case 7: k = detail::conservation(c); break;
    case 8: k = detail::trends(c); break;
    case 9: k = detail::geometry_scalings(c); break;
    case 10: k = detail::rate_equations(c); break;
    default: throw ConfigError(fmt::format("no acceptance criterion {}", number));
  }
  k.seconds = detail::seconds_since(t0);
  return k;
}

inline std::vector<Criterion> run_validation(const ValidationOptions& opt = {}) {
  std::vector<Criterion> out;
  for (int n = 1; n <= 10; ++n) out.push_back(run_criterion(n, opt));
  return out;
}

/// "PASS 1 r_max_reproduction (0.000 s) | 1a ok: ... | 1b ok: ..."
inline std::string format_line(const Criterion& k) {
  std::string line = fmt::format("{} {} {} ({:.3f} s)", k.pass() ? "PASS" : "FAIL", k.number, k.name,
                                 k.seconds);
  for (const auto& s : k.checks) {
    line += fmt::format(" | {} {}: {}", s.id, s.pass ? "ok" : "FAIL", s.detail);
  }
  return line;
}

}  // namespace qdcqed::cli
