#pragma once

// Embedded Runge-Kutta 5(4) (Dormand-Prince) with error-per-step control and
// cubic Hermite dense output between accepted steps.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include <Eigen/Core>
#include <fmt/format.h>

#include "qdcqed/errors.hpp"

namespace qdcqed::lindblad {

struct IntegratorOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double initial_step = 0.0;  ///< 0 selects a step automatically
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 50'000'000;
};

struct IntegratorStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

namespace dp {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
// 5th-order weights (also row 7, FSAL)
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dp

/// Integrates dy/dt = f(t, y) and reports the solution at each requested time.
///
/// `State` is an Eigen vector type (real or complex). `rhs(t, y, dydt)` writes the
/// derivative; `sink(i, t_i, y_i)` receives outputs in order. Output times must be
/// non-decreasing and >= t0.
template <class State, class Rhs, class Sink>
IntegratorStats integrate_dopri5(Rhs&& rhs, double t0, State y, std::span<const double> t_out,
                                 Sink&& sink, const IntegratorOptions& opt = {}) {
  IntegratorStats stats;
  const auto n = y.size();
  std::size_t next = 0;
  while (next < t_out.size() && t_out[next] <= t0) {
    if (t_out[next] < t0) {
      throw IntegrationError("output time precedes the initial time");
    }
    sink(next, t_out[next], y);
    ++next;
  }
  if (next == t_out.size()) return stats;
  const double t_end = t_out.back();

  State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
  auto eval = [&](double t, const State& state, State& out) {
    rhs(t, state, out);
    ++stats.rhs_evaluations;
  };
  auto scaled_norm = [&](const State& e, const State& y0, const State& y1) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
      const double r = std::abs(e[i]) / sc;
      acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(n, 1)));
  };

  double t = t0;
  eval(t, y, k1);

  double h = opt.initial_step;
  if (h <= 0.0) {
    // Hairer-Wanner starting step.
    const double d0 = scaled_norm(y, y, y);
    const double d1 = scaled_norm(k1, y, y);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_end - t);
    ytmp = y + h0 * k1;
    eval(t + h0, ytmp, k2);
    const double d2 = scaled_norm((k2 - k1).eval(), y, y) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
    h = std::min(100.0 * h0, h1);
  }
  h = std::min({h, opt.max_step, t_end - t});

  constexpr double safety = 0.9, min_factor = 0.2, max_factor = 10.0;
  while (next < t_out.size()) {
    if (stats.accepted + stats.rejected >= opt.max_steps) {
      throw IntegrationError(fmt::format("step budget exhausted at t = {}", t));
    }
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      throw IntegrationError(fmt::format("step size underflow (h = {:.3e}) at t = {}", h, t));
    }
    const bool last = t + h >= t_end;
    if (last) h = t_end - t;

    ytmp = y + h * (dp::a21 * k1);
    eval(t + dp::c2 * h, ytmp, k2);
    ytmp = y + h * (dp::a31 * k1 + dp::a32 * k2);
    eval(t + dp::c3 * h, ytmp, k3);
    ytmp = y + h * (dp::a41 * k1 + dp::a42 * k2 + dp::a43 * k3);
    eval(t + dp::c4 * h, ytmp, k4);
    ytmp = y + h * (dp::a51 * k1 + dp::a52 * k2 + dp::a53 * k3 + dp::a54 * k4);
    eval(t + dp::c5 * h, ytmp, k5);
    ytmp = y + h * (dp::a61 * k1 + dp::a62 * k2 + dp::a63 * k3 + dp::a64 * k4 + dp::a65 * k5);
    eval(t + h, ytmp, k6);
    ynew = y + h * (dp::b1 * k1 + dp::b3 * k3 + dp::b4 * k4 + dp::b5 * k5 + dp::b6 * k6);
    const double t_new = last ? t_end : t + h;
    eval(t_new, ynew, k7);
    err = h * (dp::e1 * k1 + dp::e3 * k3 + dp::e4 * k4 + dp::e5 * k5 + dp::e6 * k6 + dp::e7 * k7);
    const double en = scaled_norm(err, y, ynew);

    if (!std::isfinite(en)) {
      h *= min_factor;
      ++stats.rejected;
      continue;
    }
    if (en > 1.0) {
      h *= std::max(min_factor, safety * std::pow(en, -0.2));
      ++stats.rejected;
      continue;
    }

    ++stats.accepted;
    // Hermite cubic on [t, t_new] from (y, k1) and (ynew, k7).
    while (next < t_out.size() && t_out[next] <= t_new) {
      const double tq = t_out[next];
      if (tq == t_new) {
        sink(next, tq, ynew);
      } else {
        const double s = (tq - t) / h;
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
        const State yq = h00 * y + (h10 * h) * k1 + h01 * ynew + (h11 * h) * k7;
        sink(next, tq, yq);
      }
      ++next;
    }
    t = t_new;
    y.swap(ynew);
    k1.swap(k7);

    const double factor =
        en == 0.0 ? max_factor : std::clamp(safety * std::pow(en, -0.2), min_factor, max_factor);
    h = std::min(h * factor, opt.max_step);
  }
  return stats;
}

}  // namespace qdcqed::lindblad
