#pragma once

#include <cmath>
#include <span>

#include <fmt/format.h>

#include "qdcqed/errors.hpp"

namespace qdcqed::lindblad {

struct DecayFitWindow {
  double upper_fraction = 1e-1;
  double lower_fraction = 1e-4;
  std::size_t min_points = 10;
};

/// Least-squares slope of log(value) against t, over the span between the first
/// sample at or below upper_fraction * value[0] and the last sample at or above
/// lower_fraction * value[0]. Returns the decay rate (minus the slope).
inline double fit_decay_rate(std::span<const double> t, std::span<const double> value,
                             const DecayFitWindow& window = {}) {
  if (t.size() != value.size()) throw FitError("time and value series differ in length");
  if (value.empty() || !(value[0] > 0.0)) throw FitError("series must start positive");
  const double hi = window.upper_fraction * value[0];
  const double lo = window.lower_fraction * value[0];

  std::size_t first = value.size();
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (value[i] <= hi) {
      first = i;
      break;
    }
  }
  std::size_t last = first;
  bool any = false;
  for (std::size_t i = first; i < value.size(); ++i) {
    if (value[i] >= lo) {
      last = i;
      any = true;
    }
  }
  if (first == value.size() || !any) {
    throw FitError(fmt::format("too few points in fit window [{:.1e}, {:.1e}] x initial value",
                               window.lower_fraction, window.upper_fraction));
  }
  const std::size_t count = last - first + 1;
  if (count < window.min_points) {
    throw FitError(fmt::format("too few points in fit window: {} < {}", count, window.min_points));
  }

  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = first; i <= last; ++i) {
    if (!(value[i] > 0.0)) {
      throw FitError(fmt::format("non-positive value {} at t = {} inside fit window", value[i], t[i]));
    }
    const double y = std::log(value[i]);
    st += t[i];
    sy += y;
    stt += t[i] * t[i];
    sty += t[i] * y;
  }
  const double nn = static_cast<double>(count);
  const double denom = nn * stt - st * st;
  if (!(denom > 0.0)) throw FitError("degenerate time samples in fit window");
  const double rate = -(nn * sty - st * sy) / denom;
  if (!(rate > 0.0)) throw FitError(fmt::format("series does not decay in the fit window (slope {})", -rate));
  return rate;
}

}  // namespace qdcqed::lindblad
