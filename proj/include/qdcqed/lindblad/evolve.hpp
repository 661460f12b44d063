#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "qdcqed/lindblad/dormand_prince.hpp"
#include "qdcqed/lindblad/liouvillian.hpp"

namespace qdcqed::lindblad {

/// Trace drift that aborts a run.
inline constexpr double kTraceAbortThreshold = 1e-6;

struct Trajectory {
  HilbertConfig config;
  std::vector<double> times;  ///< hbar / ueV
  std::vector<DensityMatrix> states;
  std::vector<StateDiagnostics> diagnostics;
  IntegratorStats stats;

  /// Worst-case diagnostics over the whole run.
  StateDiagnostics worst() const {
    StateDiagnostics w;
    w.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (const auto& d : diagnostics) {
      w.trace_error = std::max(w.trace_error, d.trace_error);
      w.hermiticity_defect = std::max(w.hermiticity_defect, d.hermiticity_defect);
      w.min_eigenvalue = std::min(w.min_eigenvalue, d.min_eigenvalue);
    }
    return w;
  }
};

/// Integrates the master equation from rho0 at t = 0 and samples it on t_grid.
/// The state is never renormalized; trace drift beyond kTraceAbortThreshold throws.
inline Trajectory evolve(const HilbertConfig& h, const SystemParams& p, const DensityMatrix& rho0,
                         std::span<const double> t_grid, const IntegratorOptions& opt = {}) {
  validate(h);
  check_lindblad_params(p);
  if (!(rho0.config() == h)) {
    throw ParamError("rho0", "initial state built for a different truncation");
  }
  rho0.check();
  if (t_grid.empty()) throw ParamError("t_grid", "time grid is empty");
  if (t_grid.front() < 0.0) throw ParamError("t_grid", "time grid must start at t >= 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) {
      throw ParamError("t_grid", "time grid must be strictly increasing");
    }
  }

  const Matrix L = liouvillian(build_operators(h), p);
  const int dim = h.dimension();

  Trajectory traj;
  traj.config = h;
  traj.times.assign(t_grid.begin(), t_grid.end());
  traj.states.reserve(t_grid.size());
  traj.diagnostics.reserve(t_grid.size());

  // Derivative projected onto its Hermitian part.
  auto rhs = [&L, dim](double, const Vector& y, Vector& dydt) {
    dydt.noalias() = L * y;
    Eigen::Map<Matrix> d(dydt.data(), dim, dim);
    d = 0.5 * (d + d.adjoint()).eval();
  };
  auto sink = [&](std::size_t, double t, const Vector& y) {
    DensityMatrix rho(h, unvectorize(y, dim));
    const auto d = rho.diagnostics();
    if (!std::isfinite(d.trace_error) || d.trace_error > kTraceAbortThreshold) {
      throw IntegrationError(fmt::format(
          "trace drift {:.3e} at t = {} exceeds {:.0e} (hermiticity defect {:.3e}, min eigenvalue "
          "{:.3e})",
          d.trace_error, t, kTraceAbortThreshold, d.hermiticity_defect, d.min_eigenvalue));
    }
    traj.states.push_back(std::move(rho));
    traj.diagnostics.push_back(d);
  };
  traj.stats = integrate_dopri5(rhs, 0.0, vectorize(rho0.matrix()), t_grid, sink, opt);
  return traj;
}

struct Observables {
  std::vector<double> t;
  std::vector<double> n_e;   ///< <sigma+ sigma->
  std::vector<double> n_ph;  ///< <a^dagger a>
};

namespace detail {
inline double real_expectation(const Matrix& op, const Matrix& rho, const char* name) {
  const Complex v = (op * rho).trace();
  if (std::abs(v.imag()) >= 1e-10) {
    throw IntegrationError(fmt::format("<{}> has imaginary part {:.3e}", name, v.imag()));
  }
  return v.real();
}
}  // namespace detail

inline std::pair<double, double> expectations(const OperatorSet& ops, const DensityMatrix& rho) {
  const double ne = detail::real_expectation(ops.qd_number(), rho.matrix(), "sigma+ sigma-");
  const double nph = detail::real_expectation(ops.photon_number(), rho.matrix(), "a^dagger a");
  if (ne < -1e-8 || ne > 1.0 + 1e-8) {
    throw IntegrationError(fmt::format("<sigma+ sigma-> = {} outside [0, 1]", ne));
  }
  return {ne, nph};
}

inline Observables expectations(const Trajectory& traj) {
  const OperatorSet ops = build_operators(traj.config);
  Observables out;
  out.t = traj.times;
  out.n_e.reserve(traj.states.size());
  out.n_ph.reserve(traj.states.size());
  for (const auto& rho : traj.states) {
    const auto [ne, nph] = expectations(ops, rho);
    out.n_e.push_back(ne);
    out.n_ph.push_back(nph);
  }
  return out;
}

/// CSV columns t_hbar_per_ueV,n_e,n_ph,trace_err,min_eig at full precision.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const auto obs = expectations(traj);
  out << "t_hbar_per_ueV,n_e,n_ph,trace_err,min_eig\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", traj.times[i], obs.n_e[i],
                       obs.n_ph[i], traj.diagnostics[i].trace_error,
                       traj.diagnostics[i].min_eigenvalue);
  }
}

}  // namespace qdcqed::lindblad
