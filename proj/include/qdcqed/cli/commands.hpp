#pragma once

// Sweep and dynamics commands. Each returns its table together with the
// provenance block that reproduces it.

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "qdcqed/cli/config.hpp"
#include "qdcqed/cli/sweep.hpp"
#include "qdcqed/geometry.hpp"
#include "qdcqed/lindblad.hpp"
#include "qdcqed/rates.hpp"

namespace qdcqed::cli {

enum class RateCommand { efficiency, transfer_rate, purcell };

inline std::string_view command_name(RateCommand c) {
  switch (c) {
    case RateCommand::efficiency: return "efficiency-sweep";
    case RateCommand::transfer_rate: return "transfer-rate-sweep";
    case RateCommand::purcell: return "purcell-sweep";
  }
  return "";
}

namespace detail {

struct SweptQuantity {
  std::string quantity;
  Unit unit;
  std::string column;
};

inline std::optional<SweptQuantity> rate_variable(std::string_view v) {
  if (v == "T") return SweptQuantity{"T", Unit::kelvin, "T_K"};
  for (const char* q : {"kappa", "kappa_in", "kappa_out", "delta", "pump"}) {
    if (v == q) return SweptQuantity{q, Unit::ueV, std::string(q) + "_ueV"};
  }
  return std::nullopt;
}

inline const std::set<std::string>& allowed_variables(RateCommand c) {
  static const std::set<std::string> eff{"kappa", "kappa_in", "kappa_out", "T"};
  static const std::set<std::string> rate{"T", "delta", "pump", "kappa"};
  static const std::set<std::string> purcell{"T", "delta", "kappa"};
  return c == RateCommand::efficiency ? eff : c == RateCommand::transfer_rate ? rate : purcell;
}

inline std::string rate_output_column(std::string_view out) {
  if (out == "R") return "R_ueV";
  if (out == "efficiency") return "efficiency";
  if (out == "purcell") return "F_star";
  if (out == "Q_eff") return "Q_eff";
  throw ConfigError(fmt::format("unknown output '{}' (expected R, efficiency, purcell, Q_eff)", out));
}

inline std::string geometry_output_column(std::string_view out) {
  if (out == "kappa_in") return "kappa_in_ueV";
  if (out == "kappa") return "kappa_ueV";
  if (out == "kappa_out") return "kappa_out_ueV";
  if (out == "g") return "g_ueV";
  throw ConfigError(
      fmt::format("unknown output '{}' (expected kappa_in, kappa, kappa_out, g)", out));
}

inline std::string column_name(const std::string& base, const std::string& label) {
  return label.empty() ? base : base + "|" + label;
}

/// Counts row-level failures by reason, keeping the first message of each.
class SkipLog {
 public:
  void add(const std::string& reason, const std::string& msg) {
    auto& [n, first] = counts_[reason];
    if (n++ == 0) first = msg;
  }
  std::vector<std::string> lines() const {
    std::vector<std::string> out;
    for (const auto& [reason, entry] : counts_) {
      out.push_back(fmt::format("{} row(s) skipped, {} (first: {})", entry.first, reason, entry.second));
    }
    return out;
  }

 private:
  std::map<std::string, std::pair<std::size_t, std::string>> counts_;
};

inline std::vector<std::string> provenance_block(std::string_view command, const RunConfig& cfg,
                                                 std::optional<TemperatureMode> mode) {
  std::vector<std::string> out{fmt::format("; command: qdcqed {}", command)};
  for (const auto& line : split(echo_config(cfg, mode), '\n')) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

inline void finish_provenance(SweepResult& r) {
  r.provenance.push_back(fmt::format("; rows = {}", r.rows.size()));
  r.provenance.push_back(fmt::format("; skipped_rows = {}", r.skipped));
  for (const auto& w : r.warnings) r.provenance.push_back("; warning: " + w);
}

inline double rate_output(std::string_view out, const SystemParams& p,
                          const GeometryAssignments& geom) {
  if (out == "R") return effective_rate(p);
  if (out == "efficiency") return efficiency(p);
  if (out == "purcell") return purcell_factor(p);
  const auto w = geom.get("omega_qd_eV");
  if (!w) throw ConfigError("output Q_eff needs [geometry] omega_qd_eV");
  const double omega_qd = *w * 1e6;
  return quality_factors(p, omega_qd, omega_qd - p.delta).Q_eff;
}

}  // namespace detail

/// Swept values for a rate sweep. Temperature sweeps in node mode take the
/// table nodes inside [min, max]; everything else uses the configured range.
inline std::vector<double> sweep_points(const SweepSection& s, const DephasingTable& table,
                                        TemperatureMode mode) {
  if (s.variable == "T" && mode == TemperatureMode::nodes) {
    auto nodes = table.node_temperatures(s.min.value_or(0.0),
                                         s.max.value_or(std::numeric_limits<double>::infinity()));
    if (nodes.empty()) throw ConfigError("no dephasing table node inside the sweep range");
    return nodes;
  }
  if (!s.min || !s.max || !s.count) {
    throw ConfigError(fmt::format("[sweep] needs min, max and count for variable '{}'", s.variable));
  }
  return grid({*s.min, *s.max, *s.count, s.spacing});
}

inline SweepResult rate_sweep(const RunConfig& cfg, RateCommand cmd,
                              std::optional<TemperatureMode> mode_flag = {}) {
  if (!cfg.has("system")) throw ConfigError("missing [system] section");
  if (!cfg.sweep) throw ConfigError("missing [sweep] section");
  const auto& s = *cfg.sweep;
  if (!detail::allowed_variables(cmd).contains(s.variable)) {
    std::string allowed;
    for (const auto& v : detail::allowed_variables(cmd)) allowed += (allowed.empty() ? "" : ", ") + v;
    throw ConfigError(fmt::format("{} cannot sweep '{}' (allowed: {})", command_name(cmd),
                                  s.variable, allowed));
  }
  const auto swept = *detail::rate_variable(s.variable);
  const TemperatureMode mode = mode_flag.value_or(s.mode.value_or(TemperatureMode::nodes));

  std::vector<std::string> outputs = s.outputs;
  if (outputs.empty()) {
    outputs = {cmd == RateCommand::efficiency      ? "efficiency"
               : cmd == RateCommand::transfer_rate ? "R"
                                                   : "purcell"};
  }
  for (const auto& o : outputs) {
    detail::rate_output_column(o);
    if (o == "Q_eff" && !cfg.geometry.get("omega_qd_eV")) {
      throw ConfigError("output Q_eff needs [geometry] omega_qd_eV");
    }
  }

  std::vector<Variant> variants = s.variants;
  if (variants.empty()) variants.emplace_back();
  const std::set<std::string> blocked = [&] {
    std::set<std::string> b{swept.quantity};
    if (swept.quantity == "kappa") b.insert("kappa_out");
    if (swept.quantity == "kappa_out") b.insert("kappa");
    if (swept.quantity == "T") b.insert("gamma_star");
    return b;
  }();
  std::vector<std::string> labels;
  for (const auto& v : variants) {
    if (!v.geometry.empty()) throw ConfigError("geometry keys are not valid in a rate-sweep variant");
    for (const auto& a : v.system.items()) {
      if (blocked.contains(a.quantity)) {
        throw ConfigError(fmt::format("variant '{}' sets {}, which is the swept variable",
                                      v.source, a.key()));
      }
    }
    labels.push_back(v.system.label(cfg.system.merged(v.system)));
  }

  SweepResult r;
  r.provenance = detail::provenance_block(command_name(cmd), cfg,
                                          s.variable == "T" ? std::optional(mode) : std::nullopt);
  r.columns.push_back(swept.column);
  if (s.variable == "T") r.columns.push_back("gamma_star_ueV");
  for (const auto& o : outputs) {
    for (const auto& l : labels) r.columns.push_back(detail::column_name(detail::rate_output_column(o), l));
  }

  detail::SkipLog skips;
  for (const double x : sweep_points(s, cfg.dephasing.table, mode)) {
    try {
      std::vector<double> row{x};
      if (s.variable == "T") row.push_back(cfg.dephasing.table.gamma_star_at(x));
      std::vector<SystemParams> points;
      for (const auto& v : variants) {
        auto merged = cfg.system.merged(v.system);
        merged.set({swept.quantity, swept.unit, x});
        points.push_back(merged.resolve(cfg.dephasing.table).params);
      }
      for (const auto& o : outputs) {
        for (const auto& p : points) row.push_back(detail::rate_output(o, p, cfg.geometry));
      }
      for (const double v : row) {
        if (!std::isfinite(v)) throw DomainError("non-finite result");
      }
      r.rows.push_back(std::move(row));
    } catch (const ParamError& e) {
      ++r.skipped;
      skips.add("invalid " + e.field(), e.what());
    } catch (const DomainError& e) {
      ++r.skipped;
      skips.add("outside the model domain", e.what());
    }
  }
  r.warnings = skips.lines();
  detail::finish_provenance(r);
  return r;
}

/// Loss rates and coupling against mode volume for each geometry variant.
inline SweepResult geometry_sweep(const RunConfig& cfg) {
  if (!cfg.has("geometry")) throw ConfigError("missing [geometry] section");
  if (!cfg.sweep) throw ConfigError("missing [sweep] section");
  const auto& s = *cfg.sweep;
  if (!s.variable.empty() && s.variable != "V") {
    throw ConfigError(fmt::format("geometry-sweep sweeps V only, got '{}'", s.variable));
  }
  if (!s.min || !s.max || !s.count) throw ConfigError("[sweep] needs min, max and count");
  std::vector<std::string> outputs = s.outputs;
  if (outputs.empty()) outputs = {"kappa_in", "kappa", "g"};
  for (const auto& o : outputs) detail::geometry_output_column(o);

  std::vector<Variant> variants = s.variants;
  if (variants.empty()) variants.emplace_back();
  for (const auto& v : variants) {
    if (!v.system.items().empty()) {
      throw ConfigError("rate keys are not valid in a geometry-sweep variant");
    }
    if (v.geometry.get("V_um3")) throw ConfigError("variant sets V_um3, which is the swept variable");
  }

  SweepResult r;
  r.provenance = detail::provenance_block("geometry-sweep", cfg, std::nullopt);
  r.columns.push_back("V_um3");
  for (const auto& o : outputs) {
    for (const auto& v : variants) {
      r.columns.push_back(detail::column_name(detail::geometry_output_column(o), v.geometry.label()));
    }
  }

  detail::SkipLog skips;
  std::set<std::string> notes;
  std::size_t flagged = 0;
  for (const double V : grid({*s.min, *s.max, *s.count, s.spacing})) {
    try {
      std::vector<CavityGeometry> geoms;
      bool row_flagged = false;
      for (const auto& v : variants) {
        auto merged = cfg.geometry.merged(v.geometry);
        merged.set("V_um3", V);
        geoms.push_back(validate(merged.build()));
        for (const auto& w : geometry_warnings(geoms.back())) notes.insert(w);
        if (internal_loss(geoms.back()) > total_loss(geoms.back())) row_flagged = true;
      }
      std::vector<double> row{V};
      for (const auto& o : outputs) {
        for (const auto& g : geoms) {
          if (o == "kappa_in") row.push_back(internal_loss(g));
          else if (o == "kappa") row.push_back(total_loss(g));
          else if (o == "kappa_out") row.push_back(external_loss(g));
          else row.push_back(coupling_strength(g));
        }
      }
      if (row_flagged) ++flagged;
      r.rows.push_back(std::move(row));
    } catch (const ParamError& e) {
      ++r.skipped;
      skips.add("invalid " + e.field(), e.what());
    }
  }
  r.warnings = skips.lines();
  if (flagged > 0) {
    r.warnings.push_back(fmt::format("{} row(s): kappa_in exceeds kappa for at least one variant",
                                     flagged));
  }
  r.warnings.insert(r.warnings.end(), notes.begin(), notes.end());
  detail::finish_provenance(r);
  return r;
}

struct DynamicsResult {
  lindblad::Trajectory trajectory;
  SystemParams params;
  std::vector<std::string> provenance;
  std::optional<double> fitted_decay;     ///< from <sigma+ sigma->, ueV
  std::optional<double> adiabatic_decay;  ///< gamma + R when the rate model applies
  std::string fit_note;
};

inline lindblad::DensityMatrix initial_state(const HilbertSection& h) {
  using lindblad::DensityMatrix;
  using lindblad::QdState;
  if (h.initial_state == "excited_vacuum") {
    return DensityMatrix::basis_state(h.config, QdState::excited, 0);
  }
  if (h.initial_state == "ground_vacuum") {
    return DensityMatrix::basis_state(h.config, QdState::ground, 0);
  }
  if (h.initial_state == "diagonal") {
    if (h.populations.empty()) throw ConfigError("initial_state = diagonal needs populations");
    try {
      auto rho = DensityMatrix::from_populations(h.config, h.populations);
      rho.check();
      return rho;
    } catch (const ParamError& e) {
      throw ConfigError(fmt::format("[hilbert] populations: {}", e.what()));
    }
  }
  throw ConfigError(fmt::format(
      "unknown initial_state '{}' (expected excited_vacuum, ground_vacuum, diagonal)",
      h.initial_state));
}

inline DynamicsResult dynamics(const RunConfig& cfg) {
  if (!cfg.has("system")) throw ConfigError("missing [system] section");
  if (!cfg.has("hilbert")) throw ConfigError("missing [hilbert] section");
  const auto& h = cfg.hilbert;
  if (h.points < 2) throw ConfigError("[hilbert] points must be >= 2");
  if (!(h.t_max > 0.0)) throw ConfigError("[hilbert] t_max_hbar_per_ueV must be positive");
  if (!(h.integrator.rtol > 0.0) || !(h.integrator.atol > 0.0)) {
    throw ConfigError("[hilbert] rtol and atol must be positive");
  }

  DynamicsResult out;
  out.params = cfg.system.resolve(cfg.dephasing.table, false).params;
  const auto rho0 = initial_state(h);
  const auto t = grid({0.0, h.t_max, h.points, Spacing::linear});
  out.trajectory = lindblad::evolve(h.config, out.params, rho0, t, h.integrator);
  out.provenance = detail::provenance_block("dynamics", cfg, std::nullopt);

  const auto obs = lindblad::expectations(out.trajectory);
  try {
    out.fitted_decay = lindblad::fit_decay_rate(obs.t, obs.n_e);
  } catch (const FitError& e) {
    out.fit_note = e.what();
  }
  try {
    const auto& p = validate(out.params);
    if (p.pump == 0.0) out.adiabatic_decay = p.gamma + effective_rate(p);
  } catch (const ParamError&) {
  }
  const auto w = out.trajectory.worst();
  out.provenance.push_back(fmt::format(
      "; worst: trace_err={:.3e} hermiticity={:.3e} min_eig={:.3e}", w.trace_error,
      w.hermiticity_defect, w.min_eigenvalue));
  return out;
}

inline void write_dynamics_csv(std::ostream& os, const DynamicsResult& d) {
  for (const auto& line : d.provenance) os << "# " << line << '\n';
  lindblad::write_trajectory_csv(os, d.trajectory);
}

}  // namespace qdcqed::cli
