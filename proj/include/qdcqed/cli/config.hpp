#pragma once

// INI configuration for the command-line front end.
//
// Sections: [system], [geometry], [dephasing], [hilbert], [sweep]. Unknown
// sections or keys are errors. Rates are absolute (suffix _ueV) or multiples
// of g (suffix _over_g); the original spelling is kept so that the echoed
// configuration re-runs bit-identically.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "qdcqed/dephasing.hpp"
#include "qdcqed/errors.hpp"
#include "qdcqed/geometry.hpp"
#include "qdcqed/lindblad/dormand_prince.hpp"
#include "qdcqed/lindblad/hilbert.hpp"
#include "qdcqed/params.hpp"

namespace qdcqed::cli {

enum class Unit { ueV, over_g, kelvin };

/// A rate-model quantity as written: `quantity` is one of g, gamma, gamma_star,
/// kappa_in, kappa_out, kappa, delta, pump, T.
struct Assignment {
  std::string quantity;
  Unit unit = Unit::ueV;
  double value = 0.0;

  std::string key() const {
    switch (unit) {
      case Unit::over_g: return quantity + "_over_g";
      case Unit::kelvin: return quantity + "_K";
      case Unit::ueV: break;
    }
    return quantity + "_ueV";
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_number(std::string_view text, std::string_view where) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(fmt::format("{}: '{}' is not a finite number", where, t));
  }
  return v;
}

inline int parse_int(std::string_view text, std::string_view where) {
  const std::string t = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not an integer", where, t));
  }
  return v;
}

inline bool parse_bool(std::string_view text, std::string_view where) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", where, t));
}

inline std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += fmt::format("{}{}", i ? ", " : "", v[i]);
  return out;
}

}  // namespace detail

/// Maps a [system]-style key to an Assignment skeleton, or nullopt when unknown.
inline std::optional<Assignment> system_key(std::string_view key) {
  static const std::vector<std::string> scaled = {"gamma", "gamma_star", "kappa_in",
                                                  "kappa_out", "kappa", "delta", "pump"};
  if (key == "g_ueV") return Assignment{"g", Unit::ueV, 0.0};
  if (key == "T_K") return Assignment{"T", Unit::kelvin, 0.0};
  for (const auto& q : scaled) {
    if (key == q + "_ueV") return Assignment{q, Unit::ueV, 0.0};
    if (key == q + "_over_g") return Assignment{q, Unit::over_g, 0.0};
  }
  return std::nullopt;
}

inline bool is_geometry_key(std::string_view key) {
  static constexpr std::string_view keys[] = {"d_um",  "V_um3",   "R_l",        "R_r",
                                              "R_0",   "alpha",   "M_debye",    "omega_qd_eV"};
  for (auto k : keys) {
    if (k == key) return true;
  }
  return false;
}

/// Resolved rate-model point.
struct ResolvedSystem {
  SystemParams params;
  std::optional<double> T_K;
};

/// Ordered set of rate assignments. Setting `kappa` drops `kappa_out` (and
/// vice versa); setting `T` drops `gamma_star` (and vice versa).
class ParamAssignments {
 public:
  void set(const Assignment& a) {
    erase(a.quantity);
    if (a.quantity == "kappa") erase("kappa_out");
    if (a.quantity == "kappa_out") erase("kappa");
    if (a.quantity == "T") erase("gamma_star");
    if (a.quantity == "gamma_star") erase("T");
    items_.push_back(a);
  }

  /// Adds an assignment read from one section; a quantity given twice, or a
  /// conflicting pair, is a configuration error.
  void add_strict(const Assignment& a, std::string_view where) {
    auto clash = [&](const char* q) {
      if (const auto* other = find(q)) {
        throw ConfigError(fmt::format("{}: {} conflicts with {}", where, a.key(), other->key()));
      }
    };
    clash(a.quantity.c_str());
    if (a.quantity == "kappa") clash("kappa_out");
    if (a.quantity == "kappa_out") clash("kappa");
    if (a.quantity == "T") clash("gamma_star");
    if (a.quantity == "gamma_star") clash("T");
    if (a.quantity == "g" && a.unit == Unit::over_g) {
      throw ConfigError(fmt::format("{}: g cannot be given in units of itself", where));
    }
    items_.push_back(a);
  }

  const Assignment* find(std::string_view quantity) const {
    for (const auto& a : items_) {
      if (a.quantity == quantity) return &a;
    }
    return nullptr;
  }

  const std::vector<Assignment>& items() const noexcept { return items_; }

  ParamAssignments merged(const ParamAssignments& over) const {
    ParamAssignments out = *this;
    for (const auto& a : over.items_) out.set(a);
    return out;
  }

  double g() const {
    const auto* a = find("g");
    return a ? a->value : 0.0;
  }

  /// Absolute value of a quantity in ueV (or K for T), nullopt when absent.
  std::optional<double> absolute(std::string_view quantity) const {
    const auto* a = find(quantity);
    if (!a) return std::nullopt;
    return a->unit == Unit::over_g ? a->value * g() : a->value;
  }

  /// Builds the parameter bundle. gamma_star comes from the table when T is set;
  /// kappa_out = kappa - kappa_in when the total is given. With `strict` the
  /// rate-model invariants are enforced, otherwise only non-negativity.
  ResolvedSystem resolve(const DephasingTable& table, bool strict = true) const {
    ResolvedSystem r;
    auto& p = r.params;
    p.g = g();
    p.gamma = absolute("gamma").value_or(0.0);
    p.kappa_in = absolute("kappa_in").value_or(0.0);
    if (const auto k = absolute("kappa")) {
      p.kappa_out = *k - p.kappa_in;
      if (p.kappa_out < 0.0) {
        throw ParamError("kappa_out", fmt::format("kappa = {} ueV is below kappa_in = {} ueV", *k,
                                                  p.kappa_in));
      }
    } else {
      p.kappa_out = absolute("kappa_out").value_or(0.0);
    }
    p.delta = absolute("delta").value_or(0.0);
    p.pump = absolute("pump").value_or(0.0);
    if (const auto T = absolute("T")) {
      r.T_K = *T;
      p.gamma_star = table.gamma_star_at(*T);
    } else {
      p.gamma_star = absolute("gamma_star").value_or(0.0);
    }
    if (strict) {
      validate(p);
    } else {
      for (const auto& [v, name] :
           {std::pair{p.g, "g"}, {p.gamma, "gamma"}, {p.gamma_star, "gamma_star"},
            {p.kappa_in, "kappa_in"}, {p.kappa_out, "kappa_out"}, {p.pump, "pump"}}) {
        qdcqed::detail::require_non_negative(v, name);
      }
    }
    return r;
  }

  /// "delta_ueV=500;pump_ueV=0" style label of these assignments, converted to
  /// absolute units with the coupling of `context`.
  std::string label(const ParamAssignments& context) const {
    std::string out;
    for (const auto& a : items_) {
      if (!out.empty()) out += ';';
      if (a.unit == Unit::kelvin) {
        out += fmt::format("T_K={}", a.value);
      } else {
        const double v = a.unit == Unit::over_g ? a.value * context.g() : a.value;
        out += fmt::format("{}_ueV={}", a.quantity, v);
      }
    }
    return out;
  }

 private:
  void erase(std::string_view quantity) {
    std::erase_if(items_, [&](const Assignment& a) { return a.quantity == quantity; });
  }
  std::vector<Assignment> items_;
};

/// Ordered geometry key/value pairs; R_0 sets both reflectivities.
class GeometryAssignments {
 public:
  void set(const std::string& key, double value) {
    std::erase_if(items_, [&](const auto& kv) {
      return kv.first == key || (key == "R_0" && (kv.first == "R_l" || kv.first == "R_r")) ||
             ((key == "R_l" || key == "R_r") && kv.first == "R_0");
    });
    items_.emplace_back(key, value);
  }
  bool empty() const noexcept { return items_.empty(); }
  const std::vector<std::pair<std::string, double>>& items() const noexcept { return items_; }

  GeometryAssignments merged(const GeometryAssignments& over) const {
    GeometryAssignments out = *this;
    for (const auto& [k, v] : over.items_) out.set(k, v);
    return out;
  }

  std::optional<double> get(std::string_view key) const {
    for (const auto& [k, v] : items_) {
      if (k == key) return v;
    }
    return std::nullopt;
  }

  CavityGeometry build() const {
    CavityGeometry g;
    for (const auto& [k, v] : items_) {
      if (k == "d_um") g.d_um = v;
      else if (k == "V_um3") g.V_um3 = v;
      else if (k == "R_l") g.R_l = v;
      else if (k == "R_r") g.R_r = v;
      else if (k == "R_0") g.R_l = g.R_r = v;
      else if (k == "alpha") g.alpha = v;
      else if (k == "M_debye") g.M_debye = v;
      else if (k == "omega_qd_eV") g.omega_qd_eV = v;
    }
    return g;
  }

  std::string label() const {
    std::string out;
    for (const auto& [k, v] : items_) out += fmt::format("{}{}={}", out.empty() ? "" : ";", k, v);
    return out;
  }

 private:
  std::vector<std::pair<std::string, double>> items_;
};

/// One variant line of [sweep]; exactly one of the two sets is used by a command.
struct Variant {
  std::string source;  ///< text as written
  ParamAssignments system;
  GeometryAssignments geometry;
};

enum class Spacing { linear, log };
enum class TemperatureMode { nodes, interp };

inline std::string_view to_string(TemperatureMode m) {
  return m == TemperatureMode::nodes ? "nodes" : "interp";
}

inline TemperatureMode parse_mode(std::string_view s) {
  if (s == "nodes") return TemperatureMode::nodes;
  if (s == "interp") return TemperatureMode::interp;
  throw ConfigError(fmt::format("mode must be 'nodes' or 'interp', got '{}'", s));
}

struct SweepSection {
  std::string variable;
  std::optional<double> min, max;
  std::optional<int> count;
  Spacing spacing = Spacing::linear;
  std::vector<std::string> outputs;
  std::optional<TemperatureMode> mode;
  std::vector<Variant> variants;
};

struct DephasingSection {
  DephasingTable table = builtin_ingaas();
  std::string origin = "builtin";
};

struct HilbertSection {
  lindblad::HilbertConfig config;
  std::string initial_state = "excited_vacuum";
  std::vector<double> populations;
  double t_max = 1.0;  ///< hbar/ueV
  int points = 201;
  lindblad::IntegratorOptions integrator;
};

struct RunConfig {
  std::vector<std::string> sections;
  ParamAssignments system;
  GeometryAssignments geometry;
  DephasingSection dephasing;
  HilbertSection hilbert;
  std::optional<SweepSection> sweep;

  bool has(std::string_view section) const {
    for (const auto& s : sections) {
      if (s == section) return true;
    }
    return false;
  }
};

namespace detail {

inline DephasingTable parse_inline_samples(std::string_view text, bool anchor,
                                           std::string_view where) {
  std::vector<DephasingSample> samples;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) {
      throw ConfigError(fmt::format("{}: sample '{}' is not T_K:gamma_star_meV", where, item));
    }
    samples.push_back({parse_number(parts[0], where), parse_number(parts[1], where)});
  }
  return DephasingTable(std::move(samples), anchor);
}

inline Variant parse_variant(std::string_view text, std::string_view where) {
  Variant v;
  v.source = trim(text);
  for (const auto& item : split(text, ';')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("{}: '{}' is not key=value", where, item));
    }
    const std::string key = trim(std::string_view(item).substr(0, eq));
    const double value = parse_number(std::string_view(item).substr(eq + 1), where);
    if (auto a = system_key(key)) {
      a->value = value;
      v.system.add_strict(*a, where);
    } else if (is_geometry_key(key)) {
      v.geometry.set(key, value);
    } else {
      throw ConfigError(fmt::format("{}: unknown variant key '{}'", where, key));
    }
  }
  if (v.system.items().empty() && v.geometry.empty()) {
    throw ConfigError(fmt::format("{}: empty variant", where));
  }
  if (!v.system.items().empty() && !v.geometry.empty()) {
    throw ConfigError(fmt::format("{}: variant mixes rate and geometry keys", where));
  }
  return v;
}

}  // namespace detail

/// Parses an INI document. Relative table paths resolve against `base_dir`.
inline RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("malformed INI: {}", e.message()));
  }

  RunConfig cfg;
  bool anchor = true;
  std::optional<std::string> table_path;
  std::optional<std::string> inline_samples;
  std::optional<std::string> source;

  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(fmt::format("key '{}' outside any section", section));
    }
    cfg.sections.push_back(section);
    for (const auto& [key, node] : body) {
      const std::string value = node.data();
      const std::string where = fmt::format("[{}] {}", section, key);
      if (section == "system") {
        auto a = system_key(key);
        if (!a) throw ConfigError(fmt::format("unknown key {}", where));
        a->value = detail::parse_number(value, where);
        cfg.system.add_strict(*a, where);
      } else if (section == "geometry") {
        if (!is_geometry_key(key)) throw ConfigError(fmt::format("unknown key {}", where));
        if (cfg.geometry.get(key) || (key == "R_0" && (cfg.geometry.get("R_l") || cfg.geometry.get("R_r"))) ||
            ((key == "R_l" || key == "R_r") && cfg.geometry.get("R_0"))) {
          throw ConfigError(fmt::format("{}: given twice", where));
        }
        cfg.geometry.set(key, detail::parse_number(value, where));
      } else if (section == "dephasing") {
        if (key == "table") table_path = detail::trim(value);
        else if (key == "samples") inline_samples = value;
        else if (key == "zero_anchor") anchor = detail::parse_bool(value, where);
        else if (key == "source") source = detail::trim(value);
        else throw ConfigError(fmt::format("unknown key {}", where));
      } else if (section == "hilbert") {
        auto& h = cfg.hilbert;
        if (key == "n_max") h.config.n_max = detail::parse_int(value, where);
        else if (key == "initial_state") h.initial_state = detail::trim(value);
        else if (key == "populations") {
          for (const auto& item : detail::split(value, ',')) {
            h.populations.push_back(detail::parse_number(item, where));
          }
        } else if (key == "t_max_hbar_per_ueV") h.t_max = detail::parse_number(value, where);
        else if (key == "points") h.points = detail::parse_int(value, where);
        else if (key == "rtol") h.integrator.rtol = detail::parse_number(value, where);
        else if (key == "atol") h.integrator.atol = detail::parse_number(value, where);
        else throw ConfigError(fmt::format("unknown key {}", where));
      } else if (section == "sweep") {
        if (!cfg.sweep) cfg.sweep.emplace();
        auto& s = *cfg.sweep;
        if (key == "variable") s.variable = detail::trim(value);
        else if (key == "min") s.min = detail::parse_number(value, where);
        else if (key == "max") s.max = detail::parse_number(value, where);
        else if (key == "count") s.count = detail::parse_int(value, where);
        else if (key == "spacing") {
          const auto v = detail::trim(value);
          if (v == "linear") s.spacing = Spacing::linear;
          else if (v == "log") s.spacing = Spacing::log;
          else throw ConfigError(fmt::format("{}: spacing must be linear or log", where));
        } else if (key == "outputs") {
          for (const auto& o : detail::split(value, ',')) {
            if (!o.empty()) s.outputs.push_back(o);
          }
        } else if (key == "mode") s.mode = parse_mode(detail::trim(value));
        else if (key.rfind("variant", 0) == 0 && key.size() > 7) {
          const int index = detail::parse_int(std::string_view(key).substr(7), where);
          if (index != static_cast<int>(s.variants.size()) + 1) {
            throw ConfigError(fmt::format("{}: variants must be numbered 1, 2, ... in order",
                                          where));
          }
          s.variants.push_back(detail::parse_variant(value, where));
        } else throw ConfigError(fmt::format("unknown key {}", where));
      } else {
        throw ConfigError(fmt::format("unknown section [{}]", section));
      }
    }
  }

  if (table_path && inline_samples) {
    throw ConfigError("[dephasing] table and samples are mutually exclusive");
  }
  if (source && !inline_samples) throw ConfigError("[dephasing] source labels inline samples only");
  if (table_path) {
    std::filesystem::path p(*table_path);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    cfg.dephasing.table = load_table(p, anchor);
    cfg.dephasing.origin = p.string();
  } else if (inline_samples) {
    cfg.dephasing.table = detail::parse_inline_samples(*inline_samples, anchor, "[dephasing] samples");
    cfg.dephasing.origin = source.value_or("inline");
  } else if (!anchor) {
    cfg.dephasing.table = DephasingTable(builtin_ingaas().samples(), false);
  }
  lindblad::validate(cfg.hilbert.config);
  return cfg;
}

inline RunConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  return parse_config(in, path.parent_path());
}

/// The configuration as INI text: original spellings plus ';' comments with the
/// resolved absolute values. The dephasing table is always inlined.
inline std::string echo_config(const RunConfig& cfg, std::optional<TemperatureMode> mode = {}) {
  std::string out;
  if (!cfg.system.items().empty()) {
    out += "[system]\n";
    for (const auto& a : cfg.system.items()) out += fmt::format("{} = {}\n", a.key(), a.value);
    try {
      const auto r = cfg.system.resolve(cfg.dephasing.table, false);
      const auto& p = r.params;
      out += fmt::format(
          "; resolved: g_ueV={} gamma_ueV={} gamma_star_ueV={} kappa_in_ueV={} kappa_out_ueV={} "
          "delta_ueV={} pump_ueV={}\n",
          p.g, p.gamma, p.gamma_star, p.kappa_in, p.kappa_out, p.delta, p.pump);
    } catch (const std::exception& e) {
      out += fmt::format("; unresolved: {}\n", e.what());
    }
  }
  if (!cfg.geometry.empty()) {
    out += "[geometry]\n";
    for (const auto& [k, v] : cfg.geometry.items()) out += fmt::format("{} = {}\n", k, v);
  }
  out += "[dephasing]\n";
  std::string samples;
  for (const auto& s : cfg.dephasing.table.samples()) {
    samples += fmt::format("{}{}:{}", samples.empty() ? "" : ", ", s.T_K, s.gamma_star_meV);
  }
  out += fmt::format("samples = {}\n", samples);
  out += fmt::format("zero_anchor = {}\n", cfg.dephasing.table.zero_anchor());
  out += fmt::format("source = {}\n", cfg.dephasing.origin);
  if (cfg.has("hilbert")) {
    const auto& h = cfg.hilbert;
    out += "[hilbert]\n";
    out += fmt::format("n_max = {}\n", h.config.n_max);
    out += fmt::format("initial_state = {}\n", h.initial_state);
    if (!h.populations.empty()) {
      out += fmt::format("populations = {}\n", detail::format_list(h.populations));
    }
    out += fmt::format("t_max_hbar_per_ueV = {}\n", h.t_max);
    out += fmt::format("points = {}\n", h.points);
    out += fmt::format("rtol = {}\n", h.integrator.rtol);
    out += fmt::format("atol = {}\n", h.integrator.atol);
  }
  if (cfg.sweep) {
    const auto& s = *cfg.sweep;
    out += "[sweep]\n";
    out += fmt::format("variable = {}\n", s.variable);
    if (s.min) out += fmt::format("min = {}\n", *s.min);
    if (s.max) out += fmt::format("max = {}\n", *s.max);
    if (s.count) out += fmt::format("count = {}\n", *s.count);
    out += fmt::format("spacing = {}\n", s.spacing == Spacing::log ? "log" : "linear");
    if (!s.outputs.empty()) {
      std::string o;
      for (const auto& x : s.outputs) o += (o.empty() ? "" : ", ") + x;
      out += fmt::format("outputs = {}\n", o);
    }
    if (const auto m = mode ? mode : s.mode) out += fmt::format("mode = {}\n", to_string(*m));
    for (std::size_t i = 0; i < s.variants.size(); ++i) {
      const auto& v = s.variants[i];
      std::string body;
      for (const auto& a : v.system.items()) {
        body += fmt::format("{}{}={}", body.empty() ? "" : "; ", a.key(), a.value);
      }
      for (const auto& [k, x] : v.geometry.items()) {
        body += fmt::format("{}{}={}", body.empty() ? "" : "; ", k, x);
      }
      out += fmt::format("variant{} = {}\n", i + 1, body);
    }
  }
  return out;
}

}  // namespace qdcqed::cli
