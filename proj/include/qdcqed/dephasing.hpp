#pragma once

// Temperature -> pure dephasing lookup. Samples are stored in (K, meV) as they
// appear in measurement tables; lookups return ueV.

#include <cmath>
#include <filesystem>
#include <limits>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "qdcqed/errors.hpp"
#include "qdcqed/units.hpp"

namespace qdcqed {

struct DephasingSample {
  double T_K;
  double gamma_star_meV;
  friend bool operator==(const DephasingSample&, const DephasingSample&) = default;
};

class DephasingTable {
 public:
  static constexpr std::string_view kCsvHeader = "T_K,gamma_star_meV";

  /// Throws ConfigError unless T is strictly increasing, gamma_star >= 0 and
  /// there are at least two samples.
  explicit DephasingTable(std::vector<DephasingSample> samples, bool zero_anchor = true)
      : samples_(std::move(samples)), zero_anchor_(zero_anchor) {
    if (samples_.size() < 2) {
      throw ConfigError("dephasing table needs at least 2 samples");
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      const auto& s = samples_[i];
      if (!std::isfinite(s.T_K) || s.T_K < 0.0) {
        throw ConfigError(fmt::format("negative or non-finite temperature {} K", s.T_K));
      }
      if (!std::isfinite(s.gamma_star_meV) || s.gamma_star_meV < 0.0) {
        throw ConfigError(fmt::format("negative or non-finite gamma_star {} meV at {} K",
                                      s.gamma_star_meV, s.T_K));
      }
      if (i > 0 && !(s.T_K > samples_[i - 1].T_K)) {
        throw ConfigError(fmt::format("non-increasing temperature {} K after {} K", s.T_K,
                                      samples_[i - 1].T_K));
      }
    }
  }

  const std::vector<DephasingSample>& samples() const noexcept { return samples_; }
  bool zero_anchor() const noexcept { return zero_anchor_; }
  double min_T() const noexcept { return zero_anchor_ ? 0.0 : samples_.front().T_K; }
  double max_T() const noexcept { return samples_.back().T_K; }

  /// Node temperatures in [lo, hi], excluding the synthetic zero anchor.
  std::vector<double> node_temperatures(double lo = 0.0,
                                        double hi = std::numeric_limits<double>::infinity()) const {
    std::vector<double> out;
    for (const auto& s : samples_) {
      if (s.T_K >= lo && s.T_K <= hi) out.push_back(s.T_K);
    }
    return out;
  }

  /// Piecewise-linear gamma_star(T) in ueV. Below the first sample the
  /// interpolant runs through (0 K, 0) when the anchor is enabled.
  double gamma_star_at(double T_K) const {
    if (!std::isfinite(T_K) || T_K < 0.0) {
      throw DomainError(fmt::format("temperature {} K is negative", T_K));
    }
    if (T_K > max_T()) {
      throw DomainError(fmt::format("temperature {} K above table range (max {} K)", T_K,
                                    max_T()));
    }
    if (T_K < samples_.front().T_K) {
      if (!zero_anchor_) {
        throw DomainError(fmt::format("temperature {} K below table range (min {} K)", T_K,
                                      samples_.front().T_K));
      }
      return meV_to_ueV(samples_.front().gamma_star_meV * (T_K / samples_.front().T_K));
    }
    for (std::size_t i = 1; i < samples_.size(); ++i) {
      const auto& lo = samples_[i - 1];
      const auto& hi = samples_[i];
      if (T_K == lo.T_K) return meV_to_ueV(lo.gamma_star_meV);
      if (T_K == hi.T_K) return meV_to_ueV(hi.gamma_star_meV);
      if (T_K < hi.T_K) {
        const double w = (T_K - lo.T_K) / (hi.T_K - lo.T_K);
        return meV_to_ueV(lo.gamma_star_meV + w * (hi.gamma_star_meV - lo.gamma_star_meV));
      }
    }
    return meV_to_ueV(samples_.back().gamma_star_meV);
  }

  friend bool operator==(const DephasingTable&, const DephasingTable&) = default;

 private:
  std::vector<DephasingSample> samples_;
  bool zero_anchor_;
};

/// Measured InGaAs dephasing values at 50, 100, 150, 200 and 300 K.
inline DephasingTable builtin_ingaas() {
  return DephasingTable({{50.0, 0.04}, {100.0, 0.22}, {150.0, 3.0}, {200.0, 4.0}, {300.0, 6.0}},
                        true);
}

inline double gamma_star_at(const DephasingTable& table, double T_K) {
  return table.gamma_star_at(T_K);
}

/// Parses the CSV format (header "T_K,gamma_star_meV", one sample per line).
inline DephasingTable parse_table(std::istream& in, const std::string& origin = "<stream>",
                                  bool zero_anchor = true) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError(origin + ": empty dephasing table");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != DephasingTable::kCsvHeader) {
    throw ConfigError(fmt::format("{}: expected header '{}', got '{}'", origin,
                                  DephasingTable::kCsvHeader, line));
  }
  std::vector<DephasingSample> samples;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ConfigError(fmt::format("{}:{}: malformed row '{}'", origin, lineno, line));
    }
    DephasingSample s{};
    try {
      std::size_t used = 0;
      const std::string a = line.substr(0, comma);
      const std::string b = line.substr(comma + 1);
      s.T_K = std::stod(a, &used);
      if (used != a.size()) throw std::invalid_argument(a);
      s.gamma_star_meV = std::stod(b, &used);
      if (used != b.size()) throw std::invalid_argument(b);
    } catch (const std::logic_error&) {
      throw ConfigError(fmt::format("{}:{}: malformed row '{}'", origin, lineno, line));
    }
    samples.push_back(s);
  }
  try {
    return DephasingTable(std::move(samples), zero_anchor);
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

inline DephasingTable load_table(const std::filesystem::path& path, bool zero_anchor = true) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open dephasing table " + path.string());
  }
  return parse_table(in, path.string(), zero_anchor);
}

/// Writes with round-trip precision.
inline void write_table(std::ostream& out, const DephasingTable& table) {
  out << DephasingTable::kCsvHeader << '\n';
  for (const auto& s : table.samples()) {
    out << fmt::format("{:.17g},{:.17g}\n", s.T_K, s.gamma_star_meV);
  }
}

inline void save_table(const std::filesystem::path& path, const DephasingTable& table) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write dephasing table " + path.string());
  write_table(out, table);
}

}  // namespace qdcqed
