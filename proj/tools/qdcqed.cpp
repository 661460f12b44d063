// qdcqed: parameter sweeps, master-equation dynamics and the validation suite.
//
// Exit codes: 0 success, 1 check or integration failure, 2 configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qdcqed/cli/commands.hpp"
#include "qdcqed/cli/config.hpp"
#include "qdcqed/cli/validate.hpp"

namespace {

namespace fs = std::filesystem;
using namespace qdcqed;
using namespace qdcqed::cli;

constexpr int kOk = 0;
constexpr int kCheckFailure = 1;
constexpr int kConfigError = 2;

struct Flags {
  std::string config;
  std::string out;
  bool svg = false;
  std::string mode;
  std::string table;
  double perturb_rate = 0.0;
};

template <class Writer>
void emit(const Flags& f, Writer&& write) {
  if (f.out.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream os(f.out);
  if (!os) throw ConfigError(fmt::format("cannot write '{}'", f.out));
  write(os);
}

RunConfig load(const Flags& f) {
  if (f.config.empty()) throw ConfigError("--config is required for this command");
  return load_config(f.config);
}

std::optional<TemperatureMode> mode_of(const Flags& f) {
  if (f.mode.empty()) return std::nullopt;
  return parse_mode(f.mode);
}

int finish_sweep(const Flags& f, const SweepResult& r, std::string_view command) {
  emit(f, [&](std::ostream& os) { write_csv(os, r); });
  if (f.svg) {
    if (f.out.empty()) throw ConfigError("--svg needs --out to place the plot");
    fs::path svg(f.out);
    svg.replace_extension(".svg");
    std::ofstream os(svg);
    if (!os) throw ConfigError(fmt::format("cannot write '{}'", svg.string()));
    write_svg(os, r, fmt::format("qdcqed {}", command));
  }
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  return kOk;
}

int run_validate(const Flags& f) {
  ValidationOptions opt;
  opt.rate_perturbation = f.perturb_rate;
  if (!f.config.empty()) opt.table = load(f).dephasing.table;
  if (!f.table.empty()) opt.table = load_table(f.table);
  int failed = 0;
  std::string report;
  for (int n = 1; n <= 10; ++n) {
    const auto k = run_criterion(n, opt);
    if (!k.pass()) ++failed;
    report += format_line(k) + '\n';
    std::cout << format_line(k) << std::endl;
  }
  const std::string summary = fmt::format("SUMMARY passed={} failed={}", 10 - failed, failed);
  std::cout << summary << '\n';
  if (!f.out.empty()) {
    emit(f, [&](std::ostream& os) { os << report << summary << '\n'; });
  }
  return failed == 0 ? kOk : kCheckFailure;
}

int run_dynamics(const Flags& f) {
  const auto d = dynamics(load(f));
  emit(f, [&](std::ostream& os) { write_dynamics_csv(os, d); });
  if (d.fitted_decay) {
    std::cerr << fmt::format("fitted decay of <sigma+ sigma->: {:.6g} ueV", *d.fitted_decay);
    if (d.adiabatic_decay) std::cerr << fmt::format(" (gamma + R = {:.6g} ueV)", *d.adiabatic_decay);
    std::cerr << '\n';
  } else if (!d.fit_note.empty()) {
    std::cerr << "no decay fit: " << d.fit_note << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity-QED single-photon source simulator"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", f.config, "INI configuration file");
    if (config_required) c->required();
    sub->add_option("--out", f.out, "output file (default: stdout)");
  };
  auto sweep = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    common(sub, true);
    sub->add_flag("--svg", f.svg, "also write a line plot next to --out");
    sub->add_option("--mode", f.mode, "temperature sampling: nodes or interp")
        ->check(CLI::IsMember({"nodes", "interp"}));
    return sub;
  };
  auto* geometry = sweep("geometry-sweep", "loss rates and coupling versus mode volume");
  auto* efficiency = sweep("efficiency-sweep", "single-photon efficiency");
  auto* transfer = sweep("transfer-rate-sweep", "effective transfer rate R");
  auto* purcell = sweep("purcell-sweep", "generalized Purcell factor");
  auto* dyn = app.add_subcommand("dynamics", "master-equation trajectory");
  common(dyn, true);
  auto* val = app.add_subcommand("validate", "run the acceptance checks");
  common(val, false);
  val->add_option("--table", f.table, "dephasing table CSV (T_K,gamma_star_meV)");
  val->add_option("--perturb-rate", f.perturb_rate,
                  "relative perturbation of the transfer rate (tolerance self-test)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (app.got_subcommand(geometry)) return finish_sweep(f, geometry_sweep(load(f)), "geometry-sweep");
    for (auto [sub, cmd] : {std::pair{efficiency, RateCommand::efficiency},
                            std::pair{transfer, RateCommand::transfer_rate},
                            std::pair{purcell, RateCommand::purcell}}) {
      if (app.got_subcommand(sub)) {
        return finish_sweep(f, rate_sweep(load(f), cmd, mode_of(f)), command_name(cmd));
      }
    }
    if (app.got_subcommand(dyn)) return run_dynamics(f);
    if (app.got_subcommand(val)) return run_validate(f);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParamError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailure;
  }
  return kOk;
}
