#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "qdcqed/cli/config.hpp"

using namespace qdcqed;
using namespace qdcqed::cli;

namespace {

SystemParams resolve(const std::string& ini) {
  const auto cfg = parse_config_text(ini);
  return cfg.system.resolve(cfg.dephasing.table).params;
}

}  // namespace

TEST(Config, AbsoluteAndRelativeRates) {
  const auto p = resolve(
      "[system]\ng_ueV = 50\ngamma_over_g = 0.02\nkappa_in_ueV = 5\nkappa_over_g = 5\n"
      "delta_over_g = 10\npump_over_g = 2\ngamma_star_ueV = 40\n");
  EXPECT_EQ(p.g, 50.0);
  EXPECT_EQ(p.gamma, 1.0);
  EXPECT_EQ(p.kappa_in, 5.0);
  EXPECT_EQ(p.kappa_out, 245.0);
  EXPECT_EQ(p.delta, 500.0);
  EXPECT_EQ(p.pump, 100.0);
  EXPECT_EQ(p.gamma_star, 40.0);
}

TEST(Config, TemperatureResolvesThroughTable) {
  const auto p = resolve("[system]\ng_ueV = 50\ngamma_ueV = 1\nkappa_out_ueV = 250\nT_K = 75\n");
  EXPECT_DOUBLE_EQ(p.gamma_star, 130.0);
  EXPECT_EQ(resolve("[system]\ngamma_ueV = 1\nkappa_out_ueV = 1\nT_K = 100\n").gamma_star, 220.0);
}

TEST(Config, InlineSamplesReplaceBuiltin) {
  const auto cfg = parse_config_text(
      "[system]\ngamma_ueV = 1\nkappa_out_ueV = 1\nT_K = 20\n"
      "[dephasing]\nsamples = 10:1, 30:3\nzero_anchor = false\n");
  EXPECT_FALSE(cfg.dephasing.table.zero_anchor());
  EXPECT_DOUBLE_EQ(cfg.system.resolve(cfg.dephasing.table).params.gamma_star, 2000.0);
}

TEST(Config, TablePathIsRelativeToConfigFile) {
  const auto dir = std::filesystem::temp_directory_path() / "qdcqed_cfg_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "t.csv") << "T_K,gamma_star_meV\n10,0.5\n20,1.5\n";
  std::ofstream(dir / "run.ini") << "[dephasing]\ntable = t.csv\n";
  const auto cfg = load_config(dir / "run.ini");
  ASSERT_EQ(cfg.dephasing.table.samples().size(), 2u);
  EXPECT_EQ(cfg.dephasing.table.samples()[1].gamma_star_meV, 1.5);
  std::ofstream(dir / "bad.ini") << "[dephasing]\ntable = missing.csv\n";
  EXPECT_THROW(load_config(dir / "bad.ini"), ConfigError);
  EXPECT_THROW(load_config(dir / "absent.ini"), ConfigError);
}

TEST(Config, RejectsUnknownSectionsAndKeys) {
  EXPECT_THROW(parse_config_text("[systen]\ng_ueV = 1\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[system]\ng_meV = 1\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[geometry]\nvolume = 1\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[hilbert]\nnmax = 3\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[sweep]\nsteps = 3\n"), ConfigError);
  EXPECT_THROW(parse_config_text("g_ueV = 1\n"), ConfigError);
}

TEST(Config, RejectsMalformedValues) {
  EXPECT_THROW(parse_config_text("[system]\ng_ueV = fifty\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[system]\ng_ueV = 5x\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[system]\ng_ueV = inf\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[hilbert]\nn_max = 2.5\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[hilbert]\nn_max = 0\n"), ParamError);
  EXPECT_THROW(parse_config_text("[sweep]\nspacing = cubic\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[sweep]\nmode = both\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[dephasing]\nsamples = 10:1, 10:2\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[dephasing]\nsamples = 10-1, 20:2\n"), ConfigError);
}

TEST(Config, RejectsConflictingSpellings) {
  EXPECT_THROW(parse_config_text("[system]\ngamma_ueV = 1\ngamma_over_g = 0.02\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[system]\nkappa_ueV = 250\nkappa_out_ueV = 245\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[system]\nT_K = 50\ngamma_star_ueV = 40\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[system]\ng_ueV = 1\ng_ueV = 2\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[geometry]\nR_0 = 0.9\nR_l = 0.9\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[dephasing]\ntable = a.csv\nsamples = 1:1, 2:2\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[dephasing]\nsource = lab\n"), ConfigError);
}

TEST(Config, InvariantViolationsNameTheField) {
  try {
    resolve("[system]\ng_ueV = 50\ngamma_ueV = 0\nkappa_out_ueV = 1\n");
    FAIL() << "expected ParamError";
  } catch (const ParamError& e) {
    EXPECT_EQ(e.field(), "gamma");
  }
  try {
    resolve("[system]\ngamma_ueV = 1\nkappa_in_ueV = 10\nkappa_ueV = 5\n");
    FAIL() << "expected ParamError";
  } catch (const ParamError& e) {
    EXPECT_EQ(e.field(), "kappa_out");
  }
  EXPECT_THROW(resolve("[system]\ngamma_ueV = 1\nkappa_out_ueV = 1\nT_K = 400\n"), DomainError);
}

TEST(Config, VariantsParseInOrder) {
  const auto cfg = parse_config_text(
      "[sweep]\nvariable = T\nvariant1 = delta_over_g=0; pump_over_g=0\n"
      "variant2 = delta_over_g=10;pump_ueV=100\n");
  ASSERT_TRUE(cfg.sweep);
  ASSERT_EQ(cfg.sweep->variants.size(), 2u);
  const auto& v = cfg.sweep->variants[1].system;
  ASSERT_NE(v.find("pump"), nullptr);
  EXPECT_EQ(v.find("pump")->value, 100.0);
  ParamAssignments base;
  base.add_strict({"g", Unit::ueV, 50.0}, "test");
  EXPECT_EQ(v.label(base.merged(v)), "delta_ueV=500;pump_ueV=100");
}

TEST(Config, RejectsBadVariants) {
  EXPECT_THROW(parse_config_text("[sweep]\nvariant2 = delta_ueV=1\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[sweep]\nvariant1 = delta_ueV\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[sweep]\nvariant1 = colour=1\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[sweep]\nvariant1 = alpha=2; delta_ueV=1\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[sweep]\nvariant1 = ;\n"), ConfigError);
}

TEST(Config, MergeReplacesPartnerQuantities) {
  ParamAssignments base;
  base.add_strict({"kappa_out", Unit::ueV, 245.0}, "t");
  base.add_strict({"gamma_star", Unit::ueV, 40.0}, "t");
  ParamAssignments over;
  over.set({"kappa", Unit::ueV, 100.0});
  over.set({"T", Unit::kelvin, 100.0});
  const auto m = base.merged(over);
  EXPECT_EQ(m.find("kappa_out"), nullptr);
  EXPECT_EQ(m.find("gamma_star"), nullptr);
  EXPECT_EQ(*m.absolute("kappa"), 100.0);
}

TEST(Config, EchoReparsesToTheSameConfiguration) {
  const std::string ini =
      "[system]\ng_ueV = 50\ngamma_over_g = 0.02\nkappa_in_ueV = 5\nkappa_over_g = 5\nT_K = 62.5\n"
      "[geometry]\nomega_qd_eV = 1.3\n"
      "[dephasing]\nsamples = 50:0.04, 100:0.22, 150:3\n"
      "[hilbert]\nn_max = 3\ninitial_state = diagonal\npopulations = 0.5, 0, 0, 0, 0.5, 0, 0, 0\n"
      "[sweep]\nvariable = kappa\nmin = 5\nmax = 50\ncount = 7\nspacing = log\noutputs = R, Q_eff\n"
      "variant1 = delta_over_g=0.1\n";
  const auto a = parse_config_text(ini);
  const auto echo = echo_config(a);
  const auto b = parse_config_text(echo);
  EXPECT_EQ(echo_config(b), echo);
  EXPECT_EQ(a.system.resolve(a.dephasing.table).params, b.system.resolve(b.dephasing.table).params);
  EXPECT_EQ(a.dephasing.table, b.dephasing.table);
  EXPECT_EQ(b.hilbert.config.n_max, 3);
  EXPECT_EQ(b.hilbert.populations, a.hilbert.populations);
  EXPECT_EQ(b.sweep->spacing, Spacing::log);
  EXPECT_EQ(b.sweep->outputs, (std::vector<std::string>{"R", "Q_eff"}));
  EXPECT_NE(echo.find("; resolved: g_ueV=50 gamma_ueV=1"), std::string::npos);
  EXPECT_NE(echo.find("source = inline\n"), std::string::npos);
  EXPECT_NE(echo_config(parse_config_text("[system]\ng_ueV = 1\n")).find("source = builtin\n"),
            std::string::npos);
}
