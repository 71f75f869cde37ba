#include <cmath>

#include <regex>

#include <gtest/gtest.h>

#include "scenario.hpp"

namespace hd {
namespace {

// Parses and returns the error message, or "" when parsing succeeds.
std::string parse_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    return e.what();
  }
  return "";
}

TEST(Scenario, FullConfig) {
  const ScenarioConfig cfg = parse_scenario(R"(
# comment line
name = demo
D = 1,0; 0,1
C = 1,1; 0,1     # trailing comment
f0 = mixture: 0.5, 0.5,0, 1,0,1; 0.5, -0.5,0, 2^0.5,0,1
g0 = hermite: 2 0 2^0.5
g0 += hermite: 0 0 1
p = 1.5
P = certificate(0.1)
t_max = 10
samples = 120
checks = spectrum, improved_decay
)");
  EXPECT_EQ(cfg.name, "demo");
  EXPECT_EQ(cfg.d(), 2);
  EXPECT_DOUBLE_EQ(cfg.C(0, 1), 1.0);
  ASSERT_EQ(cfg.f0.terms.size(), 1u);
  EXPECT_EQ(cfg.f0.terms[0].weight.size(), 2u);
  EXPECT_NEAR(cfg.f0.terms[0].cov[1](0, 0), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(cfg.g0.terms.size(), 2u);
  EXPECT_FALSE(cfg.nu_auto);
  EXPECT_DOUBLE_EQ(cfg.nu, 0.1);
  EXPECT_EQ(cfg.samples, 120);
  EXPECT_TRUE(cfg.check_enabled("improved_decay"));
  EXPECT_FALSE(cfg.check_enabled("main_theorems"));
  EXPECT_EQ(cfg.out_dir, "out/demo");
}

TEST(Scenario, Defaults) {
  const ScenarioConfig cfg = parse_scenario("D = 1\nC = 2\n");
  EXPECT_EQ(cfg.d(), 1);
  EXPECT_DOUBLE_EQ(cfg.p, 1.5);
  EXPECT_TRUE(cfg.nu_auto);
  EXPECT_FALSE(cfg.f0.set);
  EXPECT_TRUE(cfg.check_enabled("fisher_differential"));
  EXPECT_TRUE(cfg.check_enabled("spectrum"));
}

TEST(Scenario, LineNumberedErrors) {
  EXPECT_NE(parse_error("D = 1,0; 0,1\nC = 1,0; 0,\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_error("D = 1,0; 0,1\nC = 1,0; 0,1,3\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_error("\n\nbogus = 3\n").find("line 3: unknown key"), std::string::npos);
  EXPECT_NE(parse_error("D = 1\nD = 2\n").find("line 2: duplicate key"), std::string::npos);
  EXPECT_NE(parse_error("D = 1\nC = 1\nchecks = spectrum, nope\n").find("line 3"),
            std::string::npos);
  EXPECT_NE(parse_error("D = 1\nC = 1\np = 1/0 +\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("D = 1\nC = 1\nphi = x^^2\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("D = 1\nC = 1\nf0 = mixture: 1, 0\n").find("line 3"),
            std::string::npos);
  EXPECT_NE(parse_error("f0 = equilibrium\n").find("line 1"), std::string::npos);
  EXPECT_NE(parse_error("D = 1,0; 0,1\nC = 1\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_error("D = 1\nC = 1\nP = maybe\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("D = 1\nC = 1\np += 2\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("just text\n").find("line 1"), std::string::npos);
}

TEST(Scenario, BuildStateOriginalFrame) {
  ScenarioConfig cfg = parse_scenario(
      "D = 2\nC = 4\nframe = original\nf0 = mixture: 1, 0.5, 0.5\n");
  Matrix T_inv = Matrix::Constant(1, 1, std::sqrt(2.0));  // K = 0.5
  const DensityState s = build_state(cfg.f0, 1, &T_inv);
  ASSERT_EQ(s.mixture.components().size(), 1u);
  EXPECT_NEAR(s.mixture.components()[0].mean(0), 0.5 * std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.mixture.components()[0].cov(0, 0), 1.0, 1e-15);
  EXPECT_NE(parse_error("D = 1\nC = 1\nframe = original\nf0 = hermite: 1 0.5\n")
                .find("line 4"),
            std::string::npos);
}

TEST(Scenario, EquilibriumWhenUnset) {
  const DensityState s = build_state(InitialSpec{}, 2, nullptr);
  EXPECT_NEAR(s.mass(), 1.0, 1e-15);
  EXPECT_FALSE(s.has_hermite());
}

TEST(Scenario, BundledScenariosParse) {
  for (const char* name : {"identity_2d", "defective_2d", "improved_decay_2d", "degenerate_2d",
                           "appendix_a"}) {
    const ScenarioConfig cfg =
        load_scenario(std::string(HD_SCENARIO_DIR) + "/" + name + ".cfg");
    EXPECT_EQ(cfg.name, name);
  }
  try {
    load_scenario("/nonexistent/x.cfg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(Scenario, HelpListsEveryKey) {
  const std::string help = scenario_help();
  for (const char* key : {"name", "D", "C", "tolerance", "frame", "f0", "g0", "p", "P",
                          "t_max", "samples", "grid_degree", "checks", "eta", "eps", "p1",
                          "p2", "fd_step", "fd_samples", "box_points", "fit_lo", "fit_hi",
                          "out", "phi", "diffusion", "f0_ratio", "g0_ratio", "half_width",
                          "cells", "a1_points", "t_end", "decay_samples", "psi_p", "dt"})
    EXPECT_TRUE(std::regex_search(
        help, std::regex(std::string("\n  ([A-Za-z0-9_]+, )*") + key + "[ ,]")))
        << key;
  for (const auto& c : known_checks()) EXPECT_NE(help.find(c), std::string::npos) << c;
}

TEST(Scenario, Fnv1a) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

}  // namespace
}  // namespace hd
