// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
//
// hypodecay <validate|certify|simulate|verify|appendix-a> --config PATH [--out DIR]
//           [--grid-degree N] [--nu X] [--seedless]
// Exit codes: 0 pass, 1 check failure, 2 configuration error, 3 under-resolved.
#include <cstdio>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "hypodecay/hypodecay.h"

int main(int argc, char** argv) {
  CLI::App app{"Explicit decay rates for linear Fokker-Planck equations"};
  app.footer(hd_scenario_help());
  app.set_version_flag("--version", hd_version());

  const std::map<std::string, hd_command> commands = {
      {"validate", HD_CMD_VALIDATE}, {"certify", HD_CMD_CERTIFY},
      {"simulate", HD_CMD_SIMULATE}, {"verify", HD_CMD_VERIFY},
      {"appendix-a", HD_CMD_APPENDIX_A}};

  std::string command, config, out;
  int grid_degree = 0;
  double nu = 0.0;
  bool seedless = false;
  app.add_option("command", command, "validate | certify | simulate | verify | appendix-a")
      ->required()
      ->check(CLI::IsMember({"validate", "certify", "simulate", "verify", "appendix-a"}));
  app.add_option("--config,-c", config, "scenario file")->required();
  app.add_option("--out,-o", out, "output directory (overrides 'out' in the config)");
  app.add_option("--grid-degree", grid_degree, "Gauss-Hermite nodes per axis")
      ->check(CLI::Range(2, 400));
  auto* nu_opt = app.add_option("--nu", nu, "certificate slack nu (overrides P in the config)");
  // Every computation is deterministic; the flag is accepted for script compatibility.
  app.add_flag("--seedless", seedless, "no-op: runs never use random numbers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  hd_scenario* sc = nullptr;
  hd_status st = hd_scenario_load(config.c_str(), &sc);
  if (st != HD_OK) {
    std::fprintf(stderr, "error: %s\n", hd_last_error());
    return hd_exit_code_for_status(st);
  }

  hd_run_options opt;
  hd_run_options_init(&opt);
  opt.out_dir = out.empty() ? nullptr : out.c_str();
  opt.grid_degree = grid_degree;
  opt.has_nu = nu_opt->count() > 0;
  opt.nu = nu;

  hd_result* res = nullptr;
  st = hd_run(sc, commands.at(command), &opt, &res);
  hd_scenario_destroy(sc);
  if (st != HD_OK) {
    std::fprintf(stderr, "error (%s): %s\n", hd_status_string(st), hd_last_error());
    return hd_exit_code_for_status(st);
  }
  std::fputs(hd_result_text(res), stdout);
  for (size_t i = 0; i < hd_result_file_count(res); ++i)
    std::printf("wrote %s\n", hd_result_file(res, i));
  const int rc = hd_result_exit_code(res);
  hd_result_destroy(res);
  return rc;
}
