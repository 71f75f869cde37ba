// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command runners behind the CLI and their output files.
#pragma once

#include <string>
#include <vector>

#include "nonquadratic.hpp"
#include "scenario.hpp"
#include "verifier.hpp"

namespace hd {

inline constexpr const char* kVersion = "1.0.0";

enum class ExitCode { kPass = 0, kCheckFail = 1, kConfig = 2, kResolution = 3 };

struct CommandOptions {
  std::string out_dir;   // overrides the config
  int grid_degree = 0;   // overrides the config when > 0
  bool has_nu = false;
  double nu = 0.0;
  bool write_files = true;
};

struct CommandResult {
  int exit_code = 0;
  std::string text;                // human-readable summary
  std::vector<std::string> files;  // written outputs
  int checks_total = 0, checks_failed = 0;
};

CommandResult cmd_validate(const ScenarioConfig& cfg, const CommandOptions& opt);
CommandResult cmd_certify(const ScenarioConfig& cfg, const CommandOptions& opt);
CommandResult cmd_simulate(const ScenarioConfig& cfg, const CommandOptions& opt);
CommandResult cmd_verify(const ScenarioConfig& cfg, const CommandOptions& opt);
CommandResult cmd_appendix_a(const ScenarioConfig& cfg, const CommandOptions& opt);

// Maps library errors onto the exit-code contract.
int exit_code_for(ErrorCode code);

// Fixed-format output helpers (deterministic bytes for identical inputs).
std::string fmt17(double v);
std::string trajectory_csv(const TrajectoryReport& rep);
std::string checks_csv(const std::vector<CheckRow>& rows);

struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
};
std::string svg_plot(const std::string& title, const std::string& xlabel,
                     const std::vector<PlotSeries>& series, bool log_y);

}  // namespace hd
