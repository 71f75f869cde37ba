// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
//
// Scenario files: one `key = value` per line, '#' starts a comment.
//
//   D = 1,0; 0,1                 matrices: rows split by ';', entries by ','
//   C = 1,1; 0,1
//   f0 = mixture: 1, 0.5,0, 1,0,1      weight, mean (d), covariance upper triangle
//   f0 = equilibrium                    f_inf itself
//   g0 = hermite: 2 0 2^0.5             multi-index then coefficient, ';' separated
//   g0 += hermite: 0 0 1                `+=` adds a term to the state
//   P = certificate(auto)               or identity, certificate(0.1)
//
// Numbers accept constant arithmetic (2^0.5, 1/3, pi).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "propagator.hpp"

namespace hd {

struct InitialTerm {
  enum Kind { kEquilibrium, kMixture, kHermite } kind = kEquilibrium;
  // mixture: weight, mean, cov; hermite: (index, coefficient)
  std::vector<double> weight;
  std::vector<Vector> mean;
  std::vector<Matrix> cov;
  std::vector<std::vector<int>> index;
  std::vector<double> coeff;
};

struct InitialSpec {
  bool set = false;
  std::vector<InitialTerm> terms;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::string source_text;  // hashed into the manifest
  std::string source_path;

  // system
  Matrix D, C;
  double tolerance = kDefaultTolerance;
  bool original_frame = false;  // initial data given in original coordinates

  InitialSpec f0, g0;

  // functionals
  double p = 1.5;
  bool P_identity = false;
  bool nu_auto = true;
  double nu = 0.0;

  // time grid
  double t_max = -1.0;  // default 15 / mu
  int samples = 200;
  int grid_degree = 0;  // 0: default for d

  // checks
  std::vector<std::string> checks;
  double eta = 0.5, eps = 0.25;
  double p1 = -1.0, p2 = 1.5;  // p1 < 0: same as p2
  double fd_step = 1e-3;
  int fd_samples = 50;
  int box_points = 65;
  double fit_lo = 0.5, fit_hi = 3.0;  // improved-decay fit window

  std::string out_dir;

  // nonquadratic problem
  std::string phi, diffusion = "1";
  std::string f0_ratio = "1", g0_ratio = "x";
  double half_width = 8.0;
  int cells = 2048;
  int a1_points = 0;
  double t_end = 5.0;
  int decay_samples = 51;
  double psi_p = 1.5;
  double dt = 0.0;

  bool has_system() const { return C.size() > 0; }
  int d() const { return static_cast<int>(C.rows()); }
  bool check_enabled(const std::string& name) const;
};

// Throws kParse with "line N: ..." for malformed input.
ScenarioConfig parse_scenario(const std::string& text, const std::string& path = "");
ScenarioConfig load_scenario(const std::string& path);  // kIo if unreadable

std::vector<std::string> known_checks();
std::string scenario_help();  // keys and defaults, for --help

// Resolves an initial-data spec in the normalized frame. T_inv maps original
// to normalized coordinates (used when the spec is in the original frame).
DensityState build_state(const InitialSpec& spec, int d, const Matrix* T_inv);

uint64_t fnv1a64(const std::string& s);

}  // namespace hd
