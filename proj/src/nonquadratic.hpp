// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
//
// Scalar diffusion D(x) I with a potential phi: rate certificate and a 1-D
// finite-volume solver for  df/dt = div(f_inf D grad(f / f_inf)),  f_inf ~ e^{-phi}.
#pragma once

#include <string>
#include <vector>

#include "expression.hpp"
#include "matrix_core.hpp"

namespace hd {

struct ScalarDiffusionProblem {
  int d = 1;
  Expression phi, D;
  double half_width = 8.0;  // domain [-L, L]^d
  int cells = 2048;         // solver resolution (d = 1)

  // derivatives, filled by make()
  std::vector<Expression> grad_phi, grad_D;
  std::vector<std::vector<Expression>> hess_phi, hess_D;

  static ScalarDiffusionProblem make(const std::string& phi, const std::string& D, int d = 1,
                                     double half_width = 8.0, int cells = 2048);
};

struct A1Report {
  double lambda1 = 0.0;  // grid minimum of the smallest eigenvalue; may be <= 0
  Vector worst_point;
  int points_per_axis = 0;
  double D_min = 0.0;
  std::string to_text() const;
};

// Left-hand matrix of the rate condition at a point.
Matrix a1_matrix(const ScalarDiffusionProblem& prob, const Vector& x);
A1Report check_condition_A1(const ScalarDiffusionProblem& prob, int points_per_axis = 0);

struct FP1DGrid {
  int cells = 0;
  double h = 0.0;
  Vector x;       // cell centres
  Vector f_inf;   // discrete equilibrium, h * sum = 1
  Vector D_face;  // D at interior faces (cells - 1)
  Vector m_face;  // f_inf face mean (log-mean), interior faces
  double tail_mass = 0.0;
  double max_peclet = 0.0;
};

FP1DGrid make_fp1d_grid(const ScalarDiffusionProblem& prob);

// Cell values of ratio(x) f_inf(x), renormalized to unit discrete mass when
// `normalize` is set.
Vector cells_from_ratio(const FP1DGrid& g, const Expression& ratio, bool normalize);

struct FP1DResult {
  FP1DGrid grid;
  std::vector<double> times;
  std::vector<Vector> f;  // one per requested time
  double max_mass_drift = 0.0;  // per step
  double min_value = 0.0;
  int steps = 0;
  std::vector<std::string> warnings;
};

// Implicit Euler, no-flux boundaries. dt <= 0 picks a default step.
FP1DResult solve_fp_1d(const ScalarDiffusionProblem& prob, const Vector& f0,
                       const std::vector<double>& t_grid, double dt = 0.0);

// Discrete I_psi(f, g) with the D weight, summed over faces.
double discrete_gen_fisher(const FP1DGrid& g, const Vector& f, const Vector& gv, double p,
                           int* vacuum_faces = nullptr);

struct DecayRow {
  double t = 0, fisher = 0, bound = 0, margin = 0;
  bool pass = true;
};

struct DecayVerification {
  double lambda1 = 0.0;
  double p = 1.0;
  std::vector<DecayRow> rows;
  bool pass = true;
  int vacuum_faces = 0;
  std::vector<std::string> warnings;
};

DecayVerification verify_generalized_fisher_decay_1d(const ScalarDiffusionProblem& prob,
                                                     double lambda1, const Vector& f0,
                                                     const Vector& g0, double p,
                                                     const std::vector<double>& t_grid,
                                                     double dt = 0.0,
                                                     double rel_slack = 1e-3);

}  // namespace hd
