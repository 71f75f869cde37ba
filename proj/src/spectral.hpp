// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "propagator.hpp"

namespace hd {

struct V1Coefficients {
  Vector a;  // a_i = <f, x_i f_inf> in L^2(f_inf^{-1}) = int x_i f
  double norm() const { return a.norm(); }
};

struct Decomposition {
  HermiteExpansion f1;  // degree-1 part only
  DensityState f2;      // f - f1, kept lazily
};

V1Coefficients project_V1(const DensityState& f);
Decomposition decompose(const DensityState& f);
V1Coefficients evolve_V1(const V1Coefficients& a0, const Matrix& C_tilde, double t);

struct VmBlockReport {
  int m = 0;
  std::vector<cplx> predicted;  // {-sum a_i lambda_i}, with multiplicity
  std::vector<cplx> computed;
  double cluster_deviation = 0.0;  // worst |mean_computed - mean_predicted|
  double power_sum_deviation = 0.0;
  double min_decay = 0.0;  // min Re(-eigenvalue), should equal m mu
  bool ok = false;
  std::string detail;
};

struct VmSpectrumReport {
  double mu = 0.0;
  std::vector<VmBlockReport> blocks;
  bool ok = false;
  std::string summary() const;
};

// Compares each degree block of the generator with the predicted spectrum.
// Defective blocks are compared through cluster means and power sums, which
// stay well conditioned where individual eigenvalues do not.
VmSpectrumReport check_Vm_spectrum(const Matrix& C_tilde, const GeneratorMatrix& gen,
                                   int max_degree, double tolerance = 1e-8);

}  // namespace hd
