// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
//
// Explicit times and constants of the contractivity / lower-bound results.
// All times use the sampled envelope constants c_tilde, c_hat and are therefore
// estimates; see EnvelopeConstants.
#pragma once

#include <string>

#include "matrix_core.hpp"

namespace hd {

struct EnvelopeConstants {
  double mu = 1.0;
  int n = 0;
  double c_tilde = 1.0;
  double c_hat = 1.0;
  int d = 1;
  double p_max = 1.0;

  static EnvelopeConstants from(const SpectralData& sd, int d, double p_max);
  EnvelopeConstants scaled(double factor) const;  // c_tilde, c_hat *= factor
};

// (2/mu) log(c_tilde (1 + (2n/(mu e))^n) / eps), clamped at 0
double t_tilde(const EnvelopeConstants& k, double eps);
// (1/mu) log(c_hat (1+eps)(1 + (2n/(mu e))^{2n}) / eps), clamped at 0
double t_hat(const EnvelopeConstants& k, double eps);

double hyper_eps1(double eps);                                   // min(1/8, 32 eps/35)
double t_tilde1(const EnvelopeConstants& k, double eps);          // moment -> L^2 time
double t1_hyper(const EnvelopeConstants& k, double p2);           // t_1(p2)
double t_hat1(const EnvelopeConstants& k, double eta);            // lower-bound time
double t_hathat1(const EnvelopeConstants& k, double eps, double eta);
double t1_contract(const EnvelopeConstants& k, double p1, double p2, double eta);

double const_A(int d, double p2);
double const_B(int d, double p2, double p_max);
double const_C(int d, double p, double p1, double p2, double eta, double p_max);
double const_C_eta_f0(int d, double eta, double eps, double moment);
double interpolation_constant(double p);  // 1/((p-1)^{p-1}(2-p)^{2-p}), 0^0 = 1

struct BoundsBundle {
  double eps = 0.25;
  double eta = 0.5;
  double p = 1.5, p1 = 1.5, p2 = 1.5;
  EnvelopeConstants k;

  double t_tilde_eps = 0, t_hat_eps = 0;
  double t1 = 0;        // t_1(p2)
  double t1_hat = 0;    // lower-bound time for eta
  double t1_contract = 0;
  double A = 0, B = 0, Cc = 0;
  double tau0 = 0, tau1 = 0, tau2 = 0, tau3 = 0;

  static BoundsBundle assemble(const EnvelopeConstants& k, double p, double p1, double p2,
                               double eps, double eta);
  std::string to_text() const;
};

}  // namespace hd
