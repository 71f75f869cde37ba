// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
#include "bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "functionals.hpp"

namespace hd {

namespace {

double pow0(double base, double e) { return e == 0.0 ? 1.0 : std::pow(base, e); }

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    fail(ErrorCode::kParameter, std::string(name) + " must be positive and finite");
}

void require_p(double p, const char* name) {
  if (!(p > 1.0 && p <= 2.0))
    fail(ErrorCode::kParameter, std::string(name) + " must lie in (1, 2]");
}

}  // namespace

EnvelopeConstants EnvelopeConstants::from(const SpectralData& sd, int d, double p_max) {
  EnvelopeConstants k;
  k.mu = sd.mu;
  k.n = sd.n;
  k.c_tilde = sd.c_tilde;
  k.c_hat = sd.c_hat;
  k.d = d;
  k.p_max = p_max;
  return k;
}

EnvelopeConstants EnvelopeConstants::scaled(double factor) const {
  EnvelopeConstants k = *this;
  k.c_tilde *= factor;
  k.c_hat *= factor;
  return k;
}

double t_tilde(const EnvelopeConstants& k, double eps) {
  require_positive(eps, "eps");
  require_positive(k.mu, "mu");
  const double poly = 1.0 + pow0(2.0 * k.n / (k.mu * M_E), k.n);
  return std::max(0.0, 2.0 / k.mu * std::log(k.c_tilde * poly / eps));
}

double t_hat(const EnvelopeConstants& k, double eps) {
  require_positive(eps, "eps");
  require_positive(k.mu, "mu");
  const double poly = 1.0 + pow0(2.0 * k.n / (k.mu * M_E), 2.0 * k.n);
  return std::max(0.0, 1.0 / k.mu * std::log(k.c_hat * (1.0 + eps) * poly / eps));
}

double hyper_eps1(double eps) { return std::min(0.125, 32.0 * eps / 35.0); }

double t_tilde1(const EnvelopeConstants& k, double eps) {
  const double e1 = hyper_eps1(eps);
  return std::max(t_tilde(k, e1), t_hat(k, e1));
}

double t1_hyper(const EnvelopeConstants& k, double p2) {
  require_p(p2, "p2");
  return t_tilde1(k, eps_p(p2));
}

double t_hat1(const EnvelopeConstants& k, double eta) {
  require_positive(eta, "eta");
  return std::max(t_hat(k, eta / 2.0), t_tilde(k, eta / 2.0));
}

double t_hathat1(const EnvelopeConstants& k, double eps, double eta) {
  return t_hat1(k, std::min({1.0, eta, eta * eps}));
}

double t1_contract(const EnvelopeConstants& k, double p1, double p2, double eta) {
  require_p(p1, "p1");
  require_p(p2, "p2");
  return std::max(t_hathat1(k, eps_p(p1), std::min(0.125, eta)),
                  t_tilde1(k, std::min(0.125, eps_p(p2))));
}

double const_A(int d, double p2) {
  require_p(p2, "p2");
  return std::pow(8.0 / 3.0, d) *
         std::pow((2 * p2 - 1) / (p2 - 1), d * (p2 - 1) / p2) *
         std::pow(2 * p2, 2.0 / (p2 - 1));
}

double const_B(int d, double p2, double p_max) {
  require_p(p2, "p2");
  return std::pow(2.0, 1.5 * d) * std::pow((2 * p2 - 1) / (p2 - 1), d * (p2 - 1) / p2) *
         std::pow(2 * p2, 2.0 / (p2 - 1)) * p_max;
}

double const_C(int d, double p, double p1, double p2, double eta, double p_max) {
  require_p(p1, "p1");
  require_p(p2, "p2");
  if (!(p >= 1.0 && p < 2.0)) fail(ErrorCode::kParameter, "p must lie in [1, 2)");
  return std::pow(2.0, (eta + 1.0 - d / 2.0) * (2 - p) + 1 + 2 * d) *
         std::pow(3.0, d * (2 - p) / 2.0) * std::pow(2 * p2, 2.0 / (p2 - 1)) *
         std::pow((2 * p1 - 1) / (p1 - 1), d * eta * (p1 - 1) * (2 - p) / (2 * p1)) *
         std::pow((2 * p2 - 1) / (p2 - 1), d * (p2 - 1) / p2) * p_max;
}

double const_C_eta_f0(int d, double eta, double eps, double moment) {
  require_positive(eta, "eta");
  require_positive(eps, "eps");
  if (!(moment >= 1.0 - 1e-12))
    fail(ErrorCode::kParameter, "exponential moment of a unit-mass density is >= 1");
  return std::pow(2.0 * moment, -eta * (1 + eta) * (1 + 2 * eta) / (8 * eps)) /
         (2.0 * std::pow(M_PI * (2.0 + eta), d / 2.0));
}

double interpolation_constant(double p) {
  const double a = p - 1.0, b = 2.0 - p;
  if (a == b) return 1.0 / std::pow(a, 2.0 * a);  // one rounding: exactly 2 at p = 1.5
  return 1.0 / (pow0(a, a) * pow0(b, b));
}

BoundsBundle BoundsBundle::assemble(const EnvelopeConstants& k, double p, double p1,
                                    double p2, double eps, double eta) {
  BoundsBundle b;
  b.k = k;
  b.p = p;
  b.p1 = p1;
  b.p2 = p2;
  b.eps = eps;
  b.eta = eta;
  b.t_tilde_eps = t_tilde(k, eps);
  b.t_hat_eps = t_hat(k, eps);
  b.t1 = t1_hyper(k, p2);
  b.t1_hat = t_hat1(k, eta);
  b.t1_contract = hd::t1_contract(k, p1, p2, eta);
  b.A = const_A(k.d, p2);
  b.B = const_B(k.d, p2, k.p_max);
  // the lower-contractivity constant needs p < 2; fall back to p = 1
  b.Cc = const_C(k.d, p < 2.0 ? p : 1.0, p1, p2, eta, k.p_max);
  // theorem times, composed as documented in the README
  b.tau3 = t_tilde1(k, 1.0 / 6.0);
  const double tp = t1_hyper(k, p);
  const double eta_eps = p < 2.0 ? std::min(2 * eps, 1.0 / (4 * (2 - p))) : 2 * eps;
  b.tau1 = std::max(t_hathat1(k, eps_p(p), eta_eps), tp);
  b.tau2 = std::max(b.tau3 + tp, hd::t1_contract(k, p, 2.0, 2 * eps));
  b.tau0 = std::max(b.tau1, b.tau2);
  return b;
}

std::string BoundsBundle::to_text() const {
  std::ostringstream os;
  char buf[128];
  auto kv = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s = %.17g\n", key, v);
    os << buf;
  };
  kv("mu", k.mu);
  os << "n = " << k.n << "\n";
  kv("c_tilde (estimate)", k.c_tilde);
  kv("c_hat (estimate)", k.c_hat);
  kv("p_max", k.p_max);
  kv("eps", eps);
  kv("eta", eta);
  kv("t_tilde(eps)", t_tilde_eps);
  kv("t_hat(eps)", t_hat_eps);
  kv("t1(p2)", t1);
  kv("t_hat1(eta)", t1_hat);
  kv("t1(p1,p2,eta)", t1_contract);
  kv("A(p2)", A);
  kv("B(p2)", B);
  kv("C(p,p1,p2,eta)", Cc);
  kv("tau0", tau0);
  kv("tau1", tau1);
  kv("tau2", tau2);
  kv("tau3", tau3);
  return os.str();
}

}  // namespace hd
