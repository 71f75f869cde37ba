// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
#include "hypodecay/hypodecay.h"

#include <new>
#include <string>

#include "functionals.hpp"
#include "nonquadratic.hpp"
#include "report.hpp"
#include "scenario.hpp"

struct hd_system {
  hd::FPSystem sys;
};

struct hd_scenario {
  hd::ScenarioConfig cfg;
};

struct hd_result {
  hd::CommandResult res;
};

namespace {

thread_local std::string g_last_error;

hd_status set_error(hd_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
hd_status guard(Fn&& fn) {
  try {
    fn();
    return HD_OK;
  } catch (const hd::Error& e) {
    return set_error(static_cast<hd_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(HD_ERR_CAPACITY, "out of memory");
  } catch (const std::exception& e) {
    return set_error(HD_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(HD_ERR_INTERNAL, "unknown error");
  }
}

#define HD_REQUIRE(ptr)                                                  \
  do {                                                                   \
    if (!(ptr)) return set_error(HD_ERR_NULL_ARGUMENT, #ptr " is NULL"); \
  } while (0)

hd::Matrix read_matrix(int d, const double* a) {
  hd::Matrix M(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) M(i, j) = a[i * d + j];
  return M;
}

void write_matrix(const hd::Matrix& M, double* a) {
  if (!a) return;
  const int d = static_cast<int>(M.rows());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a[i * d + j] = M(i, j);
}

void check_dim(int d) {
  if (d < 1 || d > 3) hd::fail(hd::ErrorCode::kDimension, "d must be 1, 2 or 3");
}

hd::DensityState gaussian_state(int d, const double* mean, const double* cov) {
  hd::Vector m(d);
  for (int i = 0; i < d; ++i) m(i) = mean[i];
  hd::GaussianMixture mix(d);
  mix.add(1.0, m, read_matrix(d, cov));
  return hd::DensityState::from_mixture(mix);
}

}  // namespace

extern "C" {

const char* hd_version(void) { return hd::kVersion; }

const char* hd_status_string(hd_status status) {
  if (status == HD_ERR_NULL_ARGUMENT) return "null argument";
  return hd::error_code_name(static_cast<hd::ErrorCode>(status));
}

const char* hd_last_error(void) { return g_last_error.c_str(); }

hd_status hd_system_create(int d, const double* D, const double* C, double tolerance,
                           hd_system** out) {
  HD_REQUIRE(D);
  HD_REQUIRE(C);
  HD_REQUIRE(out);
  *out = nullptr;
  return guard([&] {
    check_dim(d);
    auto h = std::make_unique<hd_system>();
    h->sys = hd::make_system(read_matrix(d, D), read_matrix(d, C),
                             tolerance > 0 ? tolerance : hd::kDefaultTolerance);
    *out = h.release();
  });
}

void hd_system_destroy(hd_system* sys) { delete sys; }

hd_status hd_system_dim(const hd_system* sys, int* d) {
  HD_REQUIRE(sys);
  HD_REQUIRE(d);
  *d = sys->sys.d();
  return HD_OK;
}

hd_status hd_system_accepted(const hd_system* sys, int* accepted) {
  HD_REQUIRE(sys);
  HD_REQUIRE(accepted);
  *accepted = sys->sys.report.accepted ? 1 : 0;
  return HD_OK;
}

hd_status hd_system_equilibrium_covariance(const hd_system* sys, double* K, double* residual) {
  HD_REQUIRE(sys);
  return guard([&] {
    const hd::Matrix Km = hd::solve_lyapunov(sys->sys.D, sys->sys.C);
    write_matrix(Km, K);
    if (residual) *residual = hd::lyapunov_residual(sys->sys.D, sys->sys.C, Km);
  });
}

hd_status hd_system_normalized(const hd_system* sys, double* T, double* D_tilde,
                               double* C_tilde) {
  HD_REQUIRE(sys);
  return guard([&] {
    const hd::NormalizedSystem ns = hd::normalize_system(sys->sys);
    write_matrix(ns.T, T);
    write_matrix(ns.D_tilde, D_tilde);
    write_matrix(ns.C_tilde, C_tilde);
  });
}

hd_status hd_system_spectrum(const hd_system* sys, double* mu, int* defect, double* c_tilde,
                             double* c_hat) {
  HD_REQUIRE(sys);
  return guard([&] {
    const hd::NormalizedSystem ns = hd::normalize_system(sys->sys);
    const hd::SpectralData sd = hd::analyze_drift_spectrum(ns.C_tilde, sys->sys.tolerance);
    if (mu) *mu = sd.mu;
    if (defect) *defect = sd.n;
    if (c_tilde) *c_tilde = sd.c_tilde;
    if (c_hat) *c_hat = sd.c_hat;
  });
}

hd_status hd_system_certificate(const hd_system* sys, double nu, double* P, double* lambda,
                                double* lmi_residual) {
  HD_REQUIRE(sys);
  return guard([&] {
    const hd::NormalizedSystem ns = hd::normalize_system(sys->sys);
    const hd::Certificate c = hd::build_certificate(ns.C_tilde, nu, sys->sys.tolerance);
    write_matrix(c.P, P);
    if (lambda) *lambda = c.lambda;
    if (lmi_residual) *lmi_residual = c.lmi_residual;
  });
}

hd_status hd_gaussian_entropy(int d, const double* mean, const double* cov, double p,
                              int grid_degree, double* out) {
  HD_REQUIRE(mean);
  HD_REQUIRE(cov);
  HD_REQUIRE(out);
  return guard([&] {
    check_dim(d);
    const hd::QuadratureGrid g =
        hd::make_grid(d, grid_degree > 0 ? grid_degree : hd::default_grid_degree(d));
    *out = hd::entropy_p(gaussian_state(d, mean, cov), p, g);
  });
}

hd_status hd_gaussian_fisher(int d, const double* mean, const double* cov, double p,
                             const double* P, int grid_degree, double* out) {
  HD_REQUIRE(mean);
  HD_REQUIRE(cov);
  HD_REQUIRE(out);
  return guard([&] {
    check_dim(d);
    const hd::QuadratureGrid g =
        hd::make_grid(d, grid_degree > 0 ? grid_degree : hd::default_grid_degree(d));
    const hd::Matrix Pm = P ? read_matrix(d, P) : hd::Matrix::Identity(d, d);
    *out = hd::fisher_p(gaussian_state(d, mean, cov), p, Pm, g);
  });
}

hd_status hd_a1_lambda(const char* phi, const char* diffusion, int d, double half_width,
                       int points_per_axis, double* lambda1) {
  HD_REQUIRE(phi);
  HD_REQUIRE(diffusion);
  HD_REQUIRE(lambda1);
  return guard([&] {
    const auto prob = hd::ScalarDiffusionProblem::make(phi, diffusion, d,
                                                       half_width > 0 ? half_width : 8.0);
    *lambda1 = hd::check_condition_A1(prob, points_per_axis).lambda1;
  });
}

hd_status hd_scenario_load(const char* path, hd_scenario** out) {
  HD_REQUIRE(path);
  HD_REQUIRE(out);
  *out = nullptr;
  return guard([&] {
    auto h = std::make_unique<hd_scenario>();
    h->cfg = hd::load_scenario(path);
    *out = h.release();
  });
}

hd_status hd_scenario_parse(const char* text, hd_scenario** out) {
  HD_REQUIRE(text);
  HD_REQUIRE(out);
  *out = nullptr;
  return guard([&] {
    auto h = std::make_unique<hd_scenario>();
    h->cfg = hd::parse_scenario(text);
    *out = h.release();
  });
}

void hd_scenario_destroy(hd_scenario* sc) { delete sc; }

const char* hd_scenario_name(const hd_scenario* sc) { return sc ? sc->cfg.name.c_str() : ""; }

const char* hd_scenario_help(void) {
  static const std::string help = hd::scenario_help();
  return help.c_str();
}

void hd_run_options_init(hd_run_options* opt) {
  if (!opt) return;
  opt->out_dir = nullptr;
  opt->grid_degree = 0;
  opt->has_nu = 0;
  opt->nu = 0.0;
  opt->write_files = 1;
}

hd_status hd_run(const hd_scenario* sc, hd_command cmd, const hd_run_options* opt,
                 hd_result** out) {
  HD_REQUIRE(sc);
  HD_REQUIRE(out);
  *out = nullptr;
  return guard([&] {
    hd::CommandOptions o;
    if (opt) {
      if (opt->out_dir) o.out_dir = opt->out_dir;
      o.grid_degree = opt->grid_degree;
      o.has_nu = opt->has_nu != 0;
      o.nu = opt->nu;
      o.write_files = opt->write_files != 0;
    }
    auto h = std::make_unique<hd_result>();
    switch (cmd) {
      case HD_CMD_VALIDATE: h->res = hd::cmd_validate(sc->cfg, o); break;
      case HD_CMD_CERTIFY: h->res = hd::cmd_certify(sc->cfg, o); break;
      case HD_CMD_SIMULATE: h->res = hd::cmd_simulate(sc->cfg, o); break;
      case HD_CMD_VERIFY: h->res = hd::cmd_verify(sc->cfg, o); break;
      case HD_CMD_APPENDIX_A: h->res = hd::cmd_appendix_a(sc->cfg, o); break;
      default: hd::fail(hd::ErrorCode::kParameter, "unknown command");
    }
    *out = h.release();
  });
}

int hd_result_exit_code(const hd_result* r) { return r ? r->res.exit_code : 1; }
const char* hd_result_text(const hd_result* r) { return r ? r->res.text.c_str() : ""; }
size_t hd_result_file_count(const hd_result* r) { return r ? r->res.files.size() : 0; }
const char* hd_result_file(const hd_result* r, size_t i) {
  return r && i < r->res.files.size() ? r->res.files[i].c_str() : nullptr;
}
int hd_result_checks_failed(const hd_result* r) { return r ? r->res.checks_failed : 0; }
void hd_result_destroy(hd_result* r) { delete r; }

int hd_exit_code_for_status(hd_status status) {
  if (status == HD_OK) return 0;
  if (status == HD_ERR_NULL_ARGUMENT) return 2;
  return hd::exit_code_for(static_cast<hd::ErrorCode>(status));
}

}  // extern "C"
