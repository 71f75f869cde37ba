// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "functionals.hpp"
#include "spectral.hpp"

namespace hd {

// Everything needed to evaluate f(t), g(t) in the normalized frame.
class Experiment {
 public:
  Experiment(const Matrix& C_tilde, DensityState f0, DensityState g0, int grid_degree);

  DensityState f_at(double t) const;
  DensityState g_at(double t) const;
  DensityState evolve(const DensityState& s, double t) const;

  const Matrix& C() const { return C_; }
  int d() const { return static_cast<int>(C_.rows()); }
  double d_min() const;
  const SpectralData& spectrum() const { return sd_; }
  const QuadratureGrid& grid() const { return *grid_; }
  const DensityState& f0() const { return f0_; }
  const DensityState& g0() const { return g0_; }
  const GeneratorMatrix* generator() const { return gen_.get(); }

 private:
  Matrix C_;
  DensityState f0_, g0_;
  SpectralData sd_;
  std::shared_ptr<const QuadratureGrid> grid_;
  std::shared_ptr<const GeneratorMatrix> gen_;
};

struct TrajectoryPoint {
  double t = 0;
  double e_p = 0, e_1 = 0, e_2 = 0;
  double I_p_P = 0;     // I_p^P(f)
  double I_p_I = 0;     // I_p^I(f), log-Sobolev
  double genI_1 = 0;    // I_1^P(f, g)
  double genI_p = 0;    // I_p^P(f, g)
  double I2_g = 0;      // I_2^P(g)
  double genI_p_f1 = 0, genI_p_f2 = 0;
  double I2_f2 = 0;     // I_2^P(f, f2) = I_2^P(f2)
  double norm_f1 = 0, norm_f2_minus_finf = 0;
  double l2_norm_sq_g = 0;
  double mass_f = 0;
  double expmoment = 0;      // int e^{eps_p |x|^2} f
  double bound_expmoment = 0;
  double envelope = 0;       // (1 + t^{2n}) e^{-2 mu t}
  double bound_fisher = 0;   // I_p(f0, g0) e^{-2 lambda t}
  double bound_v1 = 0;       // c_tilde (1 + t^n) e^{-mu t} |a(0)|
};

struct FitResult {
  double rate_fit = 0;        // -slope of log e_2 against t
  double poly_order_fit = 0;  // fitted exponent of the polynomial prefactor
  double t_lo = 0, t_hi = 0;
  double residual = 0;        // rms of the order regression
  double rate_residual = 0;
  int samples = 0;
  bool inconclusive = false;
};

struct CheckRow {
  std::string check;
  double t = 0;
  double lhs = 0, rhs = 0, margin = 0;  // margin = rhs - lhs (>= 0 passes)
  bool pass = true;
};

struct CheckSummary {
  std::string check;
  bool pass = true;
  int rows = 0, failures = 0;
  double worst_margin = 0;
  std::string note;
};

struct TrajectoryReport {
  double p = 1.5;
  Matrix P;
  double lambda = 1.0;
  std::vector<TrajectoryPoint> points;
  std::vector<CheckRow> checks;
  std::vector<CheckSummary> summaries;
  std::optional<FitResult> fit;
  std::vector<std::string> warnings;
  double envelope_sup = 0;

  bool all_pass() const;
  void add(const std::string& name, std::vector<CheckRow> rows, const std::string& note = "");
};

std::vector<double> default_time_grid(double mu, int samples = 200, double t_max = -1);

// Doubling test for the functionals that enter the report. Throws kUnderResolved.
void check_resolution(const Experiment& ex, double p, const Matrix& P,
                      const std::vector<double>& times, double rel_tol = 1e-6);

TrajectoryPoint evaluate_point(const Experiment& ex, double t, double p, const Matrix& P,
                               const QuadratureGrid& grid);

TrajectoryReport run_trajectory(const Experiment& ex, double p, const Matrix& P,
                                double lambda, const std::vector<double>& times,
                                bool resolution_check = true);

// Generalized Fisher I_psi^P(f(t), g(t)) for psi = psi_p.
double gen_fisher_at(const Experiment& ex, double t, double p, const Matrix& P);

std::vector<CheckRow> check_fisher_differential(const Experiment& ex,
                                                const std::vector<double>& times,
                                                double p, const Matrix& P, double lambda,
                                                double h = 1e-3);
std::vector<CheckRow> check_fisher_integrated(const std::vector<double>& times,
                                              const std::vector<double>& values,
                                              double lambda, const std::string& name);

// g0 must be orthogonal to V_1 (throws kPrecondition otherwise).
std::vector<CheckRow> check_improved_decay(const Experiment& ex,
                                           const std::vector<double>& times,
                                           const Matrix& P, double lambda,
                                           double* fitted_slope = nullptr,
                                           double fit_lo = 0.5, double fit_hi = 3.0);

// Both interpolation inequalities (sharp constant, and the general form with
// c1 = 1, c2 = 0, alpha = 2 - p) for given functional values.
std::vector<CheckRow> interpolation_rows(double t, double p, double Ip, double I1, double I2);
std::vector<CheckRow> check_interpolation(const GridValues& f, const GridValues& g, double p,
                                          const Matrix& P, double t);
std::vector<CheckRow> check_interpolation(const Experiment& ex,
                                          const std::vector<double>& times, double p,
                                          const Matrix& P);

struct LowerBoundResult {
  std::vector<CheckRow> rows;
  double C_eta_f0 = 0;
  double t_hat1 = 0;
  double moment = 0;
  Vector worst_point;
};
LowerBoundResult check_lower_bound(const Experiment& ex, double eta, double eps,
                                   const std::vector<double>& times_after,
                                   int box_points = 65, double box_half_width = 4.0);

struct ContractivityResult {
  std::vector<CheckRow> rows;
  BoundsBundle bundle;
  std::string sensitivity;  // explicit times under c_tilde, c_hat x 0.5 / x 2
};
ContractivityResult check_contractivity(const Experiment& ex, double p1, double p2,
                                        double eta, const Matrix& P, double p_max,
                                        int samples = 10, double span = 5.0);

FitResult fit_decay(const std::vector<TrajectoryPoint>& pts, double mu, int n,
                    double t_lo, double t_hi);

// Envelope boundedness, order/rate fits and the e_p vs. log-Sobolev closing step.
std::vector<CheckRow> check_main_theorems(TrajectoryReport& rep, double mu, int n);

std::vector<CheckRow> check_log_sobolev(const TrajectoryReport& rep);
std::vector<CheckRow> check_entropy_monotone(const TrajectoryReport& rep);
std::vector<CheckRow> check_splitting(const TrajectoryReport& rep);

}  // namespace hd
