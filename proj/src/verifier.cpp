// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
#include "verifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "parallel.hpp"

namespace hd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

CheckRow make_row(const std::string& name, double t, double lhs, double rhs) {
  CheckRow r;
  r.check = name;
  r.t = t;
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.pass = std::isfinite(lhs) && std::isfinite(rhs) ? lhs <= rhs : false;
  return r;
}

std::string fmt_p(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

// Largest covariance eigenvalue over the mixture components (0 for pure Hermite).
double max_cov_eigenvalue(const DensityState& s) {
  double m = 0.0;
  for (const auto& c : s.mixture.components()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(c.cov, Eigen::EigenvaluesOnly);
    m = std::max(m, es.eigenvalues().maxCoeff());
  }
  return m;
}

// e_p of a Gaussian mixture is finite iff every covariance is below p/(p-1).
bool entropy_finite(const DensityState& s, double p) {
  if (p <= 1.0) return true;
  return max_cov_eigenvalue(s) < p / (p - 1.0) * (1.0 - 1e-12);
}

double e2_signed(const GridValues& g) {
  double s = 0.0;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    const double u = g.nodes[i].ratio_minus_one;
    s += g.grid->weights(i) * 0.5 * u * u;
  }
  return s;
}

// least squares y = a + b x; returns (b, rms residual)
std::pair<double, double> linfit(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  if (n < 2) return {kNaN, kNaN};
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0) return {kNaN, kNaN};
  const double b = sxy / sxx, a = my - b * mx;
  double rss = 0;
  for (size_t i = 0; i < n; ++i) rss += std::pow(y[i] - a - b * x[i], 2);
  return {b, std::sqrt(rss / n)};
}

}  // namespace

// ---------------------------------------------------------------- Experiment

Experiment::Experiment(const Matrix& C_tilde, DensityState f0, DensityState g0,
                       int grid_degree)
    : C_(C_tilde), f0_(std::move(f0)), g0_(std::move(g0)) {
  const int d = static_cast<int>(C_.rows());
  if (C_.cols() != d || d < 1) fail(ErrorCode::kDimension, "drift must be square");
  if (f0_.d != d) fail(ErrorCode::kDimension, "f0 dimension does not match the system");
  if (g0_.d == 0) g0_ = f0_;
  if (g0_.d != d) fail(ErrorCode::kDimension, "g0 dimension does not match the system");
  sd_ = analyze_drift_spectrum(C_);
  if (grid_degree <= 0) grid_degree = default_grid_degree(d);
  grid_ = std::make_shared<const QuadratureGrid>(make_grid(d, grid_degree));
  const int deg = std::max({1, f0_.hermite.max_degree, g0_.hermite.max_degree});
  gen_ = std::make_shared<const GeneratorMatrix>(build_generator_matrix(C_, deg));
}

double Experiment::d_min() const {
  return min_sym_eigenvalue(0.5 * (C_ + C_.transpose()));
}

DensityState Experiment::evolve(const DensityState& s, double t) const {
  return evolve_state(s, make_cache(C_, t), gen_.get());
}

DensityState Experiment::f_at(double t) const { return evolve(f0_, t); }
DensityState Experiment::g_at(double t) const { return evolve(g0_, t); }

// ------------------------------------------------------------------- report

bool TrajectoryReport::all_pass() const {
  for (const auto& s : summaries)
    if (!s.pass) return false;
  return true;
}

void TrajectoryReport::add(const std::string& name, std::vector<CheckRow> rows,
                           const std::string& note) {
  CheckSummary s;
  s.check = name;
  s.note = note;
  s.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    s.rows++;
    if (!r.pass) {
      s.failures++;
      s.pass = false;
    }
    s.worst_margin = std::min(s.worst_margin, r.margin);
  }
  if (rows.empty()) s.worst_margin = 0.0;
  summaries.push_back(s);
  for (auto& r : rows) checks.push_back(std::move(r));
}

std::vector<double> default_time_grid(double mu, int samples, double t_max) {
  if (!(mu > 0)) fail(ErrorCode::kParameter, "spectral gap must be positive");
  if (samples < 4) fail(ErrorCode::kParameter, "need at least 4 samples");
  if (t_max <= 0) t_max = 15.0 / mu;
  const int n_geo = samples / 4, n_uni = samples - 1 - n_geo;
  const double t_lo = 1e-3 / mu, t_mid = std::min(1.0 / mu, t_max / 2);
  std::vector<double> t{0.0};
  for (int k = 0; k < n_geo; ++k)
    t.push_back(t_lo * std::pow(t_mid / t_lo, double(k) / n_geo));
  for (int k = 0; k < n_uni; ++k)
    t.push_back(t_mid + (t_max - t_mid) * double(k) / (n_uni - 1));
  return t;
}

// ---------------------------------------------------------------- evaluation

TrajectoryPoint evaluate_point(const Experiment& ex, double t, double p, const Matrix& P,
                               const QuadratureGrid& grid) {
  TrajectoryPoint pt;
  pt.t = t;
  const int d = ex.d();
  const DensityState f = ex.f_at(t), g = ex.g_at(t);
  const GridValues fv = sample(f, grid), gv = sample(g, grid);
  const Decomposition dec = decompose(f);
  const GridValues f1v = sample(DensityState::from_hermite(dec.f1), grid);
  const GridValues f2v = sample(dec.f2, grid);
  const Matrix I = Matrix::Identity(d, d);

  pt.e_p = entropy_p(fv, p);
  pt.e_1 = entropy_p(fv, 1.0);
  pt.e_2 = entropy_finite(f, 2.0) ? entropy_p(fv, 2.0) : kNaN;
  pt.I_p_P = fisher_p(fv, p, P);
  pt.I_p_I = fisher_p(fv, p, I);
  pt.genI_1 = generalized_fisher(fv, gv, 1.0, P);
  pt.genI_p = generalized_fisher(fv, gv, p, P);
  pt.I2_g = fisher_p(gv, 2.0, P);
  pt.genI_p_f1 = generalized_fisher(fv, f1v, p, P);
  pt.genI_p_f2 = generalized_fisher(fv, f2v, p, P);
  pt.I2_f2 = fisher_p(f2v, 2.0, P);
  pt.norm_f1 = project_V1(f).norm();
  pt.norm_f2_minus_finf = std::sqrt(2.0 * e2_signed(f2v));
  pt.l2_norm_sq_g = weighted_l2_norm_sq(gv);
  pt.mass_f = total_mass(fv);
  if (p > 1.0) {
    const ExpMomentCheck em = exponential_moment_bound(f, p, grid);
    pt.expmoment = em.moment;
    pt.bound_expmoment = em.bound;
  }
  return pt;
}

void check_resolution(const Experiment& ex, double p, const Matrix& P,
                      const std::vector<double>& times, double rel_tol) {
  if (times.empty()) return;
  const QuadratureGrid fine = make_grid(ex.d(), 2 * ex.grid().degree);
  std::vector<double> probe{times.front(), times[times.size() / 2], times.back()};
  double floor_scale[4] = {0, 0, 0, 0};
  for (size_t k = 0; k < probe.size(); ++k) {
    const TrajectoryPoint a = evaluate_point(ex, probe[k], p, P, ex.grid());
    const TrajectoryPoint b = evaluate_point(ex, probe[k], p, P, fine);
    const double va[4] = {a.e_p, a.I_p_P, a.genI_1, a.I2_g};
    const double vb[4] = {b.e_p, b.I_p_P, b.genI_1, b.I2_g};
    const char* names[4] = {"e_p", "I_p^P", "I_1(f,g)", "I_2^P(g)"};
    for (int j = 0; j < 4; ++j) {
      if (k == 0) floor_scale[j] = std::max(std::abs(va[j]), std::abs(vb[j]));
      const double diff = std::abs(va[j] - vb[j]);
      const double allowed =
          rel_tol * std::max(std::abs(va[j]), std::abs(vb[j])) + 1e-13 * floor_scale[j];
      if (!(diff <= allowed)) {
        std::ostringstream os;
        os << "quadrature under-resolved: " << names[j] << " at t=" << probe[k]
           << " is " << va[j] << " with degree " << ex.grid().degree << " but " << vb[j]
           << " with degree " << fine.degree;
        fail(ErrorCode::kUnderResolved, os.str());
      }
    }
  }
}

TrajectoryReport run_trajectory(const Experiment& ex, double p, const Matrix& P,
                                double lambda, const std::vector<double>& times,
                                bool resolution_check) {
  PEntropyParams::make(p);
  const int d = ex.d();
  if (P.rows() != d || P.cols() != d) fail(ErrorCode::kDimension, "P has the wrong size");
  if (times.empty()) fail(ErrorCode::kParameter, "empty time grid");
  for (size_t i = 0; i < times.size(); ++i)
    if (!(times[i] >= 0) || (i > 0 && !(times[i] > times[i - 1])))
      fail(ErrorCode::kParameter, "times must be non-negative and strictly increasing");
  const DensityState& f0 = ex.f0();
  if (!f0.is_nonnegative_mixture())
    fail(ErrorCode::kPrecondition, "f0 must be a non-negative Gaussian mixture");
  if (std::abs(f0.mass() - 1.0) > 1e-10) fail(ErrorCode::kPrecondition, "f0 must have unit mass");
  if (!entropy_finite(f0, p))
    fail(ErrorCode::kDivergentMoment, "e_p(f0) is infinite (covariance too wide for p)");

  if (resolution_check) check_resolution(ex, p, P, times);

  TrajectoryReport rep;
  rep.p = p;
  rep.P = P;
  rep.lambda = lambda;
  rep.points.resize(times.size());
  parallel_for(
      times.size(),
      [&](std::size_t i) { rep.points[i] = evaluate_point(ex, times[i], p, P, ex.grid()); },
      1);

  const SpectralData& sd = ex.spectrum();
  const double a0 = project_V1(f0).norm();
  const double I0 = rep.points.front().genI_p;
  const double t0 = rep.points.front().t;
  rep.envelope_sup = 0.0;
  for (auto& pt : rep.points) {
    pt.envelope = (1.0 + std::pow(pt.t, 2.0 * sd.n)) * std::exp(-2.0 * sd.mu * pt.t);
    pt.bound_fisher = I0 * std::exp(-2.0 * lambda * (pt.t - t0));
    pt.bound_v1 = sd.c_tilde * (1.0 + std::pow(pt.t, sd.n)) * std::exp(-sd.mu * pt.t) * a0;
    rep.envelope_sup = std::max(rep.envelope_sup, pt.e_p / pt.envelope);
  }

  // pointwise properties
  std::vector<CheckRow> mass, v1, moment, interp;
  const double c_int = interpolation_constant(p);
  for (const auto& pt : rep.points) {
    CheckRow m = make_row("mass_conservation", pt.t, std::abs(pt.mass_f - 1.0), 1e-10);
    mass.push_back(m);
    v1.push_back(make_row("v1_envelope", pt.t, pt.norm_f1, pt.bound_v1 * (1 + 1e-9) + 1e-15));
    if (p > 1.0)
      moment.push_back(make_row("exp_moment_bound", pt.t, pt.expmoment,
                                pt.bound_expmoment * (1 + 1e-10)));
    if (p > 1.0 && p < 2.0) {
      const double rhs =
          c_int * std::pow(pt.genI_1, 2.0 - p) * std::pow(pt.I2_g, p - 1.0);
      interp.push_back(make_row("interpolation", pt.t, pt.genI_p, rhs * (1 + 1e-8) + 1e-300));
    }
  }
  rep.add("mass_conservation", mass);
  rep.add("v1_envelope", v1, "c_tilde is a sampled estimate");
  if (!moment.empty()) rep.add("exp_moment_bound", moment);
  if (!interp.empty()) rep.add("interpolation", interp);
  rep.add("log_sobolev", check_log_sobolev(rep));
  rep.add("entropy_monotone", check_entropy_monotone(rep));
  rep.add("splitting", check_splitting(rep));
  {
    std::vector<double> tv, iv;
    for (const auto& pt : rep.points) {
      tv.push_back(pt.t);
      iv.push_back(pt.genI_p);
    }
    rep.add("fisher_integrated", check_fisher_integrated(tv, iv, lambda, "fisher_integrated"));
  }
  return rep;
}

// ------------------------------------------------------------ Fisher decay

double gen_fisher_at(const Experiment& ex, double t, double p, const Matrix& P) {
  const GridValues fv = sample(ex.f_at(t), ex.grid());
  const GridValues gv = sample(ex.g_at(t), ex.grid());
  return generalized_fisher(fv, gv, p, P);
}

std::vector<CheckRow> check_fisher_differential(const Experiment& ex,
                                                const std::vector<double>& times,
                                                double p, const Matrix& P, double lambda,
                                                double h) {
  if (!(h > 0)) fail(ErrorCode::kParameter, "finite-difference step must be positive");
  for (double t : times)
    if (!(t >= h)) fail(ErrorCode::kPrecondition, "centered differences need t >= h");
  const size_t n = times.size();
  // I at t - h, t - h/2, t, t + h/2, t + h
  std::vector<std::array<double, 5>> vals(n);
  const double offs[5] = {-h, -0.5 * h, 0.0, 0.5 * h, h};
  parallel_for(
      n * 5,
      [&](std::size_t k) {
        vals[k / 5][k % 5] = gen_fisher_at(ex, times[k / 5] + offs[k % 5], p, P);
      },
      1);
  double scale = 0.0;
  for (const auto& v : vals) scale = std::max(scale, std::abs(v[2]));
  const double tol = std::max(1e-6, h * h) * scale;
  std::vector<CheckRow> rows;
  const std::string name = "fisher_differential_p" + fmt_p(p);
  for (size_t i = 0; i < n; ++i) {
    const auto& v = vals[i];
    const double d_h = (v[4] - v[0]) / (2 * h);
    const double d_h2 = (v[3] - v[1]) / h;
    const double deriv = (4.0 * d_h2 - d_h) / 3.0;
    rows.push_back(make_row(name, times[i], deriv, -2.0 * lambda * v[2] + tol));
  }
  return rows;
}

std::vector<CheckRow> check_fisher_integrated(const std::vector<double>& times,
                                              const std::vector<double>& values,
                                              double lambda, const std::string& name) {
  if (times.size() != values.size()) fail(ErrorCode::kDimension, "times/values mismatch");
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  std::vector<CheckRow> rows;
  // one row per end time: the tightest starting time
  for (size_t j = 1; j < times.size(); ++j) {
    CheckRow worst;
    bool have = false;
    for (size_t i = 0; i < j; ++i) {
      const double rhs = values[i] * std::exp(-2.0 * lambda * (times[j] - times[i])) *
                             (1.0 + 1e-9) +
                         1e-14 * scale;
      CheckRow r = make_row(name, times[j], values[j], rhs);
      if (!have || r.margin < worst.margin) {
        worst = r;
        have = true;
      }
    }
    rows.push_back(worst);
  }
  return rows;
}

std::vector<CheckRow> check_improved_decay(const Experiment& ex,
                                           const std::vector<double>& times,
                                           const Matrix& P, double lambda,
                                           double* fitted_slope, double fit_lo,
                                           double fit_hi) {
  if (project_V1(ex.g0()).norm() > 1e-10)
    fail(ErrorCode::kPrecondition, "g0 has a non-zero V_1 component");
  const double dmin = ex.d_min();
  if (!(dmin > 0)) fail(ErrorCode::kPrecondition, "improved decay needs D positive definite");
  auto I2 = [&](double t) { return fisher_p(sample(ex.g_at(t), ex.grid()), 2.0, P); };

  std::vector<double> ts;
  for (double t : times)
    if (t > 0) ts.push_back(t);
  if (ts.empty()) fail(ErrorCode::kParameter, "no positive sample time");
  std::vector<double> vals(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) { vals[i] = I2(ts[i]); }, 1);
  const double rate = 2.0 * (lambda + dmin);
  std::vector<CheckRow> rows;
  for (size_t i = 0; i < ts.size(); ++i) {
    const double rhs = vals[0] * std::exp(-rate * (ts[i] - ts[0])) * (1.0 + 1e-8) + 1e-300;
    rows.push_back(make_row("improved_decay", ts[i], vals[i], rhs));
  }
  if (fitted_slope) {
    std::vector<double> x, y;
    const int m = 31;
    for (int k = 0; k < m; ++k) {
      const double t = fit_lo + (fit_hi - fit_lo) * k / (m - 1);
      const double v = I2(t);
      if (v > 0) {
        x.push_back(t);
        y.push_back(std::log(v));
      }
    }
    *fitted_slope = linfit(x, y).first;
  }
  return rows;
}

// ------------------------------------------------------------ interpolation

std::vector<CheckRow> interpolation_rows(double t, double p, double Ip, double I1, double I2) {
  std::vector<CheckRow> rows;
  const double rhs = interpolation_constant(p) * std::pow(I1, 2.0 - p) * std::pow(I2, p - 1.0);
  rows.push_back(make_row("interpolation_p" + fmt_p(p), t, Ip, rhs * (1 + 1e-8) + 1e-300));
  // psi_p'' = y^{-(2-p)}: c1 = 1, c2 = 0, alpha = 2 - p
  const double rhs2 = 2.0 * std::pow(I1, 2.0 - p) * std::pow(I2, p - 1.0);
  rows.push_back(
      make_row("interpolation_general_p" + fmt_p(p), t, Ip, rhs2 * (1 + 1e-8) + 1e-300));
  return rows;
}

std::vector<CheckRow> check_interpolation(const GridValues& f, const GridValues& g, double p,
                                          const Matrix& P, double t) {
  if (!(p >= 1.0 && p <= 2.0)) fail(ErrorCode::kParameter, "p must lie in [1, 2]");
  const double Ip = generalized_fisher(f, g, p, P);
  const double I1 = generalized_fisher(f, g, 1.0, P);
  const double I2 = generalized_fisher(f, g, 2.0, P);
  if (!std::isfinite(Ip) || !std::isfinite(I1) || !std::isfinite(I2))
    fail(ErrorCode::kPrecondition, "interpolation needs finite Fisher functionals");
  return interpolation_rows(t, p, Ip, I1, I2);
}

std::vector<CheckRow> check_interpolation(const Experiment& ex,
                                          const std::vector<double>& times, double p,
                                          const Matrix& P) {
  std::vector<std::vector<CheckRow>> per(times.size());
  parallel_for(
      times.size(),
      [&](std::size_t i) {
        const GridValues fv = sample(ex.f_at(times[i]), ex.grid());
        const GridValues gv = sample(ex.g_at(times[i]), ex.grid());
        per[i] = check_interpolation(fv, gv, p, P, times[i]);
      },
      1);
  std::vector<CheckRow> rows;
  for (auto& v : per) rows.insert(rows.end(), v.begin(), v.end());
  return rows;
}

// ------------------------------------------------------------- lower bound

LowerBoundResult check_lower_bound(const Experiment& ex, double eta, double eps,
                                   const std::vector<double>& times_after, int box_points,
                                   double box_half_width) {
  const int d = ex.d();
  const DensityState& f0 = ex.f0();
  if (!f0.is_nonnegative_mixture() || std::abs(f0.mass() - 1.0) > 1e-10)
    fail(ErrorCode::kPrecondition, "lower bound needs a unit-mass non-negative f0");
  if (box_points < 2) fail(ErrorCode::kParameter, "box grid needs at least 2 points per axis");
  LowerBoundResult res;
  res.moment = exponential_moment(f0, eps, ex.grid());
  res.C_eta_f0 = const_C_eta_f0(d, eta, eps, res.moment);
  const EnvelopeConstants k = EnvelopeConstants::from(ex.spectrum(), d, 1.0);
  res.t_hat1 = t_hat1(k, eta);

  std::vector<double> times = times_after;
  if (times.empty())
    for (int j = 0; j < 5; ++j) times.push_back(res.t_hat1 + j / ex.spectrum().mu);
  for (double t : times)
    if (t < res.t_hat1 * (1 - 1e-12))
      fail(ErrorCode::kPrecondition, "lower bound sampled before t_hat1(eta)");

  long total = 1;
  for (int i = 0; i < d; ++i) total *= box_points;
  res.worst_point = Vector::Zero(d);
  double worst_rel = std::numeric_limits<double>::infinity();
  for (double t : times) {
    const DensityState f = ex.f_at(t);
    std::vector<double> margin(total), lhs(total), rhs(total);
    parallel_for(total, [&](std::size_t idx) {
      Vector x(d);
      std::size_t r = idx;
      for (int i = 0; i < d; ++i) {
        x(i) = -box_half_width + 2 * box_half_width * double(r % box_points) / (box_points - 1);
        r /= box_points;
      }
      lhs[idx] = evaluate_density(f, x);
      rhs[idx] = res.C_eta_f0 * std::exp(-(0.5 + eta) * x.squaredNorm());
      margin[idx] = lhs[idx] / rhs[idx] - 1.0;
    });
    const auto it = std::min_element(margin.begin(), margin.end());
    const std::size_t w = static_cast<std::size_t>(it - margin.begin());
    // rows carry the pointwise sides at the worst node; margin is relative
    CheckRow row;
    row.check = "lower_bound";
    row.t = t;
    row.lhs = rhs[w];
    row.rhs = lhs[w];
    row.margin = *it;
    row.pass = *it >= 0.0;
    res.rows.push_back(row);
    if (*it < worst_rel) {
      worst_rel = *it;
      std::size_t r = w;
      for (int i = 0; i < d; ++i) {
        res.worst_point(i) =
            -box_half_width + 2 * box_half_width * double(r % box_points) / (box_points - 1);
        r /= box_points;
      }
    }
  }
  return res;
}

// ------------------------------------------------------------ contractivity

ContractivityResult check_contractivity(const Experiment& ex, double p1, double p2,
                                        double eta, const Matrix& P, double p_max,
                                        int samples, double span) {
  const int d = ex.d();
  const DensityState& f0 = ex.f0();
  const DensityState& g0 = ex.g0();
  if (!f0.is_nonnegative_mixture() || std::abs(f0.mass() - 1.0) > 1e-10)
    fail(ErrorCode::kPrecondition, "contractivity needs a unit-mass non-negative f0");
  if (samples < 1) fail(ErrorCode::kParameter, "need at least one sample time");
  const EnvelopeConstants k = EnvelopeConstants::from(ex.spectrum(), d, p_max);
  const double p_low = p2 < 2.0 ? p2 : 1.5;
  ContractivityResult res;
  res.bundle = BoundsBundle::assemble(k, p_low, p1, p2, 0.25, eta);
  const BoundsBundle& b = res.bundle;

  const QuadratureGrid& grid = ex.grid();
  const GridValues f0v = sample(f0, grid), g0v = sample(g0, grid);
  const double ep2 = entropy_p(g0v, p2, EntropyMode::kAbsolute);
  const double ep1 = entropy_p(f0v, p1);
  const double base2 = std::pow(p2 * (p2 - 1) * ep2 + 1, 2.0 / p2);
  const double e2_g0 = e2_signed(g0v);
  const double mu = ex.spectrum().mu;

  auto sample_times = [&](double start) {
    std::vector<double> ts;
    for (int j = 0; j < samples; ++j)
      ts.push_back(start + (samples > 1 ? span / mu * j / (samples - 1) : 0.0));
    return ts;
  };

  const Matrix I = Matrix::Identity(d, d);
  for (double t : sample_times(b.t1)) {
    const GridValues gv = sample(ex.g_at(t), grid);
    res.rows.push_back(make_row("hyper_l2_norm", t, weighted_l2_norm_sq(gv), b.A * base2));
    res.rows.push_back(
        make_row("hyper_e2", t, e2_signed(gv), std::max(b.A, 1.0) * base2));
    res.rows.push_back(make_row("upper_fisher_2", t, fisher_p(gv, 2.0, P), b.B * base2));
  }
  for (double t : sample_times(b.tau3)) {
    const GridValues gv = sample(ex.g_at(t), grid);
    res.rows.push_back(make_row("hyper_fisher_identity", t, fisher_p(gv, 2.0, I),
                                std::pow(2.0, 1.5 * d + 1) * std::pow(3.0, d / 2.0) * e2_g0));
  }
  std::vector<double> ps{1.0};
  if (p2 < 2.0) ps.push_back(p2);
  for (double p : ps) {
    const double Cc = const_C(d, p, p1, p2, eta, p_max);
    const double base1 = std::pow(p1 * (p1 - 1) * ep1 + 1, eta * (2 - p) / p1);
    for (double t : sample_times(b.t1_contract)) {
      const GridValues fv = sample(ex.f_at(t), grid), gv = sample(ex.g_at(t), grid);
      res.rows.push_back(make_row("lower_fisher_p" + fmt_p(p), t,
                                  generalized_fisher(fv, gv, p, P), Cc * base1 * base2));
    }
  }

  std::ostringstream os;
  os << "explicit times use sampled envelope constants (estimates)\n";
  for (double factor : {0.5, 1.0, 2.0}) {
    const EnvelopeConstants ks = k.scaled(factor);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "c_tilde,c_hat x%-3g: t1(p2)=%.6g  t1(p1,p2,eta)=%.6g  tau3=%.6g\n", factor,
                  t1_hyper(ks, p2), t1_contract(ks, p1, p2, eta), t_tilde1(ks, 1.0 / 6.0));
    os << buf;
  }
  res.sensitivity = os.str();
  return res;
}

// ------------------------------------------------------------ sharpness fits

FitResult fit_decay(const std::vector<TrajectoryPoint>& pts, double mu, int n, double t_lo,
                    double t_hi) {
  FitResult fr;
  fr.t_lo = t_lo;
  fr.t_hi = t_hi;
  std::vector<double> ts, ly, xo;
  for (const auto& pt : pts) {
    if (pt.t < t_lo || pt.t > t_hi) continue;
    if (!(pt.e_2 > 0) || !std::isfinite(pt.e_2)) continue;
    ts.push_back(pt.t);
    ly.push_back(std::log(pt.e_2));
  }
  fr.samples = static_cast<int>(ts.size());
  if (fr.samples < 3) {
    fr.inconclusive = true;
    fr.rate_fit = fr.poly_order_fit = fr.residual = fr.rate_residual = kNaN;
    return fr;
  }
  const auto rate = linfit(ts, ly);
  fr.rate_fit = -rate.first;
  fr.rate_residual = rate.second;
  std::vector<double> y(ts.size());
  for (size_t i = 0; i < ts.size(); ++i) {
    y[i] = ly[i] + 2.0 * mu * ts[i];
    xo.push_back(n > 0 ? std::log1p(std::pow(ts[i], 2.0 * n)) : std::log(ts[i]));
  }
  const auto ord = linfit(xo, y);
  fr.poly_order_fit = n > 0 ? 2.0 * n * ord.first : ord.first;
  fr.residual = ord.second;
  fr.inconclusive = !(fr.residual <= 0.1);
  return fr;
}

std::vector<CheckRow> check_main_theorems(TrajectoryReport& rep, double mu, int n) {
  std::vector<CheckRow> rows;
  const double t_end = rep.points.empty() ? 0.0 : rep.points.back().t;
  {
    CheckRow r;
    r.check = "envelope_sup";
    r.t = t_end;
    r.lhs = rep.envelope_sup;
    r.rhs = std::numeric_limits<double>::infinity();
    r.margin = r.rhs;
    r.pass = std::isfinite(rep.envelope_sup);
    rows.push_back(r);
  }
  FitResult fr = fit_decay(rep.points, mu, n, 8.0 / mu, 15.0 / mu);
  rep.fit = fr;
  if (fr.inconclusive)
    rep.warnings.push_back("inconclusive fit: residual " + std::to_string(fr.residual) +
                           " on " + std::to_string(fr.samples) + " samples");
  if (fr.samples >= 3) {
    if (n > 0) {
      CheckRow r = make_row("order_fit", t_end, std::abs(fr.poly_order_fit - 2.0 * n), 0.4);
      rows.push_back(r);
    } else {
      rows.push_back(
          make_row("rate_fit", t_end, std::abs(fr.rate_fit - 2.0 * mu), 0.02 * 2.0 * mu));
    }
  }
  return rows;
}

std::vector<CheckRow> check_log_sobolev(const TrajectoryReport& rep) {
  std::vector<CheckRow> rows;
  for (const auto& pt : rep.points)
    rows.push_back(make_row("log_sobolev", pt.t, pt.e_p,
                            kLogSobolevConstant * pt.I_p_I * (1 + 1e-6) + 1e-300));
  return rows;
}

std::vector<CheckRow> check_entropy_monotone(const TrajectoryReport& rep) {
  std::vector<CheckRow> rows;
  if (rep.points.empty()) return rows;
  const double slack = 1e-9 * std::abs(rep.points.front().e_p) + 1e-15;
  for (size_t i = 1; i < rep.points.size(); ++i)
    rows.push_back(make_row("entropy_monotone", rep.points[i].t, rep.points[i].e_p,
                            rep.points[i - 1].e_p + slack));
  return rows;
}

std::vector<CheckRow> check_splitting(const TrajectoryReport& rep) {
  std::vector<CheckRow> rows;
  for (const auto& pt : rep.points)
    rows.push_back(make_row("splitting", pt.t, pt.I_p_P,
                            2.0 * (pt.genI_p_f1 + pt.genI_p_f2) * (1 + 1e-10) + 1e-300));
  return rows;
}

}  // namespace hd
