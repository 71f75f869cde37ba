// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
#include "nonquadratic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "parallel.hpp"

namespace hd {

ScalarDiffusionProblem ScalarDiffusionProblem::make(const std::string& phi, const std::string& D,
                                                    int d, double half_width, int cells) {
  if (d < 1 || d > 3) fail(ErrorCode::kDimension, "scalar-diffusion problems support d <= 3");
  if (!(half_width > 0)) fail(ErrorCode::kParameter, "domain half-width must be positive");
  if (cells < 8) fail(ErrorCode::kParameter, "need at least 8 cells");
  ScalarDiffusionProblem p;
  p.d = d;
  p.half_width = half_width;
  p.cells = cells;
  p.phi = Expression::parse(phi);
  p.D = Expression::parse(D);
  if (p.phi.max_variable() >= d || p.D.max_variable() >= d)
    fail(ErrorCode::kParameter, "expression uses a coordinate beyond the dimension");
  p.grad_phi.resize(d);
  p.grad_D.resize(d);
  p.hess_phi.assign(d, std::vector<Expression>(d));
  p.hess_D.assign(d, std::vector<Expression>(d));
  for (int i = 0; i < d; ++i) {
    p.grad_phi[i] = p.phi.derivative(i);
    p.grad_D[i] = p.D.derivative(i);
    for (int j = 0; j < d; ++j) {
      p.hess_phi[i][j] = p.grad_phi[i].derivative(j);
      p.hess_D[i][j] = p.grad_D[i].derivative(j);
    }
  }
  return p;
}

Matrix a1_matrix(const ScalarDiffusionProblem& prob, const Vector& x) {
  const int d = prob.d;
  double xs[3] = {0, 0, 0};
  for (int i = 0; i < d; ++i) xs[i] = x(i);
  const double Dv = prob.D.eval(xs);
  if (!(Dv > 0)) {
    std::ostringstream os;
    os << "D(x) = " << Dv << " is not positive at x = " << x.transpose();
    fail(ErrorCode::kDomain, os.str());
  }
  Vector gp(d), gD(d);
  Matrix Hp(d, d), HD(d, d);
  for (int i = 0; i < d; ++i) {
    gp(i) = prob.grad_phi[i].eval(xs);
    gD(i) = prob.grad_D[i].eval(xs);
    for (int j = 0; j < d; ++j) {
      Hp(i, j) = prob.hess_phi[i][j].eval(xs);
      HD(i, j) = prob.hess_D[i][j].eval(xs);
    }
  }
  const Matrix I = Matrix::Identity(d, d);
  Matrix M = (0.5 - d / 4.0) / Dv * gD * gD.transpose() +
             0.5 * (HD.trace() - gD.dot(gp)) * I + Dv * Hp +
             0.5 * (gp * gD.transpose() + gD * gp.transpose()) - HD;
  return 0.5 * (M + M.transpose());
}

A1Report check_condition_A1(const ScalarDiffusionProblem& prob, int points_per_axis) {
  const int d = prob.d;
  if (points_per_axis <= 0) points_per_axis = d == 1 ? 4097 : d == 2 ? 257 : 49;
  if (points_per_axis < 2) fail(ErrorCode::kParameter, "need at least 2 points per axis");
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(points_per_axis);
  const double L = prob.half_width;
  auto point = [&](std::size_t idx) {
    Vector x(d);
    for (int i = 0; i < d; ++i) {
      x(i) = -L + 2 * L * double(idx % points_per_axis) / (points_per_axis - 1);
      idx /= points_per_axis;
    }
    return x;
  };
  std::vector<double> lam(total), dv(total);
  parallel_for(total, [&](std::size_t k) {
    const Vector x = point(k);
    const Matrix M = a1_matrix(prob, x);
    lam[k] = d == 1 ? M(0, 0)
                    : Eigen::SelfAdjointEigenSolver<Matrix>(M, Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .minCoeff();
    double xs[3] = {0, 0, 0};
    for (int i = 0; i < d; ++i) xs[i] = x(i);
    dv[k] = prob.D.eval(xs);
  });
  const auto it = std::min_element(lam.begin(), lam.end());
  A1Report r;
  r.lambda1 = *it;
  r.worst_point = point(static_cast<std::size_t>(it - lam.begin()));
  r.points_per_axis = points_per_axis;
  r.D_min = *std::min_element(dv.begin(), dv.end());
  return r;
}

std::string A1Report::to_text() const {
  std::ostringstream os;
  char buf[128];
  std::snprintf(buf, sizeof buf, "lambda1 = %.17g\n", lambda1);
  os << buf;
  os << "worst_point = " << worst_point.transpose() << "\n";
  os << "points_per_axis = " << points_per_axis << "\n";
  std::snprintf(buf, sizeof buf, "D_min = %.17g\n", D_min);
  os << buf;
  os << "certified = " << (lambda1 > 0 ? "yes" : "no") << "\n";
  return os.str();
}

// ------------------------------------------------------------------ solver

FP1DGrid make_fp1d_grid(const ScalarDiffusionProblem& prob) {
  if (prob.d != 1) fail(ErrorCode::kDimension, "the PDE solver is one-dimensional");
  FP1DGrid g;
  const int N = prob.cells;
  const double L = prob.half_width;
  g.cells = N;
  g.h = 2 * L / N;
  g.x.resize(N);
  Vector phi(N);
  for (int i = 0; i < N; ++i) {
    g.x(i) = -L + (i + 0.5) * g.h;
    phi(i) = prob.phi.eval1(g.x(i));
    if (!std::isfinite(phi(i))) fail(ErrorCode::kDomain, "phi is not finite on the grid");
  }
  const double pmin = phi.minCoeff();
  Vector logw = -(phi.array() - pmin).matrix();
  const double Z = g.h * logw.array().exp().sum();
  const Vector logf = (logw.array() - std::log(Z)).matrix();
  g.f_inf = logf.array().exp().matrix();

  g.D_face.resize(N - 1);
  g.m_face.resize(N - 1);
  for (int i = 0; i + 1 < N; ++i) {
    const double xf = g.x(i) + 0.5 * g.h;
    const double Dv = prob.D.eval1(xf);
    if (!(Dv > 0)) fail(ErrorCode::kDomain, "D(x) is not positive on the grid");
    g.D_face(i) = Dv;
    // 1 / mean(1/f_inf) over the face for piecewise-linear phi
    const double delta = logf(i + 1) - logf(i);
    const double factor = std::abs(delta) < 1e-12 ? 1.0 : delta / -std::expm1(-delta);
    g.m_face(i) = g.f_inf(i) * factor;
    g.max_peclet = std::max(g.max_peclet, 0.5 * std::abs(phi(i + 1) - phi(i)));
  }
  // tail beyond the truncation, e^{-phi} ~ exponential with slope phi'
  for (double xe : {-L, L}) {
    const double slope = std::abs(prob.grad_phi[0].eval1(xe));
    const double fe = std::exp(-(prob.phi.eval1(xe) - pmin)) / Z;
    g.tail_mass += slope > 0 ? fe / slope : std::numeric_limits<double>::infinity();
  }
  return g;
}

Vector cells_from_ratio(const FP1DGrid& g, const Expression& ratio, bool normalize) {
  Vector f(g.cells);
  for (int i = 0; i < g.cells; ++i) f(i) = ratio.eval1(g.x(i)) * g.f_inf(i);
  if (normalize) {
    const double m = g.h * f.sum();
    if (!(std::abs(m) > 0)) fail(ErrorCode::kPrecondition, "initial datum has zero mass");
    f /= m;
  }
  return f;
}

namespace {

// Factorized symmetric tridiagonal system (diag, off) for repeated solves.
struct Tridiag {
  Vector cprime, denom, off;

  Tridiag(const Vector& diag, const Vector& offd) : off(offd) {
    const int n = static_cast<int>(diag.size());
    cprime.resize(n);
    denom.resize(n);
    denom(0) = diag(0);
    for (int i = 1; i < n; ++i) {
      cprime(i - 1) = off(i - 1) / denom(i - 1);
      denom(i) = diag(i) - off(i - 1) * cprime(i - 1);
    }
  }

  void solve(const Vector& rhs, Vector& x) const {
    const int n = static_cast<int>(rhs.size());
    x.resize(n);
    x(0) = rhs(0) / denom(0);
    for (int i = 1; i < n; ++i) x(i) = (rhs(i) - off(i - 1) * x(i - 1)) / denom(i);
    for (int i = n - 2; i >= 0; --i) x(i) -= cprime(i) * x(i + 1);
  }
};

struct MultiResult {
  std::vector<std::vector<Vector>> states;  // [rhs][time]
  double max_mass_drift = 0.0;
  double min_value = 0.0;
  int steps = 0;
};

// Implicit Euler in the ratio variable r = f/f_inf:
//   f_inf r^{n+1} - dt div_h(D m grad_h r^{n+1}) = f^n.
MultiResult integrate(const FP1DGrid& g, const std::vector<Vector>& init,
                      const std::vector<double>& t_grid, double dt) {
  for (size_t k = 0; k < t_grid.size(); ++k)
    if (!(t_grid[k] >= 0) || (k > 0 && t_grid[k] < t_grid[k - 1]))
      fail(ErrorCode::kParameter, "time grid must be non-negative and sorted");
  const int N = g.cells;
  const Vector a = (g.D_face.array() * g.m_face.array() / (g.h * g.h)).matrix();
  MultiResult res;
  res.states.resize(init.size());
  std::vector<Vector> cur = init;
  double t = 0.0;
  res.min_value = std::numeric_limits<double>::infinity();
  for (const auto& v : init) res.min_value = std::min(res.min_value, v.minCoeff());
  Vector r;
  for (double target : t_grid) {
    const double span = target - t;
    if (span > 0) {
      const int n = std::max(1, static_cast<int>(std::ceil(span / dt - 1e-9)));
      const double step = span / n;
      Vector diag = g.f_inf, off(N - 1);
      for (int i = 0; i + 1 < N; ++i) {
        diag(i) += step * a(i);
        diag(i + 1) += step * a(i);
        off(i) = -step * a(i);
      }
      const Tridiag T(diag, off);
      for (int s = 0; s < n; ++s) {
        for (auto& f : cur) {
          const double before = f.sum();
          T.solve(f, r);
          f = (r.array() * g.f_inf.array()).matrix();
          res.max_mass_drift = std::max(res.max_mass_drift, g.h * std::abs(f.sum() - before));
        }
        ++res.steps;
      }
      for (const auto& f : cur) res.min_value = std::min(res.min_value, f.minCoeff());
      t = target;
    }
    for (size_t k = 0; k < cur.size(); ++k) res.states[k].push_back(cur[k]);
  }
  return res;
}

void check_initial(const FP1DGrid& g, const Vector& f0, bool unit_mass) {
  if (f0.size() != g.cells) fail(ErrorCode::kDimension, "initial datum has the wrong size");
  if (!f0.allFinite()) fail(ErrorCode::kInvalidInput, "initial datum is not finite");
  if (unit_mass) {
    if (f0.minCoeff() < 0) fail(ErrorCode::kPrecondition, "f0 must be non-negative");
    if (std::abs(g.h * f0.sum() - 1.0) > 1e-8)
      fail(ErrorCode::kPrecondition, "f0 must be normalized on the truncated domain");
  }
}

}  // namespace

FP1DResult solve_fp_1d(const ScalarDiffusionProblem& prob, const Vector& f0,
                       const std::vector<double>& t_grid, double dt) {
  FP1DResult out;
  out.grid = make_fp1d_grid(prob);
  check_initial(out.grid, f0, true);
  if (dt <= 0) dt = 1e-5;
  MultiResult mr = integrate(out.grid, {f0}, t_grid, dt);
  out.times = t_grid;
  out.f = std::move(mr.states[0]);
  out.max_mass_drift = mr.max_mass_drift;
  out.min_value = mr.min_value;
  out.steps = mr.steps;
  if (out.grid.max_peclet > 1.0)
    out.warnings.push_back("grid Peclet number " + std::to_string(out.grid.max_peclet) +
                           " > 1: drift dominates the cell resolution");
  if (out.grid.tail_mass > 1e-10)
    out.warnings.push_back("equilibrium tail mass beyond the domain is " +
                           std::to_string(out.grid.tail_mass));
  if (out.max_mass_drift > 1e-10)
    out.warnings.push_back("mass drift per step " + std::to_string(out.max_mass_drift));
  return out;
}

double discrete_gen_fisher(const FP1DGrid& g, const Vector& f, const Vector& gv, double p,
                           int* vacuum_faces) {
  if (!(p >= 1.0 && p <= 2.0)) fail(ErrorCode::kParameter, "p must lie in [1, 2]");
  double sum = 0.0;
  int vac = 0;
  for (int i = 0; i + 1 < g.cells; ++i) {
    const double rf = 0.5 * (f(i) / g.f_inf(i) + f(i + 1) / g.f_inf(i + 1));
    const double dr = (gv(i + 1) / g.f_inf(i + 1) - gv(i) / g.f_inf(i)) / g.h;
    if (rf < 1e-12) ++vac;
    if (dr == 0.0) continue;
    double w = 1.0;
    if (p < 2.0) {
      if (!(rf > 0))
        fail(ErrorCode::kSingularIntegrand, "f vanishes where the g-gradient does not");
      w = std::pow(rf, p - 2.0);
    }
    sum += g.h * w * g.D_face(i) * g.m_face(i) * dr * dr;
  }
  if (vacuum_faces) *vacuum_faces = vac;
  return sum;
}

DecayVerification verify_generalized_fisher_decay_1d(const ScalarDiffusionProblem& prob,
                                                     double lambda1, const Vector& f0,
                                                     const Vector& g0, double p,
                                                     const std::vector<double>& t_grid,
                                                     double dt, double rel_slack) {
  if (!(lambda1 > 0))
    fail(ErrorCode::kPrecondition, "rate certificate lambda1 <= 0: decay estimate not applicable");
  DecayVerification v;
  v.lambda1 = lambda1;
  v.p = p;
  const FP1DGrid g = make_fp1d_grid(prob);
  check_initial(g, f0, true);
  check_initial(g, g0, false);
  const double I0 = discrete_gen_fisher(g, f0, g0, p, &v.vacuum_faces);
  if (!std::isfinite(I0)) fail(ErrorCode::kPrecondition, "initial Fisher functional is infinite");
  if (v.vacuum_faces > 0)
    v.warnings.push_back(std::to_string(v.vacuum_faces) + " near-vacuum faces at t = 0");
  if (dt <= 0) dt = 1e-4;
  MultiResult mr = integrate(g, {f0, g0}, t_grid, dt);
  for (size_t k = 0; k < t_grid.size(); ++k) {
    DecayRow row;
    row.t = t_grid[k];
    row.fisher = discrete_gen_fisher(g, mr.states[0][k], mr.states[1][k], p);
    row.bound = I0 * std::exp(-2.0 * lambda1 * row.t);
    row.margin = row.bound * (1 + rel_slack) + 1e-300 - row.fisher;
    row.pass = row.margin >= 0;
    v.pass = v.pass && row.pass;
    v.rows.push_back(row);
  }
  return v;
}

}  // namespace hd
