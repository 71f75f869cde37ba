// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
#include "functionals.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Eigenvalues>

#include "parallel.hpp"

namespace hd {

namespace {

const double kLogTiny = std::log(1e-300);

std::string where(const QuadratureGrid& g, int i) {
  std::string s = "x = (";
  char buf[40];
  for (int k = 0; k < g.d; ++k) {
    std::snprintf(buf, sizeof buf, "%s%.6g", k ? ", " : "", g.nodes(k, i));
    s += buf;
  }
  return s + ")";
}

void require_same_grid(const GridValues& a, const GridValues& b) {
  if (a.grid != b.grid || a.nodes.size() != b.nodes.size())
    fail(ErrorCode::kParameter, "functionals need both states sampled on the same grid");
}

}  // namespace

// ---------------------------------------------------------------- quadrature

void gauss_hermite_1d(int n, Vector& nodes, Vector& weights) {
  if (n < 1) fail(ErrorCode::kParameter, "quadrature degree must be >= 1");
  Matrix J = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(double(k));
  Eigen::SelfAdjointEigenSolver<Matrix> es(J, Eigen::EigenvaluesOnly);
  nodes = es.eigenvalues();
  weights.resize(n);
  std::vector<double> h(n + 1);
  for (int i = 0; i < n; ++i) {
    double x = nodes(i);
    for (int it = 0; it < 3; ++it) {
      hermite_functions_1d(x, n, h.data());
      const double dh = std::sqrt(double(n)) * h[n - 1];
      if (dh == 0.0) break;
      x -= h[n] / dh;
    }
    nodes(i) = x;
    hermite_functions_1d(x, n - 1, h.data());
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += h[k] * h[k];
    weights(i) = 1.0 / s;
  }
  // symmetrize to remove eigen-solver asymmetry
  for (int i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (nodes(n - 1 - i) - nodes(i));
    const double w = 0.5 * (weights(i) + weights(n - 1 - i));
    nodes(i) = -x;
    nodes(n - 1 - i) = x;
    weights(i) = weights(n - 1 - i) = w;
  }
  if (n % 2 == 1) nodes(n / 2) = 0.0;
  weights /= weights.sum();
}

QuadratureGrid make_grid(int d, int degree) {
  if (d < 1 || d > 3) fail(ErrorCode::kDimension, "quadrature supports 1 <= d <= 3");
  Vector x1, w1;
  gauss_hermite_1d(degree, x1, w1);
  QuadratureGrid g;
  g.d = d;
  g.degree = degree;
  int N = 1;
  for (int i = 0; i < d; ++i) N *= degree;
  g.nodes.resize(d, N);
  g.weights.resize(N);
  for (int idx = 0; idx < N; ++idx) {
    int rem = idx;
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      const int j = rem % degree;
      rem /= degree;
      g.nodes(k, idx) = x1(j);
      w *= w1(j);
    }
    g.weights(idx) = w;
  }
  return g;
}

int default_grid_degree(int d) { return d <= 2 ? 60 : 30; }

// ------------------------------------------------------------------- psi_p

PEntropyParams PEntropyParams::make(double p) {
  if (!(p >= 1.0 && p <= 2.0))
    fail(ErrorCode::kParameter, "p must lie in [1, 2]");
  return PEntropyParams{p};
}

double PEntropyParams::psi_near_one(double u) const {
  // psi_p(1+u) = sum_{k>=2} a_k u^k, a_2 = 1/2, a_{k+1} = a_k (p-k)/(k+1)
  double a = 0.5, uk = u * u, sum = 0.0;
  for (int k = 2; k < 80; ++k) {
    const double term = a * uk;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    a *= (p - k) / (k + 1.0);
    uk *= u;
  }
  return sum;
}

double PEntropyParams::psi(double y) const {
  if (std::abs(y - 1.0) < 0.1) return psi_near_one(y - 1.0);
  if (p == 1.0) return y > 0.0 ? y * std::log(y) - y + 1.0 : 1.0;
  return (std::pow(y, p) - p * (y - 1.0) - 1.0) / (p * (p - 1.0));
}

double PEntropyParams::psi2(double y) const { return std::pow(y, p - 2.0); }
double PEntropyParams::psi3(double y) const { return (p - 2.0) * std::pow(y, p - 3.0); }
double PEntropyParams::psi4(double y) const {
  return (p - 2.0) * (p - 3.0) * std::pow(y, p - 4.0);
}

bool psi_p_admissible(double p) {
  return (2.0 - p) * (2.0 - p) <= 0.5 * (2.0 - p) * (3.0 - p) + 1e-15;
}

// --------------------------------------------------------------- functionals

GridValues sample(const DensityState& s, const QuadratureGrid& grid) {
  if (s.d != grid.d) fail(ErrorCode::kDimension, "state and grid dimensions differ");
  GridValues gv;
  gv.grid = &grid;
  gv.nodes.resize(grid.size());
  parallel_for(gv.nodes.size(), [&](std::size_t i) {
    gv.nodes[i] = evaluate_node(s, grid.nodes.col(static_cast<Eigen::Index>(i)));
  });
  return gv;
}

double entropy_p(const GridValues& f, double p, EntropyMode mode) {
  const PEntropyParams ps = PEntropyParams::make(p);
  const auto& w = f.grid->weights;
  double sum = 0.0;
  for (size_t i = 0; i < f.nodes.size(); ++i) {
    const NodeValue& nv = f.nodes[i];
    double y = nv.ratio, u = nv.ratio_minus_one;
    if (y < 0.0) {
      if (mode == EntropyMode::kStrict && y < -1e-12)
        fail(ErrorCode::kDomain, "negative density in entropy at " +
                                     where(*f.grid, static_cast<int>(i)));
      y = -y;
      u = y - 1.0;
    }
    sum += w(i) * (std::abs(u) < 0.1 ? ps.psi_near_one(u) : ps.psi(y));
  }
  return sum;
}

double generalized_fisher(const GridValues& f, const GridValues& g, double p,
                          const Matrix& P) {
  require_same_grid(f, g);
  PEntropyParams::make(p);
  const auto& w = f.grid->weights;
  double sum = 0.0;
  for (size_t i = 0; i < f.nodes.size(); ++i) {
    const Vector& gr = g.nodes[i].grad;
    const double q = gr.dot(P * gr);
    if (q == 0.0) continue;
    double weight = 1.0;
    if (p < 2.0) {
      const NodeValue& nv = f.nodes[i];
      if (!nv.log_valid || nv.log_ratio < kLogTiny)
        fail(ErrorCode::kSingularIntegrand,
             "f/f_inf <= 1e-300 with p < 2 at " + where(*f.grid, static_cast<int>(i)));
      weight = std::exp((p - 2.0) * nv.log_ratio);
    }
    sum += w(i) * weight * q;
  }
  return sum;
}

double fisher_p(const GridValues& f, double p, const Matrix& P) {
  return generalized_fisher(f, f, p, P);
}

double weighted_l2_norm_sq(const GridValues& g) {
  double s = 0.0;
  for (size_t i = 0; i < g.nodes.size(); ++i)
    s += g.grid->weights(i) * g.nodes[i].ratio * g.nodes[i].ratio;
  return s;
}

double weighted_lp_norm(const GridValues& g, double p) {
  double s = 0.0;
  for (size_t i = 0; i < g.nodes.size(); ++i)
    s += g.grid->weights(i) * std::pow(std::abs(g.nodes[i].ratio), p);
  return std::pow(s, 1.0 / p);
}

double l1_norm(const GridValues& g) {
  double s = 0.0;
  for (size_t i = 0; i < g.nodes.size(); ++i)
    s += g.grid->weights(i) * std::abs(g.nodes[i].ratio);
  return s;
}

double total_mass(const GridValues& g) {
  double s = 0.0;
  for (size_t i = 0; i < g.nodes.size(); ++i) s += g.grid->weights(i) * g.nodes[i].ratio;
  return s;
}

double entropy_p(const DensityState& f, double p, const QuadratureGrid& grid,
                 EntropyMode mode) {
  return entropy_p(sample(f, grid), p, mode);
}

double fisher_p(const DensityState& f, double p, const Matrix& P,
                const QuadratureGrid& grid) {
  const GridValues gv = sample(f, grid);
  return fisher_p(gv, p, P);
}

double generalized_fisher(const DensityState& f, const DensityState& g, double p,
                          const Matrix& P, const QuadratureGrid& grid) {
  const GridValues fv = sample(f, grid);
  const GridValues gv = sample(g, grid);
  return generalized_fisher(fv, gv, p, P);
}

// ------------------------------------------------------------------ moments

double exponential_moment(const DensityState& f, double eps, const QuadratureGrid& grid) {
  if (!(eps >= 0.0)) fail(ErrorCode::kParameter, "moment exponent must be >= 0");
  const int d = f.d;
  if (f.is_nonnegative_mixture()) {
    double total = 0.0;
    for (const auto& c : f.mixture.components()) {
      const Matrix A = Matrix::Identity(d, d) - 2.0 * eps * c.cov;
      Eigen::LLT<Matrix> llt(A);
      if (llt.info() != Eigen::Success || llt.matrixL().toDenseMatrix().diagonal().minCoeff() <= 0.0)
        fail(ErrorCode::kDivergentMoment,
             "exp(eps|x|^2) moment diverges: I - 2 eps Sigma is not positive definite");
      const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
      total += c.weight * std::exp(-0.5 * log_det + eps * c.mean.dot(llt.solve(c.mean)));
    }
    return total;
  }
  if (!(eps < 0.5))
    fail(ErrorCode::kDivergentMoment, "eps must be < 1/2 for quadrature against f_inf");
  for (const auto& c : f.mixture.components()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(c.cov, Eigen::EigenvaluesOnly);
    if (2.0 * eps * es.eigenvalues().maxCoeff() >= 1.0)
      fail(ErrorCode::kDivergentMoment,
           "exp(eps|x|^2) moment diverges for a mixture component");
  }
  const GridValues gv = sample(f, grid);
  double s = 0.0;
  for (int i = 0; i < grid.size(); ++i)
    s += grid.weights(i) * std::exp(eps * grid.nodes.col(i).squaredNorm()) *
         std::abs(gv.nodes[i].ratio);
  return s;
}

ExpMomentCheck exponential_moment_bound(const DensityState& f, double p,
                                        const QuadratureGrid& grid) {
  if (!(p > 1.0 && p <= 2.0)) fail(ErrorCode::kParameter, "moment bound needs 1 < p <= 2");
  ExpMomentCheck r;
  r.eps = eps_p(p);
  r.moment = exponential_moment(f, r.eps, grid);
  const GridValues gv = sample(f, grid);
  const double e = entropy_p(gv, p, EntropyMode::kAbsolute);
  r.unit_mass = std::abs(l1_norm(gv) - 1.0) <= 1e-8;
  const int d = f.d;
  r.bound = std::pow((2.0 * p - 1.0) / (p - 1.0), d * (p - 1.0) / (2.0 * p)) *
            std::pow(p * (p - 1.0) * e + 1.0, 1.0 / p);
  if (!r.unit_mass) r.bound *= std::pow(2.0 * p, 1.0 / (p - 1.0));
  r.holds = r.moment <= r.bound * (1.0 + 1e-10);
  return r;
}

double log_sobolev_ratio(const GridValues& f, double p) {
  const double e = entropy_p(f, p);
  const Matrix I = Matrix::Identity(f.grid->d, f.grid->d);
  const double fi = fisher_p(f, p, I);
  if (fi <= 1e-300) {
    if (std::abs(e) <= 1e-12) return 0.0;
    fail(ErrorCode::kInconsistency, "Fisher information vanishes but entropy does not");
  }
  return e / fi;
}

double log_sobolev_ratio(const DensityState& f, double p, const QuadratureGrid& grid) {
  return log_sobolev_ratio(sample(f, grid), p);
}

}  // namespace hd
