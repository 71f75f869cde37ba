// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
#include "propagator.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <unsupported/Eigen/MatrixFunctions>

namespace hd {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr int kMaxDim = 3;
}  // namespace

Equilibrium Equilibrium::from_covariance(const Matrix& K) {
  Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::kInvalidInput, "equilibrium covariance must be positive definite");
  Equilibrium e;
  e.K_inv = llt.solve(Matrix::Identity(K.rows(), K.cols()));
  double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  e.log_norm = -0.5 * K.rows() * kLog2Pi - 0.5 * log_det;
  return e;
}

double Equilibrium::log_density(const Vector& x) const {
  return log_norm - 0.5 * x.dot(K_inv * x);
}

double Equilibrium::density(const Vector& x) const { return std::exp(log_density(x)); }

// ------------------------------------------------------------------ mixture

void GaussianMixture::add(double weight, const Vector& mean, const Matrix& cov) {
  if (d_ == 0) d_ = static_cast<int>(mean.size());
  if (mean.size() != d_ || cov.rows() != d_ || cov.cols() != d_)
    fail(ErrorCode::kDimension, "mixture component has the wrong dimension");
  if (!std::isfinite(weight) || !mean.allFinite() || !cov.allFinite())
    fail(ErrorCode::kInvalidInput, "mixture component has non-finite entries");
  if ((cov - cov.transpose()).norm() > 1e-12 * std::max(1.0, cov.norm()))
    fail(ErrorCode::kInvalidInput, "mixture covariance must be symmetric");
  Matrix S = 0.5 * (cov + cov.transpose());
  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success || llt.matrixL().toDenseMatrix().diagonal().minCoeff() <= 0.0)
    fail(ErrorCode::kInvalidInput, "mixture covariance must be positive definite");
  GaussianComponent c;
  c.weight = weight;
  c.mean = mean;
  c.cov = S;
  c.precision = llt.solve(Matrix::Identity(d_, d_));
  c.precision = 0.5 * (c.precision + c.precision.transpose());
  c.log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  comps_.push_back(std::move(c));
}

double GaussianMixture::mass() const {
  double m = 0.0;
  for (const auto& c : comps_) m += c.weight;
  return m;
}

bool GaussianMixture::nonnegative() const {
  for (const auto& c : comps_)
    if (c.weight < 0.0) return false;
  return true;
}

GaussianMixture GaussianMixture::standard(int d) {
  GaussianMixture m(d);
  m.add(1.0, Vector::Zero(d), Matrix::Identity(d, d));
  return m;
}

// ------------------------------------------------------------------ Hermite

double HermiteExpansion::coefficient(const MultiIndex& a) const {
  if (empty() || multi_index_degree(a) > max_degree) return 0.0;
  return coeffs(multi_index_position(a));
}

void HermiteExpansion::set(const MultiIndex& a, double value) {
  if (static_cast<int>(a.size()) != d)
    fail(ErrorCode::kDimension, "multi-index has the wrong length");
  if (multi_index_degree(a) > max_degree) *this = resized(multi_index_degree(a));
  coeffs(multi_index_position(a)) = value;
}

HermiteExpansion HermiteExpansion::resized(int degree) const {
  HermiteExpansion out(d, degree);
  const int n = std::min<int>(coeffs.size(), out.coeffs.size());
  out.coeffs.head(n) = coeffs.head(n);
  return out;
}

HermiteExpansion HermiteExpansion::shifted_gaussian(const Vector& m, int degree) {
  const int d = static_cast<int>(m.size());
  HermiteExpansion h(d, degree);
  const auto& idx = cached_multi_indices(d, degree);
  for (size_t k = 0; k < idx.size(); ++k) {
    double v = 1.0;
    for (int i = 0; i < d; ++i) {
      for (int j = 1; j <= idx[k][i]; ++j) v *= m(i) / std::sqrt(double(j));
    }
    h.coeffs(k) = v;
  }
  return h;
}

namespace {
HermiteExpansion combine(const HermiteExpansion& a, const HermiteExpansion& b, double s) {
  if (a.empty()) {
    HermiteExpansion out = b;
    out.coeffs *= s;
    return out;
  }
  if (b.empty()) return a;
  if (a.d != b.d) fail(ErrorCode::kDimension, "Hermite expansions differ in dimension");
  const int deg = std::max(a.max_degree, b.max_degree);
  HermiteExpansion out = a.resized(deg);
  out.coeffs.head(b.coeffs.size()) += s * b.coeffs;
  return out;
}
}  // namespace

HermiteExpansion operator-(const HermiteExpansion& a, const HermiteExpansion& b) {
  return combine(a, b, -1.0);
}
HermiteExpansion operator+(const HermiteExpansion& a, const HermiteExpansion& b) {
  return combine(a, b, 1.0);
}

DensityState DensityState::from_mixture(GaussianMixture m) {
  DensityState s;
  s.d = m.dim();
  s.mixture = std::move(m);
  return s;
}

DensityState DensityState::from_hermite(HermiteExpansion h) {
  DensityState s;
  s.d = h.d;
  s.mixture = GaussianMixture(h.d);
  s.hermite = std::move(h);
  return s;
}

// --------------------------------------------------------------- evolution

Matrix covariance_W(const Matrix& C_tilde, double t) {
  if (!(t >= 0.0)) fail(ErrorCode::kParameter, "time must be non-negative");
  const Matrix E = matrix_exponential(-C_tilde, t);
  Matrix W = Matrix::Identity(C_tilde.rows(), C_tilde.cols()) - E * E.transpose();
  return 0.5 * (W + W.transpose());
}

PropagatorCache make_cache(const Matrix& C_tilde, double t) {
  if (!(t >= 0.0)) fail(ErrorCode::kParameter, "time must be non-negative");
  PropagatorCache c;
  c.t = t;
  c.E = matrix_exponential(-C_tilde, t);
  c.W = Matrix::Identity(C_tilde.rows(), C_tilde.cols()) - c.E * c.E.transpose();
  c.W = 0.5 * (c.W + c.W.transpose());
  return c;
}

GaussianMixture evolve_mixture(const GaussianMixture& m, const PropagatorCache& cache) {
  if (cache.t == 0.0) return m;
  GaussianMixture out(m.dim());
  for (const auto& c : m.components()) {
    out.add(c.weight, cache.E * c.mean, cache.W + cache.E * c.cov * cache.E.transpose());
  }
  return out;
}

GaussianMixture evolve_mixture(const GaussianMixture& m, const Matrix& C_tilde, double t) {
  return evolve_mixture(m, make_cache(C_tilde, t));
}

GeneratorMatrix build_generator_matrix(const Matrix& C_tilde, int max_degree) {
  const int d = static_cast<int>(C_tilde.rows());
  if (max_degree < 0) fail(ErrorCode::kParameter, "max degree must be >= 0");
  if (d < 1 || d > kMaxDim) fail(ErrorCode::kDimension, "generator supports 1 <= d <= 3");
  const int N = multi_index_count(d, max_degree);
  if (N > kMaxHermiteBasis)
    fail(ErrorCode::kCapacity, "Hermite basis of size " + std::to_string(N) +
                                   " exceeds the budget " + std::to_string(kMaxHermiteBasis));
  // In the normalized frame D = C_s; using it exactly keeps the blocks exact.
  const Matrix Ds = 0.5 * (C_tilde + C_tilde.transpose());
  GeneratorMatrix gen;
  gen.d = d;
  gen.max_degree = max_degree;
  gen.G = Matrix::Zero(N, N);
  const auto& idx = cached_multi_indices(d, max_degree);
  for (int col = 0; col < N; ++col) {
    const Polynomial q = hermite_polynomial(idx[col]);
    Polynomial image;
    std::vector<Polynomial> grad(d);
    for (int j = 0; j < d; ++j) grad[j] = derivative(q, j);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        if (Ds(i, j) != 0.0) axpy(Ds(i, j), derivative(grad[j], i), image);
        // - x_i C_ij d_j q
        if (C_tilde(i, j) != 0.0) axpy(-C_tilde(i, j), multiply_by_coordinate(grad[j], i), image);
      }
    }
    gen.G.col(col) = to_hermite_coefficients(image, d, max_degree);
  }
  for (int m = 0; m <= max_degree; ++m) {
    const int off = degree_offset(d, m), n = multi_index_count(d, m) - off;
    gen.blocks.push_back(gen.G.block(off, off, n, n));
  }
  return gen;
}

HermiteExpansion evolve_hermite(const HermiteExpansion& h, const GeneratorMatrix& gen,
                                double t) {
  if (!(t >= 0.0)) fail(ErrorCode::kParameter, "time must be non-negative");
  if (h.empty() || t == 0.0) return h;
  if (h.max_degree > gen.max_degree)
    fail(ErrorCode::kCapacity, "generator matrix does not cover the expansion degree");
  HermiteExpansion out(h.d, h.max_degree);
  for (int m = 0; m <= h.max_degree; ++m) {
    const int off = degree_offset(h.d, m), n = multi_index_count(h.d, m) - off;
    const Matrix Em = (gen.blocks[m] * t).exp();
    out.coeffs.segment(off, n) = Em * h.coeffs.segment(off, n);
  }
  return out;
}

DensityState evolve_state(const DensityState& s, const PropagatorCache& cache,
                          const GeneratorMatrix* gen) {
  DensityState out;
  out.d = s.d;
  out.mixture = evolve_mixture(s.mixture, cache);
  if (!s.hermite.empty()) {
    if (!gen) fail(ErrorCode::kParameter, "Hermite evolution needs a generator matrix");
    out.hermite = evolve_hermite(s.hermite, *gen, cache.t);
  }
  return out;
}

// -------------------------------------------------------------- evaluation

NodeValue evaluate_node(const DensityState& s, const Vector& x) {
  const int d = s.d;
  NodeValue nv;
  nv.grad = Vector::Zero(d);
  const double half_x2 = 0.5 * x.squaredNorm();
  double ratio = 0.0, excess = s.mass() - 1.0;

  const auto& comps = s.mixture.components();
  const bool positive = s.hermite.empty() && !comps.empty() && s.mixture.nonnegative();
  double lmax = -std::numeric_limits<double>::infinity();
  double ls[16];
  std::vector<double> lbuf;
  double* l = ls;
  if (comps.size() > 16) {
    lbuf.resize(comps.size());
    l = lbuf.data();
  }
  for (size_t k = 0; k < comps.size(); ++k) {
    const auto& c = comps[k];
    const Vector r = x - c.mean;
    l[k] = -0.5 * c.log_det - 0.5 * r.dot(c.precision * r) + half_x2;
    if (c.weight > 0.0) lmax = std::max(lmax, std::log(c.weight) + l[k]);
  }
  double lse_sum = 0.0;
  for (size_t k = 0; k < comps.size(); ++k) {
    const auto& c = comps[k];
    const double e = std::exp(l[k]);
    const Vector gk = x - c.precision * (x - c.mean);
    ratio += c.weight * e;
    excess += c.weight * std::expm1(l[k]);
    nv.grad += (c.weight * e) * gk;
    if (positive && c.weight > 0.0) {
      lse_sum += std::exp(std::log(c.weight) + l[k] - lmax);
    }
  }
  if (!s.hermite.empty()) {
    const int M = s.hermite.max_degree;
    double h[kMaxDim][64];
    if (M >= 63) fail(ErrorCode::kCapacity, "Hermite degree too large for evaluation");
    for (int i = 0; i < d; ++i) hermite_functions_1d(x(i), M, h[i]);
    const auto& idx = cached_multi_indices(d, M);
    for (size_t k = 0; k < idx.size(); ++k) {
      const double c = s.hermite.coeffs(k);
      if (c == 0.0) continue;
      const auto& a = idx[k];
      double v = 1.0;
      for (int i = 0; i < d; ++i) v *= h[i][a[i]];
      ratio += c * v;
      if (k > 0) excess += c * v;
      for (int i = 0; i < d; ++i) {
        if (a[i] == 0) continue;
        double g = c * std::sqrt(double(a[i])) * h[i][a[i] - 1];
        for (int j = 0; j < d; ++j)
          if (j != i) g *= h[j][a[j]];
        nv.grad(i) += g;
      }
    }
  }
  nv.ratio = ratio;
  nv.ratio_minus_one = excess;
  if (positive) {
    nv.log_ratio = lmax + std::log(lse_sum);
    nv.log_valid = true;
    // keep grad consistent where exp(l) underflowed
    if (ratio == 0.0) nv.grad.setZero();
  } else if (ratio > 0.0) {
    nv.log_ratio = std::log(ratio);
    nv.log_valid = true;
  }
  return nv;
}

double evaluate_density(const DensityState& s, const Vector& x) {
  const NodeValue nv = evaluate_node(s, x);
  const double log_finf = -0.5 * s.d * kLog2Pi - 0.5 * x.squaredNorm();
  if (nv.log_valid) return std::exp(nv.log_ratio + log_finf);
  return nv.ratio * std::exp(log_finf);
}

Vector evaluate_ratio_gradient(const DensityState& s, const Vector& x) {
  return evaluate_node(s, x).grad;
}

}  // namespace hd
