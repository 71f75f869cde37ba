// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
//
// Exact evolution in the normalized frame (f_inf = N(0, I), D = C_s).
#pragma once

#include <vector>

#include "hermite.hpp"
#include "matrix_core.hpp"

namespace hd {

struct Equilibrium {
  Matrix K_inv;
  double log_norm = 0.0;  // log c_K

  static Equilibrium from_covariance(const Matrix& K);
  double log_density(const Vector& x) const;
  double density(const Vector& x) const;
};

struct GaussianComponent {
  double weight = 0.0;
  Vector mean;
  Matrix cov;
  // derived
  Matrix precision;
  double log_det = 0.0;
};

class GaussianMixture {
 public:
  GaussianMixture() = default;
  explicit GaussianMixture(int d) : d_(d) {}

  // Throws kInvalidInput unless cov is symmetric positive definite.
  void add(double weight, const Vector& mean, const Matrix& cov);

  int dim() const { return d_; }
  bool empty() const { return comps_.empty(); }
  double mass() const;
  bool nonnegative() const;
  const std::vector<GaussianComponent>& components() const { return comps_; }

  static GaussianMixture standard(int d);  // f_inf itself

 private:
  int d_ = 0;
  std::vector<GaussianComponent> comps_;
};

// sum_a coeffs[pos(a)] h_a(x) f_inf(x), |a| <= max_degree.
struct HermiteExpansion {
  int d = 0;
  int max_degree = -1;
  Vector coeffs;

  HermiteExpansion() = default;
  HermiteExpansion(int dim, int degree)
      : d(dim), max_degree(degree), coeffs(Vector::Zero(multi_index_count(dim, degree))) {}

  bool empty() const { return max_degree < 0; }
  double mass() const { return empty() ? 0.0 : coeffs(0); }
  double coefficient(const MultiIndex& a) const;
  void set(const MultiIndex& a, double value);
  HermiteExpansion resized(int degree) const;

  // N(m, I) = sum_a m^a / sqrt(a!) h_a f_inf, truncated at the given degree.
  static HermiteExpansion shifted_gaussian(const Vector& m, int degree);
};

HermiteExpansion operator-(const HermiteExpansion& a, const HermiteExpansion& b);
HermiteExpansion operator+(const HermiteExpansion& a, const HermiteExpansion& b);

// Linear combination: mixture part + Hermite part.
struct DensityState {
  int d = 0;
  GaussianMixture mixture;
  HermiteExpansion hermite;

  static DensityState from_mixture(GaussianMixture m);
  static DensityState from_hermite(HermiteExpansion h);
  double mass() const { return mixture.mass() + hermite.mass(); }
  bool has_hermite() const { return !hermite.empty(); }
  bool is_nonnegative_mixture() const { return hermite.empty() && mixture.nonnegative(); }
};

struct PropagatorCache {
  double t = 0.0;
  Matrix E;  // e^{-C t}
  Matrix W;  // I - E E^T
};

struct GeneratorMatrix {
  int d = 0;
  int max_degree = 0;
  Matrix G;                    // full matrix, columns = images of basis functions
  std::vector<Matrix> blocks;  // diagonal degree blocks

  const Matrix& block(int m) const { return blocks.at(m); }
};

inline constexpr int kMaxHermiteBasis = 4096;

Matrix covariance_W(const Matrix& C_tilde, double t);
PropagatorCache make_cache(const Matrix& C_tilde, double t);

GaussianMixture evolve_mixture(const GaussianMixture& m, const PropagatorCache& cache);
GaussianMixture evolve_mixture(const GaussianMixture& m, const Matrix& C_tilde, double t);

GeneratorMatrix build_generator_matrix(const Matrix& C_tilde, int max_degree);
HermiteExpansion evolve_hermite(const HermiteExpansion& h, const GeneratorMatrix& gen,
                                double t);

// Evolves both parts; the generator must cover the Hermite degree.
DensityState evolve_state(const DensityState& s, const PropagatorCache& cache,
                          const GeneratorMatrix* gen);

struct NodeValue {
  double ratio = 0.0;            // f/f_inf
  double ratio_minus_one = 0.0;  // accurate near equilibrium
  double log_ratio = 0.0;        // valid iff log_valid
  bool log_valid = false;
  Vector grad;                   // grad (f/f_inf)
};

// Scratch-free evaluation; d <= 3 keeps the per-call cost small.
NodeValue evaluate_node(const DensityState& s, const Vector& x);
double evaluate_density(const DensityState& s, const Vector& x);
Vector evaluate_ratio_gradient(const DensityState& s, const Vector& x);

}  // namespace hd
