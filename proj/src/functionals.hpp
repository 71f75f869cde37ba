// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "propagator.hpp"

namespace hd {

struct QuadratureGrid {
  int d = 0;
  int degree = 0;
  Matrix nodes;    // d x N
  Vector weights;  // sums to 1 (weight f_inf)

  int size() const { return static_cast<int>(weights.size()); }
};

// Gauss–Hermite rule for N(0,1): Golub–Welsch + Newton polish.
void gauss_hermite_1d(int n, Vector& nodes, Vector& weights);
QuadratureGrid make_grid(int d, int degree);
int default_grid_degree(int d);

struct PEntropyParams {
  double p = 2.0;

  static PEntropyParams make(double p);
  double psi(double y) const;             // generating function
  double psi_near_one(double u) const;    // psi(1 + u), accurate for small u
  double psi2(double y) const;            // y^{p-2}
  double psi3(double y) const;
  double psi4(double y) const;
};

// (psi''')^2 <= psi'' psi'''' / 2 reduces to (2-p)^2 <= (2-p)(3-p)/2 for psi_p.
bool psi_p_admissible(double p);

// Node values of a state on a grid (evaluated once, reused by all functionals).
struct GridValues {
  const QuadratureGrid* grid = nullptr;
  std::vector<NodeValue> nodes;
};

GridValues sample(const DensityState& s, const QuadratureGrid& grid);

enum class EntropyMode { kStrict, kAbsolute };

double entropy_p(const GridValues& f, double p, EntropyMode mode = EntropyMode::kStrict);
double fisher_p(const GridValues& f, double p, const Matrix& P);
double generalized_fisher(const GridValues& f, const GridValues& g, double p,
                          const Matrix& P);
double weighted_l2_norm_sq(const GridValues& g);       // ||g||^2 in L^2(f_inf^{-1})
double weighted_lp_norm(const GridValues& g, double p);  // ||g|| in L^p(f_inf^{1-p})
double l1_norm(const GridValues& g);
double total_mass(const GridValues& g);

double entropy_p(const DensityState& f, double p, const QuadratureGrid& grid,
                 EntropyMode mode = EntropyMode::kStrict);
double fisher_p(const DensityState& f, double p, const Matrix& P, const QuadratureGrid& grid);
double generalized_fisher(const DensityState& f, const DensityState& g, double p,
                          const Matrix& P, const QuadratureGrid& grid);

// Closed form for non-negative Gaussian mixtures; quadrature otherwise.
double exponential_moment(const DensityState& f, double eps, const QuadratureGrid& grid);

inline double eps_p(double p) { return (p - 1.0) / (2.0 * (2.0 * p - 1.0)); }

struct ExpMomentCheck {
  double eps = 0.0;
  double moment = 0.0;
  double bound = 0.0;
  bool unit_mass = false;
  bool holds = false;
};

// Moment at eps_p against the entropy bound (general or unit-mass form).
ExpMomentCheck exponential_moment_bound(const DensityState& f, double p,
                                        const QuadratureGrid& grid);

inline constexpr double kLogSobolevConstant = 0.5;

double log_sobolev_ratio(const GridValues& f, double p);
double log_sobolev_ratio(const DensityState& f, double p, const QuadratureGrid& grid);

}  // namespace hd
