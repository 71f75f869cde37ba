// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace hd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using cplx = std::complex<double>;

inline constexpr double kDefaultTolerance = 1e-9;

struct ConditionReport {
  int d = 0;
  int rank_D = 0;
  bool symmetric = false;
  bool positive_semidefinite = false;
  bool positive_stable = false;
  int kalman_rank = 0;
  bool D_positive_definite = false;
  bool accepted = false;
  double tolerance = kDefaultTolerance;
  std::vector<std::string> messages;

  std::string to_key_value() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

struct FPSystem {
  Matrix D;
  Matrix C;
  double tolerance = kDefaultTolerance;
  ConditionReport report;

  int d() const { return static_cast<int>(C.rows()); }
};

struct NormalizedSystem {
  Matrix T;      // x_original = T * x_normalized
  Matrix T_inv;
  Matrix D_tilde;
  Matrix C_tilde;
  Matrix K;      // equilibrium covariance in the original variables
  double condition_T = 1.0;

  int d() const { return static_cast<int>(C_tilde.rows()); }
  double d_min() const { return D_tilde.diagonal().minCoeff(); }
};

struct EigenCluster {
  cplx value;
  int algebraic = 0;
  int geometric = 0;
  int max_block = 0;  // largest Jordan block
};

struct SpectralData {
  std::vector<EigenCluster> eigenvalues;
  double mu = 0.0;
  std::vector<EigenCluster> R_mu;
  int n = 0;
  double c_tilde = 1.0;
  double c_hat = 1.0;
  double cluster_radius = 0.0;
};

struct Certificate {
  Matrix P;
  double lambda = 0.0;
  double nu = 0.0;
  double p_min = 0.0;
  double p_max = 0.0;
  double lmi_residual = 0.0;
};

// Throws kDimension / kInvalidInput; a failing condition is reported, not thrown.
ConditionReport validate_system(const Matrix& D, const Matrix& C,
                                double tolerance = kDefaultTolerance);

FPSystem make_system(const Matrix& D, const Matrix& C,
                     double tolerance = kDefaultTolerance);

// Solves C K + K C^T = 2 D.
Matrix solve_lyapunov(const Matrix& D, const Matrix& C);
double lyapunov_residual(const Matrix& D, const Matrix& C, const Matrix& K);

NormalizedSystem normalize_system(const FPSystem& sys);

SpectralData analyze_drift_spectrum(const Matrix& C,
                                    double tolerance = kDefaultTolerance);

Certificate build_certificate(const Matrix& C, double nu,
                              double tolerance = kDefaultTolerance);

Matrix matrix_exponential(const Matrix& A, double t);

// Helpers shared with other modules.
double spectral_norm(const Matrix& A);
int numerical_rank(const Matrix& A, double tolerance);
int numerical_rank(const CMatrix& A, double tolerance);
Matrix psd_sqrt(const Matrix& S);
double min_sym_eigenvalue(const Matrix& S);
std::string format_matrix(const Matrix& A);
std::string format_complex(cplx z);

}  // namespace hd
