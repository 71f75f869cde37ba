// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
#include "matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace hd {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "ok";
    case ErrorCode::kDimension: return "dimension error";
    case ErrorCode::kInvalidInput: return "invalid input";
    case ErrorCode::kNoUniqueSolution: return "no unique solution";
    case ErrorCode::kConditioning: return "conditioning error";
    case ErrorCode::kParameter: return "parameter error";
    case ErrorCode::kInfeasibleCertificate: return "infeasible certificate";
    case ErrorCode::kRange: return "range error";
    case ErrorCode::kCapacity: return "capacity error";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kSingularIntegrand: return "singular integrand";
    case ErrorCode::kDivergentMoment: return "divergent moment";
    case ErrorCode::kInconsistency: return "inconsistency";
    case ErrorCode::kSpectralConsistency: return "spectral consistency failure";
    case ErrorCode::kTheoremCheck: return "theorem check failure";
    case ErrorCode::kPrecondition: return "precondition failure";
    case ErrorCode::kUnderResolved: return "under-resolved quadrature";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kInternal: return "internal error";
  }
  return "unknown error";
}

namespace {

void require_square(const Matrix& A, const char* name) {
  if (A.rows() == 0 || A.rows() != A.cols()) {
    fail(ErrorCode::kDimension,
         std::string(name) + " must be a non-empty square matrix, got " +
             std::to_string(A.rows()) + "x" + std::to_string(A.cols()));
  }
}

void require_finite(const Matrix& A, const char* name) {
  if (!A.allFinite()) {
    fail(ErrorCode::kInvalidInput, std::string(name) + " has NaN/Inf entries");
  }
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Solves A X + X A^H = F for X, A with spectrum in the open right half plane
// (so that λ_i + conj(λ_j) never vanishes).
CMatrix solve_lyapunov_complex(const CMatrix& A, const CMatrix& F) {
  const Eigen::Index n = A.rows();
  Eigen::ComplexSchur<CMatrix> schur(A);
  const CMatrix& Tm = schur.matrixT();
  const CMatrix& U = schur.matrixU();
  const CMatrix G = U.adjoint() * F * U;
  // T Y + Y T^H = G; column j couples to columns k > j through conj(T(j,k)).
  CMatrix Y = CMatrix::Zero(n, n);
  const double scale = std::max(1.0, Tm.cwiseAbs().maxCoeff());
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    CVector rhs = G.col(j);
    for (Eigen::Index k = j + 1; k < n; ++k) rhs -= std::conj(Tm(j, k)) * Y.col(k);
    CMatrix M = Tm;
    M.diagonal().array() += std::conj(Tm(j, j));
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(M(i, i)) <= 1e3 * std::numeric_limits<double>::epsilon() * scale) {
        fail(ErrorCode::kNoUniqueSolution,
             "Lyapunov operator is singular: eigenvalues sum to zero");
      }
    }
    Y.col(j) = M.triangularView<Eigen::Upper>().solve(rhs);
  }
  return U * Y * U.adjoint();
}

std::vector<std::vector<int>> cluster_indices(const CVector& ev, double radius) {
  const int n = static_cast<int>(ev.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(ev[i] - ev[j]) <= radius) parent[find(i)] = find(j);
  std::vector<std::vector<int>> groups;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[slot[r]].push_back(i);
  }
  return groups;
}

int rank_abs(const CMatrix& A, double threshold) {
  Eigen::JacobiSVD<CMatrix> svd(A);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > threshold) ++r;
  return r;
}

double envelope_sup(const Matrix& C, double mu, int power, bool squared) {
  // sup_t ‖e^{-Ct}‖^{1 or 2} / ((1 + t^power) e^{-k mu t}), sampled.
  const int samples = 2000;
  const double t_lo = 1e-3 / mu, t_hi = 50.0 / mu;
  double best = 1.0;  // t = 0
  for (int i = 0; i < samples; ++i) {
    const double t = t_lo * std::pow(t_hi / t_lo, double(i) / (samples - 1));
    const Matrix E = matrix_exponential(-C, t);
    double num = squared ? spectral_norm(E * E.transpose()) : spectral_norm(E);
    double den = (1.0 + std::pow(t, power)) * std::exp(-(squared ? 2.0 : 1.0) * mu * t);
    if (den > 0.0) best = std::max(best, num / den);
  }
  return best;
}

}  // namespace

double spectral_norm(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(A);
  return svd.singularValues()(0);
}

int numerical_rank(const Matrix& A, double tolerance) {
  Eigen::JacobiSVD<Matrix> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tolerance * s(0)) ++r;
  return r;
}

int numerical_rank(const CMatrix& A, double tolerance) {
  Eigen::JacobiSVD<CMatrix> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tolerance * s(0)) ++r;
  return r;
}

Matrix psd_sqrt(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (S + S.transpose()));
  Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double min_sym_eigenvalue(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (S + S.transpose()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::string format_matrix(const Matrix& A) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    if (i) os << "; ";
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (j) os << ",";
      os << fmt_double(A(i, j));
    }
  }
  return os.str();
}

std::string format_complex(cplx z) {
  if (z.imag() == 0.0) return fmt_double(z.real());
  return fmt_double(z.real()) + (z.imag() < 0 ? "-" : "+") +
         fmt_double(std::abs(z.imag())) + "i";
}

// ---------------------------------------------------------------- validation

ConditionReport validate_system(const Matrix& D, const Matrix& C, double tolerance) {
  require_square(D, "D");
  require_square(C, "C");
  if (D.rows() != C.rows())
    fail(ErrorCode::kDimension, "D and C must have the same dimension");
  require_finite(D, "D");
  require_finite(C, "C");
  if (!(tolerance >= 0.0) || !std::isfinite(tolerance))
    fail(ErrorCode::kInvalidInput, "tolerance must be a finite non-negative number");

  ConditionReport r;
  r.d = static_cast<int>(D.rows());
  r.tolerance = tolerance;
  const double dnorm = spectral_norm(D);

  r.symmetric = spectral_norm(D - D.transpose()) <= tolerance * dnorm;
  if (!r.symmetric) r.messages.push_back("D is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (D + D.transpose()),
                                           Eigen::EigenvaluesOnly);
  const Vector dev = es.eigenvalues();
  const double dscale = std::max(std::abs(dev.minCoeff()), std::abs(dev.maxCoeff()));
  r.positive_semidefinite = dev.minCoeff() >= -tolerance * std::max(dscale, 1.0);
  if (!r.positive_semidefinite)
    r.messages.push_back("D has a negative eigenvalue " + fmt_double(dev.minCoeff()));
  r.rank_D = 0;
  for (Eigen::Index i = 0; i < dev.size(); ++i)
    if (dev(i) > tolerance * dscale) ++r.rank_D;
  r.D_positive_definite = r.positive_semidefinite && r.rank_D == r.d;

  Eigen::EigenSolver<Matrix> ces(C, false);
  const double min_re = ces.eigenvalues().real().minCoeff();
  r.positive_stable = min_re > tolerance;
  if (!r.positive_stable)
    r.messages.push_back("C is not positive stable: min Re(lambda) = " +
                         fmt_double(min_re));

  const Matrix sD = psd_sqrt(D);
  Matrix K(r.d, r.d * r.d);
  Matrix block = sD;
  for (int k = 0; k < r.d; ++k) {
    K.middleCols(k * r.d, r.d) = block;
    block = C * block;
  }
  r.kalman_rank = numerical_rank(K, tolerance);
  if (r.kalman_rank < r.d)
    r.messages.push_back("Kalman rank " + std::to_string(r.kalman_rank) + " < d = " +
                         std::to_string(r.d) + " (not hypoelliptic)");
  if (!r.D_positive_definite && r.rank_D > 0 && r.kalman_rank == r.d)
    r.messages.push_back("D is degenerate (rank " + std::to_string(r.rank_D) +
                         "); hypoelliptic case, sharp-decay results require D > 0");

  r.accepted = r.symmetric && r.positive_semidefinite && r.positive_stable &&
               r.kalman_rank == r.d;
  if (r.accepted) r.messages.push_back("conditions (A)-(C) hold");
  return r;
}

std::string ConditionReport::to_key_value() const {
  std::ostringstream os;
  os << "d = " << d << "\n"
     << "rank_D = " << rank_D << "\n"
     << "positive_stable = " << (positive_stable ? "true" : "false") << "\n"
     << "kalman_rank = " << kalman_rank << "\n"
     << "D_positive_definite = " << (D_positive_definite ? "true" : "false") << "\n"
     << "accepted = " << (accepted ? "true" : "false") << "\n"
     << "tolerance = " << fmt_double(tolerance) << "\n";
  for (const auto& m : messages) os << "message = " << m << "\n";
  return os.str();
}

std::string ConditionReport::csv_header() {
  return "d,rank_D,positive_stable,kalman_rank,D_positive_definite,accepted,tolerance,messages";
}

std::string ConditionReport::to_csv_row() const {
  std::string joined;
  for (const auto& m : messages) {
    if (!joined.empty()) joined += " | ";
    joined += m;
  }
  std::string quoted = "\"";
  for (char ch : joined) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  std::ostringstream os;
  os << d << "," << rank_D << "," << (positive_stable ? 1 : 0) << "," << kalman_rank
     << "," << (D_positive_definite ? 1 : 0) << "," << (accepted ? 1 : 0) << ","
     << fmt_double(tolerance) << "," << quoted;
  return os.str();
}

FPSystem make_system(const Matrix& D, const Matrix& C, double tolerance) {
  FPSystem s;
  s.report = validate_system(D, C, tolerance);
  s.D = 0.5 * (D + D.transpose());
  s.C = C;
  s.tolerance = tolerance;
  return s;
}

// ----------------------------------------------------------------- Lyapunov

Matrix solve_lyapunov(const Matrix& D, const Matrix& C) {
  require_square(D, "D");
  require_square(C, "C");
  if (D.rows() != C.rows())
    fail(ErrorCode::kDimension, "D and C must have the same dimension");
  require_finite(D, "D");
  require_finite(C, "C");
  Eigen::EigenSolver<Matrix> es(C, false);
  if (es.eigenvalues().real().minCoeff() <= 0.0)
    fail(ErrorCode::kNoUniqueSolution,
         "C is not positive stable; the Lyapunov equation has no unique PD solution");
  const CMatrix K = solve_lyapunov_complex(C.cast<cplx>(), (2.0 * D).cast<cplx>());
  Matrix Kr = K.real();
  return 0.5 * (Kr + Kr.transpose());
}

double lyapunov_residual(const Matrix& D, const Matrix& C, const Matrix& K) {
  return spectral_norm(2.0 * D - C * K - K * C.transpose());
}

// ------------------------------------------------------------ normalization

NormalizedSystem normalize_system(const FPSystem& sys) {
  if (!sys.report.accepted)
    fail(ErrorCode::kPrecondition, "normalize_system requires an accepted system");
  const int d = sys.d();
  NormalizedSystem ns;
  ns.K = solve_lyapunov(sys.D, sys.C);

  Eigen::SelfAdjointEigenSolver<Matrix> kes(ns.K);
  const Vector kev = kes.eigenvalues();
  if (kev.minCoeff() <= 0.0)
    fail(ErrorCode::kConditioning, "equilibrium covariance K is not positive definite");
  const Matrix S = kes.eigenvectors() * kev.cwiseSqrt().asDiagonal() *
                   kes.eigenvectors().transpose();
  const Matrix S_inv = kes.eigenvectors() * kev.cwiseSqrt().cwiseInverse().asDiagonal() *
                       kes.eigenvectors().transpose();
  Matrix M = S_inv * sys.D * S_inv;
  M = 0.5 * (M + M.transpose());
  Matrix R = Matrix::Identity(d, d);
  const Matrix off = M - Matrix(M.diagonal().asDiagonal());
  if (off.norm() > sys.tolerance * std::max(1.0, M.norm())) {
    Eigen::SelfAdjointEigenSolver<Matrix> mes(M);
    R = mes.eigenvectors();
  }
  ns.T = S * R;
  Eigen::JacobiSVD<Matrix> svd(ns.T);
  const auto& sv = svd.singularValues();
  ns.condition_T = sv(0) / sv(sv.size() - 1);
  if (!std::isfinite(ns.condition_T) || ns.condition_T > 1e12)
    fail(ErrorCode::kConditioning,
         "normalizing transform is numerically singular, cond(T) = " +
             fmt_double(ns.condition_T));
  ns.T_inv = R.transpose() * S_inv;
  ns.D_tilde = ns.T_inv * sys.D * ns.T_inv.transpose();
  ns.D_tilde = 0.5 * (ns.D_tilde + ns.D_tilde.transpose());
  ns.C_tilde = ns.T_inv * sys.C * ns.T;
  return ns;
}

// ---------------------------------------------------------------- spectrum

SpectralData analyze_drift_spectrum(const Matrix& C, double tolerance) {
  require_square(C, "C");
  require_finite(C, "C");
  const int d = static_cast<int>(C.rows());
  Eigen::EigenSolver<Matrix> es(C, false);
  const CVector ev = es.eigenvalues();
  const double cnorm = std::max(1.0, spectral_norm(C));
  const double eps = std::numeric_limits<double>::epsilon();
  SpectralData sd;
  sd.cluster_radius =
      std::max(1e3 * tolerance, 10.0 * std::pow(eps, 1.0 / d)) * cnorm;
  if (d == 1) sd.cluster_radius = 1e3 * tolerance * cnorm;

  const CMatrix Cc = C.cast<cplx>();
  const CMatrix I = CMatrix::Identity(d, d);
  for (const auto& group : cluster_indices(ev, sd.cluster_radius)) {
    EigenCluster cl;
    cplx sum = 0.0;
    for (int i : group) sum += ev[i];
    cl.value = sum / double(group.size());
    if (std::abs(cl.value.imag()) <= sd.cluster_radius) cl.value.imag(0.0);
    cl.algebraic = static_cast<int>(group.size());
    const CMatrix B = Cc - cl.value * I;
    CMatrix Bk = B;
    cl.max_block = cl.algebraic;
    for (int k = 1; k <= cl.algebraic; ++k) {
      const int r = rank_abs(Bk, tolerance * std::pow(cnorm, k) * 10.0);
      if (k == 1) cl.geometric = d - r;
      if (r <= d - cl.algebraic) {
        cl.max_block = k;
        break;
      }
      Bk = Bk * B;
    }
    sd.eigenvalues.push_back(cl);
  }
  std::sort(sd.eigenvalues.begin(), sd.eigenvalues.end(),
            [](const EigenCluster& a, const EigenCluster& b) {
              if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
              return a.value.imag() < b.value.imag();
            });
  sd.mu = std::numeric_limits<double>::infinity();
  for (const auto& cl : sd.eigenvalues) sd.mu = std::min(sd.mu, cl.value.real());
  sd.n = 0;
  for (const auto& cl : sd.eigenvalues) {
    if (std::abs(cl.value.real() - sd.mu) <= sd.cluster_radius) {
      sd.R_mu.push_back(cl);
      sd.n = std::max(sd.n, cl.max_block - 1);
    }
  }
  if (sd.mu > 0.0) {
    sd.c_tilde = 1.1 * envelope_sup(C, sd.mu, sd.n, false);
    sd.c_hat = 1.1 * envelope_sup(C, sd.mu, 2 * sd.n, true);
  }
  return sd;
}

// ------------------------------------------------------------- certificate

namespace {

Certificate finish_certificate(const Matrix& C, Matrix P, double lambda, double nu,
                               double tolerance) {
  Certificate cert;
  cert.P = 0.5 * (P + P.transpose());
  cert.lambda = lambda;
  cert.nu = nu;
  Eigen::SelfAdjointEigenSolver<Matrix> es(cert.P, Eigen::EigenvaluesOnly);
  cert.p_min = es.eigenvalues().minCoeff();
  cert.p_max = es.eigenvalues().maxCoeff();
  cert.lmi_residual = min_sym_eigenvalue(C.transpose() * cert.P + cert.P * C -
                                         2.0 * lambda * cert.P);
  if (!(cert.p_min > 0.0))
    fail(ErrorCode::kInfeasibleCertificate, "constructed P is not positive definite");
  if (cert.lmi_residual < -tolerance * cert.p_max)
    fail(ErrorCode::kInfeasibleCertificate,
         "LMI residual " + fmt_double(cert.lmi_residual) + " below tolerance");
  return cert;
}

// P for nu = 0 when R_mu is semisimple: block-diagonalize C = X diag(Λ_mu, B) X^{-1}
// and take P = Re X^{-H} diag(I, P_B) X^{-1}, with P_B solving a shifted Lyapunov
// equation on the fast block.
Matrix block_certificate(const Matrix& C, const SpectralData& sd) {
  const int d = static_cast<int>(C.rows());
  Eigen::EigenSolver<Matrix> right(C, true);
  Eigen::EigenSolver<Matrix> left(Matrix(C.transpose()), true);
  auto in_Rmu = [&](cplx z) {
    for (const auto& cl : sd.R_mu)
      if (std::abs(z - cl.value) <= sd.cluster_radius) return true;
    return false;
  };
  std::vector<int> ridx, lidx;
  for (int i = 0; i < d; ++i) {
    if (in_Rmu(right.eigenvalues()[i])) ridx.push_back(i);
    // left eigenvectors of C are conj of eigenvectors of C^T for conj eigenvalue
    if (in_Rmu(std::conj(left.eigenvalues()[i]))) lidx.push_back(i);
  }
  const int k = static_cast<int>(ridx.size());
  if (k == d || static_cast<int>(lidx.size()) != k)
    fail(ErrorCode::kInternal, "inconsistent eigenvector split in certificate");
  CMatrix V(d, k), U(d, k);
  for (int j = 0; j < k; ++j) {
    V.col(j) = right.eigenvectors().col(ridx[j]);
    U.col(j) = left.eigenvectors().col(lidx[j]).conjugate();
  }
  const CMatrix Pi = V * (U.adjoint() * V).inverse() * U.adjoint();
  const CMatrix Rest = CMatrix::Identity(d, d) - Pi;
  Eigen::JacobiSVD<CMatrix> svd(Rest, Eigen::ComputeFullU);
  CMatrix X(d, d);
  X.leftCols(k) = V;
  X.rightCols(d - k) = svd.matrixU().leftCols(d - k);
  const CMatrix Xinv = X.inverse();
  const CMatrix Ch = Xinv * C.cast<cplx>() * X;
  const CMatrix B = Ch.bottomRightCorner(d - k, d - k);
  const CMatrix A = (B - sd.mu * CMatrix::Identity(d - k, d - k)).adjoint();
  const CMatrix PB =
      solve_lyapunov_complex(A, CMatrix::Identity(d - k, d - k));
  CMatrix Ph = CMatrix::Zero(d, d);
  Ph.topLeftCorner(k, k) = CMatrix::Identity(k, k);
  Ph.bottomRightCorner(d - k, d - k) = 0.5 * (PB + PB.adjoint());
  return (Xinv.adjoint() * Ph * Xinv).real();
}

}  // namespace

Certificate build_certificate(const Matrix& C, double nu, double tolerance) {
  require_square(C, "C");
  require_finite(C, "C");
  const int d = static_cast<int>(C.rows());
  const SpectralData sd = analyze_drift_spectrum(C, tolerance);
  if (!(sd.mu > tolerance))
    fail(ErrorCode::kNoUniqueSolution, "C is not positive stable");
  if (!(nu >= 0.0) || !(nu < sd.mu))
    fail(ErrorCode::kParameter,
         "slack nu must satisfy 0 <= nu < mu = " + fmt_double(sd.mu) + ", got " +
             fmt_double(nu));
  const double lambda = sd.mu - nu;
  if (nu > 0.0) {
    const Matrix A = C - lambda * Matrix::Identity(d, d);
    const Matrix P = solve_lyapunov(0.5 * Matrix::Identity(d, d), A.transpose());
    return finish_certificate(C, P, lambda, nu, tolerance);
  }
  if (sd.n > 0)
    fail(ErrorCode::kInfeasibleCertificate,
         "nu = 0 requires a non-defective R_mu, but the maximal defect is n = " +
             std::to_string(sd.n) + "; choose nu > 0");
  bool diagonalizable = true;
  for (const auto& cl : sd.eigenvalues)
    if (cl.max_block > 1) diagonalizable = false;
  if (diagonalizable) {
    Eigen::EigenSolver<Matrix> es(Matrix(C.transpose()), true);
    CMatrix P = CMatrix::Zero(d, d);
    for (int j = 0; j < d; ++j) {
      CVector w = es.eigenvectors().col(j);
      w /= w.norm();
      P += w * w.adjoint();
    }
    try {
      return finish_certificate(C, P.real(), lambda, nu, tolerance);
    } catch (const Error&) {
      // nearly dependent eigenvectors; fall through to the block construction
    }
  }
  return finish_certificate(C, block_certificate(C, sd), lambda, nu, tolerance);
}

// ---------------------------------------------------------------- exponent

Matrix matrix_exponential(const Matrix& A, double t) {
  require_square(A, "A");
  require_finite(A, "A");
  if (!std::isfinite(t)) fail(ErrorCode::kInvalidInput, "t must be finite");
  const Matrix At = A * t;
  Matrix E = At.exp();
  if (!E.allFinite())
    fail(ErrorCode::kRange, "matrix exponential overflow for ||A t|| too large");
  return E;
}

}  // namespace hd
