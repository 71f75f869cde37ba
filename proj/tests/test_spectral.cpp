#include <cmath>

#include <gtest/gtest.h>

#include "spectral.hpp"

namespace hd {
namespace {

Matrix M2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Matrix normalized_drift(const Matrix& D, const Matrix& C) {
  return normalize_system(make_system(D, C)).C_tilde;
}

TEST(GeneratorBlocks, DegreeOneIsMinusC) {
  for (const Matrix& C : {M2(1, 1, -1, 1), normalized_drift(Matrix::Identity(2, 2),
                                                            M2(1, 1, 0, 1))}) {
    const GeneratorMatrix gen = build_generator_matrix(C, 3);
    EXPECT_LE((gen.block(1) + C).norm(), 1e-14);
    EXPECT_LE(std::abs(gen.block(0)(0, 0)), 1e-15);
  }
}

TEST(GeneratorBlocks, BlockDiagonal) {
  const Matrix C = M2(1, 2, -2, 1);
  const GeneratorMatrix gen = build_generator_matrix(C, 4);
  Matrix off = gen.G;
  for (int m = 0; m <= 4; ++m) {
    const int o = degree_offset(2, m), n = static_cast<int>(gen.block(m).rows());
    off.block(o, o, n, n).setZero();
  }
  EXPECT_LE(off.norm(), 1e-13);
}

TEST(VmSpectrum, ReferenceSystems) {
  const std::vector<Matrix> systems = {
      normalized_drift(Matrix::Identity(2, 2), Matrix::Identity(2, 2)),
      normalized_drift(Matrix::Identity(2, 2), M2(1, 1, 0, 1)),
      normalized_drift(Matrix::Identity(2, 2), M2(1, 0, 0, 2))};
  for (const Matrix& C : systems) {
    const GeneratorMatrix gen = build_generator_matrix(C, 3);
    const VmSpectrumReport rep = check_Vm_spectrum(C, gen, 3);
    EXPECT_TRUE(rep.ok) << rep.summary();
    ASSERT_EQ(rep.blocks.size(), 4u);
    for (const auto& b : rep.blocks) {
      EXPECT_LE(b.cluster_deviation, 1e-8) << b.detail;
      EXPECT_NEAR(b.min_decay, b.m * rep.mu, 1e-8);
    }
  }
}

TEST(VmSpectrum, PredictedValuesForDiagonalDrift) {
  // C = diag(1, 2): degree-2 eigenvalues are -{2, 3, 4}.
  const Matrix C = normalized_drift(Matrix::Identity(2, 2), M2(1, 0, 0, 2));
  const VmSpectrumReport rep = check_Vm_spectrum(C, build_generator_matrix(C, 2), 2);
  std::vector<double> pred;
  for (const auto& z : rep.blocks[2].predicted) pred.push_back(z.real());
  std::sort(pred.begin(), pred.end());
  ASSERT_EQ(pred.size(), 3u);
  EXPECT_NEAR(pred[0], -4, 1e-12);
  EXPECT_NEAR(pred[1], -3, 1e-12);
  EXPECT_NEAR(pred[2], -2, 1e-12);
}

TEST(VmSpectrum, ComplexDrift3d) {
  Matrix C(3, 3);
  C << 1, 2, 0, -2, 1, 0.5, 0, -0.5, 2;
  const GeneratorMatrix gen = build_generator_matrix(C, 3);
  EXPECT_TRUE(check_Vm_spectrum(C, gen, 3).ok);
}

TEST(VmSpectrum, DegreeNotCovered) {
  const Matrix C = Matrix::Identity(2, 2);
  try {
    check_Vm_spectrum(C, build_generator_matrix(C, 2), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParameter);
  }
}

TEST(Decomposition, SplitsOffDegreeOne) {
  GaussianMixture g(2);
  Vector m(2);
  m << 0.4, -0.2;
  g.add(1.0, m, Matrix::Identity(2, 2));
  const DensityState f = DensityState::from_mixture(g);
  const Decomposition dec = decompose(f);
  EXPECT_NEAR(dec.f1.coefficient({1, 0}), 0.4, 1e-14);
  EXPECT_NEAR(dec.f1.coefficient({0, 1}), -0.2, 1e-14);
  EXPECT_NEAR(dec.f1.mass(), 0.0, 1e-15);
  // f2 has no V_1 component and keeps the mass
  EXPECT_LE(project_V1(dec.f2).norm(), 1e-14);
  EXPECT_NEAR(dec.f2.mass(), 1.0, 1e-14);
}

TEST(V1Evolution, DecaysAtSpectralGap) {
  const Matrix C = normalized_drift(Matrix::Identity(2, 2), M2(1, 1, 0, 1));
  V1Coefficients a0;
  a0.a = Vector::Ones(2);
  const SpectralData sd = analyze_drift_spectrum(C);
  for (double t : {0.0, 1.0, 5.0, 10.0}) {
    const double env = sd.c_tilde * (1 + std::pow(t, sd.n)) * std::exp(-sd.mu * t) * a0.norm();
    EXPECT_LE(evolve_V1(a0, C, t).norm(), env);
  }
  try {
    evolve_V1(a0, C, -1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParameter);
  }
}

}  // namespace
}  // namespace hd
